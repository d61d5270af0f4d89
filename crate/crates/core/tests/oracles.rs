//! Engine answers against independent brute-force computations.

use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recollement_core::derived::{derived_hom, derived_hom_set, ResolveOptions};
use recollement_core::dg::{is_acyclic, DgAlgebra};
use recollement_core::kernel::{smith, DegreeWindow, Domain, Matrix, Scalar};
use recollement_core::localization::{ext_group, hom_group, invertibility_criterion, LocAbGroup};
use recollement_core::recollement::builtins::{a2_algebra, projective, residue, simple};

mod common;
use common::brute::{
    as_group, brute_ext, brute_ext_profile, brute_hom_profile, groups_up_to, naive_invariant_factors, profile_of,
};
use common::random_complex;

#[test]
fn hom_and_ext_match_enumeration_up_to_order_16() {
    let groups = groups_up_to(16);
    assert_eq!(groups.len(), 25); // includes the trivial group
    for a in &groups {
        for b in &groups {
            let (ga, gb) = (as_group(a), as_group(b));
            let exp = 16;
            let hom = hom_group(&ga, &gb).unwrap();
            assert_eq!(profile_of(&hom, exp), brute_hom_profile(a, b, exp), "Hom({ga}, {gb}) = {hom}");
            let ext = ext_group(&ga, &gb).unwrap();
            assert_eq!(profile_of(&ext, exp), brute_ext_profile(a, b, exp), "Ext({ga}, {gb}) = {ext}");
        }
    }
}

#[test]
fn hom_from_z4_to_z6_by_set_maps() {
    // all 6^4 set maps, keep the additive ones
    let count = (0..6u64.pow(4))
        .filter(|&code| {
            let f = |x: u64| (code / 6u64.pow(x as u32)) % 6;
            (0..4).all(|x| (0..4).all(|y| f((x + y) % 4) == (f(x) + f(y)) % 6))
        })
        .count();
    let hom = hom_group(&LocAbGroup::cyclic(4), &LocAbGroup::cyclic(6)).unwrap();
    assert_eq!(hom.order().unwrap(), BigInt::from(count));
}

// ---- Smith normal form against determinantal divisors ----

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(m, n)| prop::collection::vec(prop::collection::vec(-9i64..=9, n), m))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn smith_matches_determinantal_divisors(a in small_matrix()) {
        let rows: Vec<&[i64]> = a.iter().map(Vec::as_slice).collect();
        let s = smith(&Domain::Integer, &Matrix::from_i64(&rows));
        let expected: Vec<Scalar> = naive_invariant_factors(&a).into_iter().map(|v| Scalar::from_int(BigInt::from(v))).collect();
        prop_assert_eq!(s.diag, expected);
    }
}

// ---- derived Hom out of ℤ/p against the invertibility criterion ----

#[test]
fn rhom_from_residue_class_vanishes_exactly_when_p_is_invertible() {
    let alg = Arc::new(DgAlgebra::ground(Domain::Integer));
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let opts = ResolveOptions::with_window(DegreeWindow::new(-8, 8).unwrap());
    let mut outcomes = [0usize; 2];
    for _ in 0..100 {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let x = random_complex(&mut rng, &alg, Some(p));
        assert!(x.check().ok());
        let zp = residue(&alg, p as i64).unwrap();
        let acyclic = is_acyclic(derived_hom(&zp, &x, &opts).unwrap().module()).unwrap();
        let by_sets = (-6..=6).all(|l| derived_hom_set(&zp, &x, l, &opts).unwrap().is_zero());
        let criterion = invertibility_criterion(&x, p).unwrap().pass();
        assert_eq!(acyclic, criterion, "p = {p}, X = {x:?}");
        assert_eq!(by_sets, criterion);
        outcomes[criterion as usize] += 1;
    }
    assert!(outcomes[0] > 10 && outcomes[1] > 10, "{outcomes:?}");
}

// ---- Ext tables of the A2 quiver by enumeration ----

#[test]
fn a2_ext_tables_match_enumeration() {
    let alg = a2_algebra().unwrap();
    let objects = [simple(&alg, 0), simple(&alg, 1), projective(&alg, 0).unwrap(), projective(&alg, 1).unwrap()];
    let opts = ResolveOptions::default();
    let mut nonsplit = 0;
    for m in &objects {
        for n in &objects {
            let (hom, ext1) = brute_ext(&alg, m, n);
            let dim = |l| {
                let g = derived_hom_set(m, n, l, &opts).unwrap();
                assert!(g.torsion.is_empty());
                g.free_rank as u32
            };
            assert_eq!(dim(0), hom, "Hom({}, {})", m.name, n.name);
            assert_eq!(dim(-1), ext1, "Ext¹({}, {})", m.name, n.name);
            assert_eq!(dim(-2), 0, "Ext²({}, {})", m.name, n.name);
            assert_eq!(dim(1), 0);
            nonsplit += ext1;
        }
    }
    assert!(nonsplit > 0);
}
