use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use recollement_core::derived::{derived_hom_set, ResolveOptions};
use recollement_core::dg::{cohomology, cone, direct_sum, hom_complex, shift, ChainMap, DgAlgebra, DgModule};
use recollement_core::kernel::{DegreeWindow, Domain};
use recollement_core::recollement::builtins::a2_quiver;
use recollement_core::recollement::data::free_module;
use recollement_core::recollement::{build_recollement, generate_testset, CheckRecord, Scorecard};

mod common;
use common::random_complex;

fn integers() -> Arc<DgAlgebra> {
    Arc::new(DgAlgebra::ground(Domain::Integer))
}

fn complex(seed: u64) -> Arc<DgModule> {
    random_complex(&mut ChaCha8Rng::seed_from_u64(seed), &integers(), None)
}

fn assert_structure(m: &DgModule) -> Result<(), TestCaseError> {
    let rep = m.check();
    prop_assert!(rep.failures.is_empty(), "{}: {:?}", m.name, rep.failures);
    Ok(())
}

fn summary(m: &DgModule) -> Vec<(i32, String)> {
    cohomology(m).unwrap().summary().into_iter().map(|(n, g)| (n, g.to_string())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn constructions_satisfy_the_differential_identities(s1 in any::<u64>(), s2 in any::<u64>(), l in -3i32..=3) {
        let (x, y) = (complex(s1), complex(s2));
        assert_structure(&x)?;
        assert_structure(&shift(&x, l))?;
        assert_structure(&hom_complex(&x, &y).unwrap().module)?;
        let sum = direct_sum(&[x.clone(), y.clone()], Domain::Integer).unwrap();
        assert_structure(&sum.sum)?;
        for (i, p) in sum.inclusions.iter().zip(&sum.projections) {
            prop_assert!(i.check().failures.is_empty() && p.check().failures.is_empty());
        }
        let t = cone(&ChainMap::identity(x.clone())).unwrap();
        assert_structure(&t.z)?;
        prop_assert!(t.v.check().failures.is_empty() && t.w.check().failures.is_empty());
        prop_assert!(summary(&t.z).is_empty(), "cone of the identity is acyclic");
    }

    #[test]
    fn shift_moves_cohomology(seed in any::<u64>(), l in -3i32..=3) {
        let x = complex(seed);
        let shifted: Vec<_> = summary(&shift(&x, l)).into_iter().map(|(n, g)| (n + l, g)).collect();
        prop_assert_eq!(shifted, summary(&x));
    }

    #[test]
    fn maps_from_the_ring_compute_cohomology(seed in any::<u64>(), l in -4i32..=4) {
        let y = complex(seed);
        let r = free_module(y.left_alg().unwrap()).unwrap();
        let opts = ResolveOptions::with_window(DegreeWindow::new(-8, 8).unwrap());
        let hom = derived_hom_set(&r, &Arc::new(shift(&y, l)), 0, &opts).unwrap();
        let h = cohomology(&y).unwrap().summary().remove(&l);
        prop_assert_eq!(hom.to_string(), h.map_or("0".into(), |g| g.to_string()));
    }

    #[test]
    fn scorecard_merge_is_order_independent(
        a in prop::collection::vec(("[ab]", "[xyz]", any::<bool>()), 0..6),
        b in prop::collection::vec(("[ab]", "[xyz]", any::<bool>()), 0..6),
    ) {
        let card = |v: &[(String, String, bool)]| Scorecard {
            records: v.iter().map(|(ax, ob, p)| CheckRecord { axiom: ax.clone(), object: ob.clone(), passed: *p, detail: String::new() }).collect(),
        };
        let (mut ab, mut ba) = (card(&a), card(&b));
        ab.merge(card(&b));
        ba.merge(card(&a));
        let key = |c: &Scorecard| {
            let mut r: Vec<_> = c.records.iter().map(|r| (r.axiom.clone(), r.object.clone(), r.passed)).collect();
            r.sort();
            r
        };
        prop_assert_eq!(key(&ab), key(&ba));
        prop_assert_eq!(ab.passed(), ba.passed());
        prop_assert_eq!(ab.pass_count(), ba.pass_count());
        let keys: Vec<_> = ab.records.iter().map(|r| (&r.axiom, &r.object)).collect();
        prop_assert!(keys.windows(2).all(|w| w[0] <= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 4, ..ProptestConfig::default() })]

    #[test]
    fn testsets_are_seeded_and_well_formed(seed in 0u64..1000) {
        let t = a2_quiver().unwrap();
        let data = build_recollement(&t.b, &t.c, &ResolveOptions::default(), false).unwrap();
        let first = generate_testset(&data, seed, 20, &[]).unwrap();
        let again = generate_testset(&data, seed, 20, &[]).unwrap();
        let labels = |ts: &recollement_core::recollement::Testset| {
            [&ts.r_side, &ts.s_side, &ts.t_side].iter().flat_map(|s| s.iter().map(|o| o.label.clone())).collect::<Vec<_>>()
        };
        prop_assert_eq!(labels(&first), labels(&again));
        prop_assert!(first.r_side.len() >= 20);
        for side in [&first.r_side, &first.s_side, &first.t_side] {
            for o in side {
                assert_structure(&o.module)?;
            }
        }
    }
}
