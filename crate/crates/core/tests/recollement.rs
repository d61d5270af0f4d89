use std::sync::Arc;

use recollement_core::derived::ResolveOptions;
use recollement_core::dg::constructions::is_quasi_iso;
use recollement_core::dg::{cohomology, is_acyclic, DgModule};
use recollement_core::recollement::builtins::{a2_quiver, keller_free, z_example, Triple};
use recollement_core::recollement::{
    build_recollement, evaluate_functor, generate_testset, keller_reduction_check, main2_predicates,
    verify_recollement, Functor, PerpRoute, RecollementData, Scorecard, Testset,
};

fn summary(m: &DgModule) -> Vec<(i32, String)> {
    cohomology(m).unwrap().summary().into_iter().map(|(n, g)| (n, g.to_string())).collect()
}

fn build(t: &Triple) -> RecollementData {
    build_recollement(&t.b, &t.c, &ResolveOptions::default(), false).unwrap()
}

#[test]
fn z_example_builds_with_ext_algebra() {
    let d = build(&z_example().unwrap());
    assert!(d.recovery.iter().all(|w| w.quasi_iso));
    let reg = DgModule::free(d.f.algebra.clone(), d.f.algebra.domain().clone()).unwrap();
    assert_eq!(summary(&reg), vec![(0, "Z/2".to_string()), (1, "Z/2".to_string())]);
    assert!(d.glued());
}

#[test]
fn keller_and_a2_build_with_bimodule_model() {
    for t in [keller_free().unwrap(), a2_quiver().unwrap()] {
        let d = build(&t);
        assert!(d.recovery.iter().all(|w| w.quasi_iso), "{:?}", d.recovery);
        assert!(!d.glued(), "{:?}", d.j_lower);
        for (name, m) in d.objects() {
            assert!(m.check().ok(), "{name}: {:?}", m.check().failures);
        }
    }
}

#[test]
fn functor_values_on_z_example() {
    let d = build(&z_example().unwrap());
    let s = Arc::new(DgModule::free(d.s.clone(), d.s.domain().clone()).unwrap());
    let is = evaluate_functor(&d, Functor::ILowerStar, &s).unwrap();
    let jis = evaluate_functor(&d, Functor::JUpperStar, &is).unwrap();
    assert!(is_acyclic(&jis).unwrap());
    let t = Arc::new(DgModule::free(d.t.clone(), d.t.domain().clone()).unwrap());
    let jt = evaluate_functor(&d, Functor::JLowerStar, &t).unwrap();
    assert!(jt.check().ok());
    // i^* C = 0 since C = j_! T
    let ist = evaluate_functor(&d, Functor::IUpperStar, &d.c.clone()).unwrap();
    assert!(is_acyclic(&ist).unwrap(), "{:?}", summary(&ist));
}

fn verify_seed0(t: &Triple) -> (RecollementData, Testset, Scorecard) {
    let d = build(t);
    let ts = generate_testset(&d, 0, 20, &[]).unwrap();
    let card = verify_recollement(&d, &ts);
    (d, ts, card)
}

fn assert_all_pass(label: &str, card: &Scorecard) {
    let failures: Vec<String> = card.failures().map(|f| format!("[{}] {}: {}", f.axiom, f.object, f.detail)).collect();
    assert!(failures.is_empty(), "{label}: {failures:#?}");
}

#[test]
fn z_example_passes_every_axiom() {
    let (_, ts, card) = verify_seed0(&z_example().unwrap());
    assert!(ts.len() >= 20);
    assert_all_pass("z-example", &card);
}

#[test]
fn keller_free_passes_every_axiom() {
    let (d, ts, card) = verify_seed0(&keller_free().unwrap());
    assert_all_pass("keller-free", &card);
    let reduction = keller_reduction_check(&d, &ts).unwrap();
    assert_all_pass("keller reduction", &reduction);
}

#[test]
fn a2_quiver_passes_every_axiom() {
    let (_, _, card) = verify_seed0(&a2_quiver().unwrap());
    assert_all_pass("a2-quiver", &card);
}

#[test]
fn bimodule_unit_is_an_iso_on_the_ring() {
    let d = build(&keller_free().unwrap());
    let x = Arc::new(DgModule::free(d.r.clone(), d.r.domain().clone()).unwrap());
    let (eta, _, _) = d.bimodule_unit(&x).unwrap();
    assert!(eta.check().ok());
    assert!(is_quasi_iso(&eta).unwrap());
}

#[test]
fn every_single_constant_mutation_is_detected() {
    for t in [z_example().unwrap(), keller_free().unwrap(), a2_quiver().unwrap()] {
        let d = build(&t);
        let ts = generate_testset(&d, 0, 20, &[]).unwrap();
        let n = d.f.algebra.dim();
        for a in 0..n {
            for r in 0..n {
                for c in 0..n {
                    for delta in [1, -1] {
                        let m = d.mutated_at((a, r, c), delta).unwrap();
                        let card = verify_recollement(&m, &ts.rebound(&m.t));
                        assert!(!card.passed(), "({a}, {r}, {c}) {delta:+} survived");
                    }
                }
            }
        }
    }
}

#[test]
fn membership_predicates_agree_on_every_generated_object() {
    for t in [z_example().unwrap(), keller_free().unwrap(), a2_quiver().unwrap()] {
        let d = build(&t);
        let ts = generate_testset(&d, 0, 20, &[]).unwrap();
        assert!(ts.r_side.len() >= 20);
        for o in &ts.r_side {
            let v = main2_predicates(&d, &o.label, &o.module).unwrap();
            assert!(v.class_i_agrees() && v.class_iii_agrees(), "{v:?}");
        }
    }
}

#[test]
fn membership_of_named_objects_on_z_example() {
    let d = build(&z_example().unwrap());
    let zero = Arc::new(DgModule::zero(d.r.clone(), d.r.domain().clone()));
    let v = main2_predicates(&d, "0", &zero).unwrap();
    assert!(v.ker_j_upper && v.c_perp && v.counit_iso && v.ker_i_shriek && v.b_perp && v.unit_iso);
    let v = main2_predicates(&d, "Z[1/2]", &d.b).unwrap();
    assert!(v.ker_j_upper && v.c_perp && v.counit_iso, "{v:?}");
    assert_eq!(v.c_perp_route, PerpRoute::Hereditary);
    let v = main2_predicates(&d, "Z/2", &d.c).unwrap();
    assert!(!v.ker_j_upper && !v.c_perp && !v.counit_iso);
    assert!(v.ker_i_shriek && v.b_perp && v.unit_iso);
}

#[test]
fn the_ring_is_in_no_i_side_class() {
    let d = build(&a2_quiver().unwrap());
    let r = Arc::new(DgModule::free(d.r.clone(), d.r.domain().clone()).unwrap());
    let v = main2_predicates(&d, "R", &r).unwrap();
    assert!(!v.ker_j_upper && !v.c_perp && !v.counit_iso);
}
