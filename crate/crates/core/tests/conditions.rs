use std::sync::Arc;

use recollement_core::derived::ResolveOptions;
use recollement_core::dg::{direct_sum, shift, DgAlgebra, DgModule};
use recollement_core::error::Error;
use recollement_core::kernel::{DegreeWindow, Domain};
use recollement_core::recollement::build_tree::BuildStep;
use recollement_core::recollement::builtins::{a2_quiver, keller_free, localization, residue, simple, z_example};
use recollement_core::recollement::conditions::{
    CompactVerdict, DescentHint, JointEvidence, JointVerdict, SelfCompactEvidence, SelfCompactVerdict,
};
use recollement_core::recollement::{
    check_b_in_cperp, check_compact, check_conditions, check_joint_perp_zero, check_selfcompact, search_build_tree,
    Hints, JointStrategy, Status,
};

fn window8() -> ResolveOptions {
    ResolveOptions::with_window(DegreeWindow::new(-8, 8).unwrap())
}

fn descent_hint(p: u64) -> Hints {
    Hints { localization_descent: Some(DescentHint { invert: vec![p] }) }
}

fn integers() -> Arc<DgAlgebra> {
    Arc::new(DgAlgebra::ground(Domain::Integer))
}

#[test]
fn residue_class_is_compact_with_two_generators() {
    let z = z_example().unwrap();
    match check_compact(&z.c, &window8()) {
        CompactVerdict::Certificate { ledger_size, .. } => assert_eq!(ledger_size, 2),
        other => panic!("{other:?}"),
    }
    let r = Arc::new(DgModule::free(z.r.clone(), Domain::Integer).unwrap());
    match check_compact(&r, &window8()) {
        CompactVerdict::Certificate { ledger_size, .. } => assert_eq!(ledger_size, 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn residue_field_of_dual_numbers_is_not_certified() {
    let k = keller_free().unwrap();
    let field = simple(&k.r, 0);
    let verdict = check_compact(&field, &ResolveOptions::default());
    let betti = match &verdict {
        CompactVerdict::Refuted { betti, .. } | CompactVerdict::Unknown { betti, .. } => betti.clone(),
        other => panic!("{other:?}"),
    };
    assert!(betti.len() >= 3);
    assert!(betti.iter().all(|&(_, b)| b == 1), "{betti:?}");
}

#[test]
fn localization_is_self_compact_by_descent() {
    let z = z_example().unwrap();
    match check_selfcompact(&z.b, &descent_hint(2), &window8()).unwrap() {
        SelfCompactVerdict::Certificate { evidence: SelfCompactEvidence::LocalizationDescent { unit_checks, .. } } => {
            assert!(unit_checks.iter().all(|u| u.local));
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(check_selfcompact(&z.b, &Hints::default(), &window8()).unwrap().status(), Status::Unknown);
    let r = Arc::new(DgModule::free(z.r.clone(), Domain::Integer).unwrap());
    assert!(matches!(
        check_selfcompact(&r, &Hints::default(), &window8()).unwrap(),
        SelfCompactVerdict::Certificate { evidence: SelfCompactEvidence::CompactnessImplies { .. } }
    ));
}

#[test]
fn malformed_descent_hints_are_rejected() {
    let z = z_example().unwrap();
    assert!(matches!(check_selfcompact(&z.b, &descent_hint(4), &window8()), Err(Error::Hint(_))));
    let empty = Hints { localization_descent: Some(DescentHint { invert: vec![] }) };
    assert!(matches!(check_selfcompact(&z.b, &empty, &window8()), Err(Error::Hint(_))));
    let a2 = a2_quiver().unwrap();
    assert!(matches!(check_selfcompact(&a2.b, &descent_hint(2), &window8()), Err(Error::Hint(_))));
}

#[test]
fn localization_is_right_perpendicular_to_the_residue_class() {
    let z = z_example().unwrap();
    let v = check_b_in_cperp(&z.b, &z.c, &window8(), false).unwrap();
    assert!(v.passed);
    assert_eq!(v.per_degree.len(), 17);
    let zero = Arc::new(DgModule::zero(z.r.clone(), Domain::Integer));
    assert!(check_b_in_cperp(&zero, &z.c, &window8(), false).unwrap().passed);
    let v = check_b_in_cperp(&z.c, &z.c, &window8(), false).unwrap();
    assert!(!v.passed);
    assert!(v.failing_degrees().contains(&0));
    assert_eq!(v.per_degree[&0], "Z/2");
}

#[test]
fn hereditary_localization_certifies_the_integer_example() {
    let z = z_example().unwrap();
    match check_joint_perp_zero(&z.r, &z.b, &z.c, &JointStrategy::HereditaryLocalization, &window8()).unwrap() {
        JointVerdict::Certificate { evidence: JointEvidence::HereditaryLocalization { prime, trace } } => {
            assert_eq!(prime, 2);
            assert!(trace.iter().all(|t| t.checked));
        }
        other => panic!("{other:?}"),
    }
    // the strategy does not apply to other triples
    let a2 = a2_quiver().unwrap();
    let v = check_joint_perp_zero(&a2.r, &a2.b, &a2.c, &JointStrategy::HereditaryLocalization, &window8()).unwrap();
    assert_eq!(v.status(), Status::Unknown);
}

#[test]
fn the_ring_as_a_leaf_builds_at_depth_zero() {
    let r = integers();
    let free = Arc::new(DgModule::free(r.clone(), Domain::Integer).unwrap());
    let c = residue(&r, 3).unwrap();
    match check_joint_perp_zero(&r, &free, &c, &JointStrategy::FiniteBuild { depth: 0 }, &window8()).unwrap() {
        JointVerdict::Certificate { evidence: JointEvidence::FiniteBuild { depth, replay, .. } } => {
            assert_eq!(depth, 0);
            assert!(replay.quasi_iso);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn the_integers_are_a_retract_of_a_sum_with_a_shift() {
    let r = integers();
    let free = Arc::new(DgModule::free(r.clone(), Domain::Integer).unwrap());
    let c = direct_sum(&[free.clone(), Arc::new(shift(&free, 1))], Domain::Integer).unwrap().sum;
    let zero = Arc::new(DgModule::zero(r.clone(), Domain::Integer));
    let tree = search_build_tree(&r, &zero, &c, 6, &window8()).unwrap().expect("R is a summand of C");
    assert!(tree.nodes.iter().any(|n| matches!(n.step, BuildStep::Retract { .. })));
    assert!(tree.replay(&r, &zero, &c, &window8()).unwrap().quasi_iso);
}

#[test]
fn build_search_gives_up_quickly_when_nothing_builds_the_ring() {
    let z = z_example().unwrap();
    let start = std::time::Instant::now();
    let found = search_build_tree(&z.r, &z.c, &z.c, 6, &window8()).unwrap();
    assert!(found.is_none());
    assert!(start.elapsed().as_secs() < 30, "{:?}", start.elapsed());
}

#[test]
fn a2_build_tree_replays_and_tampering_is_caught() {
    let a2 = a2_quiver().unwrap();
    let opts = ResolveOptions::default();
    let tree = search_build_tree(&a2.r, &a2.b, &a2.c, 6, &opts).unwrap().expect("a2 is finitely built");
    assert!(tree.depth() <= 3);
    assert!(tree.replay(&a2.r, &a2.b, &a2.c, &opts).unwrap().quasi_iso);
    let mut bad = tree.clone();
    for node in &mut bad.nodes {
        if let BuildStep::Cone { map, .. } = &mut node.step {
            map.clear();
        }
    }
    let replay = bad.replay(&a2.r, &a2.b, &a2.c, &opts).map(|o| o.quasi_iso).unwrap_or(false);
    assert!(!replay);
}

#[test]
fn localization_refutes_joint_vanishing_for_two_residue_classes() {
    let z = z_example().unwrap();
    let witness = JointStrategy::Witness { label: "Z[1/2]".into(), module: localization(&z.r, 2).unwrap() };
    let v = check_joint_perp_zero(&z.r, &z.c, &z.c, &witness, &window8()).unwrap();
    assert_eq!(v.status(), Status::Refuted);
    // a non-generator C with B = 0: the same witness shows C^⊥ ≠ 0
    let zero = Arc::new(DgModule::zero(z.r.clone(), Domain::Integer));
    assert_eq!(check_joint_perp_zero(&z.r, &zero, &z.c, &witness, &window8()).unwrap().status(), Status::Refuted);
    // a witness outside the perpendiculars refutes nothing
    let inside = JointStrategy::Witness { label: "Z/2".into(), module: z.c.clone() };
    assert_eq!(check_joint_perp_zero(&z.r, &z.c, &z.c, &inside, &window8()).unwrap().status(), Status::Unknown);
}

#[test]
fn strategy_names_parse_or_fail_with_config_errors() {
    assert!(matches!("finite-build".parse::<JointStrategy>(), Ok(JointStrategy::FiniteBuild { depth: 6 })));
    assert!(matches!("hereditary-localization".parse::<JointStrategy>(), Ok(JointStrategy::HereditaryLocalization)));
    assert!(matches!("brute-force".parse::<JointStrategy>(), Err(Error::Config(_))));
}

#[test]
fn shipped_triples_are_fully_certified() {
    let z = z_example().unwrap();
    let rep =
        check_conditions(&z.r, &z.b, &z.c, &descent_hint(2), &JointStrategy::HereditaryLocalization, &window8(), false)
            .unwrap();
    assert_eq!(rep.overall(), Status::Certified, "{rep:?}");
    for t in [keller_free().unwrap(), a2_quiver().unwrap()] {
        let rep = check_conditions(
            &t.r,
            &t.b,
            &t.c,
            &Hints::default(),
            &JointStrategy::FiniteBuild { depth: 6 },
            &window8(),
            false,
        )
        .unwrap();
        assert_eq!(rep.overall(), Status::Certified, "{rep:?}");
    }
}

#[test]
fn certificates_replay_without_search_and_tampering_is_caught() {
    use recollement_core::recollement::replay_conditions;
    let z = z_example().unwrap();
    let opts = window8();
    let rep =
        check_conditions(&z.r, &z.b, &z.c, &descent_hint(2), &JointStrategy::HereditaryLocalization, &opts, false)
            .unwrap();
    let lines = replay_conditions(&z.r, &z.b, &z.c, &rep, &opts);
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l.passed), "{lines:#?}");

    let mut bad = rep.clone();
    if let CompactVerdict::Certificate { comparison, .. } = &mut bad.compact_c {
        comparison[0].2 = "3".into();
    }
    if let SelfCompactVerdict::Certificate { evidence: SelfCompactEvidence::LocalizationDescent { invert, .. } } =
        &mut bad.selfcompact_b
    {
        *invert = vec![3];
    }
    let lines = replay_conditions(&z.r, &z.b, &z.c, &bad, &opts);
    assert!(!lines[0].passed && !lines[1].passed, "{lines:#?}");

    for t in [keller_free().unwrap(), a2_quiver().unwrap()] {
        let strategy = JointStrategy::FiniteBuild { depth: 6 };
        let rep = check_conditions(&t.r, &t.b, &t.c, &Hints::default(), &strategy, &opts, false).unwrap();
        let lines = replay_conditions(&t.r, &t.b, &t.c, &rep, &opts);
        assert!(lines.iter().all(|l| l.passed), "{lines:#?}");
    }
}
