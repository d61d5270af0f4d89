//! The command line: exit codes, determinism, replay and the worked
//! scenarios.

use recollement_core::recollement::Status;
use recollement_workbench::report::Outcome;
use recollement_workbench::{load_scenario, run, Command, Flags, Scenario};
use serde_json::{json, Value};

mod common;
use common::{cli, integer_variant, write_scenario, write_temp};

fn statuses(report_json: &str) -> Value {
    serde_json::from_str::<Value>(report_json).unwrap()["conditions"].clone()
}

#[test]
fn shipped_scenarios_exit_as_expected() {
    for name in ["z-example", "keller-free", "a2-quiver"] {
        for cmd in ["check", "build", "verify"] {
            let out = cli(&[cmd, name]);
            assert_eq!(out.code, 0, "{cmd} {name}: {}{}", out.stdout, out.stderr);
        }
    }
    assert_eq!(cli(&["check", "mutation-negative"]).code, 0);
    let verify = cli(&["verify", "mutation-negative"]);
    assert_eq!(verify.code, 1);
    assert!(verify.stdout.contains("FAILED"));
}

#[test]
fn usage_and_parse_errors_exit_3() {
    assert_eq!(cli(&[]).code, 3);
    assert_eq!(cli(&["frobnicate", "z-example"]).code, 3);
    assert_eq!(cli(&["check"]).code, 3);
    assert_eq!(cli(&["check", "no-such-scenario.json"]).code, 3);
    assert_eq!(cli(&["check", "z-example", "--window", "3"]).code, 3);
    assert_eq!(cli(&["check", "z-example", "--seed", "minus-one"]).code, 3);
    let broken = write_temp("broken.json", "{ \"schema\": 1, ");
    let out = cli(&["check", broken.to_str().unwrap()]);
    assert_eq!(out.code, 3);
    assert!(out.stderr.contains("line"), "{}", out.stderr);
    assert_eq!(cli(&["--help"]).code, 0);
    assert_eq!(cli(&["--version"]).code, 0);
}

#[test]
fn unknown_strategy_and_malformed_hint_are_usage_errors() {
    let mut v = common::builtin_value("z-example");
    v["name"] = "bad-strategy".into();
    v["strategies"]["joint"] = "telepathy".into();
    let out = cli(&["check", write_scenario(&v).to_str().unwrap()]);
    assert_eq!(out.code, 3);
    assert!(out.stderr.contains("telepathy"), "{}", out.stderr);

    let mut v = common::builtin_value("z-example");
    v["name"] = "bad-hint".into();
    v["hints"]["localization-descent"]["invert"] = json!(["4"]);
    let out = cli(&["check", write_scenario(&v).to_str().unwrap()]);
    assert_eq!(out.code, 3, "{}", out.stderr);
}

#[test]
fn b_and_c_both_the_ring_fail_only_perpendicularity() {
    let v = integer_variant(
        "ring-twice",
        json!({"kind": "free"}),
        json!({"kind": "free"}),
        json!({"joint": "finite-build"}),
    );
    let out = cli(&["check", write_scenario(&v).to_str().unwrap(), "--json"]);
    assert_eq!(out.code, 1);
    let report: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report["outcome"], "refuted");
    let s = Scenario::parse(&serde_json::to_string(&v).unwrap()).unwrap();
    let c = run(Command::Check, &s, &Flags::default()).unwrap().conditions.unwrap();
    let st: Vec<Status> = c.statuses().into_iter().map(|(_, s)| s).collect();
    assert_eq!(st, vec![Status::Certified, Status::Certified, Status::Refuted, Status::Certified]);
}

#[test]
fn two_residue_classes_fail_perpendicularity_in_degree_zero() {
    let z2 = json!({"kind": "residue", "n": "2"});
    let v = integer_variant("z2-twice", z2.clone(), z2, json!({"joint": "finite-build", "depth": "2"}));
    let out = cli(&["check", write_scenario(&v).to_str().unwrap(), "--json"]);
    assert_eq!(out.code, 1);
    let perp = &statuses(&out.stdout)["b_in_cperp"];
    assert_eq!(perp["passed"], false);
    assert_eq!(perp["per_degree"]["0"], "Z/2");
}

#[test]
fn non_generator_with_b_zero_is_refuted_by_a_localization_witness() {
    let strategies = json!({
        "joint": "witness",
        "witness": {"label": "Z[1/2]", "module": {"kind": "localization", "invert": ["2"]}}
    });
    let v =
        integer_variant("not-a-generator", json!({"kind": "zero"}), json!({"kind": "residue", "n": "2"}), strategies);
    let path = write_scenario(&v);
    let out = cli(&["check", path.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("witness Z[1/2]"), "{}", out.stdout);
    // the construction refuses to run on refuted conditions
    let out = cli(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("needs all four conditions"));
}

#[test]
fn keller_reduction_for_the_integers_and_a_shift() {
    let z = json!({"kind": "free"});
    let c = json!({"kind": "sum", "summands": [z.clone(), {"kind": "shift", "by": "1", "of": z}]});
    let v = integer_variant("keller-integers", json!({"kind": "zero"}), c, json!({"joint": "finite-build"}));
    let s = Scenario::parse(&serde_json::to_string(&v).unwrap()).unwrap();
    let build = run(Command::Build, &s, &Flags::default()).unwrap();
    assert_eq!(build.outcome, Outcome::Pass);
    // End(Z ⊕ ΣZ): the 2 × 2 pattern Z, Z in degree 0 and one Z each in degrees ±1
    let f = &build.build.as_ref().unwrap().algebras[1];
    let expected: Vec<(i32, String)> = vec![(-1, "Z".into()), (0, "Z^2".into()), (1, "Z".into())];
    assert_eq!(f.cohomology, expected);
    let verify = run(Command::Verify, &s, &Flags::default()).unwrap();
    let summary = verify.verify.as_ref().unwrap();
    assert_eq!(summary.passed, summary.checks, "{:?}", summary.failures);
    assert!(summary.per_axiom.keys().any(|k| k.starts_with("counit j_! j^*")));
}

#[test]
fn reports_are_deterministic() {
    for args in
        [["verify", "z-example", "--json"], ["verify", "a2-quiver", "--json"], ["build", "keller-free", "--json"]]
    {
        let (a, b) = (cli(&args), cli(&args));
        assert_eq!(a.stdout, b.stdout);
        let text: Vec<&str> = args[..2].to_vec();
        assert_eq!(cli(&text).stdout, cli(&text).stdout);
    }
}

#[test]
fn seed_and_window_flags_take_effect() {
    let s = load_scenario("a2-quiver").unwrap();
    let seeded = |seed| {
        let flags = Flags { seed: Some(seed), ..Flags::default() };
        run(Command::Verify, &s, &flags).unwrap().verify.unwrap().testset
    };
    assert_eq!(seeded(3), seeded(3));
    assert_ne!(seeded(0), seeded(3));
    let out = cli(&["check", "z-example", "--window", "-3..3", "--json"]);
    let report: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report["window"], "-3..3");
    assert_eq!(report["conditions"]["b_in_cperp"]["per_degree"].as_object().unwrap().len(), 7);
}

#[test]
fn depth_flag_bounds_the_build_search() {
    let out = cli(&["check", "a2-quiver", "--depth", "0"]);
    assert_eq!(out.code, 2, "{}", out.stdout);
    assert_eq!(cli(&["check", "a2-quiver", "--depth", "3"]).code, 0);
}

#[test]
fn window_limited_runs_past_uncertified_conditions() {
    let v = integer_variant(
        "no-hint",
        json!({"kind": "localization", "invert": ["2"]}),
        json!({"kind": "residue", "n": "2"}),
        json!({"joint": "hereditary-localization"}),
    );
    let path = write_scenario(&v);
    assert_eq!(cli(&["check", path.to_str().unwrap()]).code, 2);
    assert_eq!(cli(&["build", path.to_str().unwrap()]).code, 2);
    let out = cli(&["build", path.to_str().unwrap(), "--window-limited"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.contains("window-limited"));
}

#[test]
fn certificates_replay_from_a_saved_report() {
    for name in ["z-example", "keller-free", "a2-quiver"] {
        let saved = cli(&["check", name, "--json"]);
        let path = write_temp(&format!("{name}-evidence.json"), &saved.stdout);
        let out = cli(&["check", name, "--replay", path.to_str().unwrap(), "--json"]);
        assert_eq!(out.code, 0, "{}", out.stdout);
        let report: Value = serde_json::from_str(&out.stdout).unwrap();
        let lines = report["replay"].as_array().unwrap();
        assert_eq!(lines.len(), 4);
        assert!(lines.iter().all(|l| l["passed"] == true), "{lines:?}");
        // a build can be gated on replayed evidence too
        assert_eq!(cli(&["build", name, "--replay", path.to_str().unwrap()]).code, 0);
    }
}

#[test]
fn tampered_evidence_fails_replay() {
    let saved = cli(&["check", "z-example", "--json"]);
    let mut v: Value = serde_json::from_str(&saved.stdout).unwrap();
    let compact = &mut v["conditions"]["compact_c"];
    assert_eq!(compact["verdict"], "certificate");
    let comparison = compact["comparison"].as_array_mut().unwrap();
    comparison[0][2] = "3".into();
    let path = write_temp("z-tampered.json", &v.to_string());
    let out = cli(&["check", "z-example", "--replay", path.to_str().unwrap()]);
    assert_eq!(out.code, 1, "{}", out.stdout);
    assert!(out.stdout.contains("[FAILED] C is compact"), "{}", out.stdout);

    let mut v: Value = serde_json::from_str(&saved.stdout).unwrap();
    let trace = v["conditions"]["joint_perp_zero"]["evidence"]["trace"].as_array_mut().unwrap();
    trace.pop();
    let path = write_temp("z-tampered-trace.json", &v.to_string());
    assert_eq!(cli(&["check", "z-example", "--replay", path.to_str().unwrap()]).code, 1);

    let garbage = write_temp("garbage.json", "{\"scenario\": \"z-example\"}");
    assert_eq!(cli(&["check", "z-example", "--replay", garbage.to_str().unwrap()]).code, 3);
}
