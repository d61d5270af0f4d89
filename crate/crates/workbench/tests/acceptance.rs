//! Acceptance run: one PASS/FAIL line per criterion, then a nonzero exit if
//! any failed. Runs without the libtest harness so the lines always print.

use std::collections::BTreeMap;
use std::process::Command as Process;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recollement_core::derived::{derived_hom, derived_hom_set, ResolveOptions};
use recollement_core::dg::{is_acyclic, DgAlgebra};
use recollement_core::kernel::{smith, DegreeWindow, Domain, Matrix, Scalar};
use recollement_core::localization::{ext_group, hom_group, invertibility_criterion, LocAbGroup};
use recollement_core::recollement::builtins::residue;
use recollement_core::recollement::{build_recollement, generate_testset};
use recollement_workbench::report::{Outcome, Report};
use recollement_workbench::run::{PREDICATE_CLASS_I, PREDICATE_CLASS_III};
use recollement_workbench::{load_scenario, run, Command, Flags};
use serde_json::Value;

#[path = "../../core/tests/common/mod.rs"]
mod core_common;
use core_common::brute::{
    as_group, brute_ext_profile, brute_hom_profile, groups_up_to, naive_invariant_factors, profile_of,
};
use core_common::random_complex;

type Verdict = Result<String, String>;

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn cli_json(args: &[&str]) -> Result<(i32, Value), String> {
    let out = Process::new(env!("CARGO_BIN_EXE_recollement")).args(args).output().map_err(|e| e.to_string())?;
    let v = serde_json::from_slice(&out.stdout).map_err(|e| format!("{args:?}: {e}"))?;
    Ok((out.status.code().unwrap_or(-1), v))
}

fn verify(name: &str) -> Result<Report, String> {
    let s = load_scenario(name).map_err(|e| e.to_string())?;
    run(Command::Verify, &s, &Flags::default()).map_err(|e| e.to_string())
}

/// Check `z-example`: all four conditions, with the specific certificates.
fn integer_example_conditions() -> Verdict {
    let start = Instant::now();
    let (code, report) = cli_json(&["check", "z-example", "--json"])?;
    let elapsed = start.elapsed();
    let c = &report["conditions"];
    ensure(code == 0 && report["outcome"] == "certified", || format!("outcome {} (exit {code})", report["outcome"]))?;
    let perp = &c["b_in_cperp"];
    let degrees = perp["per_degree"].as_object().ok_or("no per-degree groups")?;
    ensure(perp["window"] == serde_json::json!([-8, 8]) && degrees.len() == 17, || {
        format!("window {}", perp["window"])
    })?;
    ensure(degrees.values().all(|g| g == "0"), || format!("RHom(Z/2, Z[1/2]) not acyclic: {degrees:?}"))?;
    ensure(c["compact_c"]["ledger_size"] == 2, || format!("ledger {}", c["compact_c"]["ledger_size"]))?;
    ensure(c["selfcompact_b"]["evidence"]["route"] == "localization-descent", || "self-compactness route".into())?;
    ensure(c["joint_perp_zero"]["evidence"]["strategy"] == "hereditary-localization", || "joint route".into())?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("RHom acyclic on -8..8, ledger 2, descent, hereditary trace; {elapsed:.2?}"))
}

/// `Ext*(Z/2, Z/2)` from the long exact sequence of `0 → Z --2--> Z → Z/2 → 0`
/// under `Hom(-, Z/2)`: `Ext⁰ = ker`, `Ext¹ = coker` of multiplication by 2
/// on `Hom(Z, Z/2)`, both counted element by element.
fn ext_by_long_exact_sequence() -> Result<Vec<(i32, String)>, String> {
    let hom =
        hom_group(&LocAbGroup::new(1, &[], Default::default()), &LocAbGroup::cyclic(2)).map_err(|e| e.to_string())?;
    let order: u64 = hom.order().ok_or("Hom(Z, Z/2) is infinite")?.try_into().map_err(|_| "order overflows")?;
    let times2: Vec<u64> = (0..order).map(|x| (2 * x) % order).collect();
    let kernel = times2.iter().filter(|&&y| y == 0).count() as u64;
    let image = times2.iter().collect::<std::collections::BTreeSet<_>>().len() as u64;
    let name = |n: u64| if n == 1 { None } else { Some(format!("Z/{n}")) };
    Ok([(0, name(kernel)), (1, name(order / image))].into_iter().filter_map(|(d, g)| g.map(|g| (d, g))).collect())
}

fn integer_example_recovery() -> Verdict {
    let oracle = ext_by_long_exact_sequence()?;
    ensure(oracle == vec![(0, "Z/2".to_string()), (1, "Z/2".to_string())], || format!("oracle gave {oracle:?}"))?;
    let (code, report) = cli_json(&["build", "z-example", "--json"])?;
    ensure(code == 0, || format!("build exit {code}"))?;
    let build = &report["build"];
    let recovery = build["recovery"].as_array().ok_or("no recovery witnesses")?;
    ensure(recovery.len() == 2 && recovery.iter().all(|w| w["quasi_iso"] == true), || format!("{recovery:?}"))?;
    let f = build["algebras"].as_array().and_then(|a| a.iter().find(|x| x["name"] == "F")).ok_or("no F")?;
    let h: Vec<(i32, String)> = serde_json::from_value(f["cohomology"].clone()).map_err(|e| e.to_string())?;
    ensure(h == oracle, || format!("H*(F) = {h:?}, oracle {oracle:?}"))?;
    Ok(format!("i_*(S) ≅ B and j_!(T) ≅ C; H*(F) = Ext*(Z/2, Z/2) = {h:?}"))
}

fn axiom_suite(reports: &BTreeMap<&str, Report>, elapsed: Duration) -> Verdict {
    let mut lines = Vec::new();
    for name in ["z-example", "keller-free", "a2-quiver"] {
        let r = &reports[name];
        let v = r.verify.as_ref().ok_or_else(|| format!("{name}: no scorecard"))?;
        let r_side = v.testset.get("R-side").map_or(0, Vec::len);
        ensure(r.outcome == Outcome::Pass && v.passed == v.checks, || {
            format!("{name}: {}/{} ({:?})", v.passed, v.checks, v.failures.first())
        })?;
        ensure(r_side >= 20, || format!("{name}: only {r_side} objects"))?;
        lines.push(format!("{name} {}/{}", v.passed, v.checks));
    }
    let m = &reports["mutation-negative"];
    let failed = m.verify.as_ref().map_or(0, |v| v.checks - v.passed);
    ensure(m.outcome == Outcome::Fail && failed > 0, || "the mutated scenario passed".into())?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{}; mutation-negative fails {failed}; {elapsed:.2?}", lines.join(", ")))
}

fn predicate_agreement(reports: &BTreeMap<&str, Report>) -> Verdict {
    let mut lines = Vec::new();
    for name in ["z-example", "keller-free", "a2-quiver"] {
        let v = reports[name].verify.as_ref().ok_or("no scorecard")?;
        for class in [PREDICATE_CLASS_I, PREDICATE_CLASS_III] {
            let (passed, total) = v.per_axiom.get(class).copied().unwrap_or((0, 0));
            ensure(total >= 20 && passed == total, || format!("{name} {class}: {passed}/{total}"))?;
        }
        ensure(v.predicates.iter().all(|p| p.class_i_agrees() && p.class_iii_agrees()), || {
            format!("{name}: disagreement")
        })?;
        lines.push(format!("{name} {}", v.predicates.len()));
    }
    Ok(format!("classes (i) and (iii) agree on every object: {}", lines.join(", ")))
}

fn oracles() -> Verdict {
    let groups = groups_up_to(16);
    let mut pairs = 0;
    for a in &groups {
        for b in &groups {
            let (ga, gb) = (as_group(a), as_group(b));
            let hom = hom_group(&ga, &gb).map_err(|e| e.to_string())?;
            let ext = ext_group(&ga, &gb).map_err(|e| e.to_string())?;
            ensure(profile_of(&hom, 16) == brute_hom_profile(a, b, 16), || format!("Hom({ga}, {gb})"))?;
            ensure(profile_of(&ext, 16) == brute_ext_profile(a, b, 16), || format!("Ext({ga}, {gb})"))?;
            pairs += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..200 {
        let (m, n) = (rng.gen_range(1..=5usize), rng.gen_range(1..=5usize));
        let a: Vec<Vec<i64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let rows: Vec<&[i64]> = a.iter().map(Vec::as_slice).collect();
        let s = smith(&Domain::Integer, &Matrix::from_i64(&rows));
        let naive: Vec<Scalar> =
            naive_invariant_factors(&a).into_iter().map(|v| Scalar::from_int(BigInt::from(v))).collect();
        ensure(s.diag == naive, || format!("Smith form of {a:?}"))?;
    }
    let alg = Arc::new(DgAlgebra::ground(Domain::Integer));
    let opts = ResolveOptions::with_window(DegreeWindow::new(-8, 8).expect("window"));
    for _ in 0..100 {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let x = random_complex(&mut rng, &alg, Some(p));
        let zp = residue(&alg, p as i64).map_err(|e| e.to_string())?;
        let acyclic = derived_hom(&zp, &x, &opts).and_then(|h| is_acyclic(h.module())).map_err(|e| e.to_string())?;
        let by_sets = (-6..=6).try_fold(true, |ok, l| derived_hom_set(&zp, &x, l, &opts).map(|g| ok && g.is_zero()));
        let criterion = invertibility_criterion(&x, p).map_err(|e| e.to_string())?.pass();
        ensure(acyclic == criterion && by_sets.map_err(|e| e.to_string())? == criterion, || format!("p = {p}, {x:?}"))?;
    }
    Ok(format!("{} group pairs, 200 Smith forms, 100 complexes", pairs))
}

fn structure() -> Verdict {
    let mut checked = 0;
    for name in ["z-example", "keller-free", "a2-quiver", "mutation-negative"] {
        let s = load_scenario(name).map_err(|e| e.to_string())?;
        let inst = s.instantiate().map_err(|e| e.to_string())?;
        let opts = ResolveOptions::with_window(inst.window);
        // the construction itself; the mutated copy is the negative control
        let data = build_recollement(&inst.b, &inst.c, &opts, false).map_err(|e| e.to_string())?;
        for (label, a) in data.algebras() {
            let r = a.check();
            checked += r.checked;
            ensure(r.ok(), || format!("{name} {label}: {:?}", r.failures))?;
        }
        let testset = generate_testset(&data, inst.seed, inst.testset_size, &inst.extras).map_err(|e| e.to_string())?;
        let objects = data.objects().into_iter().chain(
            [&testset.r_side, &testset.s_side, &testset.t_side]
                .into_iter()
                .flatten()
                .map(|o| (o.label.clone(), o.module.clone())),
        );
        for (label, m) in objects {
            let r = m.check();
            checked += r.checked;
            ensure(r.ok(), || format!("{name} {label}: {:?}", r.failures))?;
        }
    }
    Ok(format!("{checked} identities (d² = 0, Leibniz, associativity, bimodule) hold"))
}

fn timed(label: &'static str, f: impl FnOnce() -> Verdict) -> (&'static str, Verdict, Duration) {
    let start = Instant::now();
    let v = f();
    (label, v, start.elapsed())
}

fn main() {
    const AXIOMS: &str = "3 axiom suite on seed-0 testsets";
    const PREDICATES: &str = "4 essential-image predicates agree";
    let mut results = vec![
        timed("1 integer example: four conditions certified", integer_example_conditions),
        timed("2 recovery and H*(F) = Ext*(Z/2, Z/2)", integer_example_recovery),
    ];
    let start = Instant::now();
    let reports: Result<BTreeMap<&str, Report>, String> =
        ["z-example", "keller-free", "a2-quiver", "mutation-negative"]
            .into_iter()
            .map(|n| Ok((n, verify(n)?)))
            .collect();
    let elapsed = start.elapsed();
    match &reports {
        Ok(reports) => {
            results.push((AXIOMS, axiom_suite(reports, elapsed), elapsed));
            results.push(timed(PREDICATES, || predicate_agreement(reports)));
        }
        Err(e) => {
            results.push((AXIOMS, Err(e.clone()), elapsed));
            results.push((PREDICATES, Err(e.clone()), Duration::ZERO));
        }
    }
    results.push(timed("5 oracle equivalence", oracles));
    results.push(timed("6 structural identities", structure));
    let mut all = true;
    for (label, v, t) in &results {
        match v {
            Ok(detail) => println!("PASS  criterion {label}: {detail} [{t:.2?}]"),
            Err(why) => {
                all = false;
                println!("FAIL  criterion {label}: {why} [{t:.2?}]");
            }
        }
    }
    if !all {
        std::process::exit(1);
    }
}
