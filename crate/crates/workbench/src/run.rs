//! The three commands.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use recollement_core::derived::ResolveOptions;
use recollement_core::dg::{cohomology, DgAlgebra, DgModule};
use recollement_core::recollement::data::cohomology_table;
use recollement_core::recollement::verify::Verdict;
use recollement_core::recollement::{
    build_recollement, check_conditions, generate_testset, keller_reduction_check, main2_predicates, replay_conditions,
    verify_recollement, ConditionReport, JLowerModel, JointStrategy, RecollementData, Scorecard, Status,
};

use crate::error::WorkbenchError;
use crate::report::{AlgebraSummary, BuildSummary, Evidence, Outcome, Report, VerifySummary, REPORT_SCHEMA};
use crate::scenario::{Instance, Scenario, Window};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Check,
    Build,
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Build => "build",
            Command::Verify => "verify",
        }
    }
}

/// Command-line overrides of the scenario.
#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub window: Option<String>,
    pub depth: Option<usize>,
    pub seed: Option<u64>,
    pub replay: Option<PathBuf>,
    pub window_limited: bool,
}

pub const PREDICATE_CLASS_I: &str = "Ker j^* = C^⊥ = Ess.Im i_*";
pub const PREDICATE_CLASS_III: &str = "Ker i^! = B^⊥ = Ess.Im j_*";

struct Context {
    scenario: Scenario,
    inst: Instance,
    opts: ResolveOptions,
    flags: Flags,
}

impl Context {
    fn new(scenario: &Scenario, flags: &Flags) -> Result<Context, WorkbenchError> {
        let mut scenario = scenario.clone();
        if let Some(w) = &flags.window {
            scenario.window = Window(recollement_core::kernel::DegreeWindow::parse(w)?);
        }
        if let Some(s) = flags.seed {
            scenario.seed.0 = s;
        }
        let mut inst = scenario.instantiate()?;
        if let (Some(d), JointStrategy::FiniteBuild { depth }) = (flags.depth, &mut inst.strategy) {
            *depth = d;
            inst.depth = d;
        }
        let opts = ResolveOptions::with_window(inst.window);
        Ok(Context { scenario, inst, opts, flags: flags.clone() })
    }

    fn report(&self, command: Command, outcome: Outcome) -> Report {
        Report {
            schema: REPORT_SCHEMA,
            command: command.name().into(),
            scenario: self.scenario.name.clone(),
            window: format!("{}..{}", self.inst.window.lo, self.inst.window.hi),
            outcome,
            conditions: None,
            replay: None,
            build: None,
            verify: None,
            notes: vec![],
        }
    }

    /// Fresh condition checks, or the replay of recorded evidence.
    fn conditions(&self, report: &mut Report) -> Result<Outcome, WorkbenchError> {
        let i = &self.inst;
        let Some(path) = &self.flags.replay else {
            let c = check_conditions(&i.r, &i.b, &i.c, &i.hints, &i.strategy, &self.opts, self.flags.window_limited)?;
            let outcome = Outcome::from_status(c.overall());
            report.conditions = Some(c);
            return Ok(outcome);
        };
        let text = std::fs::read_to_string(path)
            .map_err(|source| WorkbenchError::Io { path: path.display().to_string(), source })?;
        let evidence: Evidence = serde_json::from_str(&text).map_err(|e| WorkbenchError::Parse {
            path: "conditions".into(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if evidence.scenario != self.scenario.name {
            report.notes.push(format!("evidence was recorded for scenario {}", evidence.scenario));
        }
        let lines = replay_conditions(&i.r, &i.b, &i.c, &evidence.conditions, &self.opts);
        let outcome = replay_outcome(&evidence.conditions, &lines);
        report.conditions = Some(evidence.conditions);
        report.replay = Some(lines);
        Ok(outcome)
    }

    /// Conditions gate the construction unless the run is window-limited.
    fn gate(&self, report: &mut Report) -> Result<Option<Outcome>, WorkbenchError> {
        let outcome = self.conditions(report)?;
        if outcome == Outcome::Certified {
            return Ok(None);
        }
        if self.flags.window_limited {
            report.notes.push("conditions not all certified; continuing because of --window-limited".into());
            return Ok(None);
        }
        report.notes.push("the construction needs all four conditions certified (or --window-limited)".into());
        Ok(Some(outcome))
    }

    /// The honest construction, and the one under test (different only when
    /// the scenario mutates a structure constant).
    fn data(&self, report: &mut Report) -> Result<(RecollementData, RecollementData), WorkbenchError> {
        let i = &self.inst;
        let honest = build_recollement(&i.b, &i.c, &self.opts, self.flags.window_limited)?;
        let data = honest.clone();
        let (data, mutation) = match &self.scenario.mutation {
            None => (data, None),
            Some(m) => match m.constant {
                Some((a, r, c)) => (
                    data.mutated_at((a.0, r.0, c.0), m.delta.0)?,
                    Some(format!("F constant ({}, {}, {}) {:+}", a.0, r.0, c.0, m.delta.0)),
                ),
                None if m.delta.0 == 1 => (data.mutated()?, Some("last nonzero constant of F, +1".to_string())),
                None => {
                    let last = last_constant(&data.f.algebra)
                        .ok_or_else(|| WorkbenchError::Scenario("F has no structure constants to corrupt".into()))?;
                    (data.mutated_at(last, m.delta.0)?, Some(format!("last nonzero constant of F, {:+}", m.delta.0)))
                }
            },
        };
        report.build = Some(build_summary(&data, mutation)?);
        Ok((honest, data))
    }
}

fn last_constant(a: &DgAlgebra) -> Option<(usize, usize, usize)> {
    a.mult.iter().enumerate().flat_map(|(x, m)| m.entries().map(move |(r, c, _)| (x, r, c))).last()
}

fn replay_outcome(conditions: &ConditionReport, lines: &[recollement_core::recollement::ReplayLine]) -> Outcome {
    let statuses = conditions.statuses();
    let mut outcome = Outcome::Certified;
    for ((_, status), line) in statuses.iter().zip(lines) {
        match (status, line.passed) {
            (Status::Certified, true) => {}
            (Status::Certified, false) => return Outcome::Fail,
            (Status::Refuted, _) => outcome = Outcome::Refuted,
            (Status::Unknown, _) if outcome == Outcome::Certified => outcome = Outcome::Unknown,
            _ => {}
        }
    }
    outcome
}

fn algebra_summary(name: &str, a: &Arc<DgAlgebra>) -> Result<AlgebraSummary, WorkbenchError> {
    let basis = a.module.labels.iter().cloned().zip(a.module.degrees.iter().copied()).collect();
    let products = (0..a.dim())
        .flat_map(|x| (0..a.dim()).map(move |y| (x, y)))
        .filter_map(|(x, y)| {
            let col = a.mult[x].column(y);
            (!col.is_empty()).then(|| (x, y, col.iter().map(|(&k, v)| (k, v.to_string())).collect()))
        })
        .collect();
    let free = DgModule::free(a.clone(), a.domain().clone())?;
    Ok(AlgebraSummary {
        name: name.into(),
        basis,
        unit: a.unit.iter().map(|(&k, v)| (k, v.to_string())).collect(),
        products,
        differential: a.d.entries().map(|(r, c, v)| (r, c, v.to_string())).collect(),
        structure_failures: a.check().failures,
        cohomology: cohomology(&free)?.summary().into_iter().map(|(n, g)| (n, g.to_string())).collect(),
    })
}

fn build_summary(data: &RecollementData, mutation: Option<String>) -> Result<BuildSummary, WorkbenchError> {
    let j_lower_model = match &data.j_lower {
        JLowerModel::Bimodule(res) => format!("RHom_T over a resolution of C* with {} cells", res.ledger.len()),
        JLowerModel::Glued(why) => format!("glued from the i-side triangle: {why}"),
    };
    Ok(BuildSummary {
        window_limited: data.window_limited,
        b_ledger_size: data.e.of.ledger.len(),
        c_ledger_size: data.f.of.ledger.len(),
        j_lower_model,
        algebras: vec![algebra_summary("E", &data.e.algebra)?, algebra_summary("F", &data.f.algebra)?],
        recovery: data.recovery.clone(),
        mutation,
    })
}

pub fn run(command: Command, scenario: &Scenario, flags: &Flags) -> Result<Report, WorkbenchError> {
    let ctx = Context::new(scenario, flags)?;
    match command {
        Command::Check => {
            let mut report = ctx.report(command, Outcome::Unknown);
            report.outcome = ctx.conditions(&mut report)?;
            Ok(report)
        }
        Command::Build => run_build(&ctx),
        Command::Verify => run_verify(&ctx),
    }
}

pub fn run_check(scenario: &Scenario, flags: &Flags) -> Result<Report, WorkbenchError> {
    run(Command::Check, scenario, flags)
}

fn run_build(ctx: &Context) -> Result<Report, WorkbenchError> {
    let mut report = ctx.report(Command::Build, Outcome::Unknown);
    if let Some(stop) = ctx.gate(&mut report)? {
        report.outcome = stop;
        return Ok(report);
    }
    ctx.data(&mut report)?;
    let ok = report.build.as_ref().is_some_and(|b| {
        b.recovery.iter().all(|w| w.quasi_iso) && b.algebras.iter().all(|a| a.structure_failures.is_empty())
    });
    report.outcome = if ok { Outcome::Pass } else { Outcome::Fail };
    Ok(report)
}

fn run_verify(ctx: &Context) -> Result<Report, WorkbenchError> {
    let mut report = ctx.report(Command::Verify, Outcome::Unknown);
    if let Some(stop) = ctx.gate(&mut report)? {
        report.outcome = stop;
        return Ok(report);
    }
    let (honest, data) = ctx.data(&mut report)?;
    let i = &ctx.inst;
    // The testset comes from the honest construction so a mutation cannot
    // change which objects are examined.
    let testset = generate_testset(&honest, i.seed, i.testset_size, &i.extras)?.rebound(&data.t);
    let mut card = verify_recollement(&data, &testset);
    let mut predicates = Vec::new();
    let mut pcard = Scorecard::default();
    for o in &testset.r_side {
        match main2_predicates(&data, &o.label, &o.module) {
            Ok(v) => {
                let detail = format!("{v:?}");
                pcard.push(
                    PREDICATE_CLASS_I,
                    &o.label,
                    Ok(Verdict { passed: v.class_i_agrees(), detail: detail.clone() }),
                );
                pcard.push(PREDICATE_CLASS_III, &o.label, Ok(Verdict { passed: v.class_iii_agrees(), detail }));
                predicates.push(v);
            }
            Err(e) => {
                pcard.push(PREDICATE_CLASS_I, &o.label, Err(e.clone()));
                pcard.push(PREDICATE_CLASS_III, &o.label, Err(e));
            }
        }
    }
    card.merge(pcard);
    if data.b.is_zero() {
        card.merge(keller_reduction_check(&data, &testset)?);
    }
    let mut per_axiom: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for r in &card.records {
        let e = per_axiom.entry(r.axiom.clone()).or_default();
        e.0 += usize::from(r.passed);
        e.1 += 1;
    }
    let side = |v: &[recollement_core::recollement::TestObject]| v.iter().map(|o| o.label.clone()).collect::<Vec<_>>();
    let testset_labels = BTreeMap::from([
        ("R-side".to_string(), side(&testset.r_side)),
        ("S-side".to_string(), side(&testset.s_side)),
        ("T-side".to_string(), side(&testset.t_side)),
    ]);
    report.outcome = if card.passed() { Outcome::Pass } else { Outcome::Fail };
    report.verify = Some(VerifySummary {
        seed: i.seed,
        testset: testset_labels,
        checks: card.records.len(),
        passed: card.pass_count(),
        per_axiom,
        failures: card.failures().cloned().collect(),
        predicates,
    });
    Ok(report)
}

/// Cohomology table of a module, for callers that print objects.
pub fn table(m: &DgModule) -> Result<Vec<(i32, String)>, WorkbenchError> {
    Ok(cohomology_table(m)?)
}
