//! Reports: one serializable structure, rendered as text or as its JSON
//! mirror. Nothing time- or address-dependent goes in, so identical inputs
//! give byte-identical output.

use std::collections::BTreeMap;
use std::fmt::Write;

use recollement_core::recollement::conditions::{
    CompactVerdict, JointEvidence, JointVerdict, SelfCompactEvidence, SelfCompactVerdict,
};
use recollement_core::recollement::{
    CheckRecord, ConditionReport, MembershipVector, RecoveryWitness, ReplayLine, Status,
};
use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Certified,
    Pass,
    Refuted,
    Fail,
    Unknown,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Certified | Outcome::Pass => 0,
            Outcome::Refuted | Outcome::Fail => 1,
            Outcome::Unknown => 2,
        }
    }

    pub fn from_status(s: Status) -> Outcome {
        match s {
            Status::Certified => Outcome::Certified,
            Status::Refuted => Outcome::Refuted,
            Status::Unknown => Outcome::Unknown,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraSummary {
    pub name: String,
    pub basis: Vec<(String, i32)>,
    pub unit: Vec<(usize, String)>,
    /// `[a, b, [[k, coefficient], ..]]` for `e_a e_b`.
    pub products: Vec<(usize, usize, Vec<(usize, String)>)>,
    /// `[row, column, coefficient]`.
    pub differential: Vec<(usize, usize, String)>,
    pub cohomology: Vec<(i32, String)>,
    /// Failed d² = 0 / Leibniz / associativity / unit checks.
    pub structure_failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BuildSummary {
    pub window_limited: bool,
    pub b_ledger_size: usize,
    pub c_ledger_size: usize,
    /// How `j_*` is evaluated.
    pub j_lower_model: String,
    pub algebras: Vec<AlgebraSummary>,
    pub recovery: Vec<RecoveryWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutation: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub testset: BTreeMap<String, Vec<String>>,
    pub checks: usize,
    pub passed: usize,
    /// Axiom → (passed, total).
    pub per_axiom: BTreeMap<String, (usize, usize)>,
    pub failures: Vec<CheckRecord>,
    pub predicates: Vec<MembershipVector>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub scenario: String,
    pub window: String,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditions: Option<ConditionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replay: Option<Vec<ReplayLine>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub build: Option<BuildSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Only the parts of a report that `--replay` reads back.
#[derive(Clone, Debug, Deserialize)]
pub struct Evidence {
    pub scenario: String,
    pub conditions: ConditionReport,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} (window {})", self.command, self.scenario, self.window);
        if let Some(c) = &self.conditions {
            render_conditions(&mut out, c);
        }
        if let Some(lines) = &self.replay {
            let _ = writeln!(out, "replay:");
            for l in lines {
                let mark = if l.passed { "ok" } else { "FAILED" };
                let _ = writeln!(out, "  [{mark}] {} via {}: {}", l.condition, l.evidence, l.detail);
            }
        }
        if let Some(b) = &self.build {
            render_build(&mut out, b);
        }
        if let Some(v) = &self.verify {
            render_verify(&mut out, v);
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        let _ =
            writeln!(out, "outcome: {}", serde_json::to_value(self.outcome).expect("outcome").as_str().unwrap_or("?"));
        out
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Certified => "certified",
        Status::Refuted => "refuted",
        Status::Unknown => "unknown",
    }
}

fn groups(t: &[(i32, String)]) -> String {
    if t.is_empty() {
        return "0".into();
    }
    t.iter().map(|(n, g)| format!("H^{n} = {g}")).collect::<Vec<_>>().join(", ")
}

fn render_conditions(out: &mut String, c: &ConditionReport) {
    let _ = writeln!(out, "conditions:");
    let line = |out: &mut String, s: Status, what: &str, detail: String| {
        let _ = writeln!(out, "  [{}] {what}: {detail}", status_word(s));
    };
    let compact = match &c.compact_c {
        CompactVerdict::Certificate { ledger_size, .. } => {
            format!("finite semifree resolution, ledger size {ledger_size}")
        }
        CompactVerdict::Refuted { betti, reason } => format!("{reason}; minimal generators per degree {betti:?}"),
        CompactVerdict::Unknown { reason, .. } => reason.clone(),
    };
    line(out, c.compact_c.status(), "C is compact", compact);
    let selfc = match &c.selfcompact_b {
        SelfCompactVerdict::Certificate { evidence: SelfCompactEvidence::CompactnessImplies { ledger_size, .. } } => {
            format!("B is compact (ledger size {ledger_size})")
        }
        SelfCompactVerdict::Certificate {
            evidence: SelfCompactEvidence::LocalizationDescent { invert, tensor_square, descended_ledger, unit_checks, .. },
        } => format!(
            "localization descent inverting {invert:?}: R' ⊗ R' = {tensor_square}, B compact over R' (ledger size {}), {} cohomology groups already R'-local",
            descended_ledger.len(),
            unit_checks.len()
        ),
        SelfCompactVerdict::Unknown { reason } => reason.clone(),
    };
    line(out, c.selfcompact_b.status(), "B is self-compact", selfc);
    let perp = &c.b_in_cperp;
    let detail = if perp.passed {
        format!("Hom(Σ^ℓ C, B) = 0 for ℓ in {}..{}", perp.window.0, perp.window.1)
    } else {
        let bad: Vec<String> =
            perp.failing_degrees().iter().map(|l| format!("ℓ = {l}: {}", perp.per_degree[l])).collect();
        format!("Hom(Σ^ℓ C, B) ≠ 0 at {}", bad.join(", "))
    };
    let detail = if perp.window_limited { format!("{detail} (window-limited)") } else { detail };
    line(out, perp.status(), "B ∈ C^⊥", detail);
    let joint = match &c.joint_perp_zero {
        JointVerdict::Certificate { evidence: JointEvidence::FiniteBuild { depth, tree, .. } } => {
            format!("R is finitely built from B and C (build tree of depth {depth}, {} nodes)", tree.nodes.len())
        }
        JointVerdict::Certificate { evidence: JointEvidence::HereditaryLocalization { prime, trace } } => {
            format!("hereditary localization at p = {prime}, {} checked steps", trace.len())
        }
        JointVerdict::WitnessRefuted { witness, cohomology, .. } => {
            format!("witness {witness} ({}) is a nonzero object of B^⊥ ∩ C^⊥", groups(cohomology))
        }
        JointVerdict::Unknown { reason } => reason.clone(),
    };
    line(out, c.joint_perp_zero.status(), "B^⊥ ∩ C^⊥ = 0", joint);
}

fn render_build(out: &mut String, b: &BuildSummary) {
    let _ = writeln!(out, "build:");
    let _ = writeln!(out, "  resolutions: B with {} cells, C with {} cells", b.b_ledger_size, b.c_ledger_size);
    let _ = writeln!(out, "  j_* model: {}", b.j_lower_model);
    for a in &b.algebras {
        let basis: Vec<String> = a.basis.iter().map(|(l, d)| format!("{l}[{d}]")).collect();
        let _ = writeln!(out, "  {}: rank {}, basis {}", a.name, a.basis.len(), basis.join(" "));
        let _ =
            writeln!(out, "    {} nonzero products, {} differential entries", a.products.len(), a.differential.len());
        let _ = writeln!(out, "    cohomology: {}", groups(&a.cohomology));
        for f in &a.structure_failures {
            let _ = writeln!(out, "    FAILED structure: {f}");
        }
    }
    for w in &b.recovery {
        let mark = if w.quasi_iso { "ok" } else { "FAILED" };
        let _ = writeln!(
            out,
            "  [{mark}] {}: {} → {}",
            w.claim,
            groups(&w.source_cohomology),
            groups(&w.target_cohomology)
        );
    }
    if let Some(m) = &b.mutation {
        let _ = writeln!(out, "  mutation: {m}");
    }
    if b.window_limited {
        let _ = writeln!(out, "  window-limited: results past the window edge are not certified");
    }
}

fn render_verify(out: &mut String, v: &VerifySummary) {
    let _ = writeln!(out, "verify (seed {}):", v.seed);
    for (side, labels) in &v.testset {
        let _ = writeln!(out, "  {side}: {} objects", labels.len());
    }
    for (axiom, (p, t)) in &v.per_axiom {
        let _ = writeln!(out, "  {p:>4}/{t:<4} {axiom}");
    }
    for f in &v.failures {
        let _ = writeln!(out, "  FAILED [{}] {}: {}", f.axiom, f.object, f.detail);
    }
    let _ = writeln!(out, "  {} of {} checks passed", v.passed, v.checks);
}
