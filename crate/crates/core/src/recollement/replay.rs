//! Re-executes recorded condition evidence against `(R, B, C)` without
//! searching: ledgers are rebuilt and their comparison maps rechecked, build
//! trees replayed step by step, traces recomputed.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::conditions::{
    descend, hereditary_trace, CompactVerdict, ConditionReport, JointEvidence, JointVerdict, MapEntry,
    SelfCompactEvidence, SelfCompactVerdict,
};
use super::data::cohomology_table;
use crate::derived::{module_from_ledger, LedgerEntry, ResolveOptions};
use crate::dg::cohomology::cohomology;
use crate::dg::constructions::is_quasi_iso;
use crate::dg::{hom_complex, ChainMap, DgAlgebra, DgModule};
use crate::error::{Error, Result};
use crate::kernel::{Matrix, PrimeSet, Scalar};
use crate::localization::{hereditary_decompose, LocAbGroup};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayLine {
    pub condition: String,
    pub evidence: String,
    pub passed: bool,
    pub detail: String,
}

fn line(condition: &str, evidence: &str, outcome: Result<(bool, String)>) -> ReplayLine {
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    ReplayLine { condition: condition.into(), evidence: evidence.into(), passed, detail }
}

fn matrix_from(source: &DgModule, target: &DgModule, entries: &[MapEntry]) -> Result<Matrix> {
    let mut m = Matrix::zeros(target.dim(), source.dim());
    for (r, label, x) in entries {
        let c = source.module.labels.iter().position(|l| l == label);
        let (Some(c), true) = (c, *r < target.dim()) else {
            return Err(Error::Structure(format!("comparison entry ({r}, {label}) is outside the map")));
        };
        let v = Scalar::parse(x).ok_or_else(|| Error::Structure(format!("bad coefficient `{x}`")))?;
        m.set(*r, c, target.domain().element(&v)?);
    }
    Ok(m)
}

/// Rebuilds the ledger's module and checks its comparison map is a
/// quasi-isomorphism onto `target`.
pub fn replay_perfect(
    alg: &Arc<DgAlgebra>,
    target: &Arc<DgModule>,
    ledger: &[LedgerEntry],
    comparison: &[MapEntry],
) -> Result<(bool, String)> {
    let p = Arc::new(module_from_ledger(&format!("p{}", target.name), alg, target.domain(), ledger)?);
    let structure = p.check();
    if !structure.failures.is_empty() {
        return Ok((false, format!("rebuilt module is malformed: {}", structure.failures.join("; "))));
    }
    let f = ChainMap::new(p.clone(), target.clone(), matrix_from(&p, target, comparison)?)?;
    let chain = f.check();
    if !chain.failures.is_empty() {
        return Ok((false, format!("comparison is not a chain map: {}", chain.failures.join("; "))));
    }
    let qi = is_quasi_iso(&f)?;
    let detail = format!(
        "{} cells rebuilt, comparison {}",
        ledger.len(),
        if qi { "is a quasi-isomorphism" } else { "is not a quasi-isomorphism" }
    );
    Ok((qi, detail))
}

fn replay_descent(
    b: &Arc<DgModule>,
    invert: &[u64],
    tensor_square: &str,
    ledger: &[LedgerEntry],
    comparison: &[MapEntry],
) -> Result<(bool, String)> {
    let primes: PrimeSet = invert.iter().copied().collect();
    if b.domain().inverted_primes().as_ref() != Some(&primes) {
        return Ok((false, format!("B has coefficients {}, not ℤ[S⁻¹] for S = {invert:?}", b.domain())));
    }
    let rp = LocAbGroup::localization(primes.clone());
    let square = rp.extend_scalars(&primes);
    if square != rp || square.to_string() != tensor_square {
        return Ok((false, format!("R' ⊗ R' recomputes to {square}, recorded {tensor_square}")));
    }
    let b_prime = descend(b)?;
    let alg = b_prime.left_alg().expect("ground action").clone();
    let (ok, detail) = replay_perfect(&alg, &b_prime, ledger, comparison)?;
    if !ok {
        return Ok((false, format!("over R': {detail}")));
    }
    let local = hereditary_decompose(b)?.iter().all(|(_, g)| g.is_local(&primes));
    Ok((local, format!("R' ⊗ R' = {square}; over R': {detail}; cohomology of B is R'-local: {local}")))
}

/// Replays every certificate in `report`; verdicts without a certificate are
/// listed as not replayable.
pub fn replay_conditions(
    r: &Arc<DgAlgebra>,
    b: &Arc<DgModule>,
    c: &Arc<DgModule>,
    report: &ConditionReport,
    opts: &ResolveOptions,
) -> Vec<ReplayLine> {
    let mut out = Vec::new();
    let none = |cond: &str| ReplayLine {
        condition: cond.into(),
        evidence: "none".into(),
        passed: false,
        detail: "no certificate to replay".into(),
    };
    let c_ledger = match &report.compact_c {
        CompactVerdict::Certificate { ledger, comparison, .. } => {
            out.push(line("C is compact", "ledger", replay_perfect(r, c, ledger, comparison)));
            Some(ledger)
        }
        _ => {
            out.push(none("C is compact"));
            None
        }
    };
    out.push(match &report.selfcompact_b {
        SelfCompactVerdict::Certificate {
            evidence: SelfCompactEvidence::CompactnessImplies { ledger, comparison, .. },
        } => line("B is self-compact", "ledger", replay_perfect(r, b, ledger, comparison)),
        SelfCompactVerdict::Certificate {
            evidence:
                SelfCompactEvidence::LocalizationDescent {
                    invert,
                    tensor_square,
                    descended_ledger,
                    descended_comparison,
                    ..
                },
        } => line(
            "B is self-compact",
            "localization descent",
            replay_descent(b, invert, tensor_square, descended_ledger, descended_comparison),
        ),
        SelfCompactVerdict::Unknown { .. } => none("B is self-compact"),
    });
    // Hom(Σ^ℓ C, B) from the recorded resolution of C
    out.push(match (c_ledger, report.b_in_cperp.passed) {
        (Some(ledger), true) => line("B ∈ C^⊥", "resolution of C", replay_perp(r, b, c, ledger, report)),
        (None, _) => none("B ∈ C^⊥"),
        (_, false) => none("B ∈ C^⊥"),
    });
    out.push(match &report.joint_perp_zero {
        JointVerdict::Certificate { evidence: JointEvidence::FiniteBuild { tree, .. } } => line(
            "B^⊥ ∩ C^⊥ = 0",
            "build tree",
            tree.replay(r, b, c, opts).map(|o| {
                (o.quasi_iso, format!("{} nodes rebuilt, root cohomology {:?}", o.nodes_rebuilt, o.root_cohomology))
            }),
        ),
        JointVerdict::Certificate { evidence: JointEvidence::HereditaryLocalization { prime, trace } } => {
            let recomputed = hereditary_trace(r, b, c);
            let outcome = recomputed.map(|res| match res {
                Ok((p, steps)) if p == *prime && steps == *trace => {
                    let ok = steps.iter().all(|s| s.checked);
                    (ok, format!("{} trace steps recomputed for p = {p}", steps.len()))
                }
                Ok((p, _)) => (false, format!("trace recomputes differently (p = {p})")),
                Err(reason) => (false, reason),
            });
            line("B^⊥ ∩ C^⊥ = 0", "hereditary trace", outcome)
        }
        _ => none("B^⊥ ∩ C^⊥ = 0"),
    });
    out
}

fn replay_perp(
    r: &Arc<DgAlgebra>,
    b: &Arc<DgModule>,
    c: &Arc<DgModule>,
    ledger: &[LedgerEntry],
    report: &ConditionReport,
) -> Result<(bool, String)> {
    let p = Arc::new(module_from_ledger(&format!("p{}", c.name), r, c.domain(), ledger)?);
    let h = cohomology(&hom_complex(&p, b)?.module)?.summary();
    let (lo, hi) = report.b_in_cperp.window;
    let nonzero: Vec<i32> = (lo..=hi).filter(|l| h.get(&-l).is_some_and(|g| !g.is_zero())).collect();
    let table = cohomology_table(b)?;
    Ok((
        nonzero.is_empty(),
        if nonzero.is_empty() {
            format!("Hom(Σ^ℓ C, B) = 0 for ℓ in {lo}..{hi}; H(B) = {table:?}")
        } else {
            format!("nonzero at ℓ = {nonzero:?}")
        },
    ))
}
