//! Semifree resolutions by iterated cell attachment.
//!
//! Each stage computes the cone of the current comparison map `P → M`, takes
//! the extreme degree with surviving cohomology (the top one over algebras
//! concentrated in degrees `≤ 0`, the bottom one otherwise), and attaches a
//! minimal set of free generators there: a cone cocycle `(m, σp)` yields a
//! cell `g` with `dg = p` and `φ(g) = -m`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dg::cohomology::cohomology;
use crate::dg::constructions::{cone, orbit_signs};
use crate::dg::module::Action;
use crate::dg::module::{cell_span, idempotents_sum_to_unit, CellSpec};
use crate::dg::{ChainMap, DgAlgebra, DgModule};
use crate::error::{Error, Result};
use crate::kernel::snf::{inverse, smith};
use crate::kernel::{DegreeWindow, Domain, Matrix, Scalar, Vector};

/// One generator of a semifree module: its label, degree, idempotent and
/// the coefficients of its differential on earlier basis elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub label: String,
    pub degree: i32,
    pub idempotent: Option<usize>,
    /// `d(g)` as (basis label, coefficient) pairs.
    pub attaching: Vec<(String, String)>,
}

impl fmt::Display for LedgerEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.idempotent.map(|i| format!(" e{}", i + 1)).unwrap_or_default();
        if self.attaching.is_empty() {
            write!(f, "{} (deg {}{e}), d = 0", self.label, self.degree)
        } else {
            let terms: Vec<String> = self.attaching.iter().map(|(l, c)| format!("{c}·{l}")).collect();
            write!(f, "{} (deg {}{e}), d = {}", self.label, self.degree, terms.join(" + "))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResolveOptions {
    pub window: DegreeWindow,
    /// Upper bound on the number of generators.
    pub max_cells: usize,
    /// Return the partial resolution instead of failing when the window or
    /// the generator budget runs out.
    pub truncate: bool,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions { window: DegreeWindow::default(), max_cells: 48, truncate: false }
    }
}

impl ResolveOptions {
    pub fn with_window(window: DegreeWindow) -> Self {
        ResolveOptions { window, ..Self::default() }
    }
}

#[derive(Clone, Debug)]
pub struct SemifreeResolution {
    pub target: Arc<DgModule>,
    pub resolution: Arc<DgModule>,
    pub quasi_iso: ChainMap,
    pub ledger: Vec<LedgerEntry>,
    pub stage_count: usize,
    /// Truncated at the window edge: `quasi_iso` is then not a quasi-isomorphism.
    pub window_limited: bool,
}

/// A finite resolution: the decidable stand-in for compactness.
#[derive(Clone, Debug)]
pub struct PerfectCertificate {
    pub resolution: SemifreeResolution,
    pub ledger_size: usize,
}

impl PerfectCertificate {
    pub fn new(resolution: SemifreeResolution) -> Self {
        let ledger_size = resolution.ledger.len();
        PerfectCertificate { resolution, ledger_size }
    }
}

fn render(m: &DgModule, v: &Vector) -> Vec<(String, String)> {
    v.iter().map(|(&k, x)| (m.module.labels[k].clone(), x.to_string())).collect()
}

/// Ledger of an already semifree module, read off its cells.
pub fn ledger_of(m: &DgModule) -> Result<Vec<LedgerEntry>> {
    let cs = m.cells.as_ref().ok_or_else(|| Error::Structure(format!("{} is not semifree", m.name)))?;
    (0..cs.cells.len())
        .map(|c| {
            let cell = &cs.cells[c];
            let g = m.generator(c)?;
            Ok(LedgerEntry {
                label: cell.label.clone(),
                degree: cell.degree,
                idempotent: cell.idempotent,
                attaching: render(m, &m.differential(&g)),
            })
        })
        .collect()
}

/// Rebuilds the semifree module a ledger describes, cell by cell.
pub fn module_from_ledger(
    name: &str,
    alg: &Arc<DgAlgebra>,
    domain: &Domain,
    ledger: &[LedgerEntry],
) -> Result<DgModule> {
    let mut specs: Vec<CellSpec> = Vec::new();
    for e in ledger {
        let built = DgModule::semifree(name, alg.clone(), domain.clone(), &specs)?;
        let mut attaching = Vector::new();
        for (label, coeff) in &e.attaching {
            let k = built.module.labels.iter().position(|l| l == label).ok_or_else(|| {
                Error::Structure(format!("cell {} attaches to unknown basis element {label}", e.label))
            })?;
            let x = Scalar::parse(coeff)
                .ok_or_else(|| Error::Structure(format!("bad coefficient `{coeff}` on cell {}", e.label)))?;
            attaching.insert(k, domain.element(&x)?);
        }
        specs.push(CellSpec { label: e.label.clone(), degree: e.degree, idempotent: e.idempotent, attaching });
    }
    DgModule::semifree(name, alg.clone(), domain.clone(), &specs)
}

/// Number of filtration stages of a semifree module: cells grouped by the
/// length of their longest attaching chain.
fn stages(m: &DgModule) -> Result<usize> {
    let Some(cs) = &m.cells else { return Ok(0) };
    let owner: Vec<usize> = {
        let mut o = vec![0; m.dim()];
        for (ci, c) in cs.cells.iter().enumerate() {
            let len = m.left.as_ref().map(|a| cell_span(&a.alg, c.idempotent).len()).unwrap_or(1);
            for k in 0..len {
                o[c.offset + k] = ci;
            }
        }
        o
    };
    let mut depth = vec![0usize; cs.cells.len()];
    for c in 0..cs.cells.len() {
        let dg = m.differential(&m.generator(c)?);
        depth[c] = 1 + dg.keys().map(|&k| depth[owner[k]]).max().unwrap_or(0);
    }
    Ok(depth.into_iter().max().unwrap_or(0))
}

pub fn semifree_resolve(m: &Arc<DgModule>, opts: &ResolveOptions) -> Result<SemifreeResolution> {
    let act =
        m.left.as_ref().ok_or_else(|| Error::Structure(format!("{} has no left action to resolve over", m.name)))?;
    let alg = act.alg.clone();
    if m.cells.is_some() {
        return Ok(SemifreeResolution {
            target: m.clone(),
            resolution: m.clone(),
            quasi_iso: ChainMap::identity(m.clone()),
            ledger: ledger_of(m)?,
            stage_count: stages(m)?,
            window_limited: false,
        });
    }
    let dom = m.domain().clone();
    if alg.is_ground() && act.mats[0] == Matrix::identity(m.dim()) {
        // over the ground ring every complex of free modules is semifree
        let p = Arc::new(DgModule::over_ground(&m.name, alg.clone(), m.module.clone(), m.d.clone())?);
        let mut q = (*p).clone();
        q.right = m.right.clone();
        let q = Arc::new(q);
        return Ok(SemifreeResolution {
            target: m.clone(),
            quasi_iso: ChainMap::new(q.clone(), m.clone(), Matrix::identity(m.dim()))?,
            ledger: ledger_of(&q)?,
            stage_count: stages(&q)?,
            resolution: q,
            window_limited: false,
        });
    }
    if &dom != alg.domain() && !matches!(dom, Domain::Localized(_) | Domain::Rational) {
        return Err(Error::Domain(format!(
            "cannot resolve a {dom}-module over an algebra with coefficients in {}",
            alg.domain()
        )));
    }
    // resolve the underlying left module; a right action is transported at the end
    let bare = if m.right.is_some() {
        let mut b = (**m).clone();
        b.right = None;
        Arc::new(b)
    } else {
        m.clone()
    };
    let split = !alg.idempotents.is_empty() && idempotents_sum_to_unit(&alg);
    let mut specs: Vec<CellSpec> = Vec::new();
    let mut images: Vec<Vector> = Vec::new();
    let mut stage_count = 0;
    loop {
        let p = Arc::new(DgModule::semifree(&format!("p{}", m.name), alg.clone(), dom.clone(), &specs)?);
        let phi = comparison(&bare, &p, &images)?;
        let tri = cone(&phi)?;
        let h = cohomology(&tri.z)?;
        // over a connective algebra kill from the top down; otherwise start in
        // the degree holding the class with the largest orbit, lowest first,
        // so a generator in the middle of a two-sided algebra is preferred
        // to an infinite descent from the bottom
        let pick = if alg.is_connective() {
            h.degrees().last().copied()
        } else {
            let all = tri.z.left.as_ref().expect("cone of left modules");
            let reach = |z: &Vector| {
                let orbit: Vec<Vector> =
                    all.mats.iter().map(|mat| mat.apply(&dom, z)).filter(|v| !v.is_empty()).collect();
                span_rank(&dom, &orbit)
            };
            let mut best: Option<(usize, i32)> = None;
            for n in h.degrees() {
                let r = h.generators(n).iter().map(&reach).max().unwrap_or(0);
                if best.map_or(true, |(b, _)| r > b) {
                    best = Some((r, n));
                }
            }
            best.map(|(_, n)| n)
        };
        let Some(n) = pick else {
            let ledger = ledger_of(&p)?;
            let (resolution, quasi_iso) = transport_right(m, p, phi)?;
            return Ok(SemifreeResolution {
                target: m.clone(),
                resolution,
                quasi_iso,
                ledger,
                stage_count,
                window_limited: false,
            });
        };
        if !opts.window.contains(n) || specs.len() >= opts.max_cells {
            if opts.truncate {
                let ledger = ledger_of(&p)?;
                return Ok(SemifreeResolution {
                    target: m.clone(),
                    resolution: p,
                    quasi_iso: ChainMap::new(phi.source, m.clone(), phi.matrix)?,
                    ledger,
                    stage_count,
                    window_limited: true,
                });
            }
            let detail = if opts.window.contains(n) {
                format!("resolution of {} exceeded {} generators", m.name, opts.max_cells)
            } else {
                format!("resolution of {} still has unkilled cohomology", m.name)
            };
            return Err(Error::Window { degree: n, detail });
        }
        stage_count += 1;
        let ny = m.dim();
        let neg = orbit_signs(&p, 1);
        let cone_left = tri.z.left.as_ref().expect("cone of left modules");
        // classes already generated by this stage's cells are skipped
        let mut span: Vec<Vector> =
            tri.z.module.in_degree(n - 1).into_iter().map(|k| tri.z.d.column(k)).filter(|v| !v.is_empty()).collect();
        let mut candidates: Vec<(Option<usize>, Vector)> = Vec::new();
        for z in h.generators(n) {
            if split {
                for (i, e) in alg.idempotents.iter().enumerate() {
                    let ez = cone_left.element(&dom, &e.element)?.apply(&dom, &z);
                    if !ez.is_empty() {
                        candidates.push((Some(i), ez));
                    }
                }
            } else {
                candidates.push((None, z));
            }
        }
        let orbit = |z: &Vector| -> Vec<Vector> {
            cone_left
                .mats
                .iter()
                .enumerate()
                .filter(|(a, _)| alg.degree(*a) == 0)
                .map(|(_, mat)| mat.apply(&dom, z))
                .filter(|v| !v.is_empty())
                .collect()
        };
        loop {
            candidates.retain(|(_, z)| !generated(&dom, &span, z));
            // the candidate generating the most goes first
            let Some(best) = (0..candidates.len()).max_by_key(|&i| {
                let mut s = span.clone();
                s.extend(orbit(&candidates[i].1));
                (span_rank(&dom, &s), std::cmp::Reverse(i))
            }) else {
                break;
            };
            let (idem, z) = candidates.remove(best);
            span.extend(orbit(&z));
            {
                let mut y = Vector::new();
                let mut att = Vector::new();
                for (&k, x) in &z {
                    if k < ny {
                        y.insert(k, dom.neg(x));
                    } else {
                        let j = k - ny;
                        att.insert(j, if neg[j] { dom.neg(x) } else { x.clone() });
                    }
                }
                specs.push(CellSpec {
                    label: format!("g{}", specs.len()),
                    degree: n,
                    idempotent: idem,
                    attaching: att,
                });
                images.push(y);
            }
        }
    }
}

fn generated(dom: &Domain, span: &[Vector], z: &Vector) -> bool {
    let rows = span.iter().chain([z]).flat_map(|v| v.keys().copied()).max().map_or(0, |k| k + 1);
    let mut a = Matrix::zeros(rows, span.len());
    for (j, v) in span.iter().enumerate() {
        a.set_column(j, v.clone());
    }
    smith(dom, &a).solve(dom, z).is_some()
}

fn span_rank(dom: &Domain, span: &[Vector]) -> usize {
    let rows = span.iter().flat_map(|v| v.keys().copied()).max().map_or(0, |k| k + 1);
    let mut a = Matrix::zeros(rows, span.len());
    for (j, v) in span.iter().enumerate() {
        a.set_column(j, v.clone());
    }
    smith(dom, &a).rank()
}

/// `φ : P → M` determined by the images of the generators.
fn comparison(m: &Arc<DgModule>, p: &Arc<DgModule>, images: &[Vector]) -> Result<ChainMap> {
    let dom = m.domain();
    let act = m.left.as_ref().expect("checked");
    let cs = p.cells.as_ref().expect("semifree");
    let mut mat = Matrix::zeros(m.dim(), p.dim());
    for (c, img) in cs.cells.iter().zip(images) {
        for (k, &a) in cell_span(&act.alg, c.idempotent).iter().enumerate() {
            mat.set_column(c.offset + k, act.mats[a].apply(dom, img));
        }
    }
    ChainMap::new(p.clone(), m.clone(), mat)
}

/// Carries a right action of the target over to the resolution when the
/// comparison map is an isomorphism of modules.
fn transport_right(m: &Arc<DgModule>, p: Arc<DgModule>, phi: ChainMap) -> Result<(Arc<DgModule>, ChainMap)> {
    let Some(r) = &m.right else { return Ok((p, phi)) };
    let dom = m.domain();
    let Some(inv) = inverse(dom, &phi.matrix) else {
        return Ok((p, ChainMap::new(phi.source, m.clone(), phi.matrix)?));
    };
    let mats = r.mats.iter().map(|x| inv.mul(dom, x).mul(dom, &phi.matrix)).collect();
    let mut q = (*p).clone();
    q.right = Some(Action { alg: r.alg.clone(), mats });
    let q = Arc::new(q);
    let phi = ChainMap::new(q.clone(), m.clone(), phi.matrix)?;
    Ok((q, phi))
}
