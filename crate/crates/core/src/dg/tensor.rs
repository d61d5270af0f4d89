//! Tensor complexes `M ⊗_A N` of a right and a left DG module.
//!
//! `d(m ⊗ n) = dm ⊗ n + (-1)^{|m|} m ⊗ dn`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::module::{cell_span, Action, Cell, CellStructure, DgModule};
use super::same_alg;
use crate::error::{Error, Result};
use crate::kernel::matrix::{axpy, unit_vector};
use crate::kernel::snf::{smith, Smith};
use crate::kernel::{Domain, GradedModule, Matrix, Scalar, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorRoute {
    /// Right factor is semifree: `M ⊗_A A e g = M e`.
    Cellular,
    /// Cokernel of the balancing relations `m a ⊗ n - m ⊗ a n`.
    Balanced,
}

#[derive(Clone, Debug)]
pub struct TensorComplex {
    pub module: Arc<DgModule>,
    pub left: Arc<DgModule>,
    pub right: Arc<DgModule>,
    pub route: TensorRoute,
    pairs: Pairs,
}

#[derive(Clone, Debug)]
enum Pairs {
    Cellular {
        /// For each basis element of the right factor: its cell and algebra element.
        owner: Vec<(usize, usize)>,
        /// Per cell: first index in the tensor basis and the basis of `M e`.
        blocks: Vec<(usize, SubBasis)>,
        right_action: Vec<Matrix>,
    },
    Balanced {
        /// Per pair degree: ordered pairs, their positions, and the quotient.
        degrees: BTreeMap<i32, Quotient>,
    },
}

#[derive(Clone, Debug)]
struct SubBasis {
    basis: Vec<Vector>,
    /// Solver for coordinates in `basis` (None when it is a coordinate subset).
    solver: Option<Smith>,
    index: Vec<usize>,
}

impl SubBasis {
    fn new(dom: &Domain, basis: Vec<Vector>, ambient: usize) -> Self {
        let unit = basis.iter().all(|v| v.len() == 1 && v.values().next().is_some_and(|x| x.is_one()));
        if unit {
            let index = basis.iter().map(|v| *v.keys().next().expect("nonempty")).collect();
            return SubBasis { basis, solver: None, index };
        }
        let m = Matrix::from_columns(ambient, basis.clone());
        SubBasis { solver: Some(smith(dom, &m)), basis, index: vec![] }
    }

    fn coords(&self, dom: &Domain, w: &Vector) -> Result<Vector> {
        match &self.solver {
            None => {
                let mut out = Vector::new();
                for (k, i) in self.index.iter().enumerate() {
                    if let Some(x) = w.get(i) {
                        out.insert(k, x.clone());
                    }
                }
                if out.len() != w.len() {
                    return Err(Error::Structure("tensor factor leaves M·e".into()));
                }
                Ok(out)
            }
            Some(s) => s.solve(dom, w).ok_or_else(|| Error::Structure("tensor factor leaves M·e".into())),
        }
    }
}

#[derive(Clone, Debug)]
struct Quotient {
    pos: BTreeMap<(usize, usize), usize>,
    u: Matrix,
    rank: usize,
    first: usize,
    lifts: Vec<Vector>,
    pairs: Vec<(usize, usize)>,
}

fn coerce_mats(mats: &[Matrix], from: &Domain, to: &Domain) -> Result<Vec<Matrix>> {
    mats.iter().map(|m| if from == to { Ok(m.clone()) } else { m.coerce(from, to) }).collect()
}

fn coerce_vec(v: &Vector, from: &Domain, to: &Domain) -> Result<Vector> {
    if from == to {
        return Ok(v.clone());
    }
    v.iter().map(|(&k, x)| Ok((k, to.coerce(from, x)?))).collect()
}

/// Data of one factor with everything coerced into the tensor domain.
struct Factor {
    d: Matrix,
    left: Option<Vec<Matrix>>,
    right: Option<Vec<Matrix>>,
}

fn factor(m: &DgModule, to: &Domain) -> Result<Factor> {
    let from = m.domain();
    Ok(Factor {
        d: coerce_mats(std::slice::from_ref(&m.d), from, to)?.remove(0),
        left: m.left.as_ref().map(|a| coerce_mats(&a.mats, from, to)).transpose()?,
        right: m.right.as_ref().map(|a| coerce_mats(&a.mats, from, to)).transpose()?,
    })
}

pub fn tensor_complex(m: &Arc<DgModule>, n: &Arc<DgModule>) -> Result<TensorComplex> {
    let route = if n.cells.is_some() { TensorRoute::Cellular } else { TensorRoute::Balanced };
    tensor_with(m, n, route)
}

/// `M ⊗_A N` where `A` acts on `M` from the right and on `N` from the left.
/// Residual actions: `M`'s left action and `N`'s right action.
pub fn tensor_with(m: &Arc<DgModule>, n: &Arc<DgModule>, route: TensorRoute) -> Result<TensorComplex> {
    let (mr, nl) = match (&m.right, &n.left) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Structure(format!(
                "{} ⊗ {} needs a right action on the first and a left action on the second",
                m.name, n.name
            )))
        }
    };
    if !same_alg(&mr.alg, &nl.alg) {
        return Err(Error::Structure(format!(
            "{} ⊗ {}: algebras {} and {} differ",
            m.name, n.name, mr.alg.name, nl.alg.name
        )));
    }
    let alg = mr.alg.clone();
    let dom = match Domain::tensor(m.domain(), n.domain()) {
        Some(d) => d,
        None => {
            // coefficient rings with zero tensor product
            return Ok(zero_tensor(m, n, route));
        }
    };
    let fm = factor(m, &dom)?;
    let fn_ = factor(n, &dom)?;
    let route = if route == TensorRoute::Cellular && n.cells.is_none() { TensorRoute::Balanced } else { route };
    let (degrees, labels, pairs) = match route {
        TensorRoute::Cellular => cellular_basis(&dom, m, n, &fm, &fn_, &alg)?,
        TensorRoute::Balanced => balanced_basis(&dom, m, n, &fm, &fn_, &alg)?,
    };
    let total = degrees.len();
    let mut tc = TensorComplex {
        module: Arc::new(DgModule {
            name: format!("{} ⊗ {}", m.name, n.name),
            module: GradedModule::new(dom.clone(), degrees, labels),
            d: Matrix::zeros(total, total),
            left: None,
            right: None,
            cells: None,
        }),
        left: m.clone(),
        right: n.clone(),
        route,
        pairs,
    };
    // differential and residual actions, computed on pair-space representatives
    let reps: Vec<Vec<Term>> = (0..total).map(|j| tc.representative(j)).collect::<Result<_>>()?;
    let mut d = Matrix::zeros(total, total);
    for (j, terms) in reps.iter().enumerate() {
        let mut img = Vec::new();
        for (mv, nv, c) in terms {
            let sgn = dom.signed(c, m.module.degree_of(mv).unwrap_or(0) as i64);
            img.push((fm.d.apply(&dom, mv), nv.clone(), c.clone()));
            img.push((mv.clone(), fn_.d.apply(&dom, nv), sgn));
        }
        d.set_column(j, tc.elem_sum(&dom, &img)?);
    }
    let left = match (&m.left, &fm.left) {
        (Some(a), Some(mats)) => {
            let mut out = Vec::new();
            for l in mats {
                let mut act = Matrix::zeros(total, total);
                for (j, terms) in reps.iter().enumerate() {
                    let img: Vec<Term> =
                        terms.iter().map(|(mv, nv, c)| (l.apply(&dom, mv), nv.clone(), c.clone())).collect();
                    act.set_column(j, tc.elem_sum(&dom, &img)?);
                }
                out.push(act);
            }
            Some(Action { alg: a.alg.clone(), mats: out })
        }
        _ => None,
    };
    let right = match (&n.right, &fn_.right) {
        (Some(a), Some(mats)) => {
            let mut out = Vec::new();
            for r in mats {
                let mut act = Matrix::zeros(total, total);
                for (j, terms) in reps.iter().enumerate() {
                    let img: Vec<Term> =
                        terms.iter().map(|(mv, nv, c)| (mv.clone(), r.apply(&dom, nv), c.clone())).collect();
                    act.set_column(j, tc.elem_sum(&dom, &img)?);
                }
                out.push(act);
            }
            Some(Action { alg: a.alg.clone(), mats: out })
        }
        _ => None,
    };
    let cells = tensor_cells(m, n, &tc);
    let module = Arc::get_mut(&mut tc.module).expect("fresh Arc");
    module.d = d;
    module.left = left;
    module.right = right;
    module.cells = cells;
    module.validate_shapes()?;
    Ok(tc)
}

fn zero_tensor(m: &Arc<DgModule>, n: &Arc<DgModule>, route: TensorRoute) -> TensorComplex {
    let dom = n.domain().clone();
    let module = DgModule {
        name: format!("{} ⊗ {}", m.name, n.name),
        module: GradedModule::zero(dom),
        d: Matrix::zeros(0, 0),
        left: m.left.as_ref().map(|a| Action { alg: a.alg.clone(), mats: vec![Matrix::zeros(0, 0); a.alg.dim()] }),
        right: n.right.as_ref().map(|a| Action { alg: a.alg.clone(), mats: vec![Matrix::zeros(0, 0); a.alg.dim()] }),
        cells: Some(CellStructure { cells: vec![] }),
    };
    TensorComplex {
        module: Arc::new(module),
        left: m.clone(),
        right: n.clone(),
        route,
        pairs: Pairs::Balanced { degrees: BTreeMap::new() },
    }
}

type Basis = (Vec<i32>, Vec<String>, Pairs);

/// `c · (m ⊗ n)` with `m`, `n` given as vectors.
pub type Term = (Vector, Vector, Scalar);

fn cellular_basis(
    dom: &Domain,
    m: &DgModule,
    n: &DgModule,
    fm: &Factor,
    _fn: &Factor,
    alg: &crate::dg::DgAlgebra,
) -> Result<Basis> {
    let cs = n.cells.as_ref().expect("cellular route");
    let right_action = fm.right.clone().expect("checked right action");
    let mut owner = vec![(usize::MAX, 0); n.dim()];
    let mut blocks = Vec::new();
    let mut degrees = Vec::new();
    let mut labels = Vec::new();
    for (ci, c) in cs.cells.iter().enumerate() {
        for (k, &a) in cell_span(alg, c.idempotent).iter().enumerate() {
            owner[c.offset + k] = (ci, a);
        }
        let basis: Vec<Vector> = match c.idempotent {
            None => (0..m.dim()).map(unit_vector).collect(),
            Some(i) => {
                let re = Action { alg: Arc::new(alg.clone()), mats: right_action.clone() }
                    .element(dom, &alg.idempotents[i].element)?;
                image_of_idempotent(dom, m, &re)
            }
        };
        let first = degrees.len();
        for v in &basis {
            let deg = m.module.degree_of(v).unwrap_or(0);
            degrees.push(deg + c.degree);
            labels.push(format!("{}⊗{}", vec_label(m, v), c.label));
        }
        blocks.push((first, SubBasis::new(dom, basis, m.dim())));
    }
    Ok((degrees, labels, Pairs::Cellular { owner, blocks, right_action }))
}

fn vec_label(m: &DgModule, v: &Vector) -> String {
    if v.len() == 1 {
        let (&k, x) = v.iter().next().expect("one entry");
        if x.is_one() {
            return m.module.labels[k].clone();
        }
    }
    v.iter().map(|(&k, x)| format!("{x}{}", m.module.labels[k])).collect::<Vec<_>>().join("+")
}

/// Basis of the image of an idempotent matrix, degree by degree, preferring
/// unit vectors.
fn image_of_idempotent(dom: &Domain, m: &DgModule, e: &Matrix) -> Vec<Vector> {
    let n = e.rows();
    let simple = (0..n).all(|k| {
        let c = e.column(k);
        c.is_empty() || c == unit_vector(k)
    });
    if simple {
        return (0..n).filter(|&k| !e.column(k).is_empty()).map(unit_vector).collect();
    }
    let fix = Matrix::identity(n).sub(dom, e);
    let mut out = Vec::new();
    for deg in m.module.support() {
        let idx = m.module.in_degree(deg);
        for v in smith(dom, &fix.select(&idx, &idx)).kernel() {
            out.push(v.into_iter().map(|(j, x)| (idx[j], x)).collect());
        }
    }
    out
}

fn balanced_basis(
    dom: &Domain,
    m: &DgModule,
    n: &DgModule,
    fm: &Factor,
    fn_: &Factor,
    alg: &crate::dg::DgAlgebra,
) -> Result<Basis> {
    let mr = fm.right.as_ref().expect("right action");
    let nl = fn_.left.as_ref().expect("left action");
    let mut by_deg: BTreeMap<i32, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..m.dim() {
        for j in 0..n.dim() {
            by_deg.entry(m.degree(i) + n.degree(j)).or_default().push((i, j));
        }
    }
    let mut degrees = Vec::new();
    let mut labels = Vec::new();
    let mut out = BTreeMap::new();
    for (deg, pairs) in by_deg {
        let pos: BTreeMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        // relations m a ⊗ n - m ⊗ a n landing in this degree
        let mut rels: Vec<Vector> = Vec::new();
        for a in 0..alg.dim() {
            for i in 0..m.dim() {
                for j in 0..n.dim() {
                    if m.degree(i) + alg.degree(a) + n.degree(j) != deg {
                        continue;
                    }
                    let mut r = Vector::new();
                    for (i2, x) in mr[a].column(i) {
                        axpy(dom, &mut r, &x, &unit_vector(pos[&(i2, j)]));
                    }
                    for (j2, x) in nl[a].column(j) {
                        axpy(dom, &mut r, &dom.neg(&x), &unit_vector(pos[&(i, j2)]));
                    }
                    if !r.is_empty() {
                        rels.push(r);
                    }
                }
            }
        }
        let rel = Matrix::from_columns(pairs.len(), rels);
        let s = smith(dom, &rel);
        if let Some(t) = s.diag.iter().find(|x| !dom.is_unit(x)) {
            return Err(Error::Unrepresentable(format!(
                "{} ⊗ {} has torsion {t} in degree {deg}; the quotient is not free",
                m.name, n.name
            )));
        }
        let rank = s.rank();
        let first = degrees.len();
        let lifts: Vec<Vector> = (rank..pairs.len()).map(|k| s.u_inv.column(k)).collect();
        for l in &lifts {
            degrees.push(deg);
            let parts: Vec<String> = l
                .iter()
                .map(|(&k, x)| {
                    let (i, j) = pairs[k];
                    let lbl = format!("{}⊗{}", m.module.labels[i], n.module.labels[j]);
                    if x.is_one() {
                        lbl
                    } else {
                        format!("{x}{lbl}")
                    }
                })
                .collect();
            labels.push(parts.join("+"));
        }
        out.insert(deg, Quotient { pos, u: s.u, rank, first, lifts, pairs });
    }
    Ok((degrees, labels, Pairs::Balanced { degrees: out }))
}

fn tensor_cells(m: &DgModule, n: &DgModule, tc: &TensorComplex) -> Option<CellStructure> {
    let (Pairs::Cellular { blocks, .. }, Some(mc), Some(nc)) = (&tc.pairs, &m.cells, &n.cells) else {
        return None;
    };
    if nc.cells.iter().any(|c| c.idempotent.is_some()) {
        return None;
    }
    let mut cells = Vec::new();
    for (c, (first, _)) in nc.cells.iter().zip(blocks) {
        for mcell in &mc.cells {
            cells.push(Cell {
                label: format!("{}⊗{}", mcell.label, c.label),
                degree: mcell.degree + c.degree,
                idempotent: mcell.idempotent,
                offset: first + mcell.offset,
            });
        }
    }
    Some(CellStructure { cells })
}

impl TensorComplex {
    pub fn domain(&self) -> &Domain {
        self.module.domain()
    }

    /// Element `m ⊗ n` for basis indices.
    pub fn pair(&self, i: usize, j: usize) -> Result<Vector> {
        self.elem_sum(self.domain(), &[(unit_vector(i), unit_vector(j), Scalar::one())])
    }

    /// Element `Σ c · (m ⊗ n)` for vectors `m`, `n` (coefficients in the tensor domain).
    pub fn elem_sum(&self, dom: &Domain, terms: &[Term]) -> Result<Vector> {
        let mut out = Vector::new();
        match &self.pairs {
            Pairs::Cellular { owner, blocks, right_action } => {
                for (mv, nv, c) in terms {
                    for (&j, y) in nv {
                        let (ci, a) = owner[j];
                        let ma = right_action[a].apply(dom, mv);
                        if ma.is_empty() {
                            continue;
                        }
                        let (first, sub) = &blocks[ci];
                        let coeff = dom.mul(c, y);
                        for (k, x) in sub.coords(dom, &ma)? {
                            axpy(dom, &mut out, &dom.mul(&coeff, &x), &unit_vector(first + k));
                        }
                    }
                }
            }
            Pairs::Balanced { degrees } => {
                let mut per: BTreeMap<i32, Vector> = BTreeMap::new();
                for (mv, nv, c) in terms {
                    for (&i, x) in mv {
                        for (&j, y) in nv {
                            let deg = self.left.degree(i) + self.right.degree(j);
                            let q = &degrees[&deg];
                            let e = per.entry(deg).or_default();
                            axpy(dom, e, &dom.mul(c, &dom.mul(x, y)), &unit_vector(q.pos[&(i, j)]));
                        }
                    }
                }
                for (deg, v) in per {
                    let q = &degrees[&deg];
                    let w = q.u.apply(dom, &v);
                    for (k, x) in w {
                        if k >= q.rank {
                            out.insert(q.first + k - q.rank, x);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Pair-space representative of basis element `j`, as a sum of terms.
    pub fn representative(&self, j: usize) -> Result<Vec<Term>> {
        match &self.pairs {
            Pairs::Cellular { blocks, .. } => {
                let (ci, k) = locate(blocks, j);
                let g = self.right.generator(ci)?;
                let g = coerce_vec(&g, self.right.domain(), self.domain())?;
                Ok(vec![(blocks[ci].1.basis[k].clone(), g, Scalar::one())])
            }
            Pairs::Balanced { degrees } => {
                let q = degrees
                    .values()
                    .find(|q| q.first <= j && j < q.first + q.lifts.len())
                    .ok_or_else(|| Error::Structure("tensor index out of range".into()))?;
                Ok(q.lifts[j - q.first]
                    .iter()
                    .map(|(&k, x)| {
                        let (i, jj) = q.pairs[k];
                        (unit_vector(i), unit_vector(jj), x.clone())
                    })
                    .collect())
            }
        }
    }

    /// Number of basis elements.
    pub fn dim(&self) -> usize {
        self.module.dim()
    }
}

fn locate(blocks: &[(usize, SubBasis)], j: usize) -> (usize, usize) {
    let mut ci = 0;
    for (i, (first, _)) in blocks.iter().enumerate() {
        if *first <= j {
            ci = i;
        }
    }
    // skip empty blocks sharing the same start
    while ci + 1 < blocks.len() && blocks[ci + 1].0 == blocks[ci].0 && blocks[ci].1.basis.is_empty() {
        ci += 1;
    }
    let mut i = ci;
    while blocks[i].1.basis.len() <= j - blocks[i].0 {
        i -= 1;
    }
    (i, j - blocks[i].0)
}
