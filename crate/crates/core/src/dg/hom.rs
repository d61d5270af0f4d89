//! Hom complexes `Hom_A(M, N)` of left DG modules.
//!
//! A degree-`n` element is an `A`-linear map with `f(a m) = (-1)^{|a| n} a f(m)`;
//! the differential is `d(f) = d_N f - (-1)^{|f|} f d_M`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::module::{cell_span, Action, DgModule};
use super::same_alg;
use crate::error::{Error, Result};
use crate::kernel::matrix::{axpy, unit_vector};
use crate::kernel::snf::{smith, Smith};
use crate::kernel::{Domain, GradedModule, Matrix, Scalar, Vector};

/// Which construction produced the complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomRoute {
    /// Source is semifree: a map is determined by the images of generators.
    Cellular,
    /// Kernel of the `A`-linearity constraint system.
    Constraints,
}

/// Basis of a submodule of a free module together with a coordinate solver.
#[derive(Clone, Debug)]
enum Sub {
    Coordinates(Vec<usize>),
    General { basis: Vec<Vector>, smith: Smith },
}

impl Sub {
    fn new(dom: &Domain, basis: Vec<Vector>, ambient: usize) -> Sub {
        if basis.iter().all(|v| v.len() == 1 && v.values().next().is_some_and(|x| x.is_one())) {
            return Sub::Coordinates(basis.iter().map(|v| *v.keys().next().expect("nonempty")).collect());
        }
        let m = Matrix::from_columns(ambient, basis.clone());
        Sub::General { smith: smith(dom, &m), basis }
    }

    fn len(&self) -> usize {
        match self {
            Sub::Coordinates(v) => v.len(),
            Sub::General { basis, .. } => basis.len(),
        }
    }

    fn vector(&self, k: usize) -> Vector {
        match self {
            Sub::Coordinates(v) => unit_vector(v[k]),
            Sub::General { basis, .. } => basis[k].clone(),
        }
    }

    fn coords(&self, dom: &Domain, w: &Vector) -> Result<Vector> {
        match self {
            Sub::Coordinates(idx) => {
                let mut out = Vector::new();
                let mut seen = 0;
                for (k, i) in idx.iter().enumerate() {
                    if let Some(x) = w.get(i) {
                        out.insert(k, x.clone());
                        seen += 1;
                    }
                }
                if seen != w.len() {
                    return Err(Error::Structure("vector leaves the expected subspace".into()));
                }
                Ok(out)
            }
            Sub::General { smith, .. } => {
                smith.solve(dom, w).ok_or_else(|| Error::Structure("vector leaves the expected subspace".into()))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct HomComplex {
    pub module: Arc<DgModule>,
    pub source: Arc<DgModule>,
    pub target: Arc<DgModule>,
    /// Full matrix (target rows, source columns) of each basis element.
    pub maps: Vec<Matrix>,
    pub route: HomRoute,
    /// Per degree: the basis indices of that degree and the coordinate reader.
    reader: BTreeMap<i32, Reader>,
}

#[derive(Clone, Debug)]
enum Reader {
    /// Per cell: the generator vector and the subspace of its images.
    Cells { first: usize, parts: Vec<(Vector, Sub)> },
    /// Entries of the map that are free unknowns, and a solver over them.
    Entries { first: usize, unknowns: Vec<(usize, usize)>, sub: Sub },
}

fn sign(dom: &Domain, k: i64) -> Scalar {
    dom.signed(&Scalar::one(), k)
}

/// Coerces a source-side matrix into the Hom domain.
fn lift(m: &Matrix, from: &Domain, to: &Domain) -> Result<Matrix> {
    if from == to {
        Ok(m.clone())
    } else {
        m.coerce(from, to)
    }
}

/// `Hom_A(M, N)` with residual actions: a right action on `M` becomes a left
/// action `(s f)(m) = (-1)^{|s|(|f|+|m|)} f(m s)`; a right action on `N`
/// stays a right action `(f t)(m) = (-1)^{|t||m|} f(m) t`.
pub fn hom_complex(m: &Arc<DgModule>, n: &Arc<DgModule>) -> Result<HomComplex> {
    if m.cells.is_some() {
        hom_with(m, n, HomRoute::Cellular)
    } else {
        hom_with(m, n, HomRoute::Constraints)
    }
}

pub fn hom_with(m: &Arc<DgModule>, n: &Arc<DgModule>, route: HomRoute) -> Result<HomComplex> {
    let (ma, na) = match (&m.left, &n.left) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Structure(format!("Hom({}, {}) needs left actions on both", m.name, n.name))),
    };
    if !same_alg(&ma.alg, &na.alg) {
        return Err(Error::Structure(format!(
            "Hom({}, {}): acting algebras {} and {} differ",
            m.name, n.name, ma.alg.name, na.alg.name
        )));
    }
    let dom = n.domain().clone();
    if !m.domain().maps_into(&dom) && !m.is_zero() {
        return Err(Error::Domain(format!(
            "Hom from a {}-module into a {}-module is not computed underived",
            m.domain(),
            dom
        )));
    }
    let mdom = m.domain().clone();
    let md = lift(&m.d, &mdom, &dom)?;
    let mlmats: Vec<Matrix> = ma.mats.iter().map(|x| lift(x, &mdom, &dom)).collect::<Result<_>>()?;
    let alg = ma.alg.clone();

    // basis elements grouped by degree
    let mut degrees = Vec::new();
    let mut labels = Vec::new();
    let mut maps = Vec::new();
    let mut reader = BTreeMap::new();
    let route = if route == HomRoute::Cellular && m.cells.is_none() { HomRoute::Constraints } else { route };

    let mut candidates: Vec<i32> = Vec::new();
    for &dn in &n.module.degrees {
        for &dm in &m.module.degrees {
            candidates.push(dn - dm);
        }
    }
    candidates.sort_unstable();
    candidates.dedup();

    match route {
        HomRoute::Cellular => {
            let cs = m.cells.as_ref().expect("cellular route");
            let gens: Vec<Vector> = (0..cs.cells.len())
                .map(|c| m.generator(c).and_then(|g| lift_vec(&g, &mdom, &dom)))
                .collect::<Result<_>>()?;
            for &deg in &candidates {
                let first = maps.len();
                let mut parts = Vec::new();
                for (ci, cell) in cs.cells.iter().enumerate() {
                    let target_deg = cell.degree + deg;
                    let idx = n.module.in_degree(target_deg);
                    let basis = image_basis(&dom, n, &alg, cell.idempotent, &idx)?;
                    let sub = Sub::new(&dom, basis, n.dim());
                    let span = cell_span(&alg, cell.idempotent);
                    for k in 0..sub.len() {
                        let v = sub.vector(k);
                        // f(a g) = (-1)^{|a| deg} a f(g)
                        let mut f = Matrix::zeros(n.dim(), m.dim());
                        for (j, &a) in span.iter().enumerate() {
                            let col = na.mats[a].apply(&dom, &v);
                            let s = sign(&dom, (alg.degree(a) * deg) as i64);
                            let mut c = Vector::new();
                            axpy(&dom, &mut c, &s, &col);
                            f.set_column(cell.offset + j, c);
                        }
                        degrees.push(deg);
                        labels.push(format!("[{}↦{}]", cell.label, describe(n, &v)));
                        maps.push(f);
                    }
                    parts.push((gens[ci].clone(), sub));
                }
                if maps.len() > first {
                    reader.insert(deg, Reader::Cells { first, parts });
                }
            }
        }
        HomRoute::Constraints => {
            for &deg in &candidates {
                let unknowns: Vec<(usize, usize)> = (0..n.dim())
                    .flat_map(|r| (0..m.dim()).map(move |c| (r, c)))
                    .filter(|&(r, c)| n.degree(r) == m.degree(c) + deg)
                    .collect();
                if unknowns.is_empty() {
                    continue;
                }
                let pos: BTreeMap<(usize, usize), usize> =
                    unknowns.iter().enumerate().map(|(i, &rc)| (rc, i)).collect();
                // f L^M_a - (-1)^{|a| deg} L^N_a f = 0, one row per (a, r, c)
                let mut rows: BTreeMap<(usize, usize, usize), Vector> = BTreeMap::new();
                for a in 0..alg.dim() {
                    let s = dom.neg(&sign(&dom, (alg.degree(a) * deg) as i64));
                    let lmt = mlmats[a].transpose();
                    let ln = &na.mats[a];
                    for (&(r, c), &u) in &pos {
                        // contribution of unknown f[r][c] to (f L^M_a)[r][c'] = f[r][c] L^M_a[c][c']
                        for (c2, x) in lmt.column(c) {
                            let e = rows.entry((a, r, c2)).or_default();
                            axpy(&dom, e, &x, &unit_vector(u));
                        }
                        // and to (L^N_a f)[r'][c] = L^N_a[r'][r] f[r][c]
                        for (r2, x) in ln.column(r) {
                            let e = rows.entry((a, r2, c)).or_default();
                            axpy(&dom, e, &dom.mul(&s, &x), &unit_vector(u));
                        }
                    }
                }
                let constraint = {
                    let rows: Vec<Vector> = rows.into_values().filter(|v| !v.is_empty()).collect();
                    let mut cm = Matrix::zeros(rows.len(), unknowns.len());
                    for (i, r) in rows.iter().enumerate() {
                        for (&j, x) in r {
                            cm.set(i, j, x.clone());
                        }
                    }
                    cm
                };
                let kernel = smith(&dom, &constraint).kernel();
                if kernel.is_empty() {
                    continue;
                }
                let first = maps.len();
                for v in &kernel {
                    let mut f = Matrix::zeros(n.dim(), m.dim());
                    for (&u, x) in v {
                        let (r, c) = unknowns[u];
                        f.set(r, c, x.clone());
                    }
                    degrees.push(deg);
                    labels.push(format!("h{}", maps.len()));
                    maps.push(f);
                }
                let sub = Sub::new(&dom, kernel, unknowns.len());
                reader.insert(deg, Reader::Entries { first, unknowns, sub });
            }
        }
    }

    let total = maps.len();
    let mut hc = HomComplex {
        module: Arc::new(DgModule {
            name: format!("Hom({}, {})", m.name, n.name),
            module: GradedModule::new(dom.clone(), degrees.clone(), labels),
            d: Matrix::zeros(total, total),
            left: None,
            right: None,
            cells: None,
        }),
        source: m.clone(),
        target: n.clone(),
        maps,
        route,
        reader,
    };

    // differential d(f) = d_N f - (-1)^{|f|} f d_M
    let mut d = Matrix::zeros(total, total);
    for j in 0..total {
        let f = &hc.maps[j];
        let deg = degrees[j];
        let df = n.d.mul(&dom, f).lin_comb(&dom, &dom.neg(&sign(&dom, deg as i64)), &f.mul(&dom, &md));
        d.set_column(j, hc.coords(deg + 1, &df)?);
    }

    let mut left = None;
    if let Some(r) = &m.right {
        let mut mats = Vec::new();
        for (s, rs) in r.mats.iter().enumerate() {
            let rs = lift(rs, &mdom, &dom)?;
            let ds = r.alg.degree(s);
            let mut act = Matrix::zeros(total, total);
            for j in 0..total {
                let fdeg = degrees[j];
                let mut signed = rs.clone();
                let diag: Vec<bool> = (0..m.dim()).map(|c| (ds * (fdeg + m.degree(c))) % 2 != 0).collect();
                signed = scale_columns(&dom, &signed, &diag);
                let sf = hc.maps[j].mul(&dom, &signed);
                act.set_column(j, hc.coords(fdeg + ds, &sf)?);
            }
            mats.push(act);
        }
        left = Some(Action { alg: r.alg.clone(), mats });
    }
    let mut right = None;
    if let Some(r) = &n.right {
        let mut mats = Vec::new();
        for (t, rt) in r.mats.iter().enumerate() {
            let dt = r.alg.degree(t);
            let diag: Vec<bool> = (0..m.dim()).map(|c| (dt * m.degree(c)) % 2 != 0).collect();
            let mut act = Matrix::zeros(total, total);
            for j in 0..total {
                let ft = scale_columns(&dom, &rt.mul(&dom, &hc.maps[j]), &diag);
                act.set_column(j, hc.coords(degrees[j] + dt, &ft)?);
            }
            mats.push(act);
        }
        right = Some(Action { alg: r.alg.clone(), mats });
    }
    let module = Arc::get_mut(&mut hc.module).expect("fresh Arc");
    module.d = d;
    module.left = left;
    module.right = right;
    Ok(hc)
}

fn scale_columns(dom: &Domain, m: &Matrix, neg: &[bool]) -> Matrix {
    let mut out = Matrix::zeros(m.rows(), m.cols());
    for (r, c, v) in m.entries() {
        out.set(r, c, if neg[c] { dom.neg(v) } else { v.clone() });
    }
    out
}

fn lift_vec(v: &Vector, from: &Domain, to: &Domain) -> Result<Vector> {
    v.iter().map(|(&k, x)| Ok((k, to.coerce(from, x)?))).collect()
}

fn describe(n: &DgModule, v: &Vector) -> String {
    if v.len() == 1 {
        let (&k, x) = v.iter().next().expect("one entry");
        if x.is_one() {
            return n.module.labels[k].clone();
        }
    }
    let parts: Vec<String> = v.iter().map(|(&k, x)| format!("{x}{}", n.module.labels[k])).collect();
    parts.join("+")
}

/// Basis of `e N^k` (or of `N^k`) inside the degree block `idx`.
fn image_basis(
    dom: &Domain,
    n: &DgModule,
    alg: &crate::dg::DgAlgebra,
    idempotent: Option<usize>,
    idx: &[usize],
) -> Result<Vec<Vector>> {
    let Some(i) = idempotent else {
        return Ok(idx.iter().map(|&k| unit_vector(k)).collect());
    };
    let e = &alg.idempotents[i].element;
    let le = n.left.as_ref().expect("left action").element(dom, e)?;
    // fast path: e fixes or kills each basis vector
    let mut keep = Vec::new();
    let mut simple = true;
    for &k in idx {
        let img = le.column(k);
        if img.is_empty() {
            continue;
        }
        if img == unit_vector(k) {
            keep.push(unit_vector(k));
        } else {
            simple = false;
            break;
        }
    }
    if simple {
        return Ok(keep);
    }
    // kernel of (1 - e) on the block
    let block = Matrix::identity(n.dim()).sub(dom, &le).select(idx, idx);
    Ok(smith(dom, &block).kernel().into_iter().map(|v| v.into_iter().map(|(j, x)| (idx[j], x)).collect()).collect())
}

impl HomComplex {
    pub fn domain(&self) -> &Domain {
        self.module.domain()
    }

    pub fn dim(&self) -> usize {
        self.maps.len()
    }

    /// Full matrix of a Hom element.
    pub fn map_of(&self, v: &Vector) -> Matrix {
        let dom = self.domain();
        let mut out = Matrix::zeros(self.target.dim(), self.source.dim());
        for (&j, x) in v {
            out = out.lin_comb(dom, x, &self.maps[j]);
        }
        out
    }

    /// Coordinates of an `A`-linear map of degree `deg`.
    pub fn coords(&self, deg: i32, f: &Matrix) -> Result<Vector> {
        let dom = self.domain().clone();
        let Some(reader) = self.reader.get(&deg) else {
            if f.is_zero() {
                return Ok(Vector::new());
            }
            return Err(Error::Structure(format!("no Hom component in degree {deg} for a nonzero map")));
        };
        let mut out = Vector::new();
        match reader {
            Reader::Cells { first, parts } => {
                let mut offset = *first;
                for (g, sub) in parts {
                    let w = f.apply(&dom, g);
                    for (k, x) in sub.coords(&dom, &w)? {
                        out.insert(offset + k, x);
                    }
                    offset += sub.len();
                }
            }
            Reader::Entries { first, unknowns, sub } => {
                let pos: BTreeMap<(usize, usize), usize> =
                    unknowns.iter().enumerate().map(|(i, &rc)| (rc, i)).collect();
                let mut w = Vector::new();
                for (r, c, x) in f.entries() {
                    let u = pos
                        .get(&(r, c))
                        .ok_or_else(|| Error::Structure("map has entries outside its degree".into()))?;
                    w.insert(*u, x.clone());
                }
                for (k, x) in sub.coords(&dom, &w)? {
                    out.insert(first + k, x);
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::cohomology::cohomology;
    use crate::dg::module::CellSpec;
    use crate::dg::DgAlgebra;

    fn residue(n: i64) -> Arc<DgModule> {
        let z = Arc::new(DgAlgebra::ground(Domain::Integer));
        Arc::new(
            DgModule::semifree(
                "Z/n",
                z,
                Domain::Integer,
                &[
                    CellSpec { label: "b".into(), degree: 0, idempotent: None, attaching: Vector::new() },
                    CellSpec {
                        label: "a".into(),
                        degree: -1,
                        idempotent: None,
                        attaching: [(0, Scalar::from_i64(n))].into_iter().collect(),
                    },
                ],
            )
            .unwrap(),
        )
    }

    #[test]
    fn ext_of_residue_into_integers() {
        let c = residue(2);
        let z = Arc::new(DgModule::free(c.left_alg().unwrap().clone(), Domain::Integer).unwrap());
        let h = hom_complex(&c, &z).unwrap();
        assert!(h.module.check().ok());
        let coh = cohomology(&h.module).unwrap();
        assert_eq!(coh.degrees(), vec![1]);
        assert_eq!(coh.summary()[&1].to_string(), "Z/2");
    }

    #[test]
    fn routes_agree_on_endomorphisms() {
        let c = residue(2);
        let a = hom_with(&c, &c, HomRoute::Cellular).unwrap();
        let b = hom_with(&c, &c, HomRoute::Constraints).unwrap();
        assert_eq!(a.module.module.degree_counts(), b.module.module.degree_counts());
        let ha = cohomology(&a.module).unwrap().summary();
        let hb = cohomology(&b.module).unwrap().summary();
        assert_eq!(ha, hb);
        assert_eq!(ha.len(), 2);
    }
}
