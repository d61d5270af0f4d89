//! DG modules with optional left and right actions and semifree cell data.

use std::sync::Arc;

use super::algebra::DgAlgebra;
use super::StructureReport;
use crate::error::{Error, Result};
use crate::kernel::matrix::{axpy, unit_vector};
use crate::kernel::{Domain, GradedModule, Matrix, Scalar, Vector};

/// Action of a DG algebra on a module: `mats[a]` is the matrix of the action
/// of basis element `a` (on the left for left actions, on the right for right
/// actions).
#[derive(Clone, Debug)]
pub struct Action {
    pub alg: Arc<DgAlgebra>,
    pub mats: Vec<Matrix>,
}

impl Action {
    /// Action of an arbitrary algebra element.
    pub fn element(&self, dom: &Domain, x: &Vector) -> Result<Matrix> {
        let n = self.mats.first().map_or(0, |m| m.rows());
        let mut out = Matrix::zeros(n, n);
        for (&a, xa) in x {
            let c = dom.coerce(self.alg.domain(), xa)?;
            out = out.lin_comb(dom, &c, &self.mats[a]);
        }
        Ok(out)
    }

    /// Scalar action of the ground ring on a module of rank `n`.
    pub fn scalar(alg: Arc<DgAlgebra>, n: usize) -> Result<Action> {
        if !alg.is_ground() {
            return Err(Error::Structure(format!("{} is not a ground ring", alg.name)));
        }
        Ok(Action { alg, mats: vec![Matrix::identity(n)] })
    }
}

/// Semifree generator `g` of a given degree; its block of the module basis
/// is `{ a·g : a in span }` where `span` is the basis of `A e` (or of `A`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub label: String,
    pub degree: i32,
    pub idempotent: Option<usize>,
    pub offset: usize,
}

/// Cells listed in filtration order: each generator's differential lies in
/// the span of strictly earlier cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellStructure {
    pub cells: Vec<Cell>,
}

#[derive(Clone, Debug)]
pub struct DgModule {
    pub name: String,
    pub module: GradedModule,
    pub d: Matrix,
    pub left: Option<Action>,
    pub right: Option<Action>,
    pub cells: Option<CellStructure>,
}

/// Basis of `A e` (or of `A` when no idempotent is given).
pub fn cell_span(alg: &DgAlgebra, idempotent: Option<usize>) -> Vec<usize> {
    match idempotent {
        Some(i) => alg.idempotents[i].span.clone(),
        None => (0..alg.dim()).collect(),
    }
}

/// Generator data for [`DgModule::semifree`].
#[derive(Clone, Debug)]
pub struct CellSpec {
    pub label: String,
    pub degree: i32,
    pub idempotent: Option<usize>,
    /// `d g` in the basis of the cells built so far.
    pub attaching: Vector,
}

impl DgModule {
    pub fn domain(&self) -> &Domain {
        &self.module.domain
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.module.degrees[i]
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn left_alg(&self) -> Option<&Arc<DgAlgebra>> {
        self.left.as_ref().map(|a| &a.alg)
    }

    pub fn right_alg(&self) -> Option<&Arc<DgAlgebra>> {
        self.right.as_ref().map(|a| &a.alg)
    }

    pub fn differential(&self, v: &Vector) -> Vector {
        self.d.apply(self.domain(), v)
    }

    /// Zero module over `alg`, with coefficients in `domain`.
    pub fn zero(alg: Arc<DgAlgebra>, domain: Domain) -> DgModule {
        let n = alg.dim();
        DgModule {
            name: "0".into(),
            module: GradedModule::zero(domain),
            d: Matrix::zeros(0, 0),
            left: Some(Action { alg, mats: vec![Matrix::zeros(0, 0); n] }),
            right: None,
            cells: Some(CellStructure { cells: vec![] }),
        }
    }

    /// A complex of free modules over a ground ring; cells are the basis
    /// elements ordered by decreasing degree.
    pub fn over_ground(name: &str, alg: Arc<DgAlgebra>, module: GradedModule, d: Matrix) -> Result<DgModule> {
        let n = module.dim();
        if !alg.domain().maps_into(&module.domain) {
            return Err(Error::Domain(format!("{} does not map into {}", alg.domain(), module.domain)));
        }
        let left = Action::scalar(alg, n)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (-module.degrees[i], i));
        let cells = order
            .into_iter()
            .map(|i| Cell { label: module.labels[i].clone(), degree: module.degrees[i], idempotent: None, offset: i })
            .collect();
        let m = DgModule {
            name: name.into(),
            module,
            d,
            left: Some(left),
            right: None,
            cells: Some(CellStructure { cells }),
        };
        m.validate_shapes()?;
        Ok(m)
    }

    /// Semifree module from generators in filtration order.
    pub fn semifree(name: &str, alg: Arc<DgAlgebra>, domain: Domain, specs: &[CellSpec]) -> Result<DgModule> {
        if !alg.domain().maps_into(&domain) {
            return Err(Error::Domain(format!("{} does not map into {domain}", alg.domain())));
        }
        let adom = alg.domain().clone();
        let mut degrees = Vec::new();
        let mut labels = Vec::new();
        let mut cells = Vec::new();
        // per-basis-element: (cell index, algebra basis index)
        let mut owner: Vec<(usize, usize)> = Vec::new();
        for (ci, s) in specs.iter().enumerate() {
            if let Some(i) = s.idempotent {
                if i >= alg.idempotents.len() {
                    return Err(Error::Structure(format!("cell {} names unknown idempotent {i}", s.label)));
                }
            }
            let offset = degrees.len();
            if s.attaching.keys().any(|&k| k >= offset) {
                return Err(Error::Structure(format!("cell {} attaches outside earlier cells", s.label)));
            }
            for a in cell_span(&alg, s.idempotent) {
                degrees.push(alg.degree(a) + s.degree);
                labels.push(if alg.is_ground() {
                    s.label.clone()
                } else {
                    format!("{}·{}", alg.module.labels[a], s.label)
                });
                owner.push((ci, a));
            }
            cells.push(Cell { label: s.label.clone(), degree: s.degree, idempotent: s.idempotent, offset });
        }
        let n = degrees.len();
        let pos = |ci: usize, a: usize| -> usize {
            let c = &cells[ci];
            let span = cell_span(&alg, c.idempotent);
            c.offset + span.iter().position(|&x| x == a).expect("element of the cell span")
        };
        // left action: b · (a g) = (b a) g
        let mut mats = vec![Matrix::zeros(n, n); alg.dim()];
        for (j, &(ci, a)) in owner.iter().enumerate() {
            for (b, m) in mats.iter_mut().enumerate() {
                let ba = alg.basis_product(b, a);
                let mut col = Vector::new();
                for (&k, x) in &ba {
                    col.insert(pos(ci, k), domain.coerce(&adom, x)?);
                }
                m.set_column(j, col);
            }
        }
        // differential: d(a g) = d(a) g + (-1)^{|a|} a · d(g)
        let mut d = Matrix::zeros(n, n);
        for (j, &(ci, a)) in owner.iter().enumerate() {
            let mut col = Vector::new();
            for (&k, x) in &alg.differential(&unit_vector(a)) {
                axpy(&domain, &mut col, &domain.coerce(&adom, x)?, &unit_vector(pos(ci, k)));
            }
            let dg: Vector =
                specs[ci].attaching.iter().map(|(&k, x)| Ok((k, domain.element(x)?))).collect::<Result<_>>()?;
            let adg = mats[a].apply(&domain, &dg);
            axpy(&domain, &mut col, &domain.signed(&Scalar::one(), alg.degree(a) as i64), &adg);
            d.set_column(j, col);
        }
        let m = DgModule {
            name: name.into(),
            module: GradedModule::new(domain, degrees, labels),
            d,
            left: Some(Action { alg, mats }),
            right: None,
            cells: Some(CellStructure { cells }),
        };
        m.validate_shapes()?;
        Ok(m)
    }

    /// The free module `A` itself (one cell in degree 0, or one per idempotent
    /// if idempotents are declared and sum to the unit).
    pub fn free(alg: Arc<DgAlgebra>, domain: Domain) -> Result<DgModule> {
        let specs: Vec<CellSpec> = if alg.idempotents.is_empty() || !idempotents_sum_to_unit(&alg) {
            vec![CellSpec { label: "g".into(), degree: 0, idempotent: None, attaching: Vector::new() }]
        } else {
            (0..alg.idempotents.len())
                .map(|i| CellSpec {
                    label: format!("g{}", i + 1),
                    degree: 0,
                    idempotent: Some(i),
                    attaching: Vector::new(),
                })
                .collect()
        };
        DgModule::semifree(&alg.name.clone(), alg, domain, &specs)
    }

    pub fn named(mut self, name: &str) -> DgModule {
        self.name = name.into();
        self
    }

    /// The vector of generator `c` (the element `e·g`, or `1·g`).
    pub fn generator(&self, c: usize) -> Result<Vector> {
        let cs = self.cells.as_ref().ok_or_else(|| Error::Structure(format!("{} is not semifree", self.name)))?;
        let alg = &self.left.as_ref().expect("semifree modules carry a left action").alg;
        let cell = &cs.cells[c];
        let e = match cell.idempotent {
            Some(i) => alg.idempotents[i].element.clone(),
            None => alg.unit.clone(),
        };
        let span = cell_span(alg, cell.idempotent);
        let mut v = Vector::new();
        for (&a, x) in &e {
            let k = span
                .iter()
                .position(|&s| s == a)
                .ok_or_else(|| Error::Structure("idempotent outside its own span".into()))?;
            v.insert(cell.offset + k, self.domain().coerce(alg.domain(), x)?);
        }
        Ok(v)
    }

    pub fn cell_count(&self) -> Option<usize> {
        self.cells.as_ref().map(|c| c.cells.len())
    }

    pub(crate) fn validate_shapes(&self) -> Result<()> {
        let n = self.dim();
        let deg = &self.module.degrees;
        if self.d.rows() != n || self.d.cols() != n {
            return Err(Error::Structure(format!("{}: differential has wrong shape", self.name)));
        }
        if !self.d.entries().all(|(r, c, _)| deg[r] == deg[c] + 1) {
            return Err(Error::Structure(format!("{}: differential is not of degree +1", self.name)));
        }
        for (side, act) in [("left", &self.left), ("right", &self.right)] {
            if let Some(act) = act {
                if act.mats.len() != act.alg.dim() {
                    return Err(Error::Structure(format!("{}: {side} action table has wrong length", self.name)));
                }
                if !act.alg.domain().maps_into(self.domain()) {
                    return Err(Error::Domain(format!(
                        "{}: {side} algebra over {} cannot act on a {}-module",
                        self.name,
                        act.alg.domain(),
                        self.domain()
                    )));
                }
                for (a, m) in act.mats.iter().enumerate() {
                    if m.rows() != n || m.cols() != n {
                        return Err(Error::Structure(format!("{}: {side} action {a} has wrong shape", self.name)));
                    }
                    let da = act.alg.degree(a);
                    if !m.entries().all(|(r, c, _)| deg[r] == deg[c] + da) {
                        return Err(Error::Structure(format!("{}: {side} action {a} is not homogeneous", self.name)));
                    }
                }
            }
        }
        Ok(())
    }

    /// `d² = 0`, unit, associativity and Leibniz for each action, and the
    /// bimodule compatibility `(a m) b = a (m b)`.
    pub fn check(&self) -> StructureReport {
        let mut rep = StructureReport::default();
        let dom = self.domain().clone();
        let n = self.dim();
        if let Err(e) = self.validate_shapes() {
            rep.record(false, || e.to_string());
            return rep;
        }
        rep.record(self.d.mul(&dom, &self.d).is_zero(), || format!("{}: d∘d ≠ 0", self.name));
        let parity: Vec<i64> = self.module.degrees.iter().map(|&d| d as i64).collect();
        for (side, act) in [(Side::Left, &self.left), (Side::Right, &self.right)] {
            let Some(act) = act else { continue };
            let alg = &act.alg;
            let conv = |x: &Vector| act.element(&dom, x);
            match conv(&alg.unit) {
                Ok(u) => rep.record(u == Matrix::identity(n) || n == 0, || {
                    format!("{}: {side:?} unit does not act as identity", self.name)
                }),
                Err(e) => rep.record(false, || e.to_string()),
            }
            for a in 0..alg.dim() {
                let la = &act.mats[a];
                // Leibniz
                let Ok(lda) = conv(&alg.differential(&unit_vector(a))) else {
                    rep.record(false, || format!("{}: coefficient coercion failed", self.name));
                    continue;
                };
                let ok = match side {
                    Side::Left => {
                        // d L_a - (-1)^{|a|} L_a d = L_{da}
                        let lhs = self.d.mul(&dom, la).lin_comb(
                            &dom,
                            &dom.signed(&dom.int(-1), alg.degree(a) as i64),
                            &la.mul(&dom, &self.d),
                        );
                        lhs == lda
                    }
                    Side::Right => {
                        // d(m a) = d(m) a + (-1)^{|m|} m d(a), column by column
                        (0..n).all(|m| {
                            let em = unit_vector(m);
                            let lhs = self.d.apply(&dom, &la.apply(&dom, &em));
                            let mut rhs = la.apply(&dom, &self.d.apply(&dom, &em));
                            axpy(&dom, &mut rhs, &dom.signed(&Scalar::one(), parity[m]), &lda.apply(&dom, &em));
                            lhs == rhs
                        })
                    }
                };
                rep.record(ok, || format!("{}: {side:?} Leibniz fails for {}", self.name, alg.module.labels[a]));
                for b in 0..alg.dim() {
                    let lb = &act.mats[b];
                    let Ok(lab) = conv(&alg.basis_product(a, b)) else { continue };
                    let comp = match side {
                        Side::Left => la.mul(&dom, lb),
                        Side::Right => lb.mul(&dom, la),
                    };
                    rep.record(comp == lab, || {
                        format!(
                            "{}: {side:?} associativity fails for ({}, {})",
                            self.name, alg.module.labels[a], alg.module.labels[b]
                        )
                    });
                }
            }
        }
        if let (Some(l), Some(r)) = (&self.left, &self.right) {
            for (a, la) in l.mats.iter().enumerate() {
                for (b, rb) in r.mats.iter().enumerate() {
                    rep.record(la.mul(&dom, rb) == rb.mul(&dom, la), || {
                        format!(
                            "{}: bimodule compatibility fails for ({}, {})",
                            self.name, l.alg.module.labels[a], r.alg.module.labels[b]
                        )
                    });
                }
            }
        }
        if let Some(cs) = &self.cells {
            rep.record(self.check_cells(cs).is_ok(), || format!("{}: cell data inconsistent", self.name));
        }
        rep
    }

    fn check_cells(&self, cs: &CellStructure) -> Result<()> {
        let alg = &self.left.as_ref().ok_or_else(|| Error::Structure("cells without action".into()))?.alg;
        let mut seen = std::collections::BTreeMap::new();
        for (ci, c) in cs.cells.iter().enumerate() {
            let span = cell_span(alg, c.idempotent);
            for k in 0..span.len() {
                seen.insert(c.offset + k, ci);
            }
        }
        if seen.len() != self.dim() || seen.keys().copied().ne(0..self.dim()) {
            return Err(Error::Structure("cells do not tile the basis".into()));
        }
        let act = self.left.as_ref().expect("checked above");
        for (ci, c) in cs.cells.iter().enumerate() {
            let g = self.generator(ci)?;
            for (k, &a) in cell_span(alg, c.idempotent).iter().enumerate() {
                if act.mats[a].apply(self.domain(), &g) != unit_vector(c.offset + k) {
                    return Err(Error::Structure("cell block is not the orbit basis of its generator".into()));
                }
            }
        }
        for ci in 0..cs.cells.len() {
            let g = self.generator(ci)?;
            let dg = self.differential(&g);
            if dg.keys().any(|k| seen[k] >= ci) {
                return Err(Error::Structure("attaching map is not filtered".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
enum Side {
    Left,
    Right,
}

pub fn idempotents_sum_to_unit(alg: &DgAlgebra) -> bool {
    let dom = alg.domain();
    let mut s = Vector::new();
    for e in &alg.idempotents {
        axpy(dom, &mut s, &Scalar::one(), &e.element);
    }
    s == alg.unit
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_residue_complex() {
        let z = Arc::new(DgAlgebra::ground(Domain::Integer));
        let m = DgModule::semifree(
            "Z/2",
            z,
            Domain::Integer,
            &[
                CellSpec { label: "e0".into(), degree: 0, idempotent: None, attaching: Vector::new() },
                CellSpec {
                    label: "e-1".into(),
                    degree: -1,
                    idempotent: None,
                    attaching: [(0, Scalar::from_i64(2))].into_iter().collect(),
                },
            ],
        )
        .unwrap();
        assert_eq!(m.module.degrees, vec![0, -1]);
        assert!(m.check().ok());
    }

    #[test]
    fn free_path_algebra_module_uses_vertex_cells() {
        let a = Arc::new(DgAlgebra::path_algebra(Domain::prime(2).unwrap(), 2, &[(0, 1)]).unwrap());
        let m = DgModule::free(a, Domain::prime(2).unwrap()).unwrap();
        assert_eq!(m.cell_count(), Some(2));
        assert_eq!(m.dim(), 3);
        assert!(m.check().ok());
    }

    #[test]
    fn check_detects_bad_differential() {
        let z = Arc::new(DgAlgebra::ground(Domain::Integer));
        let module = GradedModule::new(Domain::Integer, vec![-1, 0, 1], vec!["a".into(), "b".into(), "c".into()]);
        let mut d = Matrix::zeros(3, 3);
        d.set(1, 0, Scalar::one());
        d.set(2, 1, Scalar::one());
        let m = DgModule::over_ground("bad", z, module, d).unwrap();
        assert!(!m.check().ok());
    }
}
