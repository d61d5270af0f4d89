//! Finite-rank DG algebras presented by left-multiplication matrices.

use std::collections::BTreeMap;

use super::StructureReport;
use crate::error::{Error, Result};
use crate::kernel::matrix::{axpy, unit_vector};
use crate::kernel::{Domain, GradedModule, Matrix, Scalar, Vector};

/// An idempotent `e` whose left ideal `A e` is spanned by a subset of the
/// basis (as for vertices of a path algebra).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Idempotent {
    pub element: Vector,
    pub span: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgAlgebra {
    pub name: String,
    pub module: GradedModule,
    /// `mult[a]` is the matrix of `x ↦ e_a · x`.
    pub mult: Vec<Matrix>,
    pub unit: Vector,
    pub d: Matrix,
    pub idempotents: Vec<Idempotent>,
}

impl DgAlgebra {
    /// Builds an algebra from a sparse product table `(a, b) ↦ e_a e_b`.
    pub fn from_table(
        name: &str,
        module: GradedModule,
        table: &BTreeMap<(usize, usize), Vector>,
        unit: Vector,
        d: Matrix,
    ) -> Result<Self> {
        let n = module.dim();
        let mut mult = vec![Matrix::zeros(n, n); n];
        for (&(a, b), v) in table {
            if a >= n || b >= n || v.keys().any(|&i| i >= n) {
                return Err(Error::Structure(format!("product index out of range in {name}")));
            }
            mult[a].set_column(b, v.clone());
        }
        let alg = DgAlgebra { name: name.to_string(), module, mult, unit, d, idempotents: vec![] };
        alg.validate_shapes()?;
        Ok(alg)
    }

    fn validate_shapes(&self) -> Result<()> {
        let n = self.dim();
        if self.d.rows() != n || self.d.cols() != n || self.mult.len() != n {
            return Err(Error::Structure(format!("{}: matrix shapes disagree with rank {n}", self.name)));
        }
        for (a, m) in self.mult.iter().enumerate() {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Structure(format!("{}: product matrix {a} has wrong shape", self.name)));
            }
            for (r, c, _) in m.entries() {
                if self.module.degrees[r] != self.module.degrees[a] + self.module.degrees[c] {
                    return Err(Error::Structure(format!("{}: product {a}*{c} is not degree-additive", self.name)));
                }
            }
        }
        for (r, c, _) in self.d.entries() {
            if self.module.degrees[r] != self.module.degrees[c] + 1 {
                return Err(Error::Structure(format!("{}: differential is not of degree +1", self.name)));
            }
        }
        if self.unit.keys().any(|&i| self.module.degrees[i] != 0) {
            return Err(Error::Structure(format!("{}: unit is not of degree 0", self.name)));
        }
        Ok(())
    }

    pub fn domain(&self) -> &Domain {
        &self.module.domain
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    pub fn degree(&self, a: usize) -> i32 {
        self.module.degrees[a]
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Rank one, spanned by the unit: the coefficient ring itself.
    pub fn is_ground(&self) -> bool {
        self.dim() == 1 && self.unit == unit_vector(0) && self.module.degrees[0] == 0
    }

    pub fn is_connective(&self) -> bool {
        self.module.degrees.iter().all(|&d| d <= 0)
    }

    pub fn is_coconnective(&self) -> bool {
        self.module.degrees.iter().all(|&d| d >= 0)
    }

    pub fn basis_product(&self, a: usize, b: usize) -> Vector {
        self.mult[a].column(b)
    }

    pub fn product(&self, x: &Vector, y: &Vector) -> Vector {
        let dom = self.domain();
        let mut out = Vector::new();
        for (&a, xa) in x {
            let v = self.mult[a].apply(dom, y);
            axpy(dom, &mut out, xa, &v);
        }
        out
    }

    /// Left multiplication by an arbitrary element.
    pub fn left_mult(&self, x: &Vector) -> Matrix {
        let dom = self.domain();
        let n = self.dim();
        let mut out = Matrix::zeros(n, n);
        for (&a, xa) in x {
            out = out.lin_comb(dom, xa, &self.mult[a]);
        }
        out
    }

    pub fn differential(&self, x: &Vector) -> Vector {
        self.d.apply(self.domain(), x)
    }

    /// Declares an idempotent; fails unless `A e` is spanned by basis elements.
    pub fn declare_idempotent(&mut self, e: Vector) -> Result<()> {
        let span = self.idempotent_span(&e)?;
        self.idempotents.push(Idempotent { element: e, span });
        Ok(())
    }

    fn idempotent_span(&self, e: &Vector) -> Result<Vec<usize>> {
        if self.product(e, e) != *e {
            return Err(Error::Structure(format!("{}: declared element is not idempotent", self.name)));
        }
        if e.keys().any(|&i| self.degree(i) != 0) || !self.differential(e).is_empty() {
            return Err(Error::Structure(format!("{}: idempotent must be a degree-0 cocycle", self.name)));
        }
        let span: Vec<usize> =
            (0..self.dim()).filter(|&a| self.product(&unit_vector(a), e) == unit_vector(a)).collect();
        for a in 0..self.dim() {
            let ae = self.product(&unit_vector(a), e);
            if ae.keys().any(|i| span.binary_search(i).is_err()) {
                return Err(Error::Structure(format!(
                    "{}: left ideal of idempotent is not spanned by basis elements",
                    self.name
                )));
            }
        }
        Ok(span)
    }

    /// `e · f = (-1)^{|e||f|} f e`.
    pub fn opposite(&self) -> DgAlgebra {
        let dom = self.domain().clone();
        let n = self.dim();
        let mut mult = vec![Matrix::zeros(n, n); n];
        for (a, m) in mult.iter_mut().enumerate() {
            for b in 0..n {
                let ba = self.basis_product(b, a);
                let sign = (self.degree(a) * self.degree(b)) as i64;
                let v: Vector = ba.iter().map(|(&i, x)| (i, dom.signed(x, sign))).collect();
                m.set_column(b, v);
            }
        }
        let name = match self.name.strip_suffix("^op") {
            Some(s) => s.to_string(),
            None => format!("{}^op", self.name),
        };
        let mut op = DgAlgebra {
            name,
            module: self.module.clone(),
            mult,
            unit: self.unit.clone(),
            d: self.d.clone(),
            idempotents: vec![],
        };
        for e in &self.idempotents {
            if let Ok(span) = op.idempotent_span(&e.element) {
                op.idempotents.push(Idempotent { element: e.element.clone(), span });
            }
        }
        op
    }

    /// Associativity, unit laws, `d² = 0`, and Leibniz on all basis tuples.
    pub fn check(&self) -> StructureReport {
        let dom = self.domain();
        let n = self.dim();
        let mut rep = StructureReport::default();
        rep.record(self.d.mul(dom, &self.d).is_zero(), || format!("{}: d∘d ≠ 0", self.name));
        for a in 0..n {
            let ea = unit_vector(a);
            rep.record(self.product(&self.unit, &ea) == ea, || format!("{}: 1·e{a} ≠ e{a}", self.name));
            rep.record(self.product(&ea, &self.unit) == ea, || format!("{}: e{a}·1 ≠ e{a}", self.name));
            for b in 0..n {
                let eb = unit_vector(b);
                let ab = self.basis_product(a, b);
                // d(ab) = d(a) b + (-1)^{|a|} a d(b)
                let lhs = self.differential(&ab);
                let mut rhs = self.product(&self.differential(&ea), &eb);
                let adb = self.product(&ea, &self.differential(&eb));
                axpy(dom, &mut rhs, &dom.signed(&Scalar::one(), self.degree(a) as i64), &adb);
                rep.record(lhs == rhs, || format!("{}: Leibniz fails on (e{a}, e{b})", self.name));
                for c in 0..n {
                    let ec = unit_vector(c);
                    let l = self.product(&ab, &ec);
                    let r = self.product(&ea, &self.basis_product(b, c));
                    rep.record(l == r, || format!("{}: associativity fails on (e{a}, e{b}, e{c})", self.name));
                }
            }
        }
        rep.record(self.unit.is_empty() == (n == 0) && self.differential(&self.unit).is_empty(), || {
            format!("{}: unit is not a nonzero cocycle", self.name)
        });
        rep
    }

    // ---- named constructions -------------------------------------------

    /// The coefficient ring as a rank-one algebra in degree 0.
    pub fn ground(domain: Domain) -> DgAlgebra {
        let module = GradedModule::new(domain, vec![0], vec!["1".into()]);
        let mut table = BTreeMap::new();
        table.insert((0, 0), unit_vector(0));
        DgAlgebra::from_table("ground", module, &table, unit_vector(0), Matrix::zeros(1, 1))
            .expect("ground ring is well formed")
    }

    /// The zero algebra (rank 0), endomorphisms of the zero module.
    pub fn zero(domain: Domain) -> DgAlgebra {
        DgAlgebra {
            name: "zero".into(),
            module: GradedModule::zero(domain),
            mult: vec![],
            unit: Vector::new(),
            d: Matrix::zeros(0, 0),
            idempotents: vec![],
        }
    }

    /// `k[x]/(x^n)` with `x` in degree `deg_x` and zero differential.
    pub fn truncated_polynomial(domain: Domain, n: usize, deg_x: i32) -> Result<DgAlgebra> {
        if n == 0 {
            return Err(Error::Config("truncated polynomial needs n ≥ 1".into()));
        }
        let degrees: Vec<i32> = (0..n).map(|i| i as i32 * deg_x).collect();
        let labels: Vec<String> = (0..n)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            })
            .collect();
        let module = GradedModule::new(domain, degrees, labels);
        let mut table = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                if i + j < n {
                    table.insert((i, j), unit_vector(i + j));
                }
            }
        }
        let alg = DgAlgebra::from_table(&format!("k[x]/x^{n}"), module, &table, unit_vector(0), Matrix::zeros(n, n))?;
        Ok(alg)
    }

    /// Path algebra of an acyclic quiver; vertices `0..v`, arrows
    /// `(source, target)`, all in degree 0. Product is composition:
    /// `p · q` is "p after q". Vertex idempotents are declared.
    pub fn path_algebra(domain: Domain, vertices: usize, arrows: &[(usize, usize)]) -> Result<DgAlgebra> {
        // paths as (source, target, arrow list)
        let mut paths: Vec<(usize, usize, Vec<usize>)> = (0..vertices).map(|v| (v, v, vec![])).collect();
        let mut frontier: Vec<usize> = (0..vertices).collect();
        let mut guard = 0;
        while !frontier.is_empty() {
            guard += 1;
            if guard > 64 {
                return Err(Error::Config("quiver has an oriented cycle".into()));
            }
            let mut next = vec![];
            for &pi in &frontier {
                let (s, t, ref arr) = paths[pi].clone();
                for (ai, &(a_s, a_t)) in arrows.iter().enumerate() {
                    if a_s == t {
                        let mut p = arr.clone();
                        p.push(ai);
                        paths.push((s, a_t, p));
                        next.push(paths.len() - 1);
                    }
                }
            }
            frontier = next;
        }
        for &(s, t) in arrows {
            if s >= vertices || t >= vertices {
                return Err(Error::Config("arrow endpoint out of range".into()));
            }
        }
        let n = paths.len();
        let labels: Vec<String> = paths
            .iter()
            .map(|(s, _, arr)| {
                if arr.is_empty() {
                    format!("e{}", s + 1)
                } else {
                    arr.iter().rev().map(|a| format!("a{}", a + 1)).collect::<Vec<_>>().join("")
                }
            })
            .collect();
        let module = GradedModule::new(domain, vec![0; n], labels);
        let mut table = BTreeMap::new();
        for (i, (ps, pt, parr)) in paths.iter().enumerate() {
            for (j, (qs, qt, qarr)) in paths.iter().enumerate() {
                // p after q requires source(p) = target(q)
                if ps != qt {
                    continue;
                }
                let mut arr = qarr.clone();
                arr.extend(parr.iter().copied());
                let k = paths
                    .iter()
                    .position(|(s, t, a)| *s == *qs && *t == *pt && *a == arr)
                    .expect("composite path enumerated");
                table.insert((i, j), unit_vector(k));
            }
        }
        let mut unit = Vector::new();
        for v in 0..vertices {
            unit.insert(v, Scalar::one());
        }
        let mut alg = DgAlgebra::from_table("path", module, &table, unit, Matrix::zeros(n, n))?;
        for v in 0..vertices {
            alg.declare_idempotent(unit_vector(v))?;
        }
        Ok(alg)
    }

    /// Index of the idempotent whose element is the basis vector `e_i`.
    pub fn idempotent_index(&self, e: &Vector) -> Option<usize> {
        self.idempotents.iter().position(|x| x.element == *e)
    }
}
