//! Graded free modules, homogeneous maps, and subquotients of complexes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::domain::{Domain, Scalar};
use super::matrix::{Matrix, Vector};
use super::snf::{smith, Smith};
use crate::error::{Error, Result};

/// Closed degree interval used to bound searches and resolutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeWindow {
    pub lo: i32,
    pub hi: i32,
}

impl Default for DegreeWindow {
    fn default() -> Self {
        DegreeWindow { lo: -64, hi: 64 }
    }
}

impl DegreeWindow {
    pub fn new(lo: i32, hi: i32) -> Result<Self> {
        if lo > hi {
            return Err(Error::Config(format!("empty degree window {lo}..{hi}")));
        }
        Ok(DegreeWindow { lo, hi })
    }

    pub fn contains(&self, n: i32) -> bool {
        self.lo <= n && n <= self.hi
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> {
        self.lo..=self.hi
    }

    /// Parses `a..b`.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) =
            s.split_once("..").ok_or_else(|| Error::Config(format!("window `{s}` is not of the form a..b")))?;
        let p = |t: &str| t.trim().parse::<i32>().map_err(|_| Error::Config(format!("bad window bound `{t}`")));
        DegreeWindow::new(p(a)?, p(b)?)
    }
}

/// Free graded module with a homogeneous basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModule {
    pub domain: Domain,
    pub degrees: Vec<i32>,
    pub labels: Vec<String>,
}

impl GradedModule {
    pub fn new(domain: Domain, degrees: Vec<i32>, labels: Vec<String>) -> Self {
        assert_eq!(degrees.len(), labels.len());
        GradedModule { domain, degrees, labels }
    }

    pub fn zero(domain: Domain) -> Self {
        GradedModule { domain, degrees: vec![], labels: vec![] }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_zero(&self) -> bool {
        self.degrees.is_empty()
    }

    /// Basis indices of degree `n`, in increasing order.
    pub fn in_degree(&self, n: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == n).collect()
    }

    /// Sorted list of degrees occupied by the basis.
    pub fn support(&self) -> Vec<i32> {
        let mut d = self.degrees.clone();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn degree_counts(&self) -> BTreeMap<i32, usize> {
        let mut m = BTreeMap::new();
        for &d in &self.degrees {
            *m.entry(d).or_insert(0) += 1;
        }
        m
    }

    /// Degree of a nonzero homogeneous vector, if it is homogeneous.
    pub fn degree_of(&self, v: &Vector) -> Option<i32> {
        let mut it = v.keys().map(|&i| self.degrees[i]);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }
}

/// Homogeneous linear map of a fixed degree between graded modules.
/// The matrix has target rows and source columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    pub degree: i32,
    pub matrix: Matrix,
}

impl GradedMap {
    pub fn new(degree: i32, matrix: Matrix) -> Self {
        GradedMap { degree, matrix }
    }

    pub fn zero(degree: i32, src: &GradedModule, tgt: &GradedModule) -> Self {
        GradedMap { degree, matrix: Matrix::zeros(tgt.dim(), src.dim()) }
    }

    /// Every nonzero entry respects degrees.
    pub fn is_homogeneous(&self, src: &GradedModule, tgt: &GradedModule) -> bool {
        self.matrix.rows() == tgt.dim()
            && self.matrix.cols() == src.dim()
            && self.matrix.entries().all(|(r, c, _)| tgt.degrees[r] == src.degrees[c] + self.degree)
    }

    /// Block from degree `n` of the source to degree `n + degree` of the target.
    pub fn block(&self, src: &GradedModule, tgt: &GradedModule, n: i32) -> Matrix {
        self.matrix.select(&tgt.in_degree(n + self.degree), &src.in_degree(n))
    }
}

/// Subquotient `ker(d_out) / im(d_in)` at one spot of a complex of free
/// modules, in local coordinates of that spot.
#[derive(Clone, Debug)]
pub struct Subquotient {
    /// Invariant factors; zero marks a free summand. Unit factors omitted.
    pub factors: Vec<Scalar>,
    /// Representative cocycles, one per factor.
    pub generators: Vec<Vector>,
    dim: usize,
    rank_out: usize,
    out: Smith,
    inner: Smith,
    /// index into `inner` rows for each reported factor
    slots: Vec<usize>,
}

impl Subquotient {
    /// `d_in : C^{n-1} -> C^n` is `dim x a`, `d_out : C^n -> C^{n+1}` is `b x dim`.
    pub fn compute(dom: &Domain, d_in: &Matrix, d_out: &Matrix) -> Result<Self> {
        let dim = d_out.cols();
        if d_in.rows() != dim {
            return Err(Error::Structure("subquotient shapes disagree".into()));
        }
        let out = smith(dom, d_out);
        let r = out.rank();
        let k = dim - r;
        // coordinates of the image in the kernel basis (trailing columns of v)
        let mut coords = Matrix::zeros(k, d_in.cols());
        for j in 0..d_in.cols() {
            let x = d_in.column(j);
            if x.is_empty() {
                continue;
            }
            let y = out.v_inv.apply(dom, &x);
            for (&i, val) in &y {
                if i < r {
                    return Err(Error::Structure("d_out * d_in is not zero".into()));
                }
                coords.set(i - r, j, val.clone());
            }
        }
        let inner = smith(dom, &coords);
        let mut factors = Vec::new();
        let mut generators = Vec::new();
        let mut slots = Vec::new();
        let kbasis: Vec<Vector> = (r..dim).map(|j| out.v.column(j)).collect();
        for i in 0..k {
            let f = inner.diag.get(i).cloned().unwrap_or_else(Scalar::zero);
            if !f.is_zero() && dom.is_unit(&f) {
                continue;
            }
            let col = inner.u_inv.column(i);
            let mut g = Vector::new();
            for (&t, c) in &col {
                super::matrix::axpy(dom, &mut g, c, &kbasis[t]);
            }
            factors.push(f);
            generators.push(g);
            slots.push(i);
        }
        Ok(Subquotient { factors, generators, dim, rank_out: r, out, inner, slots })
    }

    pub fn is_zero(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn free_rank(&self) -> usize {
        self.factors.iter().filter(|f| f.is_zero()).count()
    }

    pub fn torsion(&self) -> Vec<Scalar> {
        self.factors.iter().filter(|f| !f.is_zero()).cloned().collect()
    }

    /// Class coordinates of a cocycle, each reduced modulo its factor.
    pub fn class_of(&self, dom: &Domain, z: &Vector) -> Result<Vec<Scalar>> {
        if z.keys().any(|&i| i >= self.dim) {
            return Err(Error::Structure("vector outside the spot".into()));
        }
        let y = self.out.v_inv.apply(dom, z);
        let mut kc = Vector::new();
        for (&i, v) in &y {
            if i < self.rank_out {
                return Err(Error::Structure("vector is not a cocycle".into()));
            }
            kc.insert(i - self.rank_out, v.clone());
        }
        let w = self.inner.u.apply(dom, &kc);
        Ok(self
            .slots
            .iter()
            .zip(&self.factors)
            .map(|(&s, f)| {
                let c = w.get(&s).cloned().unwrap_or_else(Scalar::zero);
                if f.is_zero() {
                    c
                } else {
                    dom.div_rem(&c, f).1
                }
            })
            .collect())
    }

    /// Whether a cocycle is a coboundary.
    pub fn is_boundary(&self, dom: &Domain, z: &Vector) -> Result<bool> {
        Ok(self.class_of(dom, z)?.iter().all(|c| c.is_zero()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_parsing() {
        assert_eq!(DegreeWindow::parse("-8..8").unwrap(), DegreeWindow { lo: -8, hi: 8 });
        assert!(DegreeWindow::parse("3..1").is_err());
        assert!(DegreeWindow::parse("x").is_err());
        assert_eq!(DegreeWindow::default(), DegreeWindow { lo: -64, hi: 64 });
    }

    #[test]
    fn homology_of_multiplication_by_two() {
        let z = Domain::Integer;
        // Z --2--> Z: H^0 = Z/2, H^{-1} = 0
        let d = Matrix::from_i64(&[&[2]]);
        let h0 = Subquotient::compute(&z, &d, &Matrix::zeros(0, 1)).unwrap();
        assert_eq!(h0.factors, vec![Scalar::from_i64(2)]);
        let one = super::super::matrix::unit_vector(0);
        assert!(!h0.is_boundary(&z, &one).unwrap());
        let mut two = Vector::new();
        two.insert(0, Scalar::from_i64(2));
        assert!(h0.is_boundary(&z, &two).unwrap());
        let hm1 = Subquotient::compute(&z, &Matrix::zeros(1, 0), &d).unwrap();
        assert!(hm1.is_zero());
    }

    #[test]
    fn free_and_torsion_parts() {
        let z = Domain::Integer;
        // Z^2 with image spanned by (2, 0): H = Z/2 + Z
        let d = Matrix::from_i64(&[&[2], &[0]]);
        let h = Subquotient::compute(&z, &d, &Matrix::zeros(0, 2)).unwrap();
        assert_eq!(h.torsion(), vec![Scalar::from_i64(2)]);
        assert_eq!(h.free_rank(), 1);
        for g in &h.generators {
            assert!(!h.is_boundary(&z, g).unwrap());
        }
    }
}
