//! Smith normal form over a Euclidean coefficient domain, with transforms.
//!
//! `u * a * v = diag(d_0, .., d_{r-1}, 0, ..)` with `d_i | d_{i+1}`, each
//! `d_i` in canonical associate form. `u_inv` and `v_inv` are kept so that
//! kernels, images and cokernels can be read off without further inversion.

use super::domain::{Domain, Scalar};
use super::matrix::{Matrix, Vector};

#[derive(Clone, Debug)]
pub struct Smith {
    pub diag: Vec<Scalar>,
    pub u: Matrix,
    pub u_inv: Matrix,
    pub v: Matrix,
    pub v_inv: Matrix,
}

struct Work<'a> {
    dom: &'a Domain,
    a: Vec<Vec<Scalar>>,
    u: Vec<Vec<Scalar>>,
    u_inv: Vec<Vec<Scalar>>,
    v: Vec<Vec<Scalar>>,
    v_inv: Vec<Vec<Scalar>>,
}

fn ident(n: usize) -> Vec<Vec<Scalar>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect()).collect()
}

impl<'a> Work<'a> {
    fn rows(&self) -> usize {
        self.a.len()
    }

    fn cols(&self) -> usize {
        self.v.len()
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        self.u.swap(i, j);
        for row in self.u_inv.iter_mut() {
            row.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        for row in self.v.iter_mut() {
            row.swap(i, j);
        }
        self.v_inv.swap(i, j);
    }

    /// row_i += c * row_j
    fn add_row(&mut self, i: usize, j: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let d = self.dom;
        for m in [&mut self.a, &mut self.u] {
            let src = m[j].clone();
            for (x, y) in m[i].iter_mut().zip(src.iter()) {
                if !y.is_zero() {
                    *x = d.add(x, &d.mul(c, y));
                }
            }
        }
        // u_inv <- u_inv * (I - c e_i e_j^T): column_j -= c column_i
        for row in self.u_inv.iter_mut() {
            if !row[i].is_zero() {
                let t = d.mul(c, &row[i]);
                row[j] = d.sub(&row[j], &t);
            }
        }
    }

    /// col_j += c * col_i
    fn add_col(&mut self, j: usize, i: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let d = self.dom;
        for m in [&mut self.a, &mut self.v] {
            for row in m.iter_mut() {
                if !row[i].is_zero() {
                    let t = d.mul(c, &row[i]);
                    row[j] = d.add(&row[j], &t);
                }
            }
        }
        // v_inv <- (I - c e_i e_j^T) v_inv: row_i -= c row_j
        let src = self.v_inv[j].clone();
        for (x, y) in self.v_inv[i].iter_mut().zip(src.iter()) {
            if !y.is_zero() {
                *x = d.sub(x, &d.mul(c, y));
            }
        }
    }

    fn scale_row(&mut self, i: usize, unit: &Scalar) {
        let d = self.dom;
        let inv = d.inverse(unit).expect("scaling by a unit");
        for x in self.a[i].iter_mut() {
            *x = d.mul(x, unit);
        }
        for x in self.u[i].iter_mut() {
            *x = d.mul(x, unit);
        }
        for row in self.u_inv.iter_mut() {
            row[i] = d.mul(&row[i], &inv);
        }
    }

    /// Position of a nonzero entry of minimal norm in the block `[t.., t..]`.
    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, num_bigint::BigInt)> = None;
        for i in t..self.rows() {
            for j in t..self.cols() {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                let n = self.dom.norm(x);
                if best.as_ref().map_or(true, |b| n < b.2) {
                    let unit = n == num_bigint::BigInt::from(1);
                    best = Some((i, j, n));
                    if unit {
                        let b = best.unwrap();
                        return Some((b.0, b.1));
                    }
                }
            }
        }
        best.map(|b| (b.0, b.1))
    }

    /// Clears row and column `t` around the pivot; returns false if a smaller
    /// remainder appeared and the pivot must be re-chosen.
    fn clear(&mut self, t: usize) -> bool {
        let d = self.dom;
        for i in t + 1..self.rows() {
            if self.a[i][t].is_zero() {
                continue;
            }
            let (q, r) = d.div_rem(&self.a[i][t], &self.a[t][t]);
            self.add_row(i, t, &d.neg(&q));
            if !r.is_zero() {
                return false;
            }
        }
        for j in t + 1..self.cols() {
            if self.a[t][j].is_zero() {
                continue;
            }
            let (q, r) = d.div_rem(&self.a[t][j], &self.a[t][t]);
            self.add_col(j, t, &d.neg(&q));
            if !r.is_zero() {
                return false;
            }
        }
        true
    }
}

fn to_matrix(d: Vec<Vec<Scalar>>, cols: usize) -> Matrix {
    Matrix::from_dense(&d, cols)
}

pub fn smith(dom: &Domain, a: &Matrix) -> Smith {
    let (m, n) = (a.rows(), a.cols());
    let mut w = Work { dom, a: a.to_dense(), u: ident(m), u_inv: ident(m), v: ident(n), v_inv: ident(n) };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = w.min_pivot(t) else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        if !w.clear(t) {
            continue;
        }
        // divisibility: pull any non-multiple into row t and redo
        let mut bad = None;
        'scan: for i in t + 1..m {
            for j in t + 1..n {
                if !w.a[i][j].is_zero() && dom.divide(&w.a[i][j], &w.a[t][t]).is_none() {
                    bad = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = bad {
            w.add_row(t, i, &Scalar::one());
            continue;
        }
        let (canon, unit) = dom.associate(&w.a[t][t]);
        if !unit.is_one() {
            w.scale_row(t, &unit);
        }
        debug_assert_eq!(w.a[t][t], canon);
        diag.push(canon);
        t += 1;
    }
    Smith {
        diag,
        u: to_matrix(w.u, m),
        u_inv: to_matrix(w.u_inv, m),
        v: to_matrix(w.v, n),
        v_inv: to_matrix(w.v_inv, n),
    }
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Nonunit invariant factors (the torsion of the cokernel).
    pub fn torsion(&self, dom: &Domain) -> Vec<Scalar> {
        self.diag.iter().filter(|d| !dom.is_unit(d)).cloned().collect()
    }

    /// Basis of the kernel: the trailing columns of `v`.
    pub fn kernel(&self) -> Vec<Vector> {
        (self.rank()..self.v.cols()).map(|j| self.v.column(j)).collect()
    }

    /// Solves `a x = b`, or `None` if no solution exists over the domain.
    pub fn solve(&self, dom: &Domain, b: &Vector) -> Option<Vector> {
        let ub = self.u.apply(dom, b);
        let r = self.rank();
        let mut y = Vector::new();
        for (&i, x) in &ub {
            if i >= r {
                return None;
            }
            let q = dom.divide(x, &self.diag[i])?;
            if !q.is_zero() {
                y.insert(i, q);
            }
        }
        Some(self.v.apply(dom, &y))
    }
}

pub fn kernel(dom: &Domain, a: &Matrix) -> Vec<Vector> {
    smith(dom, a).kernel()
}

pub fn rank(dom: &Domain, a: &Matrix) -> usize {
    smith(dom, a).rank()
}

/// Cokernel of `a : R^n -> R^m`: the invariant factors and, for each
/// summand, a lift of its generator in `R^m`. Unit factors are dropped;
/// free summands are reported with factor zero.
pub fn cokernel(dom: &Domain, a: &Matrix) -> Vec<(Scalar, Vector)> {
    let s = smith(dom, a);
    let mut out = Vec::new();
    for i in 0..a.rows() {
        let f = s.diag.get(i).cloned().unwrap_or_else(Scalar::zero);
        if !f.is_zero() && dom.is_unit(&f) {
            continue;
        }
        out.push((f, s.u_inv.column(i)));
    }
    out
}

/// Inverse of a square matrix over the domain, if it exists.
pub fn inverse(dom: &Domain, a: &Matrix) -> Option<Matrix> {
    if a.rows() != a.cols() {
        return None;
    }
    let s = smith(dom, a);
    if s.rank() != a.rows() || s.diag.iter().any(|d| !dom.is_unit(d)) {
        return None;
    }
    let mut dinv = Matrix::zeros(a.rows(), a.rows());
    for (i, d) in s.diag.iter().enumerate() {
        dinv.set(i, i, dom.inverse(d)?);
    }
    Some(s.v.mul(dom, &dinv).mul(dom, &s.u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::domain::PrimeSet;

    fn check(dom: &Domain, a: &Matrix) -> Smith {
        let s = smith(dom, a);
        let d = s.u.mul(dom, a).mul(dom, &s.v);
        for (r, c, x) in d.entries() {
            assert_eq!(r, c, "off-diagonal entry");
            assert_eq!(x, &s.diag[r]);
        }
        assert_eq!(s.u.mul(dom, &s.u_inv), Matrix::identity(a.rows()));
        assert_eq!(s.v.mul(dom, &s.v_inv), Matrix::identity(a.cols()));
        for w in s.diag.windows(2) {
            assert!(dom.divide(&w[1], &w[0]).is_some());
        }
        s
    }

    #[test]
    fn small_integer_example() {
        let a = Matrix::from_i64(&[&[2, 4], &[6, 8]]);
        let s = check(&Domain::Integer, &a);
        assert_eq!(s.diag, vec![Scalar::from_i64(2), Scalar::from_i64(4)]);
    }

    #[test]
    fn divisibility_is_enforced() {
        let a = Matrix::from_i64(&[&[2, 0], &[0, 3]]);
        let s = check(&Domain::Integer, &a);
        assert_eq!(s.diag, vec![Scalar::from_i64(1), Scalar::from_i64(6)]);
    }

    #[test]
    fn localized_twos_become_units() {
        let dom = Domain::localized(PrimeSet::from([2]));
        let a = Matrix::from_i64(&[&[4, 0], &[0, 6]]);
        let s = check(&dom, &a);
        assert_eq!(s.diag, vec![Scalar::from_i64(1), Scalar::from_i64(3)]);
    }

    #[test]
    fn kernel_and_solve() {
        let z = Domain::Integer;
        let a = Matrix::from_i64(&[&[1, 2, 3], &[2, 4, 6]]);
        let s = check(&z, &a);
        let k = s.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.apply(&z, v).is_empty());
        }
        let mut b = Vector::new();
        b.insert(0, Scalar::from_i64(3));
        b.insert(1, Scalar::from_i64(6));
        let x = s.solve(&z, &b).unwrap();
        assert_eq!(a.apply(&z, &x), b);
        b.insert(1, Scalar::from_i64(7));
        assert!(s.solve(&z, &b).is_none());
    }

    #[test]
    fn cokernel_of_multiplication_by_two() {
        let z = Domain::Integer;
        let a = Matrix::from_i64(&[&[2], &[0]]);
        let c = cokernel(&z, &a);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].0, Scalar::from_i64(2));
        assert!(c[1].0.is_zero());
    }

    #[test]
    fn prime_field() {
        let f = Domain::prime(3).unwrap();
        let a = Matrix::from_i64(&[&[1, 2], &[2, 1]]);
        let s = check(&f, &a);
        // det = -3 = 0 mod 3
        assert_eq!(s.rank(), 1);
    }
}
