//! Sparse exact matrices, stored column by column.

use std::collections::BTreeMap;
use std::fmt;

use super::domain::{Domain, Scalar};

/// Sparse vector: index → nonzero scalar.
pub type Vector = BTreeMap<usize, Scalar>;

/// `acc += c * v`, dropping entries that cancel.
pub fn axpy(dom: &Domain, acc: &mut Vector, c: &Scalar, v: &Vector) {
    if c.is_zero() {
        return;
    }
    for (&i, x) in v {
        let add = dom.mul(c, x);
        let slot = acc.entry(i).or_insert_with(Scalar::zero);
        *slot = dom.add(slot, &add);
        if slot.is_zero() {
            acc.remove(&i);
        }
    }
}

pub fn scale(dom: &Domain, c: &Scalar, v: &Vector) -> Vector {
    let mut out = Vector::new();
    axpy(dom, &mut out, c, v);
    out
}

pub fn unit_vector(i: usize) -> Vector {
    let mut v = Vector::new();
    v.insert(i, Scalar::one());
    v
}

pub fn sub_vec(dom: &Domain, a: &Vector, b: &Vector) -> Vector {
    let mut out = a.clone();
    axpy(dom, &mut out, &dom.int(-1), b);
    out
}

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: BTreeMap<usize, Vector>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data.insert(i, unit_vector(i));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.data.values().map(|c| c.len()).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.data.get(&c).and_then(|col| col.get(&r)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        if v.is_zero() {
            if let Some(col) = self.data.get_mut(&c) {
                col.remove(&r);
                if col.is_empty() {
                    self.data.remove(&c);
                }
            }
        } else {
            self.data.entry(c).or_default().insert(r, v);
        }
    }

    pub fn add_to(&mut self, dom: &Domain, r: usize, c: usize, v: &Scalar) {
        let cur = self.get(r, c);
        self.set(r, c, dom.add(&cur, v));
    }

    pub fn column(&self, c: usize) -> Vector {
        self.data.get(&c).cloned().unwrap_or_default()
    }

    pub fn column_ref(&self, c: usize) -> Option<&Vector> {
        self.data.get(&c)
    }

    pub fn set_column(&mut self, c: usize, v: Vector) {
        assert!(c < self.cols);
        debug_assert!(v.keys().all(|&r| r < self.rows));
        if v.is_empty() {
            self.data.remove(&c);
        } else {
            self.data.insert(c, v);
        }
    }

    pub fn from_columns(rows: usize, columns: Vec<Vector>) -> Self {
        let cols = columns.len();
        let mut m = Matrix::zeros(rows, cols);
        for (j, v) in columns.into_iter().enumerate() {
            m.set_column(j, v);
        }
        m
    }

    /// Iterates `(row, col, value)` in column order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.data.iter().flat_map(|(&c, col)| col.iter().map(move |(&r, v)| (r, c, v)))
    }

    pub fn apply(&self, dom: &Domain, v: &Vector) -> Vector {
        let mut out = Vector::new();
        for (&j, x) in v {
            if let Some(col) = self.data.get(&j) {
                axpy(dom, &mut out, x, col);
            }
        }
        out
    }

    /// `self * other`.
    pub fn mul(&self, dom: &Domain, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for (&j, col) in &other.data {
            let v = self.apply(dom, col);
            if !v.is_empty() {
                out.data.insert(j, v);
            }
        }
        out
    }

    pub fn add(&self, dom: &Domain, other: &Matrix) -> Matrix {
        self.lin_comb(dom, &Scalar::one(), other)
    }

    pub fn sub(&self, dom: &Domain, other: &Matrix) -> Matrix {
        self.lin_comb(dom, &dom.int(-1), other)
    }

    /// `self + c * other`.
    pub fn lin_comb(&self, dom: &Domain, c: &Scalar, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let mut out = self.clone();
        for (&j, col) in &other.data {
            let mut v = out.data.remove(&j).unwrap_or_default();
            axpy(dom, &mut v, c, col);
            if !v.is_empty() {
                out.data.insert(j, v);
            }
        }
        out
    }

    pub fn scaled(&self, dom: &Domain, c: &Scalar) -> Matrix {
        Matrix::zeros(self.rows, self.cols).lin_comb(dom, c, self)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for (r, c, v) in self.entries() {
            out.data.entry(r).or_default().insert(c, v.clone());
        }
        out
    }

    /// Submatrix on the given row and column index lists (in that order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let row_pos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut out = Matrix::zeros(rows.len(), cols.len());
        for (j, &c) in cols.iter().enumerate() {
            if let Some(col) = self.data.get(&c) {
                let v: Vector = col.iter().filter_map(|(r, x)| row_pos.get(r).map(|&i| (i, x.clone()))).collect();
                if !v.is_empty() {
                    out.data.insert(j, v);
                }
            }
        }
        out
    }

    /// Re-embeds into a larger matrix, sending row `i` to `row_map[i]` and
    /// column `j` to `col_map[j]`.
    pub fn embed(&self, rows: usize, cols: usize, row_map: &[usize], col_map: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(rows, cols);
        for (r, c, v) in self.entries() {
            out.set(row_map[r], col_map[c], v.clone());
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut d = vec![vec![Scalar::zero(); self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            d[r][c] = v.clone();
        }
        d
    }

    pub fn from_dense(d: &[Vec<Scalar>], cols: usize) -> Matrix {
        let rows = d.len();
        let mut m = Matrix::zeros(rows, cols);
        for (r, row) in d.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    m.set(r, c, v.clone());
                }
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Matrix {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        let mut m = Matrix::zeros(nr, nc);
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, Scalar::from_i64(v));
            }
        }
        m
    }

    /// Every entry belongs to `dom`.
    pub fn in_domain(&self, dom: &Domain) -> bool {
        self.entries().all(|(_, _, v)| dom.contains(v))
    }

    pub fn coerce(&self, from: &Domain, to: &Domain) -> crate::Result<Matrix> {
        let mut out = Matrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.entries() {
            out.set(r, c, to.coerce(from, v)?);
        }
        Ok(out)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for row in self.to_dense() {
            let s: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "  {}", s.join(" "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_entries_are_never_stored() {
        let z = Domain::Integer;
        let mut m = Matrix::zeros(2, 2);
        m.set(0, 1, Scalar::from_i64(3));
        m.add_to(&z, 0, 1, &Scalar::from_i64(-3));
        assert!(m.is_zero());
        let a = Matrix::from_i64(&[&[1, 2], &[3, 4]]);
        let d = a.sub(&z, &a);
        assert_eq!(d.nnz(), 0);
    }

    #[test]
    fn product_and_transpose() {
        let z = Domain::Integer;
        let a = Matrix::from_i64(&[&[1, 2], &[3, 4]]);
        let b = Matrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.mul(&z, &b), Matrix::from_i64(&[&[2, 1], &[4, 3]]));
        assert_eq!(a.transpose(), Matrix::from_i64(&[&[1, 3], &[2, 4]]));
        assert_eq!(a.select(&[1], &[0, 1]), Matrix::from_i64(&[&[3, 4]]));
    }
}
