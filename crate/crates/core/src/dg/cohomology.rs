//! Cohomology of DG modules, degree by degree.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::module::DgModule;
use crate::error::Result;
use crate::kernel::{Domain, Matrix, Scalar, Subquotient, Vector};

/// Cohomology in every degree where it is nonzero.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub domain: Domain,
    pub groups: BTreeMap<i32, Subquotient>,
    indices: BTreeMap<i32, Vec<usize>>,
}

/// Printable invariant-factor description of one cohomology group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub free_rank: usize,
    /// Torsion invariant factors as decimal strings.
    pub torsion: Vec<String>,
    pub ring: String,
}

impl fmt::Display for GroupSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|t| format!("Z/{t}")).collect();
        if self.free_rank == 1 {
            parts.push(self.ring.clone());
        } else if self.free_rank > 1 {
            parts.push(format!("{}^{}", self.ring, self.free_rank));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

impl GroupSummary {
    pub fn of(dom: &Domain, sq: &Subquotient) -> GroupSummary {
        GroupSummary {
            free_rank: sq.free_rank(),
            torsion: sq.torsion().iter().map(|t| t.numer().to_string()).collect(),
            ring: dom.to_string(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

/// Restriction of a global vector to the basis indices `idx`.
pub fn to_local(v: &Vector, idx: &[usize]) -> Vector {
    idx.iter().enumerate().filter_map(|(k, i)| v.get(i).map(|x| (k, x.clone()))).collect()
}

pub fn to_global(v: &Vector, idx: &[usize]) -> Vector {
    v.iter().map(|(&k, x)| (idx[k], x.clone())).collect()
}

pub fn cohomology(m: &DgModule) -> Result<Cohomology> {
    let dom = m.domain().clone();
    let mut groups = BTreeMap::new();
    let mut indices = BTreeMap::new();
    for n in m.module.support() {
        let here = m.module.in_degree(n);
        let below = m.module.in_degree(n - 1);
        let above = m.module.in_degree(n + 1);
        let d_in = m.d.select(&here, &below);
        let d_out = m.d.select(&above, &here);
        let sq = Subquotient::compute(&dom, &d_in, &d_out)?;
        if !sq.is_zero() {
            groups.insert(n, sq);
            indices.insert(n, here);
        }
    }
    Ok(Cohomology { domain: dom, groups, indices })
}

pub fn is_acyclic(m: &DgModule) -> Result<bool> {
    Ok(cohomology(m)?.groups.is_empty())
}

impl Cohomology {
    pub fn is_zero(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn summary(&self) -> BTreeMap<i32, GroupSummary> {
        self.groups.iter().map(|(&n, g)| (n, GroupSummary::of(&self.domain, g))).collect()
    }

    /// Nonzero cohomology degrees.
    pub fn degrees(&self) -> Vec<i32> {
        self.groups.keys().copied().collect()
    }

    /// Invariant factors in degree `n` (zero marks a free summand).
    pub fn factors(&self, n: i32) -> Vec<Scalar> {
        self.groups.get(&n).map(|g| g.factors.clone()).unwrap_or_default()
    }

    /// Representative cocycles in degree `n`, as global vectors.
    pub fn generators(&self, n: i32) -> Vec<Vector> {
        match (self.groups.get(&n), self.indices.get(&n)) {
            (Some(g), Some(idx)) => g.generators.iter().map(|v| to_global(v, idx)).collect(),
            _ => vec![],
        }
    }

    /// Class of a global degree-`n` cocycle.
    pub fn class_of(&self, n: i32, v: &Vector) -> Result<Vec<Scalar>> {
        match (self.groups.get(&n), self.indices.get(&n)) {
            (Some(g), Some(idx)) => g.class_of(&self.domain, &to_local(v, idx)),
            _ => Ok(vec![]),
        }
    }

    /// A multiplication-by-`p` automorphism test on every group.
    pub fn multiplication_invertible(&self, p: u64) -> BTreeMap<i32, bool> {
        let dom = &self.domain;
        let ps = Scalar::from_i64(p as i64);
        self.groups
            .iter()
            .map(|(&n, g)| {
                let ok = g.factors.iter().all(|f| {
                    if f.is_zero() {
                        dom.is_unit(&dom.element(&ps).unwrap_or_else(|_| Scalar::zero()))
                    } else {
                        // Z/f: p invertible iff gcd(p, f) = 1
                        let fi = f.numer().clone();
                        num_integer::Integer::gcd(&fi, &num_bigint::BigInt::from(p)) == num_bigint::BigInt::from(1)
                    }
                });
                (n, ok)
            })
            .collect()
    }
}

/// Matrix of the map induced on degree-`n` cohomology by a degree-0 map
/// `f : M → N`, in the generator bases of the two cohomology groups.
pub fn induced_map(hm: &Cohomology, hn: &Cohomology, f: &Matrix, n: i32) -> Result<Vec<Vec<Scalar>>> {
    let dom = &hn.domain;
    let mut cols = Vec::new();
    for g in hm.generators(n) {
        let img = f.apply(dom, &g);
        cols.push(hn.class_of(n, &img)?);
    }
    Ok(cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::algebra::DgAlgebra;
    use crate::kernel::GradedModule;
    use std::sync::Arc;

    #[test]
    fn residue_complex_has_torsion_in_degree_zero() {
        let z = Arc::new(DgAlgebra::ground(Domain::Integer));
        let module = GradedModule::new(Domain::Integer, vec![-1, 0], vec!["a".into(), "b".into()]);
        let d = Matrix::from_i64(&[&[0, 0], &[2, 0]]);
        let m = DgModule::over_ground("Z/2", z, module, d).unwrap();
        let h = cohomology(&m).unwrap();
        assert_eq!(h.degrees(), vec![0]);
        assert_eq!(h.summary()[&0].to_string(), "Z/2");
        assert_eq!(h.multiplication_invertible(2)[&0], false);
        assert_eq!(h.multiplication_invertible(3)[&0], true);
    }
}
