//! Finitely generated abelian groups with finitely many primes inverted.
//!
//! `LocAbGroup { free_rank: r, torsion: [t..], inverted: S }` stands for
//! `ℤ[S⁻¹]^r ⊕ ⊕ ℤ/t` with every `t` prime to `S`. Hom and Ext between
//! such groups have closed forms; the few combinations that leave the class
//! (`Ext(ℤ[1/p], ℤ)` is uncountable) are rejected.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::dg::cohomology::cohomology;
use crate::dg::DgModule;
use crate::error::{Error, Result};
use crate::kernel::domain::strip_primes;
use crate::kernel::{Domain, PrimeSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocAbGroup {
    pub free_rank: usize,
    /// Invariant factors, each dividing the next, all prime to `inverted`.
    #[serde(serialize_with = "decimal_strings")]
    pub torsion: Vec<BigInt>,
    pub inverted: PrimeSet,
}

fn decimal_strings<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(BigInt::to_string))
}

/// Invariant factors of `⊕ ℤ/n_i`, dropping trivial summands.
fn invariant_factors(orders: &[BigInt]) -> Vec<BigInt> {
    // primary decomposition, then recombine largest powers
    let mut by_prime: BTreeMap<BigInt, Vec<BigInt>> = BTreeMap::new();
    for n in orders {
        let mut n = n.abs();
        if n.is_zero() || n.is_one() {
            continue;
        }
        let mut p = BigInt::from(2);
        while &p * &p <= n {
            let mut q = BigInt::one();
            while (&n % &p).is_zero() {
                n /= &p;
                q *= &p;
            }
            if !q.is_one() {
                by_prime.entry(p.clone()).or_default().push(q);
            }
            p += 1;
        }
        if !n.is_one() {
            by_prime.entry(n.clone()).or_default().push(n);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![BigInt::one(); len];
    for powers in by_prime.values_mut() {
        powers.sort();
        // largest power goes to the last factor
        for (k, q) in powers.iter().rev().enumerate() {
            out[len - 1 - k] *= q;
        }
    }
    out
}

impl LocAbGroup {
    pub fn new(free_rank: usize, torsion: &[BigInt], inverted: PrimeSet) -> LocAbGroup {
        let stripped: Vec<BigInt> = torsion.iter().map(|t| strip_primes(t, &inverted)).collect();
        LocAbGroup { free_rank, torsion: invariant_factors(&stripped), inverted }
    }

    pub fn zero() -> LocAbGroup {
        LocAbGroup::new(0, &[], PrimeSet::new())
    }

    pub fn integers() -> LocAbGroup {
        LocAbGroup::new(1, &[], PrimeSet::new())
    }

    pub fn cyclic(n: i64) -> LocAbGroup {
        if n == 0 {
            return LocAbGroup::integers();
        }
        LocAbGroup::new(0, &[BigInt::from(n)], PrimeSet::new())
    }

    /// `ℤ[S⁻¹]`.
    pub fn localization(inverted: PrimeSet) -> LocAbGroup {
        LocAbGroup::new(1, &[], inverted)
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Order, if finite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    /// Multiplication by `p` is an automorphism.
    pub fn multiplication_invertible(&self, p: u64) -> bool {
        let pb = BigInt::from(p);
        (self.free_rank == 0 || self.inverted.contains(&p)) && self.torsion.iter().all(|t| t.gcd(&pb).is_one())
    }

    /// `G ⊗ ℤ[T⁻¹]`.
    pub fn extend_scalars(&self, more: &PrimeSet) -> LocAbGroup {
        let inverted: PrimeSet = self.inverted.union(more).copied().collect();
        LocAbGroup::new(self.free_rank, &self.torsion, inverted)
    }

    /// The unit `G → G ⊗ ℤ[T⁻¹]` is an isomorphism exactly when `G` is
    /// already `T`-local.
    pub fn is_local(&self, primes: &PrimeSet) -> bool {
        primes.iter().all(|&p| self.multiplication_invertible(p))
    }

    fn direct_sum(parts: Vec<LocAbGroup>, inverted: &PrimeSet) -> LocAbGroup {
        let free = parts.iter().map(|g| g.free_rank).sum();
        let torsion: Vec<BigInt> = parts.into_iter().flat_map(|g| g.torsion).collect();
        LocAbGroup::new(free, &torsion, inverted.clone())
    }

    /// Group of degree-`n` cohomology of a complex over `ℤ` or `ℤ[S⁻¹]`.
    pub fn from_cohomology(dom: &Domain, free_rank: usize, torsion: &[BigInt]) -> Result<LocAbGroup> {
        match dom.inverted_primes() {
            Some(s) => Ok(LocAbGroup::new(free_rank, torsion, s)),
            None => Err(Error::Domain(format!("{dom} is a field, not a localization of ℤ"))),
        }
    }
}

impl fmt::Display for LocAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ring = if self.inverted.is_empty() {
            "Z".to_string()
        } else {
            let ps: Vec<String> = self.inverted.iter().map(u64::to_string).collect();
            format!("Z[1/{}]", ps.join(","))
        };
        let mut parts: Vec<String> = self.torsion.iter().map(|t| format!("Z/{t}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push(ring),
            r => parts.push(format!("{ring}^{r}")),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

fn unrepresentable(what: &str, a: &LocAbGroup, b: &LocAbGroup) -> Error {
    Error::Unrepresentable(format!("{what}({a}, {b}) is not a finitely generated localized group"))
}

/// `Hom_ℤ(A, B)`.
pub fn hom_group(a: &LocAbGroup, b: &LocAbGroup) -> Result<LocAbGroup> {
    let t = &b.inverted;
    let mut parts = Vec::new();
    // Hom(ℤ[S⁻¹], ℤ[T⁻¹]) is ℤ[T⁻¹] for S ⊆ T and 0 otherwise
    let free_free = if a.inverted.is_subset(t) { a.free_rank * b.free_rank } else { 0 };
    parts.push(LocAbGroup::new(free_free, &[], t.clone()));
    for _ in 0..a.free_rank {
        // Hom(ℤ[S⁻¹], ℤ/n) keeps the part of n prime to S
        let tors: Vec<BigInt> = b.torsion.iter().map(|n| strip_primes(n, &a.inverted)).collect();
        parts.push(LocAbGroup::new(0, &tors, t.clone()));
    }
    for m in &a.torsion {
        let tors: Vec<BigInt> = b.torsion.iter().map(|n| m.gcd(n)).collect();
        parts.push(LocAbGroup::new(0, &tors, t.clone()));
    }
    Ok(LocAbGroup::direct_sum(parts, t))
}

/// `Ext¹_ℤ(A, B)`; higher Ext vanishes over a hereditary ring.
pub fn ext_group(a: &LocAbGroup, b: &LocAbGroup) -> Result<LocAbGroup> {
    let t = &b.inverted;
    if a.free_rank > 0 && b.free_rank > 0 && !a.inverted.is_subset(t) {
        return Err(unrepresentable("Ext", a, b));
    }
    // Ext(ℤ[S⁻¹], ℤ/n) = lim¹ of a tower of finite groups = 0
    let mut parts = Vec::new();
    for m in &a.torsion {
        let mut tors: Vec<BigInt> = vec![strip_primes(m, t); b.free_rank];
        tors.extend(b.torsion.iter().map(|n| m.gcd(n)));
        parts.push(LocAbGroup::new(0, &tors, t.clone()));
    }
    Ok(LocAbGroup::direct_sum(parts, t))
}

/// Per-degree verdict of "multiplication by `p` is an automorphism of `Hⁱ(X)`".
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvertibilityVerdict {
    pub prime: u64,
    pub per_degree: BTreeMap<i32, bool>,
}

impl InvertibilityVerdict {
    /// `RHom(ℤ/p, X) ≃ 0`.
    pub fn pass(&self) -> bool {
        self.per_degree.values().all(|&b| b)
    }

    pub fn failing_degrees(&self) -> Vec<i32> {
        self.per_degree.iter().filter(|(_, &ok)| !ok).map(|(&n, _)| n).collect()
    }
}

pub fn invertibility_criterion(x: &DgModule, p: u64) -> Result<InvertibilityVerdict> {
    let per_degree = hereditary_decompose(x)?.into_iter().map(|(n, g)| (n, g.multiplication_invertible(p))).collect();
    Ok(InvertibilityVerdict { prime: p, per_degree })
}

/// `X ≅ ⊕ Σ^{-i} Hⁱ(X)`, listed as the nonzero cohomology groups.
pub fn hereditary_decompose(x: &DgModule) -> Result<Vec<(i32, LocAbGroup)>> {
    let dom = x.domain();
    let h = cohomology(x)?;
    h.groups
        .iter()
        .map(|(&n, sq)| {
            let tors: Vec<BigInt> = sq.torsion().iter().map(|t| t.numer().clone()).collect();
            Ok((n, LocAbGroup::from_cohomology(dom, sq.free_rank(), &tors)?))
        })
        .filter(|r| r.as_ref().map_or(true, |(_, g)| !g.is_zero()))
        .collect()
}

/// `RHom_ℤ(A, X)` for `X` split into its cohomology: `Hⁿ = ⊕_i Hom(A, H^{n}) ⊕ Ext(A, H^{n-1})`.
pub fn rhom_split(a: &LocAbGroup, x: &[(i32, LocAbGroup)]) -> Result<BTreeMap<i32, LocAbGroup>> {
    let mut out: BTreeMap<i32, Vec<LocAbGroup>> = BTreeMap::new();
    for (n, g) in x {
        out.entry(*n).or_default().push(hom_group(a, g)?);
        out.entry(n + 1).or_default().push(ext_group(a, g)?);
    }
    Ok(out
        .into_iter()
        .filter_map(|(n, parts)| {
            let inv = parts.first().map(|g| g.inverted.clone()).unwrap_or_default();
            let g = LocAbGroup::direct_sum(parts, &inv);
            (!g.is_zero()).then_some((n, g))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2() -> PrimeSet {
        [2].into()
    }

    #[test]
    fn invariant_factor_chain() {
        let g = LocAbGroup::new(0, &[BigInt::from(4), BigInt::from(6)], PrimeSet::new());
        assert_eq!(g.torsion, vec![BigInt::from(2), BigInt::from(12)]);
        let g = LocAbGroup::new(0, &[BigInt::from(12)], s2());
        assert_eq!(g.torsion, vec![BigInt::from(3)]);
    }

    #[test]
    fn hom_examples() {
        let z2 = LocAbGroup::cyclic(2);
        let loc = LocAbGroup::localization(s2());
        assert!(hom_group(&z2, &loc).unwrap().is_zero());
        let a = LocAbGroup::new(0, &[BigInt::from(2)], PrimeSet::new());
        assert_eq!(hom_group(&LocAbGroup::integers(), &a).unwrap(), a);
        assert_eq!(hom_group(&LocAbGroup::cyclic(4), &LocAbGroup::cyclic(6)).unwrap(), LocAbGroup::cyclic(2));
        assert!(hom_group(&loc, &LocAbGroup::integers()).unwrap().is_zero());
    }

    #[test]
    fn ext_examples() {
        let loc = LocAbGroup::localization(s2());
        assert!(ext_group(&LocAbGroup::cyclic(2), &loc).unwrap().is_zero());
        assert!(ext_group(&LocAbGroup::integers(), &LocAbGroup::cyclic(5)).unwrap().is_zero());
        assert_eq!(ext_group(&LocAbGroup::cyclic(2), &LocAbGroup::integers()).unwrap(), LocAbGroup::cyclic(2));
        assert!(matches!(ext_group(&loc, &LocAbGroup::integers()), Err(Error::Unrepresentable(_))));
        assert!(ext_group(&loc, &LocAbGroup::cyclic(4)).unwrap().is_zero());
    }

    #[test]
    fn inverted_primes_act_invertibly() {
        let g = LocAbGroup::new(2, &[BigInt::from(9)], [2, 5].into());
        assert!(g.multiplication_invertible(2) && g.multiplication_invertible(5));
        assert!(!g.multiplication_invertible(3));
    }
}
