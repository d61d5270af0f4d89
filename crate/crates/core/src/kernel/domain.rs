//! Coefficient domains and exact scalars.
//!
//! Every scalar is stored as an arbitrary-precision rational; the enclosing
//! [`Domain`] decides which rationals are legal and how arithmetic reduces.
//! Integers and localized integers keep denominators 1 or S-smooth, prime
//! field residues live in `[0, p)`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite set of primes, kept sorted.
pub type PrimeSet = BTreeSet<u64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Domain {
    /// The integers.
    Integer,
    /// The rationals.
    Rational,
    /// The prime field with `p` elements.
    Prime(u64),
    /// The integers with a nonempty finite set of primes inverted.
    Localized(PrimeSet),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_i64(v: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_int(v: BigInt) -> Self {
        Scalar(BigRational::from_integer(v))
    }

    pub fn from_ratio(n: BigInt, d: BigInt) -> Self {
        Scalar(BigRational::new(n, d))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    /// Parses `"a"` or `"a/b"`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().ok()?;
                let d: BigInt = d.trim().parse().ok()?;
                if d.is_zero() {
                    return None;
                }
                Some(Scalar::from_ratio(n, d))
            }
            None => Some(Scalar::from_int(s.parse().ok()?)),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Strips every prime of `primes` from `n`, returning the positive cofactor.
pub fn strip_primes(n: &BigInt, primes: &PrimeSet) -> BigInt {
    let mut n = n.abs();
    if n.is_zero() {
        return n;
    }
    for &p in primes {
        let p = BigInt::from(p);
        while (&n % &p).is_zero() {
            n /= &p;
        }
    }
    n
}

/// True when every prime factor of `n` lies in `primes`.
pub fn is_smooth(n: &BigInt, primes: &PrimeSet) -> bool {
    strip_primes(n, primes).is_one()
}

/// Prime factors of a nonzero integer by trial division.
pub fn prime_factors(n: &BigInt) -> PrimeSet {
    let mut out = PrimeSet::new();
    let mut n = n.abs();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        while (&n % &p).is_zero() {
            out.insert(u64::try_from(&p).expect("prime factor fits in u64"));
            n /= &p;
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.insert(u64::try_from(&n).expect("prime factor fits in u64"));
    }
    out
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Domain {
    /// `Localized(∅)` collapses to `Integer`.
    pub fn localized(primes: PrimeSet) -> Domain {
        if primes.is_empty() {
            Domain::Integer
        } else {
            Domain::Localized(primes)
        }
    }

    pub fn prime(p: u64) -> Result<Domain> {
        if is_prime(p) {
            Ok(Domain::Prime(p))
        } else {
            Err(Error::Domain(format!("{p} is not prime")))
        }
    }

    pub fn is_field(&self) -> bool {
        matches!(self, Domain::Rational | Domain::Prime(_))
    }

    /// Primes that are units in this domain (`None` means all of them).
    pub fn inverted_primes(&self) -> Option<PrimeSet> {
        match self {
            Domain::Integer => Some(PrimeSet::new()),
            Domain::Localized(s) => Some(s.clone()),
            Domain::Rational => None,
            Domain::Prime(_) => None,
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Domain::Prime(p) => *p,
            _ => 0,
        }
    }

    fn reduce(&self, v: BigRational) -> Scalar {
        match self {
            Domain::Prime(p) => {
                let p = BigInt::from(*p);
                let n = v.numer().mod_floor(&p);
                let d = v.denom().mod_floor(&p);
                let dinv = mod_inverse(&d, &p).expect("denominator invertible mod p");
                Scalar(BigRational::from_integer((n * dinv).mod_floor(&p)))
            }
            _ => Scalar(v),
        }
    }

    pub fn contains(&self, s: &Scalar) -> bool {
        match self {
            Domain::Integer => s.denom().is_one(),
            Domain::Rational => true,
            Domain::Prime(p) => s.denom().is_one() && !s.numer().is_negative() && s.numer() < &BigInt::from(*p),
            Domain::Localized(ps) => is_smooth(s.denom(), ps),
        }
    }

    /// Validates and reduces an externally supplied scalar.
    pub fn element(&self, s: &Scalar) -> Result<Scalar> {
        match self {
            Domain::Prime(p) => {
                if (s.denom() % BigInt::from(*p)).is_zero() {
                    return Err(Error::Domain(format!("{s} has no residue mod {p}")));
                }
                Ok(self.reduce(s.0.clone()))
            }
            _ if self.contains(s) => Ok(s.clone()),
            _ => Err(Error::Domain(format!("{s} is not an element of {self}"))),
        }
    }

    pub fn int(&self, v: i64) -> Scalar {
        self.reduce(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(&a.0 + &b.0)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(&a.0 - &b.0)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(&a.0 * &b.0)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        self.reduce(-a.0.clone())
    }

    /// Multiplies by `(-1)^k`.
    pub fn signed(&self, a: &Scalar, k: i64) -> Scalar {
        if k.rem_euclid(2) == 0 {
            a.clone()
        } else {
            self.neg(a)
        }
    }

    /// Euclidean size: zero for zero, one exactly on units.
    pub fn norm(&self, a: &Scalar) -> BigInt {
        if a.is_zero() {
            return BigInt::zero();
        }
        match self {
            Domain::Integer => a.numer().abs(),
            Domain::Rational | Domain::Prime(_) => BigInt::one(),
            Domain::Localized(ps) => strip_primes(a.numer(), ps),
        }
    }

    pub fn is_unit(&self, a: &Scalar) -> bool {
        self.norm(a).is_one()
    }

    pub fn inverse(&self, a: &Scalar) -> Option<Scalar> {
        if !self.is_unit(a) {
            return None;
        }
        Some(self.reduce(a.0.recip()))
    }

    /// Exact quotient `a / b` when `b` divides `a` in this domain.
    pub fn divide(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        if b.is_zero() {
            return if a.is_zero() { Some(Scalar::zero()) } else { None };
        }
        let (q, r) = self.div_rem(a, b);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Division with remainder: `a = q b + r` with `norm(r) < norm(b)`.
    pub fn div_rem(&self, a: &Scalar, b: &Scalar) -> (Scalar, Scalar) {
        assert!(!b.is_zero(), "division by zero");
        match self {
            Domain::Rational | Domain::Prime(_) => (self.reduce(&a.0 / &b.0), Scalar::zero()),
            Domain::Integer => {
                let (q, r) = a.numer().div_mod_floor(b.numer());
                (Scalar::from_int(q), Scalar::from_int(r))
            }
            Domain::Localized(ps) => {
                // b = u * b0 with b0 the S-free part of its numerator.
                let b0 = strip_primes(b.numer(), ps);
                let unit = &b.0 / BigRational::from_integer(b0.clone());
                let (q, r) = a.numer().div_mod_floor(&b0);
                let ad = BigRational::from_integer(a.denom().clone());
                let q = BigRational::from_integer(q) / (&ad * &unit);
                let r = BigRational::from_integer(r) / ad;
                (Scalar(q), Scalar(r))
            }
        }
    }

    /// Canonical associate: multiplies `a` by a unit so that the result is
    /// a nonnegative integer (or one, over a field).
    pub fn associate(&self, a: &Scalar) -> (Scalar, Scalar) {
        if a.is_zero() {
            return (Scalar::zero(), Scalar::one());
        }
        match self {
            Domain::Rational | Domain::Prime(_) => {
                let u = self.inverse(a).expect("field element invertible");
                (Scalar::one(), u)
            }
            Domain::Integer => {
                if a.numer().is_negative() {
                    (self.neg(a), self.int(-1))
                } else {
                    (a.clone(), Scalar::one())
                }
            }
            Domain::Localized(ps) => {
                let c = Scalar::from_int(strip_primes(a.numer(), ps));
                let u = Scalar(&c.0 / &a.0);
                (c, u)
            }
        }
    }

    /// True if there is a (necessarily unique) ring map `self → other`.
    pub fn maps_into(&self, other: &Domain) -> bool {
        match (self, other) {
            (a, b) if a == b => true,
            (Domain::Integer, _) => true,
            (Domain::Localized(_), Domain::Rational) => true,
            (Domain::Localized(s), Domain::Localized(t)) => s.is_subset(t),
            (Domain::Localized(s), Domain::Prime(p)) => !s.contains(p),
            _ => false,
        }
    }

    /// True if `self → other` is a localization (a flat epimorphism of rings).
    pub fn localizes_to(&self, other: &Domain) -> bool {
        match (self, other) {
            (a, b) if a == b => true,
            (Domain::Integer, Domain::Localized(_)) | (Domain::Integer, Domain::Rational) => true,
            (Domain::Localized(_), Domain::Rational) => true,
            (Domain::Localized(s), Domain::Localized(t)) => s.is_subset(t),
            _ => false,
        }
    }

    /// Image of `s ∈ from` under the ring map `from → self`.
    pub fn coerce(&self, from: &Domain, s: &Scalar) -> Result<Scalar> {
        if from == self {
            return Ok(s.clone());
        }
        if !from.maps_into(self) {
            return Err(Error::Domain(format!("no ring map {from} -> {self}")));
        }
        self.element(s)
    }

    /// Domain of `D1 ⊗_ℤ D2`, or `None` when the tensor product is zero.
    pub fn tensor(a: &Domain, b: &Domain) -> Option<Domain> {
        use Domain::*;
        match (a, b) {
            (x, y) if x == y => Some(x.clone()),
            (Integer, x) | (x, Integer) => Some(x.clone()),
            (Rational, Prime(_)) | (Prime(_), Rational) => None,
            (Rational, _) | (_, Rational) => Some(Rational),
            (Prime(_), Prime(_)) => None,
            (Prime(p), Localized(s)) | (Localized(s), Prime(p)) => {
                if s.contains(p) {
                    None
                } else {
                    Some(Prime(*p))
                }
            }
            (Localized(s), Localized(t)) => Some(Localized(s.union(t).copied().collect())),
        }
    }

    /// Domain carrying `Hom_ℤ(D1^a, D2^b)`, or `None` when it vanishes.
    pub fn hom(src: &Domain, tgt: &Domain) -> Option<Domain> {
        if src.maps_into(tgt) {
            Some(tgt.clone())
        } else {
            None
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Integer => write!(f, "Z"),
            Domain::Rational => write!(f, "Q"),
            Domain::Prime(p) => write!(f, "F_{p}"),
            Domain::Localized(s) => {
                let ps: Vec<String> = s.iter().map(|p| p.to_string()).collect();
                write!(f, "Z[1/{}]", ps.join(","))
            }
        }
    }
}

fn mod_inverse(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(p);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(p))
    } else {
        None
    }
}

/// Sign of a scalar's numerator, used only for display normalization.
pub fn sign(s: &Scalar) -> Sign {
    s.numer().sign()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loc2() -> Domain {
        Domain::localized([2].into_iter().collect())
    }

    #[test]
    fn prime_field_reduces_into_range() {
        let f = Domain::Prime(5);
        assert_eq!(f.int(-1), Scalar::from_i64(4));
        assert_eq!(f.mul(&f.int(3), &f.int(4)), Scalar::from_i64(2));
        assert_eq!(f.inverse(&f.int(2)), Some(Scalar::from_i64(3)));
        assert!(f.element(&Scalar::parse("1/5").unwrap()).is_err());
        assert_eq!(f.element(&Scalar::parse("1/2").unwrap()).unwrap(), Scalar::from_i64(3));
    }

    #[test]
    fn localized_units_and_division() {
        let d = loc2();
        assert!(d.is_unit(&Scalar::from_i64(8)));
        assert!(!d.is_unit(&Scalar::from_i64(6)));
        assert!(d.contains(&Scalar::parse("3/4").unwrap()));
        assert!(!d.contains(&Scalar::parse("1/3").unwrap()));
        let a = Scalar::parse("7/4").unwrap();
        let b = Scalar::from_i64(6);
        let (q, r) = d.div_rem(&a, &b);
        assert!(d.contains(&q) && d.contains(&r));
        assert_eq!(d.add(&d.mul(&q, &b), &r), a);
        assert!(d.norm(&r) < d.norm(&b));
        assert_eq!(d.associate(&Scalar::parse("-12/8").unwrap()).0, Scalar::from_i64(3));
    }

    #[test]
    fn integer_division_is_euclidean() {
        let z = Domain::Integer;
        for a in -20..20 {
            for b in [-7i64, -3, 2, 5] {
                let (q, r) = z.div_rem(&z.int(a), &z.int(b));
                assert_eq!(z.add(&z.mul(&q, &z.int(b)), &r), z.int(a));
                assert!(z.norm(&r) < z.norm(&z.int(b)));
            }
        }
    }

    #[test]
    fn ring_maps_and_tensor_domains() {
        let z = Domain::Integer;
        let l = loc2();
        assert!(z.maps_into(&l) && l.maps_into(&Domain::Rational));
        assert!(!l.maps_into(&z));
        assert!(!l.maps_into(&Domain::Prime(2)));
        assert!(l.maps_into(&Domain::Prime(3)));
        assert_eq!(Domain::tensor(&l, &Domain::Prime(2)), None);
        assert_eq!(Domain::tensor(&z, &Domain::Prime(2)), Some(Domain::Prime(2)));
        assert_eq!(Domain::hom(&l, &z), None);
        assert_eq!(Domain::hom(&z, &l), Some(l.clone()));
        assert_eq!(Domain::localized(PrimeSet::new()), Domain::Integer);
    }

    #[test]
    fn prime_factorization() {
        let f = prime_factors(&BigInt::from(360));
        assert_eq!(f.into_iter().collect::<Vec<_>>(), vec![2, 3, 5]);
        assert!(is_prime(13) && !is_prime(1) && !is_prime(15));
    }
}
