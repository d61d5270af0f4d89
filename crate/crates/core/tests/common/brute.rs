//! Brute-force oracles: finite abelian groups by enumeration, Smith forms by
//! determinantal divisors, and A2 quiver Ext tables by enumerating matrices
//! over F_2.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use recollement_core::dg::{DgAlgebra, DgModule};
use recollement_core::kernel::matrix::unit_vector;
use recollement_core::kernel::Matrix;
use recollement_core::localization::LocAbGroup;

// ---- finite abelian groups as tuples in ⊕ ℤ/n_i ----

/// Every invariant-factor chain with product at most `max`.
pub fn groups_up_to(max: u64) -> Vec<Vec<u64>> {
    pub fn extend(prefix: Vec<u64>, product: u64, max: u64, out: &mut Vec<Vec<u64>>) {
        out.push(prefix.clone());
        // the next factor is a multiple of the last one
        let last = prefix.last().copied().unwrap_or(1);
        let mut next = if prefix.is_empty() { 2 } else { last };
        while product * next <= max {
            let mut p = prefix.clone();
            p.push(next);
            extend(p, product * next, max, out);
            next += last;
        }
    }
    let mut out = Vec::new();
    extend(vec![], 1, max, &mut out);
    out
}

pub fn elements(g: &[u64]) -> Vec<Vec<u64>> {
    g.iter().fold(vec![vec![]], |acc, &n| {
        acc.into_iter().flat_map(|e| (0..n).map(move |x| [e.clone(), vec![x]].concat())).collect()
    })
}

pub fn times(g: &[u64], k: u64, x: &[u64]) -> Vec<u64> {
    x.iter().zip(g).map(|(&xi, &n)| (xi * k) % n).collect()
}

pub fn is_zero(x: &[u64]) -> bool {
    x.iter().all(|&v| v == 0)
}

/// `d ↦ #{x : d x = 0}` for `d` up to `exp`; determines a finite abelian group.
pub type Profile = Vec<usize>;

pub fn profile_of(group: &LocAbGroup, exp: u64) -> Profile {
    assert_eq!(group.free_rank, 0);
    (1..=exp)
        .map(|d| group.torsion.iter().map(|t| t.gcd(&BigInt::from(d))).product::<BigInt>().try_into().unwrap())
        .collect()
}

/// Brute force: a homomorphism `⊕ ℤ/m_i → B` is a choice of images `b_i`
/// with `m_i b_i = 0`; enumerate all of them.
pub fn brute_hom_profile(a: &[u64], b: &[u64], exp: u64) -> Profile {
    let eb = elements(b);
    let choices: Vec<Vec<&Vec<u64>>> =
        a.iter().map(|&m| eb.iter().filter(|x| is_zero(&times(b, m, x))).collect()).collect();
    let mut homs: Vec<Vec<&Vec<u64>>> = vec![vec![]];
    for c in &choices {
        homs = homs.into_iter().flat_map(|h| c.iter().map(move |x| [h.clone(), vec![*x]].concat())).collect();
    }
    (1..=exp).map(|d| homs.iter().filter(|h| h.iter().all(|x| is_zero(&times(b, d, x)))).count()).collect()
}

/// Brute force: `Ext(⊕ ℤ/m_i, B) = ⊕ B / m_i B` from the free resolution
/// `ℤ^k --diag(m)--> ℤ^k`; each quotient is enumerated as a set of cosets.
pub fn brute_ext_profile(a: &[u64], b: &[u64], exp: u64) -> Profile {
    let eb = elements(b);
    let mut prof = vec![1usize; exp as usize];
    for &m in a {
        let image: BTreeSet<Vec<u64>> = eb.iter().map(|x| times(b, m, x)).collect();
        for d in 1..=exp {
            let killed = eb.iter().filter(|x| image.contains(&times(b, d, x))).count();
            prof[(d - 1) as usize] *= killed / image.len();
        }
    }
    prof
}

pub fn as_group(g: &[u64]) -> LocAbGroup {
    let t: Vec<BigInt> = g.iter().map(|&n| BigInt::from(n)).collect();
    LocAbGroup::new(0, &t, Default::default())
}

// ---- Smith normal form against determinantal divisors ----

fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i128>> = m[1..].iter().map(|r| [&r[..j], &r[j + 1..]].concat()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] * det(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n)
        .flat_map(|last| {
            subsets(last, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

/// `s_k = d_k / d_{k-1}` where `d_k` is the gcd of all `k × k` minors.
pub fn naive_invariant_factors(a: &[Vec<i64>]) -> Vec<i128> {
    let (m, n) = (a.len(), a[0].len());
    let mut divisors = vec![1i128];
    for k in 1..=m.min(n) {
        let mut g = 0i128;
        for rows in subsets(m, k) {
            for cols in subsets(n, k) {
                let minor: Vec<Vec<i128>> =
                    rows.iter().map(|&r| cols.iter().map(|&c| a[r][c] as i128).collect()).collect();
                g = g.gcd(&det(&minor));
            }
        }
        if g == 0 {
            break;
        }
        divisors.push(g);
    }
    divisors.windows(2).map(|w| w[1] / w[0]).collect()
}

// ---- Ext tables of the A2 quiver by enumeration ----

fn bits(m: &Matrix) -> Vec<Vec<u8>> {
    (0..m.rows()).map(|r| (0..m.cols()).map(|c| u8::from(!m.get(r, c).is_zero())).collect()).collect()
}

fn mat_mul(a: &[Vec<u8>], b: &[Vec<u8>], inner: usize) -> Vec<Vec<u8>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter().map(|row| (0..cols).map(|c| (0..inner).fold(0, |s, k| s ^ (row[k] & b[k][c]))).collect()).collect()
}

fn mat_add(a: &[Vec<u8>], b: &[Vec<u8>]) -> Vec<Vec<u8>> {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u ^ v).collect()).collect()
}

/// All `rows × cols` matrices over F_2.
fn all_matrices(rows: usize, cols: usize) -> Vec<Vec<Vec<u8>>> {
    (0..1u32 << (rows * cols))
        .map(|code| (0..rows).map(|r| (0..cols).map(|c| ((code >> (r * cols + c)) & 1) as u8).collect()).collect())
        .collect()
}

/// `dim Hom_A(M, N)` and `dim Ext¹_A(M, N)` by enumeration: Hom as the
/// commuting matrices, Ext¹ as cocycles `c: A → Hom_k(M, N)` with
/// `c(ab) = ρ_N(a) c(b) + c(a) ρ_M(b)` modulo coboundaries `ρ_N h − h ρ_M`.
pub fn brute_ext(alg: &DgAlgebra, m: &DgModule, n: &DgModule) -> (u32, u32) {
    let (dm, dn) = (m.dim(), n.dim());
    let rho_m: Vec<_> = m.left.as_ref().unwrap().mats.iter().map(bits).collect();
    let rho_n: Vec<_> = n.left.as_ref().unwrap().mats.iter().map(bits).collect();
    let maps = all_matrices(dn, dm);
    let dim = alg.dim();
    let commutator = |h: &Vec<Vec<u8>>, a: usize| mat_add(&mat_mul(&rho_n[a], h, dn), &mat_mul(h, &rho_m[a], dm));
    let homs = maps.iter().filter(|h| (0..dim).all(|a| commutator(h, a).iter().flatten().all(|&x| x == 0))).count();
    let zero = vec![vec![0u8; dm]; dn];
    let value = |c: &[Vec<Vec<u8>>], v: &recollement_core::kernel::Vector| {
        v.iter().filter(|(_, x)| !x.is_zero()).fold(zero.clone(), |acc, (&i, _)| mat_add(&acc, &c[i]))
    };
    let mut cocycles = 0usize;
    let mut tuple = vec![0usize; dim];
    loop {
        let c: Vec<Vec<Vec<u8>>> = tuple.iter().map(|&i| maps[i].clone()).collect();
        let ok = (0..dim).all(|a| {
            (0..dim).all(|b| {
                let ab = alg.product(&unit_vector(a), &unit_vector(b));
                let rhs = mat_add(&mat_mul(&rho_n[a], &c[b], dn), &mat_mul(&c[a], &rho_m[b], dm));
                value(&c, &ab) == rhs
            })
        });
        cocycles += usize::from(ok);
        let Some(k) = (0..dim).find(|&k| tuple[k] + 1 < maps.len()) else { break };
        tuple[k] += 1;
        tuple[..k].iter_mut().for_each(|t| *t = 0);
    }
    let coboundaries: BTreeSet<Vec<Vec<Vec<u8>>>> =
        maps.iter().map(|h| (0..dim).map(|a| commutator(h, a)).collect()).collect();
    let log2 = |x: usize| x.trailing_zeros();
    (log2(homs), log2(cocycles) - log2(coboundaries.len()))
}
