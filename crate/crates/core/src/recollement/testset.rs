//! Deterministic seeded test objects on the `R`, `S` and `T` sides.
//!
//! Each side starts from a few blocks (the free module, `B`, `C`, any
//! scenario extras) and grows by shifts, sums and cones of random degree-0
//! cocycle maps until it reaches the requested size.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::data::{free_module, RecollementData};
use crate::derived::functors::is_s_torsion;
use crate::dg::hom::hom_complex;
use crate::dg::{cone, direct_sum, shift, ChainMap, DgAlgebra, DgModule};
use crate::error::Result;
use crate::kernel::matrix::axpy;
use crate::kernel::snf::kernel;
use crate::kernel::{Domain, Matrix, Scalar, Vector};

#[derive(Clone, Debug)]
pub struct TestObject {
    pub label: String,
    pub module: Arc<DgModule>,
}

impl TestObject {
    pub fn new(label: &str, module: Arc<DgModule>) -> TestObject {
        TestObject { label: label.into(), module }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Testset {
    pub r_side: Vec<TestObject>,
    pub s_side: Vec<TestObject>,
    pub t_side: Vec<TestObject>,
}

impl Testset {
    /// The same objects with their `T`-actions pointing at `t`, so a testset
    /// drawn from one construction can be run against a corrupted copy.
    pub fn rebound(&self, t: &Arc<DgAlgebra>) -> Testset {
        let t_side = self
            .t_side
            .iter()
            .map(|o| {
                let mut m = (*o.module).clone();
                for a in [m.left.as_mut(), m.right.as_mut()].into_iter().flatten() {
                    a.alg = t.clone();
                }
                TestObject { label: o.label.clone(), module: Arc::new(m) }
            })
            .collect();
        Testset { r_side: self.r_side.clone(), s_side: self.s_side.clone(), t_side }
    }

    pub fn len(&self) -> usize {
        self.r_side.len() + self.s_side.len() + self.t_side.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Largest object the generator keeps, in total rank.
const MAX_DIM: usize = 8;
const ATTEMPTS: usize = 400;

fn coefficient(rng: &mut ChaCha8Rng, dom: &Domain) -> Scalar {
    match dom {
        Domain::Prime(p) => dom.int(rng.gen_range(0..*p as i64)),
        _ => dom.int(rng.gen_range(-2..=3)),
    }
}

/// A random degree-0 cocycle of `Hom(a, b)`, if there is a nonzero one.
fn random_map(rng: &mut ChaCha8Rng, a: &Arc<DgModule>, b: &Arc<DgModule>) -> Result<Option<ChainMap>> {
    if a.domain() != b.domain() || a.is_zero() || b.is_zero() {
        return Ok(None);
    }
    let hc = hom_complex(a, b)?;
    let dom = hc.domain().clone();
    let m = &hc.module;
    let deg0 = m.module.in_degree(0);
    if deg0.is_empty() {
        return Ok(None);
    }
    let block = m.d.select(&(0..m.dim()).collect::<Vec<_>>(), &deg0);
    let cycles = kernel(&dom, &block);
    if cycles.is_empty() {
        return Ok(None);
    }
    let mut v = Vector::new();
    for z in &cycles {
        let c = coefficient(rng, &dom);
        let global: Vector = z.iter().map(|(&k, x)| (deg0[k], x.clone())).collect();
        axpy(&dom, &mut v, &c, &global);
    }
    if v.is_empty() {
        return Ok(None);
    }
    Ok(Some(ChainMap::new(a.clone(), b.clone(), hc.map_of(&v))?))
}

/// Right multiplication by a degree-0 cocycle `s` on the free module.
fn right_multiplication(free: &Arc<DgModule>, alg: &DgAlgebra, s: &Vector) -> Result<ChainMap> {
    let dom = free.domain().clone();
    let mut mat = Matrix::zeros(free.dim(), free.dim());
    for a in 0..alg.dim() {
        let mut col = Vector::new();
        for (&b, x) in s {
            let prod = alg.basis_product(a, b);
            let prod: Vector =
                prod.iter().map(|(&k, y)| Ok((k, dom.coerce(alg.domain(), y)?))).collect::<Result<_>>()?;
            axpy(&dom, &mut col, &dom.coerce(alg.domain(), x)?, &prod);
        }
        mat.set_column(a, col);
    }
    ChainMap::new(free.clone(), free.clone(), mat)
}

fn degree_zero_cocycles(rng: &mut ChaCha8Rng, alg: &DgAlgebra, n: usize) -> Vec<Vector> {
    let dom = alg.domain();
    let deg0: Vec<usize> = alg.module.in_degree(0);
    let mut out = Vec::new();
    for _ in 0..n * 8 {
        let mut s = Vector::new();
        for &a in &deg0 {
            let c = coefficient(rng, dom);
            if !c.is_zero() {
                s.insert(a, c);
            }
        }
        if !s.is_empty() && alg.differential(&s).is_empty() && !out.contains(&s) {
            out.push(s);
        }
        if out.len() == n {
            break;
        }
    }
    out
}

struct Pool<'a> {
    objects: Vec<TestObject>,
    seen: BTreeSet<String>,
    admit: &'a dyn Fn(&DgModule) -> bool,
}

impl Pool<'_> {
    fn offer(&mut self, label: String, m: DgModule) -> bool {
        if m.dim() > MAX_DIM || self.seen.contains(&label) || !(self.admit)(&m) {
            return false;
        }
        self.seen.insert(label.clone());
        self.objects.push(TestObject { label, module: Arc::new(m) });
        true
    }

    fn grow(&mut self, rng: &mut ChaCha8Rng, size: usize, extra_maps: &[(String, ChainMap)]) -> Result<()> {
        let mut extra = extra_maps.iter();
        for _ in 0..ATTEMPTS {
            if self.objects.len() >= size || self.objects.is_empty() {
                break;
            }
            let op = rng.gen_range(0..4);
            let a = self.objects.choose(rng).expect("nonempty").clone();
            let b = self.objects.choose(rng).expect("nonempty").clone();
            match op {
                0 => {
                    let l = *[-2, -1, 1, 2].choose(rng).expect("nonempty");
                    self.offer(format!("Σ^{l}({})", a.label), shift(&a.module, l));
                }
                1 => {
                    if a.module.domain() == b.module.domain() && !a.module.is_zero() && !b.module.is_zero() {
                        let fallback = a.module.domain().clone();
                        let s = direct_sum(&[a.module.clone(), b.module.clone()], fallback)?;
                        self.offer(format!("{} ⊕ {}", a.label, b.label), (*s.sum).clone());
                    }
                }
                2 => {
                    if let Some((label, f)) = extra.next() {
                        let t = cone(f)?;
                        self.offer(label.clone(), (*t.z).clone());
                    }
                }
                _ => {
                    if let Some(f) = random_map(rng, &a.module, &b.module)? {
                        let t = cone(&f)?;
                        let label = format!("cone({} → {} #{})", a.label, b.label, self.objects.len());
                        self.offer(label, (*t.z).clone());
                    }
                }
            }
        }
        Ok(())
    }
}

/// Objects over `ℤ` must have `S`-torsion cohomology when `B` lives over
/// `ℤ[S⁻¹]`: the derived functors out of `B` are only representable there.
fn admissible(data: &RecollementData, m: &DgModule) -> bool {
    match (data.b.domain(), m.domain()) {
        (Domain::Localized(s), Domain::Integer) => is_s_torsion(m, s).unwrap_or(false),
        _ => true,
    }
}

fn algebra_side(rng: &mut ChaCha8Rng, alg: &Arc<DgAlgebra>, name: &str, size: usize) -> Result<Vec<TestObject>> {
    let admit = |_: &DgModule| true;
    let mut pool = Pool { objects: vec![], seen: BTreeSet::new(), admit: &admit };
    let zero = DgModule::zero(alg.clone(), alg.domain().clone());
    pool.offer("0".into(), zero);
    if alg.dim() == 0 {
        return Ok(pool.objects);
    }
    let free = free_module(alg)?;
    pool.offer(name.into(), (*free).clone());
    let maps: Vec<(String, ChainMap)> = degree_zero_cocycles(rng, alg, 6)
        .into_iter()
        .map(|s| {
            let label = format!("cone(·{})", describe(alg, &s));
            right_multiplication(&free, alg, &s).map(|f| (label, f))
        })
        .collect::<Result<_>>()?;
    pool.grow(rng, size, &maps)?;
    Ok(pool.objects)
}

fn describe(alg: &DgAlgebra, s: &Vector) -> String {
    s.iter().map(|(&k, x)| format!("{x}{}", alg.module.labels[k])).collect::<Vec<_>>().join("+")
}

/// Generates `size` objects per side (fewer where the category is tiny,
/// as over the zero algebra).
pub fn generate_testset(data: &RecollementData, seed: u64, size: usize, extras: &[TestObject]) -> Result<Testset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let admit = |m: &DgModule| admissible(data, m);
    let mut pool = Pool { objects: vec![], seen: BTreeSet::new(), admit: &admit };
    pool.offer("0".into(), DgModule::zero(data.r.clone(), data.r.domain().clone()));
    pool.offer("R".into(), (*free_module(&data.r)?).clone());
    pool.offer("B".into(), (*data.b).clone());
    pool.offer("C".into(), (*data.c).clone());
    for o in extras {
        pool.offer(o.label.clone(), (*o.module).clone());
    }
    pool.grow(&mut rng, size, &[])?;
    let r_side = pool.objects;
    let s_side = algebra_side(&mut rng, &data.s, "S", size)?;
    let t_side = algebra_side(&mut rng, &data.t, "T", size)?;
    Ok(Testset { r_side, s_side, t_side })
}
