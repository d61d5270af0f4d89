//! Canonical chain maps between functor values: units, counits,
//! postcomposition, maps out of cones.

use std::sync::Arc;

use crate::derived::SemifreeResolution;
use crate::dg::constructions::orbit_signs;
use crate::dg::{ChainMap, DgModule, HomComplex, TensorComplex, Triangle};
use crate::error::{Error, Result};
use crate::kernel::matrix::axpy;
use crate::kernel::snf::smith;
use crate::kernel::{Domain, Matrix, Scalar, Vector};

fn sign(dom: &Domain, k: i64) -> Scalar {
    dom.signed(&Scalar::one(), k)
}

fn coerce(v: &Vector, from: &Domain, to: &Domain) -> Result<Vector> {
    if from == to {
        return Ok(v.clone());
    }
    v.iter().map(|(&k, x)| Ok((k, to.coerce(from, x)?))).collect()
}

/// Unit `pY → Hom_A(P, P ⊗ pY)`, `y ↦ (p ↦ (-1)^{|p||y|} p ⊗ y)`.
pub fn unit_map(tensor: &TensorComplex, hom: &HomComplex) -> Result<ChainMap> {
    let p = &tensor.left;
    let y = &tensor.right;
    if hom.source.dim() != p.dim() || hom.target.dim() != tensor.dim() {
        return Err(Error::Structure("unit: Hom complex does not match the tensor".into()));
    }
    let dom = hom.domain().clone();
    let mut mat = Matrix::zeros(hom.dim(), y.dim());
    for j in 0..y.dim() {
        let mut f = Matrix::zeros(tensor.dim(), p.dim());
        for i in 0..p.dim() {
            let v = tensor.pair(i, j)?;
            let v = coerce(&v, tensor.domain(), &dom)?;
            let s = sign(&dom, (p.degree(i) * y.degree(j)) as i64);
            let mut col = Vector::new();
            axpy(&dom, &mut col, &s, &v);
            f.set_column(i, col);
        }
        mat.set_column(j, hom.coords(y.degree(j), &f)?);
    }
    ChainMap::new(y.clone(), hom.module.clone(), mat)
}

/// Counit `P ⊗ pH → X` for `H = Hom_A(P, X)` resolved by `φ : pH → H`:
/// `p ⊗ h ↦ (-1)^{|p||h|} φ(h)(p)`. When the derived Hom vanished by
/// torsion, the (zero) counit still lands in the original `X`.
pub fn counit_map(
    hom: &HomComplex,
    res: &SemifreeResolution,
    tensor: &TensorComplex,
    original: &Arc<DgModule>,
) -> Result<ChainMap> {
    if hom.target.is_zero() || tensor.dim() == 0 {
        return Ok(ChainMap::zero(tensor.module.clone(), original.clone()));
    }
    let x = if hom.target.domain() == original.domain() { original } else { &hom.target };
    let dom = x.domain().clone();
    let ph = &res.resolution;
    let images: Vec<Matrix> = (0..ph.dim())
        .map(|k| {
            let v = res.quasi_iso.matrix.column(k);
            let v = coerce(&v, res.quasi_iso.target.domain(), hom.domain())?;
            Ok(hom.map_of(&v))
        })
        .collect::<Result<_>>()?;
    let p = &tensor.left;
    let mut mat = Matrix::zeros(x.dim(), tensor.dim());
    for j in 0..tensor.dim() {
        let mut out = Vector::new();
        for (pv, hv, c) in tensor.representative(j)? {
            let c = dom.coerce(tensor.domain(), &c)?;
            for (&i, a) in &pv {
                let a = dom.coerce(tensor.domain(), a)?;
                for (&k, b) in &hv {
                    let b = dom.coerce(tensor.domain(), b)?;
                    let s = dom.signed(&dom.mul(&c, &dom.mul(&a, &b)), (p.degree(i) * ph.degree(k)) as i64);
                    axpy(&dom, &mut out, &s, &images[k].column(i));
                }
            }
        }
        mat.set_column(j, out);
    }
    ChainMap::new(tensor.module.clone(), x.clone(), mat)
}

/// `Hom(P, g) : Hom(P, W) → Hom(P, X)`, `f ↦ g ∘ f`.
pub fn postcompose(src: &HomComplex, dst: &HomComplex, g: &ChainMap) -> Result<ChainMap> {
    let dom = dst.domain().clone();
    if src.dim() == 0 || dst.target.dim() == 0 || src.target.dim() == 0 {
        // a vanishing derived Hom on either side
        return Ok(ChainMap::zero(src.module.clone(), dst.module.clone()));
    }
    let gm = if g.target.domain() == &dom { g.matrix.clone() } else { g.matrix.coerce(g.target.domain(), &dom)? };
    let degrees = &src.module.module.degrees;
    let mut mat = Matrix::zeros(dst.dim(), src.dim());
    for j in 0..src.dim() {
        let f = src.maps[j].coerce(src.domain(), &dom)?;
        mat.set_column(j, dst.coords(degrees[j], &gm.mul(&dom, &f))?);
    }
    ChainMap::new(src.module.clone(), dst.module.clone(), mat)
}

/// A degree `-1` map `K` with `dK + Kd = f`, if `f` is null-homotopic.
pub fn null_homotopy(hom: &HomComplex, f: &Matrix) -> Result<Option<Matrix>> {
    let dom = hom.domain().clone();
    let v = hom.coords(0, f)?;
    if v.is_empty() {
        return Ok(Some(Matrix::zeros(hom.target.dim(), hom.source.dim())));
    }
    let m = &hom.module;
    let src = m.module.in_degree(-1);
    let tgt = m.module.in_degree(0);
    let block = m.d.select(&tgt, &src);
    let local: Vector = tgt.iter().enumerate().filter_map(|(k, i)| v.get(i).map(|x| (k, x.clone()))).collect();
    let Some(w) = smith(&dom, &block).solve(&dom, &local) else { return Ok(None) };
    let global: Vector = w.into_iter().map(|(k, x)| (src[k], x)).collect();
    Ok(Some(hom.map_of(&global)))
}

/// `cone(u : X → Y) → Z` from `g : Y → Z` and a homotopy `K` with
/// `dK + Kd = g ∘ u`.
pub fn map_from_cone(tri: &Triangle, g: &Matrix, k: &Matrix, z: &Arc<DgModule>) -> Result<ChainMap> {
    let dom = z.domain().clone();
    let ny = tri.y.dim();
    let neg = orbit_signs(&tri.x, 1);
    let mut mat = Matrix::zeros(z.dim(), tri.z.dim());
    for j in 0..ny {
        mat.set_column(j, g.column(j));
    }
    for c in 0..tri.x.dim() {
        let col = k.column(c);
        let col = if neg[c] { col.into_iter().map(|(r, x)| (r, dom.neg(&x))).collect() } else { col };
        mat.set_column(ny + c, col);
    }
    ChainMap::new(tri.z.clone(), z.clone(), mat)
}

/// Map of cones induced by a strictly commuting square
/// `fy ∘ u1 = u2 ∘ fx`.
pub fn cone_map(t1: &Triangle, t2: &Triangle, fx: &Matrix, fy: &Matrix) -> Result<ChainMap> {
    let dom = t2.z.domain().clone();
    let (ny1, ny2) = (t1.y.dim(), t2.y.dim());
    let n1 = orbit_signs(&t1.x, 1);
    let n2 = orbit_signs(&t2.x, 1);
    let mut mat = Matrix::zeros(t2.z.dim(), t1.z.dim());
    for (r, c, x) in fy.entries() {
        mat.set(r, c, x.clone());
    }
    for (r, c, x) in fx.entries() {
        let v = if n1[c] != n2[r] { dom.neg(x) } else { x.clone() };
        mat.set(ny2 + r, ny1 + c, v);
    }
    ChainMap::new(t1.z.clone(), t2.z.clone(), mat)
}

/// `(A ⊗ g) : P ⊗ pY → P ⊗ pY'` for a map of semifree modules `g` that
/// preserves the left factor (used only when both tensors share `P`).
pub fn tensor_with_map(t1: &TensorComplex, t2: &TensorComplex, g: &Matrix) -> Result<ChainMap> {
    let dom = t2.domain().clone();
    let mut mat = Matrix::zeros(t2.dim(), t1.dim());
    for j in 0..t1.dim() {
        let mut terms = Vec::new();
        for (pv, yv, c) in t1.representative(j)? {
            let img = g.apply(&dom, &coerce(&yv, t1.domain(), &dom)?);
            terms.push((coerce(&pv, t1.domain(), &dom)?, img, dom.coerce(t1.domain(), &c)?));
        }
        mat.set_column(j, t2.elem_sum(&dom, &terms)?);
    }
    ChainMap::new(t1.module.clone(), t2.module.clone(), mat)
}
