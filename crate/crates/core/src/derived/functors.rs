//! `RHom` and `⊗^L` through semifree resolutions.
//!
//! Modules over a localized coefficient ring `Z[S⁻¹]` are resolved relative
//! to that ring. Maps out of such a resolution are computed exactly when the
//! target is `S`-local (it is then coerced to `Z[S⁻¹]`) or has bounded
//! `S`-power torsion cohomology (then `RHom` vanishes); any other target is
//! rejected as unrepresentable.

use std::sync::Arc;

use serde::Serialize;

use super::resolution::{semifree_resolve, ResolveOptions, SemifreeResolution};
use crate::dg::cohomology::{cohomology, GroupSummary};
use crate::dg::hom::hom_complex;
use crate::dg::module::{Action, CellStructure};
use crate::dg::tensor::tensor_complex;
use crate::dg::{DgModule, HomComplex, TensorComplex};
use crate::error::{Error, Result};
use crate::kernel::domain::{is_smooth, strip_primes};
use crate::kernel::{Domain, GradedModule, Matrix, PrimeSet};

/// How a mixed-coefficient `RHom` was evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HomRouteNote {
    Direct,
    /// Target is `S`-local and was coerced to the localized ring.
    LocalizedTarget,
    /// Target has bounded `S`-power torsion cohomology, so `RHom` vanishes.
    TorsionVanishing,
}

#[derive(Clone, Debug)]
pub struct DerivedHom {
    pub hom: HomComplex,
    pub resolution: SemifreeResolution,
    pub note: HomRouteNote,
}

impl DerivedHom {
    pub fn module(&self) -> &Arc<DgModule> {
        &self.hom.module
    }
}

#[derive(Clone, Debug)]
pub struct DerivedTensor {
    pub tensor: TensorComplex,
    /// Resolution of the left-module (second) factor.
    pub resolution: SemifreeResolution,
}

impl DerivedTensor {
    pub fn module(&self) -> &Arc<DgModule> {
        &self.tensor.module
    }
}

/// Same object with coefficients extended to `dom`.
pub fn change_domain(m: &DgModule, dom: &Domain) -> Result<DgModule> {
    let from = m.domain();
    if from == dom {
        return Ok(m.clone());
    }
    let conv = |a: &Option<Action>| -> Result<Option<Action>> {
        a.as_ref()
            .map(|a| {
                Ok(Action {
                    alg: a.alg.clone(),
                    mats: a.mats.iter().map(|x| x.coerce(from, dom)).collect::<Result<_>>()?,
                })
            })
            .transpose()
    };
    Ok(DgModule {
        name: m.name.clone(),
        module: GradedModule::new(dom.clone(), m.module.degrees.clone(), m.module.labels.clone()),
        d: m.d.coerce(from, dom)?,
        left: conv(&m.left)?,
        right: conv(&m.right)?,
        cells: m.cells.clone(),
    })
}

/// Zero module carrying the same acting algebras as `m`.
pub fn zero_like(m: &DgModule, dom: &Domain) -> DgModule {
    let empty = |a: &Option<Action>| {
        a.as_ref().map(|a| Action { alg: a.alg.clone(), mats: vec![Matrix::zeros(0, 0); a.alg.dim()] })
    };
    DgModule {
        name: "0".into(),
        module: GradedModule::zero(dom.clone()),
        d: Matrix::zeros(0, 0),
        left: empty(&m.left),
        right: empty(&m.right),
        cells: Some(CellStructure { cells: vec![] }),
    }
}

/// Every cohomology group is finite with order divisible only by primes of `s`.
pub fn is_s_torsion(m: &DgModule, s: &PrimeSet) -> Result<bool> {
    let h = cohomology(m)?;
    Ok(h.groups.values().all(|g| g.factors.iter().all(|f| !f.is_zero() && is_smooth(f.numer(), s))))
}

/// Every cohomology group is finite of order prime to `s` (hence `S`-local).
pub fn is_s_local_torsion(m: &DgModule, s: &PrimeSet) -> Result<bool> {
    let h = cohomology(m)?;
    Ok(h.groups.values().all(|g| g.factors.iter().all(|f| !f.is_zero() && &strip_primes(f.numer(), s) == f.numer())))
}

/// `RHom_A(M, N) = Hom_A(pM, N)`.
pub fn derived_hom(m: &Arc<DgModule>, n: &Arc<DgModule>, opts: &ResolveOptions) -> Result<DerivedHom> {
    let resolution = semifree_resolve(m, opts)?;
    let p = &resolution.resolution;
    let (pd, nd) = (p.domain().clone(), n.domain().clone());
    if p.is_zero() || pd.maps_into(&nd) {
        let hom = hom_complex(p, n)?;
        return Ok(DerivedHom { hom, resolution, note: HomRouteNote::Direct });
    }
    let Domain::Localized(s) = &pd else {
        return Err(Error::Domain(format!("RHom from a {pd}-module into a {nd}-module")));
    };
    if !nd.maps_into(&pd) {
        return Err(Error::Domain(format!("RHom from a {pd}-module into a {nd}-module")));
    }
    if is_s_torsion(n, s)? {
        let z = Arc::new(zero_like(n, &pd));
        let hom = hom_complex(p, &z)?;
        return Ok(DerivedHom { hom, resolution, note: HomRouteNote::TorsionVanishing });
    }
    if is_s_local_torsion(n, s)? {
        let nl = Arc::new(change_domain(n, &pd)?);
        let hom = hom_complex(p, &nl)?;
        return Ok(DerivedHom { hom, resolution, note: HomRouteNote::LocalizedTarget });
    }
    Err(Error::Unrepresentable(format!(
        "RHom({}, {}) out of a {pd}-module into a target that is neither S-local nor S-torsion",
        m.name, n.name
    )))
}

/// `M ⊗^L_A N = M ⊗_A pN`, resolving the left-module factor.
pub fn derived_tensor(m: &Arc<DgModule>, n: &Arc<DgModule>, opts: &ResolveOptions) -> Result<DerivedTensor> {
    let resolution = semifree_resolve(n, opts)?;
    let tensor = tensor_complex(m, &resolution.resolution)?;
    Ok(DerivedTensor { tensor, resolution })
}

/// `Hom_{D(A)}(Σ^l X, Y) = H^{-l} RHom_A(X, Y)`.
pub fn derived_hom_set(x: &Arc<DgModule>, y: &Arc<DgModule>, l: i32, opts: &ResolveOptions) -> Result<GroupSummary> {
    let rh = derived_hom(x, y, opts)?;
    let h = cohomology(rh.module())?;
    let dom = rh.module().domain().clone();
    Ok(h.summary().remove(&-l).unwrap_or(GroupSummary { free_rank: 0, torsion: vec![], ring: dom.to_string() }))
}
