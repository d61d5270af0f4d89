//! The shipped triples `(R, B, C)`.

use std::sync::Arc;

use crate::dg::{Action, CellSpec, DgAlgebra, DgModule};
use crate::error::Result;
use crate::kernel::matrix::unit_vector;
use crate::kernel::{Domain, GradedModule, Matrix, Scalar, Vector};

#[derive(Clone, Debug)]
pub struct Triple {
    pub r: Arc<DgAlgebra>,
    pub b: Arc<DgModule>,
    pub c: Arc<DgModule>,
}

/// `ℤ[1/p]` as a complex over `ℤ`, concentrated in degree 0.
pub fn localization(r: &Arc<DgAlgebra>, p: u64) -> Result<Arc<DgModule>> {
    let dom = Domain::localized([p].into());
    let module = GradedModule::new(dom, vec![0], vec!["1".into()]);
    Ok(Arc::new(DgModule::over_ground(&format!("Z[1/{p}]"), r.clone(), module, Matrix::zeros(1, 1))?))
}

/// `ℤ/n` as the two-term complex `ℤ --n--> ℤ` in degrees −1, 0.
pub fn residue(r: &Arc<DgAlgebra>, n: i64) -> Result<Arc<DgModule>> {
    let module = GradedModule::new(r.domain().clone(), vec![-1, 0], vec!["a".into(), "b".into()]);
    let d = Matrix::from_i64(&[&[0, 0], &[n, 0]]);
    Ok(Arc::new(DgModule::over_ground(&format!("Z/{n}"), r.clone(), module, d)?))
}

/// `R = ℤ`, `B = ℤ[1/2]`, `C = ℤ/2`.
pub fn z_example() -> Result<Triple> {
    let r = Arc::new(DgAlgebra::ground(Domain::Integer));
    Ok(Triple { b: localization(&r, 2)?, c: residue(&r, 2)?, r })
}

/// `R = F_2[x]/(x²)`, `B = 0`, `C = R`.
pub fn keller_free() -> Result<Triple> {
    let dom = Domain::prime(2)?;
    let r = Arc::new(DgAlgebra::truncated_polynomial(dom.clone(), 2, 0)?);
    let b = Arc::new(DgModule::zero(r.clone(), dom.clone()).named("0"));
    let c = Arc::new(DgModule::free(r.clone(), dom)?.named("R"));
    Ok(Triple { r, b, c })
}

/// Path algebra of `1 → 2` over `F_2`; basis `e1, e2, a1`.
pub fn a2_algebra() -> Result<Arc<DgAlgebra>> {
    Ok(Arc::new(DgAlgebra::path_algebra(Domain::prime(2)?, 2, &[(0, 1)])?))
}

/// Indecomposable projective `R e_v`.
pub fn projective(r: &Arc<DgAlgebra>, v: usize) -> Result<Arc<DgModule>> {
    let spec = CellSpec { label: format!("P{}", v + 1), degree: 0, idempotent: Some(v), attaching: Vector::new() };
    Ok(Arc::new(DgModule::semifree(&format!("P{}", v + 1), r.clone(), r.domain().clone(), &[spec])?))
}

/// Simple module at vertex `v`: one-dimensional, only `e_v` acts. Over a
/// local algebra without declared idempotents (a truncated polynomial ring)
/// this is the residue field, where only the unit acts.
pub fn simple(r: &Arc<DgAlgebra>, v: usize) -> Arc<DgModule> {
    let dom = r.domain().clone();
    let acting = match r.idempotents.get(v) {
        Some(e) => e.element.clone(),
        None => r.unit.clone(),
    };
    let mats = (0..r.dim())
        .map(|a| {
            let mut m = Matrix::zeros(1, 1);
            if acting == unit_vector(a) {
                m.set(0, 0, Scalar::one());
            }
            m
        })
        .collect();
    Arc::new(DgModule {
        name: format!("S{}", v + 1),
        module: GradedModule::new(dom, vec![0], vec![format!("s{}", v + 1)]),
        d: Matrix::zeros(1, 1),
        left: Some(Action { alg: r.clone(), mats }),
        right: None,
        cells: None,
    })
}

/// `R = k(1 → 2)`, `B = S1`, `C = P2`.
pub fn a2_quiver() -> Result<Triple> {
    let r = a2_algebra()?;
    Ok(Triple { b: simple(&r, 0), c: projective(&r, 1)?, r })
}
