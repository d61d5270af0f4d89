//! Assembly of the recollement data from `R`, `B`, `C`.

use std::sync::Arc;

use serde::Serialize;

use crate::derived::{
    dual_bimodule, endomorphism_dga, semifree_resolve, EndomorphismDga, ResolveOptions, SemifreeResolution,
};
use crate::dg::cohomology::cohomology;
use crate::dg::constructions::is_quasi_iso;
use crate::dg::tensor::tensor_complex;
use crate::dg::{ChainMap, DgAlgebra, DgModule, HomComplex};
use crate::error::{Error, Result};
use crate::kernel::matrix::axpy;
use crate::kernel::{Matrix, Vector};

/// How `j_*` is evaluated.
#[derive(Clone, Debug)]
pub enum JLowerModel {
    /// `RHom_T(pC*, -)` through a finite semifree resolution of `C*` over `T`
    /// that keeps the right `R`-action.
    Bimodule(SemifreeResolution),
    /// `C*` has no finite resolution over `T`; `j_*Z` is the cone of the
    /// counit `i_* i^! j_! Z → j_! Z`.
    Glued(String),
}

/// Quasi-isomorphism witness with cohomology on both sides.
#[derive(Clone, Debug, Serialize)]
pub struct RecoveryWitness {
    pub claim: String,
    pub source_cohomology: Vec<(i32, String)>,
    pub target_cohomology: Vec<(i32, String)>,
    pub quasi_iso: bool,
}

#[derive(Clone, Debug)]
pub struct RecollementData {
    pub r: Arc<DgAlgebra>,
    pub b: Arc<DgModule>,
    pub c: Arc<DgModule>,
    pub e: EndomorphismDga,
    pub f: EndomorphismDga,
    /// `S = ℰ^op`, `T = ℱ^op`.
    pub s: Arc<DgAlgebra>,
    pub t: Arc<DgAlgebra>,
    /// `_R B_S` and `_R C_T` on the resolutions.
    pub pb: Arc<DgModule>,
    pub pc: Arc<DgModule>,
    /// `_T C*_R`.
    pub c_dual: HomComplex,
    pub j_lower: JLowerModel,
    pub opts: ResolveOptions,
    pub window_limited: bool,
    pub recovery: Vec<RecoveryWitness>,
}

pub fn cohomology_table(m: &DgModule) -> Result<Vec<(i32, String)>> {
    Ok(cohomology(m)?.summary().into_iter().map(|(n, g)| (n, g.to_string())).collect())
}

/// Multiplication `P ⊗_A A → P`, `p ⊗ a ↦ p · a`.
fn multiplication(p: &Arc<DgModule>, free: &Arc<DgModule>) -> Result<ChainMap> {
    let tc = tensor_complex(p, free)?;
    let dom = p.domain().clone();
    let right = p.right.as_ref().ok_or_else(|| Error::Structure("bimodule lacks a right action".into()))?;
    let mut mat = Matrix::zeros(p.dim(), tc.dim());
    for j in 0..tc.dim() {
        let mut out = Vector::new();
        for (pv, av, c) in tc.representative(j)? {
            // free module on one cell: basis element k is the algebra element k
            for (&a, x) in &av {
                let img = right.mats[a].apply(&dom, &pv);
                axpy(&dom, &mut out, &dom.mul(&c, x), &img);
            }
        }
        mat.set_column(j, out);
    }
    ChainMap::new(tc.module.clone(), p.clone(), mat)
}

/// Free rank-one module with the algebra's own basis.
pub fn free_module(alg: &Arc<DgAlgebra>) -> Result<Arc<DgModule>> {
    let spec = crate::dg::CellSpec { label: "1".into(), degree: 0, idempotent: None, attaching: Vector::new() };
    Ok(Arc::new(DgModule::semifree(&alg.name, alg.clone(), alg.domain().clone(), &[spec])?))
}

fn recovery(claim: &str, p: &Arc<DgModule>, res: &SemifreeResolution, alg: &Arc<DgAlgebra>) -> Result<RecoveryWitness> {
    let free = free_module(alg)?;
    let mu = multiplication(p, &free)?;
    let to_target = res.quasi_iso.after(&mu)?;
    Ok(RecoveryWitness {
        claim: claim.into(),
        source_cohomology: cohomology_table(&to_target.source)?,
        target_cohomology: cohomology_table(&to_target.target)?,
        quasi_iso: to_target.check().ok() && is_quasi_iso(&to_target)?,
    })
}

/// Cells allowed when probing for a finite resolution of `C*` over `T`.
const DUAL_PROBE_CELLS: usize = 12;

pub fn build_recollement(
    b: &Arc<DgModule>,
    c: &Arc<DgModule>,
    opts: &ResolveOptions,
    window_limited: bool,
) -> Result<RecollementData> {
    let r = c.left_alg().ok_or_else(|| Error::Structure(format!("{} has no left action", c.name)))?.clone();
    let b_res = semifree_resolve(b, opts)?;
    let c_res = semifree_resolve(c, opts)?;
    let e = endomorphism_dga(&b_res, "E")?;
    let f = endomorphism_dga(&c_res, "F")?;
    let (s, t) = (e.opposite.clone(), f.opposite.clone());
    let (pb, pc) = (e.bimodule.clone(), f.bimodule.clone());
    let mut cres = c_res.clone();
    cres.resolution = pc.clone();
    let c_dual = dual_bimodule(&cres)?;
    let probe = ResolveOptions { max_cells: DUAL_PROBE_CELLS, truncate: false, ..*opts };
    let j_lower = match semifree_resolve(&c_dual.module, &probe) {
        Ok(res) if res.resolution.right.is_some() => JLowerModel::Bimodule(res),
        Ok(_) => JLowerModel::Glued("the resolution of C* over T does not carry the right R-action".into()),
        Err(e) => JLowerModel::Glued(format!("C* has no finite resolution over T ({e})")),
    };
    let recovery = vec![recovery("i_*(S) ≅ B", &pb, &b_res, &s)?, recovery("j_!(T) ≅ C", &pc, &c_res, &t)?];
    if let Some(w) = recovery.iter().find(|w| !w.quasi_iso) {
        return Err(Error::Construction(format!(
            "{} fails: cohomology {:?} versus {:?}",
            w.claim, w.source_cohomology, w.target_cohomology
        )));
    }
    Ok(RecollementData {
        r,
        b: b.clone(),
        c: c.clone(),
        e,
        f,
        s,
        t,
        pb,
        pc,
        c_dual,
        j_lower,
        opts: *opts,
        window_limited,
        recovery,
    })
}

impl RecollementData {
    /// Every DG object built here, for structural checks.
    pub fn objects(&self) -> Vec<(String, Arc<DgModule>)> {
        let mut out = vec![
            ("B".to_string(), self.b.clone()),
            ("C".to_string(), self.c.clone()),
            ("R_B_S".to_string(), self.pb.clone()),
            ("R_C_T".to_string(), self.pc.clone()),
            ("T_C*_R".to_string(), self.c_dual.module.clone()),
        ];
        if let JLowerModel::Bimodule(res) = &self.j_lower {
            out.push(("p(C*)".to_string(), res.resolution.clone()));
        }
        out
    }

    pub fn algebras(&self) -> Vec<(String, Arc<DgAlgebra>)> {
        vec![
            ("R".into(), self.r.clone()),
            ("E".into(), self.e.algebra.clone()),
            ("F".into(), self.f.algebra.clone()),
            ("S".into(), self.s.clone()),
            ("T".into(), self.t.clone()),
        ]
    }

    pub fn glued(&self) -> bool {
        matches!(self.j_lower, JLowerModel::Glued(_))
    }
}
