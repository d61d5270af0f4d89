//! Endomorphism DGAs of resolutions and the dual bimodule `C*`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::resolution::SemifreeResolution;
use crate::dg::hom::hom_complex;
use crate::dg::module::{Action, CellSpec};
use crate::dg::{DgAlgebra, DgModule, HomComplex};
use crate::error::{Error, Result};
use crate::kernel::{Matrix, Scalar, Vector};

#[derive(Clone, Debug)]
pub struct EndomorphismDga {
    /// `End_A(P)` with composition product.
    pub algebra: Arc<DgAlgebra>,
    /// Its opposite, acting on `P` from the right.
    pub opposite: Arc<DgAlgebra>,
    pub of: SemifreeResolution,
    /// `P` as an `(A, opposite)`-bimodule: `p · s = (-1)^{|p||s|} s(p)`.
    pub bimodule: Arc<DgModule>,
    pub hom: HomComplex,
}

fn without_right(m: &Arc<DgModule>) -> Arc<DgModule> {
    if m.right.is_none() {
        return m.clone();
    }
    let mut q = (**m).clone();
    q.right = None;
    Arc::new(q)
}

pub fn endomorphism_dga(res: &SemifreeResolution, name: &str) -> Result<EndomorphismDga> {
    let p = without_right(&res.resolution);
    let hom = hom_complex(&p, &p)?;
    let dom = hom.domain().clone();
    let n = hom.dim();
    let degrees = &hom.module.module.degrees;
    let mut table = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            let prod = hom.maps[a].mul(&dom, &hom.maps[b]);
            if prod.is_zero() {
                continue;
            }
            table.insert((a, b), hom.coords(degrees[a] + degrees[b], &prod)?);
        }
    }
    let unit = hom.coords(0, &Matrix::identity(p.dim()))?;
    if unit.is_empty() && p.dim() > 0 {
        return Err(Error::Construction(format!("identity of {} has no coordinates", p.name)));
    }
    let mut alg = DgAlgebra::from_table(name, hom.module.module.clone(), &table, unit, hom.module.d.clone())?;
    declare_cell_idempotents(&mut alg, &p, &hom)?;
    let algebra = Arc::new(alg);
    let opposite = Arc::new(algebra.opposite());
    let mut mats = Vec::with_capacity(n);
    for (s, f) in hom.maps.iter().enumerate() {
        let ds = degrees[s];
        let mut act = Matrix::zeros(p.dim(), p.dim());
        for (r, c, x) in f.entries() {
            let v = dom.signed(x, (ds * p.degree(c)) as i64);
            act.set(r, c, v);
        }
        mats.push(act);
    }
    let mut bimodule = (*p).clone();
    bimodule.right = Some(Action { alg: opposite.clone(), mats });
    Ok(EndomorphismDga { algebra, opposite, of: res.clone(), bimodule: Arc::new(bimodule), hom })
}

/// Basis indices of the groups of cells that no differential connects.
fn cell_components(p: &DgModule) -> Vec<Vec<usize>> {
    let Some(cs) = &p.cells else { return vec![] };
    let n = p.dim();
    // blocks are contiguous but need not follow the filtration order
    let mut starts: Vec<(usize, usize)> = cs.cells.iter().enumerate().map(|(i, c)| (c.offset, i)).collect();
    starts.sort();
    let mut owner = vec![0; n];
    for (w, &(start, i)) in starts.iter().enumerate() {
        let end = starts.get(w + 1).map_or(n, |s| s.0);
        owner[start..end].iter_mut().for_each(|o| *o = i);
    }
    let mut root: Vec<usize> = (0..cs.cells.len()).collect();
    fn find(root: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while root[i] != i {
            root[i] = root[root[i]];
            i = root[i];
        }
        i
    }
    for (r, c, _) in p.d.entries() {
        let (a, b) = (find(&mut root, owner[r]), find(&mut root, owner[c]));
        root[a] = b;
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for k in 0..n {
        let g = find(&mut root, owner[k]);
        groups.entry(g).or_default().push(k);
    }
    groups.into_values().collect()
}

/// When `P` splits as a sum of cell groups, the projections onto them are
/// orthogonal idempotents of `End(P)` summing to the unit; recording them
/// lets resolutions over `End(P)` use the projective summands.
fn declare_cell_idempotents(alg: &mut DgAlgebra, p: &DgModule, hom: &HomComplex) -> Result<()> {
    let groups = cell_components(p);
    if groups.len() < 2 {
        return Ok(());
    }
    let mut split = alg.clone();
    for g in &groups {
        let mut proj = Matrix::zeros(p.dim(), p.dim());
        for &k in g {
            proj.set(k, k, Scalar::one());
        }
        if split.declare_idempotent(hom.coords(0, &proj)?).is_err() {
            return Ok(());
        }
    }
    *alg = split;
    Ok(())
}

/// `A` as an `(A, A)`-bimodule, on the algebra's own basis (a single cell
/// generated by the unit).
pub fn regular_bimodule(alg: &Arc<DgAlgebra>) -> Result<DgModule> {
    let dom = alg.domain().clone();
    let spec = CellSpec { label: "1".into(), degree: 0, idempotent: None, attaching: Vector::new() };
    let mut m = DgModule::semifree(&alg.name, alg.clone(), dom.clone(), &[spec])?;
    // semifree basis of a single unrestricted cell is the algebra basis
    let n = alg.dim();
    let mats = (0..n)
        .map(|r| {
            let mut x = Matrix::zeros(n, n);
            for a in 0..n {
                x.set_column(a, alg.basis_product(a, r));
            }
            x
        })
        .collect();
    m.right = Some(Action { alg: alg.clone(), mats });
    m.name = format!("{}_{}", alg.name, alg.name);
    Ok(m)
}

/// `C* = Hom_A(pC, A_A)`: left action of the right algebra of `pC`, right
/// action of `A`.
pub fn dual_bimodule(res: &SemifreeResolution) -> Result<HomComplex> {
    let p = &res.resolution;
    if res.ledger.is_empty() && p.dim() > 0 {
        return Err(Error::CertificateRequired(format!("{} has no finite ledger", p.name)));
    }
    let alg = p.left_alg().ok_or_else(|| Error::Structure(format!("{} has no left action", p.name)))?.clone();
    if p.domain() != alg.domain() {
        return Err(Error::Domain(format!(
            "dual of a {}-module over an algebra with coefficients in {}",
            p.domain(),
            alg.domain()
        )));
    }
    let reg = Arc::new(regular_bimodule(&alg)?);
    hom_complex(p, &reg)
}

/// Cohomology class of the unit acts as the identity on every class.
pub fn unit_acts_trivially(alg: &DgAlgebra) -> bool {
    (0..alg.dim()).all(|a| {
        let e: Vector = [(a, Scalar::one())].into_iter().collect();
        alg.product(&alg.unit, &e) == e
    })
}
