//! Axiom scorecard: every structural identity, adjunction and triangle of
//! the recollement, checked object by object on a finite testset.

use std::sync::Arc;

use serde::Serialize;

use super::data::{cohomology_table, JLowerModel, RecollementData};
use super::functors::JLowerValue;
use super::maps::{cone_map, map_from_cone, null_homotopy, postcompose, unit_map};
use super::testset::Testset;
use crate::derived::{derived_hom, DerivedHom};
use crate::dg::constructions::is_quasi_iso;
use crate::dg::hom::hom_complex;
use crate::dg::{cone, is_acyclic, ChainMap, DgModule};
use crate::error::{Error, Result};
use crate::kernel::matrix::axpy;
use crate::kernel::{Matrix, Vector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub axiom: String,
    pub object: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Scorecard {
    pub records: Vec<CheckRecord>,
}

impl Scorecard {
    pub fn push(&mut self, axiom: &str, object: &str, outcome: Result<Verdict>) {
        let (passed, detail) = match outcome {
            Ok(v) => (v.passed, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        self.records.push(CheckRecord { axiom: axiom.into(), object: object.into(), passed, detail });
    }

    pub fn merge(&mut self, other: Scorecard) {
        self.records.extend(other.records);
        self.records.sort_by(|a, b| (&a.axiom, &a.object).cmp(&(&b.axiom, &b.object)));
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.passed)
    }

    pub fn pass_count(&self) -> usize {
        self.records.iter().filter(|r| r.passed).count()
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    fn of(passed: bool, detail: impl Into<String>) -> Verdict {
        Verdict { passed, detail: detail.into() }
    }
}

fn table(m: &DgModule) -> String {
    match cohomology_table(m) {
        Ok(t) if t.is_empty() => "0".into(),
        Ok(t) => t.iter().map(|(n, g)| format!("H^{n} = {g}")).collect::<Vec<_>>().join(", "),
        Err(e) => format!("({e})"),
    }
}

/// A chain map that is a quasi-isomorphism, with a cohomology diff otherwise.
pub fn quasi_iso_verdict(f: &ChainMap) -> Result<Verdict> {
    let rep = f.check();
    if !rep.ok() {
        return Ok(Verdict::of(false, format!("not a chain map: {}", rep.failures.join("; "))));
    }
    if is_quasi_iso(f)? {
        Ok(Verdict::of(true, format!("quasi-isomorphism, {}", table(&f.source))))
    } else {
        Ok(Verdict::of(false, format!("source {} versus target {}", table(&f.source), table(&f.target))))
    }
}

pub fn acyclic_verdict(m: &DgModule) -> Result<Verdict> {
    Ok(if is_acyclic(m)? { Verdict::of(true, "acyclic") } else { Verdict::of(false, table(m)) })
}

fn structure_verdict(m: &DgModule) -> Verdict {
    let rep = m.check();
    Verdict::of(rep.ok(), if rep.ok() { "ok".to_string() } else { rep.failures.join("; ") })
}

/// Axiom names as they appear in reports.
pub mod axiom {
    pub const STRUCTURE: &str = "structure: d² = 0, Leibniz, bimodule";
    pub const J_I: &str = "j^* i_* = 0";
    pub const UNIT_I: &str = "unit Y → i^! i_* Y";
    pub const UNIT_J: &str = "unit Z → j^* j_! Z";
    pub const J_J: &str = "j^* j_* Z ≅ Z";
    pub const TRIANGLE_I: &str = "cone(i_* i^! X → X) ≅ j_* j^* X";
    pub const TRIANGLE_J: &str = "cone(j_! j^* X → X) ≅ i_* i^* X";
    pub const I_J_SHRIEK: &str = "i^* j_! = 0";
    pub const I_J_LOWER: &str = "i^! j_* = 0";
    pub const I_I: &str = "i^* i_* ≅ id";
    pub const ADJ_I: &str = "triangle identity for (i_*, i^!)";
    pub const ADJ_J: &str = "triangle identity for (j_!, j^*)";
    pub const RECOVERY: &str = "recovery of B and C";
}

impl RecollementData {
    /// `pY → i^! i_* Y`.
    pub fn i_unit(&self, y: &Arc<DgModule>) -> Result<ChainMap> {
        let t = self.i_lower(y)?;
        let h = self.i_shriek(t.module())?;
        unit_map(&t.tensor, &h.hom)
    }

    /// `pZ → j^* j_! Z`.
    pub fn j_unit(&self, z: &Arc<DgModule>) -> Result<ChainMap> {
        let t = self.j_shriek(z)?;
        let h = self.j_upper(t.module())?;
        unit_map(&t.tensor, &h.hom)
    }

    /// Unit `X → Hom_T(pC*, Hom_R(pC, X))` of the bimodule model,
    /// `x ↦ (ξ ↦ (c ↦ (-1)^{|x|(|ξ|+|c|)} ξ(c)·x))`.
    pub fn bimodule_unit(&self, x: &Arc<DgModule>) -> Result<(ChainMap, DerivedHom, DerivedHom)> {
        let JLowerModel::Bimodule(res) = &self.j_lower else {
            return Err(Error::Unrepresentable("j_* has no bimodule model here".into()));
        };
        let jx = self.j_upper(x)?;
        let jj = derived_hom(&res.resolution, jx.module(), &self.opts)?;
        let pc = &self.pc;
        let pcs = &res.resolution;
        let act = x.left.as_ref().ok_or_else(|| Error::Structure(format!("{} has no left action", x.name)))?;
        let xdom = x.domain().clone();
        let psi: Vec<Matrix> = (0..pcs.dim()).map(|k| self.c_dual.map_of(&res.quasi_iso.matrix.column(k))).collect();
        let mut mat = Matrix::zeros(jj.hom.dim(), x.dim());
        for xi in 0..x.dim() {
            let dx = x.degree(xi);
            let mut eta = Matrix::zeros(jx.hom.dim(), pcs.dim());
            for (k, m) in psi.iter().enumerate() {
                let dk = pcs.degree(k);
                let mut f = Matrix::zeros(x.dim(), pc.dim());
                for c in 0..pc.dim() {
                    let mut col = Vector::new();
                    for (&a, r) in &m.column(c) {
                        let s = xdom.signed(r, (dx * (dk + pc.degree(c))) as i64);
                        let img = act.mats[a].apply(&xdom, &crate::kernel::matrix::unit_vector(xi));
                        axpy(&xdom, &mut col, &s, &img);
                    }
                    f.set_column(c, col);
                }
                eta.set_column(k, jx.hom.coords(dx + dk, &f)?);
            }
            mat.set_column(xi, jj.hom.coords(dx, &eta)?);
        }
        Ok((ChainMap::new(x.clone(), jj.module().clone(), mat)?, jx, jj))
    }

    /// The comparison `j_* j^* X → cone(i_* i^! X → X)` (glued model) or
    /// `cone(i_* i^! X → X) → j_* j^* X` (bimodule model).
    pub fn triangle_i_map(&self, x: &Arc<DgModule>) -> Result<ChainMap> {
        let cx = self.i_counit(x)?;
        let t2 = cone(&cx.counit)?;
        match &self.j_lower {
            JLowerModel::Glued(_) => {
                let ej = self.j_counit(x)?;
                let cw = self.i_counit(&ej.counit.source)?;
                let t1 = cone(&cw.counit)?;
                let fx = self.i_counit_naturality(&cw, &cx, &ej.counit)?;
                cone_map(&t1, &t2, &fx.matrix, &ej.counit.matrix)
            }
            JLowerModel::Bimodule(_) => {
                let (eta, _, jj) = self.bimodule_unit(x)?;
                let g = eta.after(&cx.counit)?;
                let hc = hom_complex(&cx.counit.source, jj.module())?;
                let k = null_homotopy(&hc, &g.matrix)?
                    .ok_or_else(|| Error::Construction("η ∘ ε is not null-homotopic".into()))?;
                map_from_cone(&t2, &eta.matrix, &k, jj.module())
            }
        }
    }

    /// Counit `i_* i^! K → K` for `K = cone(j_! j^* X → X)`.
    pub fn triangle_j_map(&self, x: &Arc<DgModule>) -> Result<ChainMap> {
        let iu = self.i_upper(x)?;
        Ok(self.i_counit(&iu.triangle.z)?.counit)
    }

    /// `Z → j^* j_* Z`, through `j^* j_! Z` (glued) or `j^*` of the unit at
    /// `j_! Z` (bimodule).
    pub fn j_lower_unit(&self, z: &Arc<DgModule>) -> Result<ChainMap> {
        match self.j_lower(z)? {
            JLowerValue::Glued { shriek, triangle, .. } => {
                let h1 = self.j_upper(shriek.module())?;
                let h2 = self.j_upper(&triangle.z)?;
                let u = unit_map(&shriek.tensor, &h1.hom)?;
                postcompose(&h1.hom, &h2.hom, &triangle.v)?.after(&u)
            }
            JLowerValue::Bimodule(_) => {
                let shriek = self.j_shriek(z)?;
                let x = shriek.module();
                let (eta, jx, jj) = self.bimodule_unit(x)?;
                let h2 = self.j_upper(jj.module())?;
                let u = unit_map(&shriek.tensor, &jx.hom)?;
                postcompose(&jx.hom, &h2.hom, &eta)?.after(&u)
            }
        }
    }

    /// `Y → i^! i_* Y → i^!(cone(j_! j^* i_* Y → i_* Y)) = i^* i_* Y`.
    pub fn i_upper_i_lower(&self, y: &Arc<DgModule>) -> Result<ChainMap> {
        let t = self.i_lower(y)?;
        let h = self.i_shriek(t.module())?;
        let u = unit_map(&t.tensor, &h.hom)?;
        let iu = self.i_upper(t.module())?;
        postcompose(&h.hom, &iu.value.hom, &iu.triangle.v)?.after(&u)
    }

    /// `i^! ε ∘ η_{i^!} ≃ φ` in `H^0 Hom(p(i^!X), i^!X)`.
    pub fn i_triangle_identity(&self, x: &Arc<DgModule>) -> Result<Verdict> {
        let c = self.i_counit(x)?;
        let h2 = self.i_shriek(c.tensor.module())?;
        let u = unit_map(&c.tensor.tensor, &h2.hom)?;
        let comp = postcompose(&h2.hom, &c.hom.hom, &c.counit)?.after(&u)?;
        homotopic_to(&comp, &c.tensor.resolution.quasi_iso)
    }

    pub fn j_triangle_identity(&self, x: &Arc<DgModule>) -> Result<Verdict> {
        let c = self.j_counit(x)?;
        let h2 = self.j_upper(c.tensor.module())?;
        let u = unit_map(&c.tensor.tensor, &h2.hom)?;
        let comp = postcompose(&h2.hom, &c.hom.hom, &c.counit)?.after(&u)?;
        homotopic_to(&comp, &c.tensor.resolution.quasi_iso)
    }

    /// `X ≅ j_* j^* X` through the unit.
    pub fn j_lower_unit_iso(&self, x: &Arc<DgModule>) -> Result<Verdict> {
        match &self.j_lower {
            JLowerModel::Bimodule(_) => quasi_iso_verdict(&self.bimodule_unit(x)?.0),
            JLowerModel::Glued(_) => {
                // unit = Φ⁻¹ ∘ (X → cone(i_* i^! X → X))
                let phi = quasi_iso_verdict(&self.triangle_i_map(x)?)?;
                if !phi.passed {
                    return Ok(Verdict::of(false, format!("comparison map: {}", phi.detail)));
                }
                let cx = self.i_counit(x)?;
                quasi_iso_verdict(&cone(&cx.counit)?.v)
            }
        }
    }
}

fn homotopic_to(f: &ChainMap, g: &ChainMap) -> Result<Verdict> {
    let dom = f.target.domain().clone();
    let gm = if g.target.domain() == &dom { g.matrix.clone() } else { g.matrix.coerce(g.target.domain(), &dom)? };
    if f.matrix.rows() != gm.rows() || f.matrix.cols() != gm.cols() {
        return Err(Error::Structure("triangle identity: shapes disagree".into()));
    }
    let diff = f.matrix.sub(&dom, &gm);
    if diff.is_zero() {
        return Ok(Verdict::of(true, "equal on the nose"));
    }
    let hc = hom_complex(&f.source, &f.target)?;
    Ok(match null_homotopy(&hc, &diff)? {
        Some(_) => Verdict::of(true, "homotopic"),
        None => Verdict::of(false, "differs from the identity in H^0"),
    })
}

/// Runs every check on every object of the testset.
pub fn verify_recollement(data: &RecollementData, testset: &Testset) -> Scorecard {
    let mut card = Scorecard::default();
    for (name, m) in data.objects() {
        card.push(axiom::STRUCTURE, &name, Ok(structure_verdict(&m)));
    }
    for (name, a) in data.algebras() {
        let rep = a.check();
        let v = Verdict::of(rep.ok(), if rep.ok() { "ok".to_string() } else { rep.failures.join("; ") });
        card.push(axiom::STRUCTURE, &name, Ok(v));
    }
    for w in &data.recovery {
        let v = Verdict::of(w.quasi_iso, format!("{:?} versus {:?}", w.source_cohomology, w.target_cohomology));
        card.push(axiom::RECOVERY, &w.claim, Ok(v));
    }
    for o in &testset.s_side {
        let y = &o.module;
        card.push(
            axiom::J_I,
            &o.label,
            data.i_lower(y).and_then(|t| acyclic_verdict(data.j_upper(t.module())?.module())),
        );
        card.push(axiom::UNIT_I, &o.label, data.i_unit(y).and_then(|f| quasi_iso_verdict(&f)));
        card.push(axiom::I_I, &o.label, data.i_upper_i_lower(y).and_then(|f| quasi_iso_verdict(&f)));
        card.push(axiom::STRUCTURE, &format!("i_*{}", o.label), data.i_lower(y).map(|t| structure_verdict(t.module())));
    }
    for o in &testset.t_side {
        let z = &o.module;
        card.push(axiom::UNIT_J, &o.label, data.j_unit(z).and_then(|f| quasi_iso_verdict(&f)));
        card.push(axiom::J_J, &o.label, data.j_lower_unit(z).and_then(|f| quasi_iso_verdict(&f)));
        card.push(
            axiom::I_J_SHRIEK,
            &o.label,
            data.j_shriek(z).and_then(|t| acyclic_verdict(data.i_upper(t.module())?.value.module())),
        );
        card.push(
            axiom::I_J_LOWER,
            &o.label,
            data.j_lower(z).and_then(|v| acyclic_verdict(data.i_shriek(v.module())?.module())),
        );
        card.push(axiom::STRUCTURE, &format!("j_*{}", o.label), data.j_lower(z).map(|v| structure_verdict(v.module())));
    }
    for o in &testset.r_side {
        let x = &o.module;
        card.push(axiom::TRIANGLE_I, &o.label, data.triangle_i_map(x).and_then(|f| quasi_iso_verdict(&f)));
        card.push(axiom::TRIANGLE_J, &o.label, data.triangle_j_map(x).and_then(|f| quasi_iso_verdict(&f)));
        card.push(axiom::ADJ_I, &o.label, data.i_triangle_identity(x));
        card.push(axiom::ADJ_J, &o.label, data.j_triangle_identity(x));
        card.push(axiom::STRUCTURE, &format!("j^*{}", o.label), data.j_upper(x).map(|h| structure_verdict(h.module())));
        card.push(
            axiom::STRUCTURE,
            &format!("i^!{}", o.label),
            data.i_shriek(x).map(|h| structure_verdict(h.module())),
        );
    }
    card
}

/// With `B = 0`: `j_!` and `j^*` are inverse equivalences on the testset.
pub fn keller_reduction_check(data: &RecollementData, testset: &Testset) -> Result<Scorecard> {
    if !data.b.is_zero() {
        return Err(Error::Config("the reduction check needs B = 0".into()));
    }
    let mut card = Scorecard::default();
    for o in &testset.t_side {
        card.push(axiom::UNIT_J, &o.label, data.j_unit(&o.module).and_then(|f| quasi_iso_verdict(&f)));
    }
    for o in &testset.r_side {
        card.push(
            "counit j_! j^* X → X",
            &o.label,
            data.j_counit(&o.module).and_then(|c| quasi_iso_verdict(&c.counit)),
        );
    }
    Ok(card)
}

impl RecollementData {
    /// Adds `1` to the last nonzero structure constant of `ℱ`.
    pub fn mutated(&self) -> Result<RecollementData> {
        let Some(last) = self
            .f
            .algebra
            .mult
            .iter()
            .enumerate()
            .flat_map(|(a, m)| m.entries().map(move |(r, c, _)| (a, r, c)))
            .last()
        else {
            return Err(Error::Config("ℱ has no structure constants to corrupt".into()));
        };
        self.mutated_at(last, 1)
    }

    /// Adds `delta` to the structure constant `(a, r, c)` of `ℱ` (the
    /// coefficient of basis element `r` in `e_a · e_c`) and rebinds
    /// everything that refers to `ℱ`, keeping the (now inconsistent) actions.
    pub fn mutated_at(&self, (a, r, c): (usize, usize, usize), delta: i64) -> Result<RecollementData> {
        let f = &self.f.algebra;
        let dom = f.domain().clone();
        let n = f.dim();
        if a >= n || r >= n || c >= n {
            return Err(Error::Config(format!("ℱ has no structure constant ({a}, {r}, {c})")));
        }
        let mut alg = (**f).clone();
        let x = alg.mult[a].get(r, c);
        alg.mult[a].set(r, c, dom.add(&x, &dom.int(delta)));
        alg.name = format!("{}~", alg.name);
        let falg = Arc::new(alg);
        let talg = Arc::new(falg.opposite());
        let mut out = self.clone();
        out.f.algebra = falg;
        out.f.opposite = talg.clone();
        out.t = talg.clone();
        let mut pc = (*self.pc).clone();
        if let Some(ra) = pc.right.as_mut() {
            ra.alg = talg.clone();
        }
        out.pc = Arc::new(pc);
        let mut cd = self.c_dual.clone();
        let mut cm = (*cd.module).clone();
        if let Some(la) = cm.left.as_mut() {
            la.alg = talg.clone();
        }
        cd.module = Arc::new(cm);
        out.c_dual = cd;
        if let JLowerModel::Bimodule(res) = &self.j_lower {
            let mut res = res.clone();
            let mut p = (*res.resolution).clone();
            if let Some(la) = p.left.as_mut() {
                la.alg = talg;
            }
            res.resolution = Arc::new(p);
            out.j_lower = JLowerModel::Bimodule(res);
        }
        Ok(out)
    }
}
