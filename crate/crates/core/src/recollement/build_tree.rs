//! Finite build trees: evidence that `R` lies in the thick subcategory
//! generated by `B ⊕ C`.
//!
//! A tree lists its nodes in construction order; every node is a leaf (`B`
//! or `C`), a shift, a binary sum, the cone of a map given by coordinates in
//! `Hom(p(source), target)`, or the image of a strict idempotent
//! endomorphism. The certificate closes with a degree-0 cocycle `x` of the
//! root such that `R → root, r ↦ r·x` is a quasi-isomorphism. Replaying
//! rebuilds every node from the recorded data and rechecks that map.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::data::free_module;
use crate::derived::{semifree_resolve, ResolveOptions};
use crate::dg::cohomology::cohomology;
use crate::dg::constructions::is_quasi_iso;
use crate::dg::hom::hom_complex;
use crate::dg::{cone, direct_sum, shift, Action, ChainMap, DgAlgebra, DgModule};
use crate::error::{Error, Result};
use crate::kernel::graded::GradedModule;
use crate::kernel::matrix::axpy;
use crate::kernel::snf::{kernel, smith};
use crate::kernel::{Domain, Matrix, Scalar, Vector};

/// Sparse coordinates with exact coefficients as decimal strings.
pub type Coords = Vec<(usize, String)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Leaf {
    B,
    C,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum BuildStep {
    Leaf { leaf: Leaf },
    Shift { of: usize, by: i32 },
    Sum { left: usize, right: usize },
    Cone { source: usize, target: usize, map: Coords },
    Retract { of: usize, idempotent: Coords },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildNode {
    pub label: String,
    pub depth: usize,
    pub step: BuildStep,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildTree {
    pub nodes: Vec<BuildNode>,
    pub root: usize,
    /// Degree-0 cocycle of the root generating it as a copy of `R`.
    pub generator: Coords,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplayOutcome {
    pub nodes_rebuilt: usize,
    pub root_cohomology: Vec<(i32, String)>,
    pub quasi_iso: bool,
}

fn to_coords(v: &Vector) -> Coords {
    v.iter().map(|(&k, x)| (k, x.to_string())).collect()
}

fn from_coords(c: &Coords, dom: &Domain) -> Result<Vector> {
    c.iter()
        .map(|(k, s)| {
            let x = Scalar::parse(s).ok_or_else(|| Error::Config(format!("bad coefficient `{s}`")))?;
            Ok((*k, dom.element(&x)?))
        })
        .filter(|r| r.as_ref().map_or(true, |(_, x)| !x.is_zero()))
        .collect()
}

/// Image of a strict idempotent chain map `e` on `x`, with the induced
/// differential and action.
fn image_of_idempotent(x: &Arc<DgModule>, e: &Matrix) -> Result<DgModule> {
    let dom = x.domain().clone();
    let n = x.dim();
    let complement = Matrix::identity(n).sub(&dom, e);
    let mut basis: Vec<Vector> = Vec::new();
    let mut degrees = Vec::new();
    for deg in x.module.degrees.iter().copied().collect::<BTreeSet<_>>() {
        let idx = x.module.in_degree(deg);
        let block = complement.select(&(0..n).collect::<Vec<_>>(), &idx);
        for v in kernel(&dom, &block) {
            basis.push(v.into_iter().map(|(k, c)| (idx[k], c)).collect());
            degrees.push(deg);
        }
    }
    let k = basis.len();
    let frame = Matrix::from_columns(n, basis.clone());
    let solver = smith(&dom, &frame);
    let restrict = |m: &Matrix| -> Result<Matrix> {
        let cols = basis
            .iter()
            .map(|v| {
                solver
                    .solve(&dom, &m.apply(&dom, v))
                    .ok_or_else(|| Error::Construction("idempotent image is not stable".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_columns(k, cols))
    };
    let d = restrict(&x.d)?;
    let left = match &x.left {
        Some(act) => {
            Some(Action { alg: act.alg.clone(), mats: act.mats.iter().map(&restrict).collect::<Result<_>>()? })
        }
        None => None,
    };
    let labels = (0..k).map(|i| format!("r{i}")).collect();
    Ok(DgModule {
        name: format!("im(e on {})", x.name),
        module: GradedModule::new(dom, degrees, labels),
        d,
        left,
        right: None,
        cells: None,
    })
}

struct Leaves<'a> {
    b: &'a Arc<DgModule>,
    c: &'a Arc<DgModule>,
    opts: &'a ResolveOptions,
}

impl Leaves<'_> {
    fn realize(&self, step: &BuildStep, built: &[Arc<DgModule>]) -> Result<Arc<DgModule>> {
        let get = |i: usize| {
            built.get(i).cloned().ok_or_else(|| Error::Config(format!("build step refers to missing node {i}")))
        };
        Ok(match step {
            BuildStep::Leaf { leaf: Leaf::B } => self.b.clone(),
            BuildStep::Leaf { leaf: Leaf::C } => self.c.clone(),
            BuildStep::Shift { of, by } => Arc::new(shift(&*get(*of)?, *by)),
            BuildStep::Sum { left, right } => {
                let (l, r) = (get(*left)?, get(*right)?);
                let fallback = r.domain().clone();
                direct_sum(&[l, r], fallback)?.sum
            }
            BuildStep::Cone { source, target, map } => {
                let p = semifree_resolve(&get(*source)?, self.opts)?.resolution;
                let t = get(*target)?;
                let hc = hom_complex(&p, &t)?;
                let v = from_coords(map, hc.domain())?;
                cone(&ChainMap::new(p, t, hc.map_of(&v))?)?.z
            }
            BuildStep::Retract { of, idempotent } => {
                let x = get(*of)?;
                let hc = hom_complex(&x, &x)?;
                let e = hc.map_of(&from_coords(idempotent, hc.domain())?);
                let dom = x.domain();
                if e.mul(dom, &e) != e {
                    return Err(Error::Construction("retract map is not idempotent".into()));
                }
                ChainMap::new(x.clone(), x.clone(), e.clone())?;
                Arc::new(image_of_idempotent(&x, &e)?)
            }
        })
    }
}

/// `R → X, r ↦ r·x`.
fn generator_map(free: &Arc<DgModule>, x: &Arc<DgModule>, v: &Vector) -> Result<ChainMap> {
    let act = x.left.as_ref().ok_or_else(|| Error::Structure(format!("{} has no left action", x.name)))?;
    let dom = x.domain().clone();
    let mut mat = Matrix::zeros(x.dim(), free.dim());
    for (a, m) in act.mats.iter().enumerate() {
        mat.set_column(a, m.apply(&dom, v));
    }
    ChainMap::new(free.clone(), x.clone(), mat)
}

/// A degree-0 cocycle exhibiting `x ≃ R`, if one of the natural candidates
/// works.
fn generates(free: &Arc<DgModule>, x: &Arc<DgModule>) -> Result<Option<Vector>> {
    if x.domain() != free.domain() || x.left_alg().map(|a| a.as_ref()) != free.left_alg().map(|a| a.as_ref()) {
        return Ok(None);
    }
    if cohomology(x)?.summary() != cohomology(free)?.summary() {
        return Ok(None);
    }
    let gens = cohomology(x)?.generators(0);
    let dom = x.domain().clone();
    let mut candidates = gens.clone();
    if gens.len() > 1 {
        let mut s = Vector::new();
        for g in &gens {
            axpy(&dom, &mut s, &Scalar::one(), g);
        }
        candidates.push(s);
    }
    for v in candidates {
        let f = generator_map(free, x, &v)?;
        if is_quasi_iso(&f)? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

impl BuildTree {
    /// Rebuilds every node and rechecks the closing quasi-isomorphism.
    pub fn replay(
        &self,
        r: &Arc<DgAlgebra>,
        b: &Arc<DgModule>,
        c: &Arc<DgModule>,
        opts: &ResolveOptions,
    ) -> Result<ReplayOutcome> {
        let leaves = Leaves { b, c, opts };
        let mut built = Vec::new();
        for node in &self.nodes {
            built.push(leaves.realize(&node.step, &built)?);
        }
        let root = built.get(self.root).ok_or_else(|| Error::Config("build tree root is missing".into()))?;
        let free = free_module(r)?;
        let v = from_coords(&self.generator, root.domain())?;
        let quasi_iso = generator_map(&free, root, &v).and_then(|f| is_quasi_iso(&f)).unwrap_or(false);
        Ok(ReplayOutcome {
            nodes_rebuilt: built.len(),
            root_cohomology: super::data::cohomology_table(root)?,
            quasi_iso,
        })
    }

    pub fn depth(&self) -> usize {
        self.nodes.get(self.root).map_or(0, |n| n.depth)
    }

    /// The nodes the root actually depends on, in order.
    fn pruned(mut self) -> BuildTree {
        let mut keep = BTreeSet::from([self.root]);
        for i in (0..self.nodes.len()).rev() {
            if !keep.contains(&i) {
                continue;
            }
            match &self.nodes[i].step {
                BuildStep::Leaf { .. } => {}
                BuildStep::Shift { of, .. } | BuildStep::Retract { of, .. } => {
                    keep.insert(*of);
                }
                BuildStep::Sum { left: a, right: b } | BuildStep::Cone { source: a, target: b, .. } => {
                    keep.insert(*a);
                    keep.insert(*b);
                }
            }
        }
        let index: Vec<Option<usize>> = {
            let mut next = 0;
            (0..self.nodes.len())
                .map(|i| {
                    keep.contains(&i).then(|| {
                        next += 1;
                        next - 1
                    })
                })
                .collect()
        };
        let re = |i: usize| index[i].expect("kept");
        let nodes = std::mem::take(&mut self.nodes)
            .into_iter()
            .enumerate()
            .filter(|(i, _)| keep.contains(i))
            .map(|(_, mut n)| {
                n.step = match n.step {
                    BuildStep::Shift { of, by } => BuildStep::Shift { of: re(of), by },
                    BuildStep::Retract { of, idempotent } => BuildStep::Retract { of: re(of), idempotent },
                    BuildStep::Sum { left, right } => BuildStep::Sum { left: re(left), right: re(right) },
                    BuildStep::Cone { source, target, map } => {
                        BuildStep::Cone { source: re(source), target: re(target), map }
                    }
                    leaf => leaf,
                };
                n
            })
            .collect();
        BuildTree { nodes, root: re(self.root), generator: self.generator }
    }
}

/// Nodes kept per depth level, and the largest node kept, in total rank.
const LEVEL_CAP: usize = 40;
const MAX_RANK: usize = 12;
/// Ordered pairs tried for cones per level; each costs a resolution and a
/// Hom computation.
const PAIR_CAP: usize = 400;

/// A search step whose candidate maps are computed only when reached.
enum Pending {
    Ready(String, BuildStep),
    Cones(usize, usize),
    Retracts(usize),
}

struct Search<'a> {
    leaves: Leaves<'a>,
    free: Arc<DgModule>,
    nodes: Vec<BuildNode>,
    built: Vec<Arc<DgModule>>,
    seen: BTreeSet<String>,
}

impl Search<'_> {
    /// Adds a node unless it is too large or repeats a known one; returns
    /// a finished tree when the node is a copy of `R`.
    fn offer(&mut self, label: String, depth: usize, step: BuildStep) -> Result<Option<BuildTree>> {
        let Ok(m) = self.leaves.realize(&step, &self.built) else { return Ok(None) };
        if m.dim() > MAX_RANK || m.is_zero() {
            return Ok(None);
        }
        let Ok(h) = cohomology(&m) else { return Ok(None) };
        if h.is_zero() {
            return Ok(None);
        }
        // exact data, so that modules with equal cohomology groups stay apart
        let mats = m.left.as_ref().map(|a| format!("{:?}", a.mats)).unwrap_or_default();
        let key = format!("{:?}|{:?}|{:?}|{mats}", m.module.domain, m.module.degrees, m.d);
        if !self.seen.insert(key) {
            return Ok(None);
        }
        self.nodes.push(BuildNode { label, depth, step });
        self.built.push(m.clone());
        Ok(generates(&self.free, &m)?.map(|v| {
            BuildTree { nodes: self.nodes.clone(), root: self.nodes.len() - 1, generator: to_coords(&v) }.pruned()
        }))
    }

    fn maps(&self, i: usize, j: usize) -> Vec<Vector> {
        let run = || -> Result<Vec<Vector>> {
            let p = semifree_resolve(&self.built[i], self.leaves.opts)?.resolution;
            let hc = hom_complex(&p, &self.built[j])?;
            let gens = cohomology(&hc.module)?.generators(0);
            let mut out = gens.clone();
            if gens.len() > 1 {
                let dom = hc.domain().clone();
                let mut s = Vector::new();
                for g in &gens {
                    axpy(&dom, &mut s, &Scalar::one(), g);
                }
                out.push(s);
            }
            Ok(out)
        };
        run().unwrap_or_default()
    }

    /// Strict idempotent endomorphisms among small combinations of degree-0
    /// cocycles.
    fn idempotents(&self, i: usize) -> Vec<Vector> {
        let x = &self.built[i];
        let run = || -> Result<Vec<Vector>> {
            let hc = hom_complex(x, x)?;
            let m = &hc.module;
            let deg0 = m.module.in_degree(0);
            let block = m.d.select(&(0..m.dim()).collect::<Vec<_>>(), &deg0);
            let cycles: Vec<Vector> = kernel(hc.domain(), &block)
                .into_iter()
                .map(|z| z.into_iter().map(|(k, c)| (deg0[k], c)).collect())
                .take(4)
                .collect();
            let dom = hc.domain().clone();
            let id = Matrix::identity(x.dim());
            let mut out = Vec::new();
            for mask in 1u32..(1 << cycles.len()) {
                let mut v = Vector::new();
                for (b, z) in cycles.iter().enumerate() {
                    if mask & (1 << b) != 0 {
                        axpy(&dom, &mut v, &Scalar::one(), z);
                    }
                }
                let e = hc.map_of(&v);
                if !e.is_zero() && e != id && e.mul(&dom, &e) == e {
                    out.push(v);
                }
            }
            Ok(out)
        };
        run().unwrap_or_default()
    }
}

/// Breadth-first search for a build tree of `R` from `B` and `C` of depth at
/// most `depth`. `None` means the bounded search found nothing, which is no
/// evidence against membership.
pub fn search_build_tree(
    r: &Arc<DgAlgebra>,
    b: &Arc<DgModule>,
    c: &Arc<DgModule>,
    depth: usize,
    opts: &ResolveOptions,
) -> Result<Option<BuildTree>> {
    let mut s = Search {
        leaves: Leaves { b, c, opts },
        free: free_module(r)?,
        nodes: vec![],
        built: vec![],
        seen: BTreeSet::new(),
    };
    for (label, leaf) in [("B", Leaf::B), ("C", Leaf::C)] {
        if let Some(t) = s.offer(label.into(), 0, BuildStep::Leaf { leaf })? {
            return Ok(Some(t));
        }
    }
    for level in 1..=depth {
        let frontier: Vec<usize> = (0..s.nodes.len()).filter(|&i| s.nodes[i].depth == level - 1).collect();
        if frontier.is_empty() {
            break;
        }
        let older: Vec<usize> = (0..s.nodes.len()).collect();
        let start = s.nodes.len();
        let full = |s: &Search| s.nodes.len() - start >= LEVEL_CAP;
        let mut steps: Vec<Pending> = Vec::new();
        // cones first: they are what makes new objects
        for &i in &older {
            for &j in &older {
                if s.nodes[i].depth == level - 1 || s.nodes[j].depth == level - 1 {
                    steps.push(Pending::Cones(i, j));
                }
            }
        }
        steps.truncate(PAIR_CAP);
        for &i in &frontier {
            let l = s.nodes[i].label.clone();
            for by in [-1, 1] {
                steps.push(Pending::Ready(format!("Σ^{by}({l})"), BuildStep::Shift { of: i, by }));
            }
        }
        for &i in &frontier {
            for &j in &older {
                if s.nodes[j].depth == level - 1 && j < i {
                    continue;
                }
                let (li, lj) = (s.nodes[i].label.clone(), s.nodes[j].label.clone());
                steps.push(Pending::Ready(format!("{li} ⊕ {lj}"), BuildStep::Sum { left: i, right: j }));
            }
        }
        for &i in &frontier {
            steps.push(Pending::Retracts(i));
        }
        for pending in steps {
            if full(&s) {
                break;
            }
            let expanded = match pending {
                Pending::Ready(label, step) => vec![(label, step)],
                Pending::Cones(i, j) => s
                    .maps(i, j)
                    .into_iter()
                    .map(|v| {
                        let label = format!("cone({} → {})", s.nodes[i].label, s.nodes[j].label);
                        (label, BuildStep::Cone { source: i, target: j, map: to_coords(&v) })
                    })
                    .collect(),
                Pending::Retracts(i) => s
                    .idempotents(i)
                    .into_iter()
                    .map(|v| {
                        (
                            format!("retract of {}", s.nodes[i].label),
                            BuildStep::Retract { of: i, idempotent: to_coords(&v) },
                        )
                    })
                    .collect(),
            };
            for (label, step) in expanded {
                if full(&s) {
                    break;
                }
                if let Some(t) = s.offer(label, level, step)? {
                    return Ok(Some(t));
                }
            }
        }
    }
    Ok(None)
}
