//! Degree-zero chain maps between DG modules.

use std::sync::Arc;

use super::module::DgModule;
use super::{same_alg, StructureReport};
use crate::error::{Error, Result};
use crate::kernel::Matrix;

#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: Arc<DgModule>,
    pub target: Arc<DgModule>,
    /// Target rows, source columns, entries in the target's domain.
    pub matrix: Matrix,
}

impl ChainMap {
    pub fn new(source: Arc<DgModule>, target: Arc<DgModule>, matrix: Matrix) -> Result<ChainMap> {
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(Error::Structure(format!(
                "map {} → {} has shape {}x{}",
                source.name,
                target.name,
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.entries().all(|(r, c, _)| target.degree(r) == source.degree(c)) {
            return Err(Error::Structure(format!("map {} → {} is not of degree 0", source.name, target.name)));
        }
        Ok(ChainMap { source, target, matrix })
    }

    pub fn identity(m: Arc<DgModule>) -> ChainMap {
        let n = m.dim();
        ChainMap { source: m.clone(), target: m, matrix: Matrix::identity(n) }
    }

    pub fn zero(source: Arc<DgModule>, target: Arc<DgModule>) -> ChainMap {
        let matrix = Matrix::zeros(target.dim(), source.dim());
        ChainMap { source, target, matrix }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &ChainMap) -> Result<ChainMap> {
        if first.target.dim() != self.source.dim() {
            return Err(Error::Structure(format!(
                "cannot compose {} → {} after {} → {}",
                self.source.name, self.target.name, first.source.name, first.target.name
            )));
        }
        let dom = self.target.domain();
        let inner = if first.target.domain() == dom {
            first.matrix.clone()
        } else {
            first.matrix.coerce(first.target.domain(), dom)?
        };
        Ok(ChainMap { source: first.source.clone(), target: self.target.clone(), matrix: self.matrix.mul(dom, &inner) })
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// Commutes with differentials and with every action both ends share.
    pub fn check(&self) -> StructureReport {
        let mut rep = StructureReport::default();
        let dom = self.target.domain();
        let src_d = match self.source.d.coerce(self.source.domain(), dom) {
            Ok(m) => m,
            Err(e) => {
                rep.record(false, || e.to_string());
                return rep;
            }
        };
        let name = format!("{} → {}", self.source.name, self.target.name);
        rep.record(self.target.d.mul(dom, &self.matrix) == self.matrix.mul(dom, &src_d), || {
            format!("{name}: does not commute with differentials")
        });
        for (side, s, t) in
            [("left", &self.source.left, &self.target.left), ("right", &self.source.right, &self.target.right)]
        {
            let (Some(s), Some(t)) = (s, t) else { continue };
            if !same_alg(&s.alg, &t.alg) {
                rep.record(false, || format!("{name}: {side} algebras differ"));
                continue;
            }
            for (a, (ms, mt)) in s.mats.iter().zip(&t.mats).enumerate() {
                let ok = match ms.coerce(self.source.domain(), dom) {
                    Ok(ms) => mt.mul(dom, &self.matrix) == self.matrix.mul(dom, &ms),
                    Err(_) => false,
                };
                rep.record(ok, || format!("{name}: not {side}-linear for {}", s.alg.module.labels[a]));
            }
        }
        rep
    }
}
