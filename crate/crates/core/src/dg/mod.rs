//! DG algebras, DG modules and bimodules, and the constructions on them.

pub mod algebra;
pub mod cohomology;
pub mod constructions;
pub mod hom;
pub mod maps;
pub mod module;
pub mod tensor;

use std::sync::Arc;

pub use algebra::DgAlgebra;
pub use cohomology::{cohomology, is_acyclic, Cohomology, GroupSummary};
pub use constructions::{cone, direct_sum, shift, DirectSum, Triangle};
pub use hom::{hom_complex, HomComplex};
pub use maps::ChainMap;
pub use module::{Action, Cell, CellSpec, CellStructure, DgModule};
pub use tensor::{tensor_complex, TensorComplex};

/// Tally of exact structural identities checked on a DG object.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StructureReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl StructureReport {
    pub fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: StructureReport) {
        self.checked += other.checked;
        self.failures.extend(other.failures);
    }
}

/// Two algebra handles denote the same algebra.
pub fn same_alg(a: &Arc<DgAlgebra>, b: &Arc<DgAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}
