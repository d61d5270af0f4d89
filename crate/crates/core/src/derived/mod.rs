//! Semifree resolutions, derived functors, endomorphism DGAs.

pub mod endo;
pub mod functors;
pub mod resolution;

pub use endo::{dual_bimodule, endomorphism_dga, regular_bimodule, EndomorphismDga};
pub use functors::{derived_hom, derived_hom_set, derived_tensor, DerivedHom, DerivedTensor, HomRouteNote};
pub use resolution::{
    module_from_ledger, semifree_resolve, LedgerEntry, PerfectCertificate, ResolveOptions, SemifreeResolution,
};
