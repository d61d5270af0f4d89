pub mod domain;
pub mod graded;
pub mod matrix;
pub mod snf;

pub use domain::{Domain, PrimeSet, Scalar};
pub use graded::{DegreeWindow, GradedMap, GradedModule, Subquotient};
pub use matrix::{Matrix, Vector};
pub use snf::{smith, Smith};
