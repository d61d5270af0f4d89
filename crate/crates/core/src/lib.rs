pub mod derived;
pub mod dg;
pub mod error;
pub mod kernel;
pub mod localization;
pub mod recollement;

pub use error::{Error, Result};
