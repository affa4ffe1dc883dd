//! Explicit genus-3 AGM step on plane quartics.
//!
//! From a smooth quartic `C` and a two-torsion class `alpha` (a pair of
//! bitangents) the crate extracts the plane configuration `(E, Q, q1..q6)`,
//! and from a configuration plus a flag it computes the dual configuration
//! `(E', Q', q'1..q'6)`. Every over-determined interpolation carries a rank
//! certificate.

mod error;
pub mod numkernel;
pub mod plane;

pub use error::{Error, Result};
pub mod fixtures;
pub mod quartic_theta;
pub mod configuration;
pub mod agm_step;
pub mod differentials;
