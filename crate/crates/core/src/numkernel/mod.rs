//! Numeric foundation: scalar policy, univariate root finding, rank-revealing
//! nullspaces and resultant elimination.

mod dd;
mod nullspace;
mod poly;
mod resultant;
mod roots;
mod tolerance;
mod unitary;

pub use dd::{Dd, DdComplex};
pub use nullspace::{nullspace, singular_values, NullspaceResult, RankCertificate};
pub use poly::UnivariatePoly;
pub use resultant::{resultant_eliminate, sylvester_determinant};
pub use roots::{roots_univariate, Root};
pub use tolerance::{Precision, ToleranceProfile};
pub use unitary::seeded_unitary;

pub type C64 = num_complex::Complex<f64>;

/// Run `op` at the profile's precision; on a numeric failure retry once at
/// extended precision.
pub fn with_escalation<T>(
    profile: &ToleranceProfile,
    mut op: impl FnMut(&ToleranceProfile) -> crate::Result<T>,
) -> crate::Result<T> {
    match op(profile) {
        Err(e) if e.is_numeric() && profile.precision == Precision::Double => {
            op(&profile.escalated())
        }
        other => other,
    }
}
