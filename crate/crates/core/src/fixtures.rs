//! Curves used by tests, examples and the command line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numkernel::C64;
use crate::plane::{monomials, HomogeneousForm};
use crate::quartic_theta::Quartic;

/// `144(x^4 + y^4) - 225(x^2 + y^2) z^2 + 350 x^2 y^2 + 81 z^4`, a smooth
/// quartic all of whose 28 bitangents are real.
pub fn trott() -> Quartic {
    let f = HomogeneousForm::from_real_terms(
        3,
        4,
        &[
            (&[4, 0, 0], 144.0),
            (&[0, 4, 0], 144.0),
            (&[2, 0, 2], -225.0),
            (&[0, 2, 2], -225.0),
            (&[2, 2, 0], 350.0),
            (&[0, 0, 4], 81.0),
        ],
    )
    .expect("valid terms");
    Quartic::new(f).expect("valid quartic")
}

/// A quartic with real coefficients drawn uniformly from `[-1, 1]`.
pub fn random_quartic(seed: u64) -> Quartic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..monomials(3, 4).len())
        .map(|_| C64::new(rng.random_range(-1.0..1.0), 0.0))
        .collect();
    Quartic::new(HomogeneousForm::from_coeffs(3, 4, coeffs).expect("15 coefficients")).expect("valid quartic")
}
