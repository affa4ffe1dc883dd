use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::C64;

/// A Haar-distributed unitary matrix drawn from a seeded generator.
pub fn seeded_unitary(n: usize, seed: u64) -> DMatrix<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(n, n, |_, _| {
        C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_and_deterministic() {
        let u = seeded_unitary(3, 9);
        let e = u.adjoint() * &u - DMatrix::<C64>::identity(3, 3);
        assert!(e.norm() < 1e-14);
        assert_eq!(u, seeded_unitary(3, 9));
        assert_ne!(u, seeded_unitary(3, 10));
    }
}
