use nalgebra::Matrix3;

use crate::numkernel::{seeded_unitary, C64};
use crate::plane::ProjPoint;
use crate::{Error, Result};

/// A line at infinity `V_inf` and two affine coordinate functionals, stored
/// as the rows of an invertible matrix `A`; the affine coordinates of `x`
/// are `z_i = (A x)_i / (A x)_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineChart {
    frame: Matrix3<C64>,
    inverse: Matrix3<C64>,
}

impl AffineChart {
    pub fn new(v_infty: [C64; 3], z1: [C64; 3], z2: [C64; 3]) -> Result<Self> {
        let frame = Matrix3::from_fn(|i, j| [v_infty, z1, z2][i][j]);
        let sv = frame.singular_values();
        if sv[2].is_nan() || sv[2] <= 1e-12 * sv[0] {
            return Err(Error::ChartDegenerate(format!(
                "V_inf, z1, z2 are not independent (condition {:.3e})",
                sv[0] / sv[2]
            )));
        }
        let inverse = frame.try_inverse().ok_or_else(|| Error::ChartDegenerate("singular frame".into()))?;
        Ok(Self { frame, inverse })
    }

    /// `V_inf = x2`, `z1 = x0`, `z2 = x1`.
    pub fn standard() -> Self {
        let o = C64::new(0.0, 0.0);
        let i = C64::new(1.0, 0.0);
        Self::new([o, o, i], [i, o, o], [o, i, o]).expect("coordinate frame")
    }

    /// A chart from a seeded unitary frame.
    pub fn seeded(seed: u64) -> Self {
        let u = seeded_unitary(3, seed);
        let row = |k: usize| [u[(k, 0)], u[(k, 1)], u[(k, 2)]];
        Self::new(row(0), row(1), row(2)).expect("unitary frame")
    }

    pub fn frame(&self) -> &Matrix3<C64> {
        &self.frame
    }

    pub fn inverse(&self) -> &Matrix3<C64> {
        &self.inverse
    }

    pub fn v_infty(&self) -> [C64; 3] {
        self.row(0)
    }

    pub fn row(&self, k: usize) -> [C64; 3] {
        [self.frame[(k, 0)], self.frame[(k, 1)], self.frame[(k, 2)]]
    }

    /// Representative of `p` with `V_inf(x) = 1`, or `None` on the line at
    /// infinity.
    pub fn normalize(&self, p: &ProjPoint) -> Option<[C64; 3]> {
        let x = p.coords();
        let v: C64 = (0..3).map(|j| self.frame[(0, j)] * x[j]).sum();
        if v.norm() < 1e-12 {
            return None;
        }
        Some([x[0] / v, x[1] / v, x[2] / v])
    }

    /// `(z1, z2)` of `p`.
    pub fn affine(&self, p: &ProjPoint) -> Option<[C64; 2]> {
        let x = self.normalize(p)?;
        let z = |k: usize| (0..3).map(|j| self.frame[(k, j)] * x[j]).sum();
        Some([z(1), z(2)])
    }

    /// Homogeneous direction of `d/dz_k` (a column of `A^-1`).
    pub fn direction(&self, k: usize) -> [C64; 3] {
        [self.inverse[(0, k)], self.inverse[(1, k)], self.inverse[(2, k)]]
    }
}
