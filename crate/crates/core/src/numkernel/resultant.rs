use std::f64::consts::TAU;

use nalgebra::DMatrix;

use super::{UnivariatePoly, C64};
use crate::plane::HomogeneousForm;
use crate::{Error, Result};

/// Determinant of the Sylvester matrix of two univariate polynomials given by
/// their nominal-degree coefficient lists (lowest degree first). Leading
/// coefficients may vanish; the nominal degrees are used as given.
pub fn sylvester_determinant(f: &[C64], g: &[C64]) -> C64 {
    assert!(!f.is_empty() && !g.is_empty());
    let (m, n) = (f.len() - 1, g.len() - 1);
    if m + n == 0 {
        return C64::new(1.0, 0.0);
    }
    let size = m + n;
    let mut s = DMatrix::<C64>::zeros(size, size);
    for row in 0..n {
        for (k, &c) in f.iter().rev().enumerate() {
            s[(row, row + k)] = c;
        }
    }
    for row in 0..m {
        for (k, &c) in g.iter().rev().enumerate() {
            s[(n + row, row + k)] = c;
        }
    }
    s.lu().determinant()
}

/// Resultant of two ternary forms with respect to `eliminated`, as a
/// polynomial in the lower-indexed remaining variable on the chart where the
/// higher-indexed remaining variable equals 1.
///
/// The resultant is sampled on `deg f * deg g + 1` roots of unity and
/// recovered by an inverse discrete Fourier transform; coefficients that are
/// pure round-off are dropped from the top.
pub fn resultant_eliminate(
    f: &HomogeneousForm,
    g: &HomogeneousForm,
    eliminated: usize,
) -> Result<UnivariatePoly> {
    if f.nvars() != 3 || g.nvars() != 3 || eliminated > 2 {
        return Err(Error::InvalidInput(
            "resultant elimination works on ternary forms".into(),
        ));
    }
    if f.is_zero() || g.is_zero() {
        return Err(Error::ZeroForm("resultant input".into()));
    }
    let rest: Vec<usize> = (0..3).filter(|&k| k != eliminated).collect();
    let (a, b) = (rest[0], rest[1]);
    let n = f.degree() * g.degree() + 1;
    let mut dir = [C64::new(0.0, 0.0); 3];
    dir[eliminated] = C64::new(1.0, 0.0);

    let samples: Vec<C64> = (0..n)
        .map(|k| {
            let y = C64::from_polar(1.0, TAU * k as f64 / n as f64);
            let mut base = [C64::new(0.0, 0.0); 3];
            base[a] = y;
            base[b] = C64::new(1.0, 0.0);
            sylvester_determinant(&f.restrict(&base, &dir), &g.restrict(&base, &dir))
        })
        .collect();

    // On |y| = 1 the base point has norm sqrt 2; this bounds the size of an
    // honest resultant value.
    let scale = (f.norm() * 2f64.sqrt().powi(f.degree() as i32)).powi(g.degree() as i32)
        * (g.norm() * 2f64.sqrt().powi(g.degree() as i32)).powi(f.degree() as i32);
    let peak = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak <= 1e-11 * scale {
        return Err(Error::CommonComponent);
    }

    let mut coeffs: Vec<C64> = (0..n)
        .map(|j| {
            samples
                .iter()
                .enumerate()
                .map(|(k, v)| v * C64::from_polar(1.0, -TAU * (j * k) as f64 / n as f64))
                .sum::<C64>()
                / n as f64
        })
        .collect();
    let top = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    while coeffs.last().is_some_and(|c| c.norm() <= 1e-12 * top) {
        coeffs.pop();
    }
    Ok(UnivariatePoly::new(coeffs))
}
