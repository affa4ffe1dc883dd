use std::fmt;

use super::{DdComplex, C64};

/// Dense univariate polynomial with complex coefficients, lowest degree first.
///
/// Exact trailing zeros are trimmed on construction, so a nonzero polynomial
/// always has a nonzero leading coefficient. The zero polynomial has no
/// coefficients.
#[derive(Clone, PartialEq)]
pub struct UnivariatePoly {
    coeffs: Vec<C64>,
}

impl UnivariatePoly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    /// `lead * prod (z - r)`.
    pub fn from_roots(lead: C64, roots: &[C64]) -> Self {
        let mut coeffs = vec![lead];
        for &r in roots {
            let mut next = vec![C64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Horner evaluation carried out in double-double arithmetic.
    pub fn eval_compensated(&self, z: C64) -> C64 {
        let zz = DdComplex::from(z);
        self.coeffs
            .iter()
            .rev()
            .fold(DdComplex::ZERO, |acc, &c| acc * zz + DdComplex::from(c))
            .to_c64()
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let zero = C64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `sum |a_k| r^k`, the scale against which evaluation errors are measured.
    pub fn abs_eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Relative coefficient distance `||a - b|| / max(||a||, ||b||)`.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[C64], k: usize| v.get(k).copied().unwrap_or_default();
        let diff: f64 = (0..n)
            .map(|k| (get(&self.coeffs, k) - get(&other.coeffs, k)).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let norm = |v: &[C64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let scale = norm(&self.coeffs).max(norm(&other.coeffs));
        if scale == 0.0 {
            0.0
        } else {
            diff / scale
        }
    }
}

impl fmt::Debug for UnivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("UnivariatePoly").field(&self.coeffs).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn trims_trailing_zeros() {
        let p = UnivariatePoly::from_real(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        assert!(UnivariatePoly::from_real(&[0.0]).is_zero());
    }

    #[test]
    fn from_roots_expands() {
        let p = UnivariatePoly::from_roots(c(2.0), &[c(1.0), c(-3.0)]);
        // 2 (z - 1)(z + 3) = 2z^2 + 4z - 6
        assert_eq!(p.coeffs(), &[c(-6.0), c(4.0), c(2.0)]);
    }

    #[test]
    fn horner_with_derivative() {
        let p = UnivariatePoly::from_real(&[1.0, -2.0, 0.0, 3.0]);
        let z = C64::new(0.5, -1.25);
        let (v, d) = p.eval_with_derivative(z);
        assert!((v - p.eval(z)).norm() < 1e-15);
        assert!((d - p.derivative().eval(z)).norm() < 1e-14);
        assert!((p.eval_compensated(z) - v).norm() < 1e-14);
    }
}
