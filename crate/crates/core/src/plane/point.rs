use std::fmt;

use crate::numkernel::C64;
use crate::{Error, Result};

/// A point of P^2 or P^3, stored as its canonical representative: unit
/// Euclidean norm, and the first coordinate of largest modulus real positive.
#[derive(Clone, PartialEq)]
pub struct ProjPoint {
    coords: Vec<C64>,
}

impl ProjPoint {
    pub fn new(coords: &[C64]) -> Result<Self> {
        let n = coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !n.is_finite() || n <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "projective point needs finite, not-all-zero coordinates: {coords:?}"
            )));
        }
        let m = coords.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let k = coords
            .iter()
            .position(|c| c.norm() >= m * (1.0 - 1e-12))
            .expect("nonzero coordinate");
        let pivot = coords[k];
        // already normalized input is kept bit for bit
        if pivot.im == 0.0 && pivot.re > 0.0 && (n - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(Self { coords: coords.to_vec() });
        }
        let phase = pivot.norm() / pivot;
        let mut coords: Vec<C64> = coords.iter().map(|c| c * phase / n).collect();
        coords[k] = C64::new(pivot.norm() / n, 0.0);
        Ok(Self { coords })
    }

    pub fn from_real(coords: &[f64]) -> Result<Self> {
        Self::new(&coords.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Sine of the angle between the two lines through the origin; zero iff
    /// the points coincide.
    pub fn distance(&self, other: &ProjPoint) -> f64 {
        assert_eq!(self.coords.len(), other.coords.len());
        let inner: C64 = self
            .coords
            .iter()
            .zip(other.coords.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        // norm of the component of `other` orthogonal to `self`; stable for
        // nearby points, unlike sqrt(1 - |<p,q>|^2)
        let d = self
            .coords
            .iter()
            .zip(other.coords.iter())
            .map(|(a, b)| (b - a * inner).norm_sqr())
            .sum::<f64>()
            .sqrt();
        d.min(1.0)
    }

    /// Append a zero coordinate (embed P^2 into the hyperplane `x3 = 0`).
    pub fn lift(&self) -> ProjPoint {
        let mut c = self.coords.clone();
        c.push(C64::new(0.0, 0.0));
        ProjPoint { coords: c }
    }

    /// Affine coordinates in the chart `x_k = 1`, if that coordinate is not
    /// negligible.
    pub fn affine(&self, k: usize) -> Option<Vec<C64>> {
        let d = self.coords[k];
        if d.norm() < 1e-300 {
            return None;
        }
        Some(
            self.coords
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != k)
                .map(|(_, c)| c / d)
                .collect(),
        )
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, " : ")?;
            }
            write!(f, "{:.6}{:+.6}i", c.re, c.im)?;
        }
        write!(f, ")")
    }
}

/// Greedy matching of two equally sized point sets; returns the largest
/// matched distance, or infinity on a size mismatch.
pub fn set_distance(a: &[ProjPoint], b: &[ProjPoint]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    if a.len() <= 7 {
        // exact bottleneck matching by permutation search
        let mut best = f64::INFINITY;
        let mut perm: Vec<usize> = (0..b.len()).collect();
        permute(&mut perm, 0, &mut |p| {
            let worst = a
                .iter()
                .zip(p.iter())
                .map(|(x, &j)| x.distance(&b[j]))
                .fold(0.0, f64::max);
            if worst < best {
                best = worst;
            }
        });
        return best;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, x.distance(y)))
            .min_by(|u, v| u.1.total_cmp(&v.1))
            .expect("sizes match");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_representative() {
        let p = ProjPoint::new(&[C64::new(0.0, 2.0), C64::new(0.0, -1.0), C64::new(0.0, 0.0)]).unwrap();
        assert!((p.coords()[0] - C64::new(2.0 / 5f64.sqrt(), 0.0)).norm() < 1e-15);
        let q = ProjPoint::from_real(&[-4.0, 2.0, 0.0]).unwrap();
        assert!(p.distance(&q) < 1e-15);
        assert!((p.coords()[0] - q.coords()[0]).norm() < 1e-15);
    }

    #[test]
    fn zero_point_rejected() {
        assert!(ProjPoint::from_real(&[0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn set_distance_is_order_free() {
        let a: Vec<ProjPoint> = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 1.0]]
            .iter()
            .map(|c| ProjPoint::from_real(c).unwrap())
            .collect();
        let b = vec![a[2].clone(), a[0].clone(), a[1].clone()];
        assert!(set_distance(&a, &b) < 1e-15);
        assert!(set_distance(&a, &b[..2]).is_infinite());
    }
}
