//! Simultaneous root finding (Aberth–Ehrlich) with Newton polishing and
//! multiplicity detection by inclusion-disc clustering.

use std::f64::consts::TAU;

use super::{Precision, ToleranceProfile, UnivariatePoly, C64};
use crate::{Error, Result};

/// A root together with the number of computed roots merged into it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: C64,
    pub multiplicity: usize,
}

const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// All roots of `p` with multiplicities.
///
/// Roots closer than `eps_point` (relative) or whose inclusion discs overlap
/// are reported once, at their centroid, with the summed multiplicity.
pub fn roots_univariate(p: &UnivariatePoly, profile: &ToleranceProfile) -> Result<Vec<Root>> {
    if p.is_zero() || p.degree() == 0 {
        return Err(Error::InvalidInput(
            "root finding needs a polynomial of degree >= 1".into(),
        ));
    }
    let zeros = p
        .coeffs()
        .iter()
        .take_while(|c| **c == C64::new(0.0, 0.0))
        .count();
    let scale = p.max_abs();
    let reduced = UnivariatePoly::new(p.coeffs()[zeros..].iter().map(|c| c / scale).collect());

    let mut out = Vec::new();
    if zeros > 0 {
        out.push(Root {
            value: C64::new(0.0, 0.0),
            multiplicity: zeros,
        });
    }
    if reduced.degree() > 0 {
        let solver = Solver::new(&reduced);
        let mut z = solver.initial_guesses();
        solver.aberth(&mut z, profile.iteration_budget())?;
        out.extend(solver.cluster_and_polish(z, profile));
    }
    out.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    Ok(out)
}

struct Solver<'a> {
    p: &'a UnivariatePoly,
    rev: UnivariatePoly,
    n: usize,
}

struct Eval {
    /// Newton correction `p / p'`.
    ratio: C64,
    /// `|p(z)|` and the rounding-error scale `sum |a_k| |z|^k`, both divided
    /// by `|z|^n` when evaluated through the reversed polynomial.
    value: f64,
    bound: f64,
}

impl<'a> Solver<'a> {
    fn new(p: &'a UnivariatePoly) -> Self {
        let rev = UnivariatePoly::new(p.coeffs().iter().rev().copied().collect());
        Self {
            p,
            rev,
            n: p.degree(),
        }
    }

    fn eval(&self, z: C64) -> Eval {
        if z.norm() <= 1.0 {
            let (v, d) = self.p.eval_with_derivative(z);
            Eval {
                ratio: v / d,
                value: v.norm(),
                bound: self.p.abs_eval(z.norm()),
            }
        } else {
            // p(z) = z^n q(1/z), p'(z) = z^(n-1) (n q - w q')
            let w = z.inv();
            let (q, dq) = self.rev.eval_with_derivative(w);
            Eval {
                ratio: z * q / (q * self.n as f64 - w * dq),
                value: q.norm(),
                bound: self.rev.abs_eval(w.norm()),
            }
        }
    }

    /// Starting points on circles read off the Newton polygon of `|a_k|`.
    fn initial_guesses(&self) -> Vec<C64> {
        let pts: Vec<(f64, f64)> = self
            .p
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(k, c)| (k as f64, c.norm().ln()))
            .collect();
        // upper convex hull, monotone chain
        let mut hull: Vec<(f64, f64)> = Vec::new();
        for &pt in &pts {
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
                if cross >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        let n = self.n as f64;
        let mut z = Vec::with_capacity(self.n);
        for (seg, w) in hull.windows(2).enumerate() {
            let count = (w[1].0 - w[0].0) as usize;
            let radius = ((w[0].1 - w[1].1) / (w[1].0 - w[0].0)).exp();
            for j in 0..count {
                let theta = TAU * j as f64 / count as f64 + TAU * seg as f64 / n + 0.4;
                z.push(C64::from_polar(radius, theta));
            }
        }
        z
    }

    fn aberth(&self, z: &mut [C64], budget: usize) -> Result<()> {
        let n = self.n;
        let mu = 2.0 * n as f64 * UNIT_ROUNDOFF;
        let mut done = vec![false; n];
        for _ in 0..budget {
            for i in 0..n {
                if done[i] {
                    continue;
                }
                let e = self.eval(z[i]);
                if e.value <= mu * e.bound || !e.ratio.is_finite() {
                    done[i] = true;
                    continue;
                }
                let mut s = C64::new(0.0, 0.0);
                for j in (0..n).filter(|&j| j != i) {
                    let d = z[i] - z[j];
                    if d.norm() > 0.0 {
                        s += d.inv();
                    }
                }
                let w = e.ratio / (C64::new(1.0, 0.0) - e.ratio * s);
                z[i] -= w;
                if w.norm() <= 2.0 * UNIT_ROUNDOFF * z[i].norm() {
                    done[i] = true;
                }
            }
            if done.iter().all(|&d| d) {
                return Ok(());
            }
        }
        Err(Error::NonConvergence {
            degree: n,
            iterations: budget,
        })
    }

    /// Radius of a disc around `z[i]` guaranteed to hold a root, inflated to
    /// the coefficient rounding level.
    fn inclusion_radius(&self, z: &[C64], i: usize) -> f64 {
        let mu = 2.0 * self.n as f64 * UNIT_ROUNDOFF;
        let zi = z[i];
        let (val, bnd, log_scale) = if zi.norm() <= 1.0 {
            (
                self.p.eval(zi).norm(),
                self.p.abs_eval(zi.norm()),
                0.0,
            )
        } else {
            let w = zi.inv();
            (
                self.rev.eval(w).norm(),
                self.rev.abs_eval(w.norm()),
                self.n as f64 * zi.norm().ln(),
            )
        };
        let num = (self.n as f64 * val.max(mu * bnd)).ln() + log_scale;
        let mut den = self.p.leading().norm().ln();
        for (j, &zj) in z.iter().enumerate() {
            if j != i {
                let d = (zi - zj).norm();
                if d == 0.0 {
                    return f64::INFINITY;
                }
                den += d.ln();
            }
        }
        (num - den).exp()
    }

    fn cluster_and_polish(&self, z: Vec<C64>, profile: &ToleranceProfile) -> Vec<Root> {
        let n = z.len();
        let radii: Vec<f64> = (0..n).map(|i| self.inclusion_radius(&z, i)).collect();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while parent[r] != r {
                r = parent[r];
            }
            let mut c = i;
            while parent[c] != r {
                let next = parent[c];
                parent[c] = r;
                c = next;
            }
            r
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (z[i] - z[j]).norm();
                let near = profile.eps_point * 1f64.max(z[i].norm()).max(z[j].norm());
                if d <= radii[i] + radii[j] || d <= near {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut index_of = vec![usize::MAX; n];
        for i in 0..n {
            let r = find(&mut parent, i);
            if index_of[r] == usize::MAX {
                index_of[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[index_of[r]].push(i);
        }
        groups
            .into_iter()
            .map(|g| {
                if g.len() == 1 {
                    Root {
                        value: self.polish(z[g[0]], profile),
                        multiplicity: 1,
                    }
                } else {
                    let sum: C64 = g.iter().map(|&i| z[i]).sum();
                    let centroid = sum / g.len() as f64;
                    let spread = g.iter().map(|&i| (z[i] - centroid).norm()).fold(0.0, f64::max);
                    Root {
                        value: self.polish_multiple(centroid, g.len(), spread),
                        multiplicity: g.len(),
                    }
                }
            })
            .collect()
    }

    /// Newton on `p^(m-1)`, which has a simple root at an `m`-fold root of
    /// `p`; the iterate is kept inside the cluster it came from.
    fn polish_multiple(&self, mut z: C64, m: usize, spread: f64) -> C64 {
        let mut d = self.p.clone();
        for _ in 1..m {
            d = d.derivative();
        }
        let dd = d.derivative();
        let start = z;
        let mut best = d.eval(z).norm();
        for _ in 0..8 {
            let slope = dd.eval(z);
            if best == 0.0 || slope.norm() == 0.0 {
                break;
            }
            let cand = z - d.eval(z) / slope;
            let r = d.eval(cand).norm();
            if r < best && (cand - start).norm() <= 2.0 * spread + f64::EPSILON * start.norm() {
                z = cand;
                best = r;
            } else {
                break;
            }
        }
        z
    }

    /// A few Newton steps, each kept only if it lowers the residual.
    fn polish(&self, mut z: C64, profile: &ToleranceProfile) -> C64 {
        let compensated = profile.precision == Precision::Extended;
        let value = |z: C64| {
            if compensated {
                self.p.eval_compensated(z)
            } else {
                self.p.eval(z)
            }
        };
        let mut best = value(z).norm();
        let steps = if compensated { 8 } else { 3 };
        for _ in 0..steps {
            if best == 0.0 {
                break;
            }
            let d = self.p.derivative().eval(z);
            if d.norm() == 0.0 {
                break;
            }
            let cand = z - value(z) / d;
            let r = value(cand).norm();
            if r < best {
                z = cand;
                best = r;
            } else {
                break;
            }
        }
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn profile() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    fn sorted_match(found: &[Root], expect: &[C64]) -> f64 {
        let mut used = vec![false; expect.len()];
        let mut worst: f64 = 0.0;
        for r in found {
            for _ in 0..r.multiplicity {
                let (k, d) = expect
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| !used[*k])
                    .map(|(k, e)| (k, (r.value - e).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                used[k] = true;
                worst = worst.max(d);
            }
        }
        worst
    }

    #[test]
    fn z_squared_plus_one() {
        let p = UnivariatePoly::from_real(&[1.0, 0.0, 1.0]);
        let r = roots_univariate(&p, &profile()).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|r| r.multiplicity == 1));
        assert!((r[0].value - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1].value - C64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn double_root_is_clustered() {
        let p = UnivariatePoly::from_real(&[1.0, -2.0, 1.0]);
        let r = roots_univariate(&p, &profile()).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 2);
        assert!((r[0].value - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn triple_root_and_simple_root() {
        let one = C64::new(1.0, 0.5);
        let p = UnivariatePoly::from_roots(
            C64::new(1.0, 0.0),
            &[one, one, one, C64::new(-2.0, 0.0)],
        );
        let r = roots_univariate(&p, &profile()).unwrap();
        assert_eq!(r.len(), 2);
        let triple = r.iter().find(|r| r.multiplicity == 3).unwrap();
        assert!((triple.value - one).norm() < 1e-9);
    }

    #[test]
    fn zero_roots_are_exact() {
        let p = UnivariatePoly::from_real(&[0.0, 0.0, -1.0, 1.0]);
        let r = roots_univariate(&p, &profile()).unwrap();
        assert_eq!(r[0].value, C64::new(0.0, 0.0));
        assert_eq!(r[0].multiplicity, 2);
        assert!((r[1].value - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn constant_is_rejected() {
        assert!(roots_univariate(&UnivariatePoly::from_real(&[3.0]), &profile()).is_err());
    }

    #[test]
    fn five_known_linear_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let roots: Vec<C64> = (0..5)
            .map(|_| C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
            .collect();
        let p = UnivariatePoly::from_roots(C64::new(0.7, -0.3), &roots);
        let found = roots_univariate(&p, &profile()).unwrap();
        assert_eq!(found.iter().map(|r| r.multiplicity).sum::<usize>(), 5);
        assert!(sorted_match(&found, &roots) < 1e-10);
    }

    #[test]
    fn widely_spread_magnitudes() {
        let roots = [1e-4, 1e-2, 1.0, 1e2, 1e4].map(|r| C64::new(r, 0.0));
        let p = UnivariatePoly::from_roots(C64::new(1.0, 0.0), &roots);
        let found = roots_univariate(&p, &profile()).unwrap();
        assert_eq!(found.len(), 5);
        for (f, e) in found.iter().zip(roots.iter()) {
            assert!((f.value - e).norm() <= 1e-10 * e.norm().max(1.0));
        }
    }

    #[test]
    fn expansion_reproduces_random_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..100 {
            let deg = 2 + trial % 11;
            let coeffs: Vec<C64> = (0..=deg)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let p = UnivariatePoly::new(coeffs);
            let found = roots_univariate(&p, &profile()).unwrap();
            let expanded: Vec<C64> = found
                .iter()
                .flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity))
                .collect();
            let q = UnivariatePoly::from_roots(p.leading(), &expanded);
            assert!(
                p.relative_distance(&q) < 1e-8,
                "trial {trial}: {}",
                p.relative_distance(&q)
            );
        }
    }

    #[test]
    fn extended_precision_agrees() {
        let roots: Vec<C64> = (1..=12).map(|k| C64::new(k as f64 / 4.0, 0.0)).collect();
        let p = UnivariatePoly::from_roots(C64::new(1.0, 0.0), &roots);
        let ext = roots_univariate(&p, &profile().escalated()).unwrap();
        assert_eq!(ext.len(), 12);
        assert!(sorted_match(&ext, &roots) < 1e-6);
    }
}
