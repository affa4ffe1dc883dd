use nalgebra::{DMatrix, DVector};

use super::{HomogeneousForm, ProjPoint};
use crate::numkernel::{resultant_eliminate, roots_univariate, seeded_unitary, ToleranceProfile, UnivariatePoly, C64};
use crate::{Error, Result};

/// A point of `F = G = 0` with its intersection multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionPoint {
    pub point: ProjPoint,
    pub multiplicity: usize,
}

const CHART_ATTEMPTS: u64 = 4;

/// All intersection points of two plane curves with multiplicities.
///
/// Works in a seeded random unitary frame: the resultant eliminating the
/// first coordinate gives the second in the chart `y2 = 1`, the first is
/// recovered as the common root of the specialized forms, and the point is
/// polished on the bivariate system.
pub fn intersect(
    f: &HomogeneousForm,
    g: &HomogeneousForm,
    profile: &ToleranceProfile,
) -> Result<Vec<IntersectionPoint>> {
    if f.nvars() != 3 || g.nvars() != 3 {
        return Err(Error::InvalidInput("intersect expects plane curves".into()));
    }
    if f.degree() == 0 || g.degree() == 0 {
        return Err(Error::InvalidInput("intersect expects curves of positive degree".into()));
    }
    let total = f.degree() * g.degree();
    let mut last_degree = 0;
    for attempt in 0..CHART_ATTEMPTS {
        let u = seeded_unitary(3, profile.sub_seed(0x1a7e_0000 + attempt));
        let fu = f.substitute(&u).normalized();
        let gu = g.substitute(&u).normalized();
        let res = resultant_eliminate(&fu, &gu, 0)?;
        if res.degree() != total {
            last_degree = res.degree();
            continue;
        }
        let mut out = Vec::new();
        for root in roots_univariate(&res, profile)? {
            let y = lift_root(&fu, &gu, root.value, root.multiplicity, profile)?;
            let x: Vec<C64> = (0..3).map(|i| (0..3).map(|j| u[(i, j)] * y[j]).sum()).collect();
            out.push(IntersectionPoint {
                point: ProjPoint::new(&x)?,
                multiplicity: root.multiplicity,
            });
        }
        let found: usize = out.iter().map(|p| p.multiplicity).sum();
        if found != total {
            return Err(Error::CountMismatch {
                what: "intersection points with multiplicity".into(),
                expected: total,
                found,
            });
        }
        out.sort_by(|a, b| point_order(&a.point, &b.point));
        return Ok(out);
    }
    Err(Error::CountMismatch {
        what: "resultant degree".into(),
        expected: total,
        found: last_degree,
    })
}

pub(crate) fn point_order(a: &ProjPoint, b: &ProjPoint) -> std::cmp::Ordering {
    for (x, y) in a.coords().iter().zip(b.coords()) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o.is_ne() {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

fn specialize(f: &HomogeneousForm, y1: C64) -> UnivariatePoly {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    UnivariatePoly::new(f.restrict(&[zero, y1, one], &[one, zero, zero]))
}

fn relative_value(p: &UnivariatePoly, z: C64) -> f64 {
    let s = p.abs_eval(z.norm());
    if s == 0.0 {
        0.0
    } else {
        p.eval(z).norm() / s
    }
}

/// Recover the first coordinate over a root of the resultant and refine.
fn lift_root(
    f: &HomogeneousForm,
    g: &HomogeneousForm,
    y1: C64,
    multiplicity: usize,
    profile: &ToleranceProfile,
) -> Result<[C64; 3]> {
    let (pf, pg) = (specialize(f, y1), specialize(g, y1));
    let (solve, other) = match (pf.degree(), pg.degree()) {
        (0, 0) => return Err(Error::ChartDegenerate("both forms constant over a resultant root".into())),
        (0, _) => (&pg, &pf),
        (_, 0) => (&pf, &pg),
        (a, b) if a <= b => (&pf, &pg),
        _ => (&pg, &pf),
    };
    let y0 = roots_univariate(solve, profile)?
        .into_iter()
        .map(|r| r.value)
        .min_by(|a, b| relative_value(other, *a).total_cmp(&relative_value(other, *b)))
        .expect("positive degree has roots");
    let mut y = [y0, y1, C64::new(1.0, 0.0)];
    if multiplicity == 1 {
        newton(f, g, &mut y, profile.max_newton_iters);
    } else {
        gauss_newton_singular(f, g, &mut y, profile.max_newton_iters);
    }
    Ok(y)
}

fn system_residual(f: &HomogeneousForm, g: &HomogeneousForm, y: &[C64; 3]) -> f64 {
    f.residual(y).max(g.residual(y))
}

fn newton(f: &HomogeneousForm, g: &HomogeneousForm, y: &mut [C64; 3], iters: usize) {
    for _ in 0..iters.min(50) {
        let before = system_residual(f, g, y);
        let (gf, gg) = (f.gradient(y), g.gradient(y));
        let det = gf[0] * gg[1] - gf[1] * gg[0];
        if det.norm() == 0.0 {
            return;
        }
        let (vf, vg) = (f.eval(y), g.eval(y));
        let d0 = (vf * gg[1] - vg * gf[1]) / det;
        let d1 = (gf[0] * vg - gg[0] * vf) / det;
        let trial = [y[0] - d0, y[1] - d1, y[2]];
        if system_residual(f, g, &trial) >= before {
            return;
        }
        *y = trial;
        if d0.norm() + d1.norm() <= 4.0 * f64::EPSILON * (y[0].norm() + y[1].norm() + 1.0) {
            return;
        }
    }
}

/// Refinement at a tangential intersection, where the 2x2 Jacobian is
/// singular: Gauss-Newton on `F = G = det J = 0`.
fn gauss_newton_singular(f: &HomogeneousForm, g: &HomogeneousForm, y: &mut [C64; 3], iters: usize) {
    let eval = |y: &[C64; 3]| -> DVector<C64> {
        let (gf, gg) = (f.gradient(y), g.gradient(y));
        DVector::from_vec(vec![f.eval(y), g.eval(y), gf[0] * gg[1] - gf[1] * gg[0]])
    };
    let size = |y: &[C64; 3]| {
        let v = eval(y);
        system_residual(f, g, y) + v[2].norm() / (f.max_abs() * g.max_abs() * 10.0)
    };
    for _ in 0..iters.min(30) {
        let v = eval(y);
        let h = 1e-6 * (y[0].norm() + y[1].norm() + 1.0);
        let mut jac = DMatrix::<C64>::zeros(3, 2);
        for k in 0..2 {
            let mut yp = *y;
            let mut ym = *y;
            yp[k] += h;
            ym[k] -= h;
            let col = (eval(&yp) - eval(&ym)) / C64::new(2.0 * h, 0.0);
            jac.set_column(k, &col);
        }
        let Some(step) = jac.svd(true, true).solve(&v, 1e-12).ok() else {
            return;
        };
        let trial = [y[0] - step[0], y[1] - step[1], y[2]];
        if size(&trial) >= size(y) {
            return;
        }
        *y = trial;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn circle() -> HomogeneousForm {
        HomogeneousForm::from_real_terms(3, 2, &[(&[2, 0, 0], 1.0), (&[0, 2, 0], 1.0), (&[0, 0, 2], -1.0)]).unwrap()
    }

    pub(crate) fn random_form(rng: &mut ChaCha8Rng, degree: usize) -> HomogeneousForm {
        let len = super::super::monomials(3, degree).len();
        HomogeneousForm::from_coeffs(
            3,
            degree,
            (0..len)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn line_against_circle() {
        let x = HomogeneousForm::linear(&[c(1.0), c(0.0), c(0.0)]);
        let pts = intersect(&x, &circle(), &ToleranceProfile::default()).unwrap();
        assert_eq!(pts.len(), 2);
        let want = [ProjPoint::from_real(&[0.0, 1.0, 1.0]).unwrap(), ProjPoint::from_real(&[0.0, 1.0, -1.0]).unwrap()];
        for w in &want {
            assert!(pts.iter().any(|p| p.point.distance(w) < 1e-12 && p.multiplicity == 1));
        }
    }

    #[test]
    fn tangent_line_has_double_contact() {
        let l = HomogeneousForm::linear(&[c(1.0), c(0.0), c(-1.0)]);
        let pts = intersect(&l, &circle(), &ToleranceProfile::default()).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].multiplicity, 2);
        assert!(pts[0].point.distance(&ProjPoint::from_real(&[1.0, 0.0, 1.0]).unwrap()) < 1e-9);
    }

    #[test]
    fn bezout_totals_and_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let profile = ToleranceProfile::default();
        for (a, b) in [(1, 4), (2, 3), (2, 2), (3, 3)] {
            let f = random_form(&mut rng, a);
            let g = random_form(&mut rng, b);
            let pts = intersect(&f, &g, &profile).unwrap();
            assert_eq!(pts.iter().map(|p| p.multiplicity).sum::<usize>(), a * b);
            for p in &pts {
                assert_eq!(p.multiplicity, 1);
                assert!(f.residual(p.point.coords()) < 1e-9);
                assert!(g.residual(p.point.coords()) < 1e-9);
            }
        }
    }

    #[test]
    fn agrees_with_both_elimination_orders() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let profile = ToleranceProfile::default();
        let f = random_form(&mut rng, 3);
        let g = random_form(&mut rng, 2);
        let pts = intersect(&f, &g, &profile).unwrap();
        assert_eq!(pts.len(), 6);
        for (eliminated, coord) in [(0usize, 1usize), (1, 0)] {
            let res = resultant_eliminate(&f, &g, eliminated).unwrap();
            let roots = roots_univariate(&res, &profile).unwrap();
            for p in &pts {
                let z = p.point.coords()[coord] / p.point.coords()[2];
                let near = roots.iter().map(|r| (r.value - z).norm() / (1.0 + z.norm())).fold(f64::INFINITY, f64::min);
                assert!(near < 1e-8, "coordinate {coord} off by {near}");
            }
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let f = random_form(&mut rng, 3);
        let g = random_form(&mut rng, 3);
        let profile = ToleranceProfile::default();
        assert_eq!(intersect(&f, &g, &profile).unwrap(), intersect(&f, &g, &profile).unwrap());
    }

    #[test]
    fn common_component_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let l = random_form(&mut rng, 1);
        let f = l.mul(&random_form(&mut rng, 1));
        let g = l.mul(&random_form(&mut rng, 2));
        assert!(matches!(intersect(&f, &g, &ToleranceProfile::default()), Err(Error::CommonComponent)));
    }
}
