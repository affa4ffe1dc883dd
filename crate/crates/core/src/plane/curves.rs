use super::{HomogeneousForm, ProjPoint};
use crate::numkernel::{ToleranceProfile, C64};
use crate::{Error, Result};

/// The polar `sum t_i dE/dx_i` of a plane curve with respect to `t`.
pub fn polar_conic(e: &HomogeneousForm, t: &ProjPoint) -> Result<HomogeneousForm> {
    if e.nvars() != 3 || e.degree() == 0 {
        return Err(Error::InvalidInput("polar needs a plane curve of positive degree".into()));
    }
    let mut out = HomogeneousForm::zero(3, e.degree() - 1);
    for (k, &tk) in t.coords().iter().enumerate() {
        out = out.add(&e.partial(k).scale(tk));
    }
    if out.max_abs() <= 1e-14 * e.max_abs() {
        return Err(Error::ZeroForm(format!("polar of the curve at {t:?}")));
    }
    Ok(out)
}

/// The residual point of `E` on the line through `p` and `q`.
///
/// On the line, `E(X p + W q) = sum c_k X^k W^(3-k)` has the roots `X = 0`
/// (`q`) and `W = 0` (`p`), so it factors as `X W (c2 X + c1 W)` and the third
/// point is `c1 p - c2 q`.
pub fn third_point(e: &HomogeneousForm, p: &ProjPoint, q: &ProjPoint, profile: &ToleranceProfile) -> Result<ProjPoint> {
    if e.nvars() != 3 || e.degree() != 3 {
        return Err(Error::InvalidInput("third_point needs a plane cubic".into()));
    }
    if p.distance(q) < profile.eps_point {
        return Err(Error::DegenerateLine("third point of a secant needs two distinct points".into()));
    }
    for x in [p, q] {
        if e.residual(x.coords()) > profile.eps_residual {
            return Err(Error::InvalidInput(format!(
                "point {x:?} is not on the cubic (residual {:.3e})",
                e.residual(x.coords())
            )));
        }
    }
    let c = e.restrict(q.coords(), p.coords());
    let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if c[1].norm().max(c[2].norm()) <= 1e-12 * scale.max(e.max_abs()) {
        return Err(Error::NonGeneric("the secant line is a component of the cubic".into()));
    }
    let r: Vec<C64> = (0..3).map(|i| c[1] * p.coords()[i] - c[2] * q.coords()[i]).collect();
    let r = ProjPoint::new(&r)?;
    if r.distance(p) < profile.eps_point || r.distance(q) < profile.eps_point {
        return Err(Error::NonGeneric(
            "the secant is tangent to the cubic at one of its points".into(),
        ));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::lines::{incidence, line_through};
    use crate::plane::{intersect, monomials};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn legendre() -> HomogeneousForm {
        // y^2 z - x^3 + x z^2
        HomogeneousForm::from_real_terms(3, 3, &[(&[0, 2, 1], 1.0), (&[3, 0, 0], -1.0), (&[1, 0, 2], 1.0)]).unwrap()
    }

    fn random_cubic(rng: &mut ChaCha8Rng) -> HomogeneousForm {
        HomogeneousForm::from_coeffs(
            3,
            3,
            (0..monomials(3, 3).len())
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap()
    }

    fn point_on(e: &HomogeneousForm, rng: &mut ChaCha8Rng) -> ProjPoint {
        let l = HomogeneousForm::linear(&[C64::new(rng.random_range(-1.0..1.0), 0.3), C64::new(1.0, 0.0), C64::new(0.2, -0.5)]);
        intersect(e, &l, &ToleranceProfile::default()).unwrap()[0].point.clone()
    }

    #[test]
    fn polar_of_fermat_cubic() {
        let e = HomogeneousForm::from_real_terms(3, 3, &[(&[3, 0, 0], 1.0), (&[0, 3, 0], 1.0), (&[0, 0, 3], 1.0)]).unwrap();
        let t = ProjPoint::from_real(&[1.0, 0.0, 0.0]).unwrap();
        let p = polar_conic(&e, &t).unwrap();
        let want = HomogeneousForm::from_real_terms(3, 2, &[(&[2, 0, 0], 3.0)]).unwrap();
        assert!(p.distance(&want) < 1e-15);
    }

    #[test]
    fn euler_identity_and_linearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let e = random_cubic(&mut rng);
            let t: Vec<C64> = (0..3).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let tp = ProjPoint::new(&t).unwrap();
            let p = polar_conic(&e, &tp).unwrap();
            let lhs = p.eval(tp.coords());
            let rhs = e.eval(tp.coords()) * 3.0;
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn polar_contacts_are_tangent_from_t() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let profile = ToleranceProfile::default();
        for _ in 0..5 {
            let e = random_cubic(&mut rng);
            let t = point_on(&e, &mut rng);
            let p = polar_conic(&e, &t).unwrap();
            for ip in intersect(&e, &p, &profile).unwrap() {
                if ip.point.distance(&t) < 1e-6 {
                    continue;
                }
                let tangent = HomogeneousForm::linear(&e.gradient(ip.point.coords()));
                assert!(incidence(&tangent, &t) < 1e-9);
            }
        }
    }

    #[test]
    fn triple_point_has_zero_polar() {
        let e = HomogeneousForm::from_real_terms(3, 3, &[(&[3, 0, 0], 1.0), (&[0, 3, 0], 1.0)]).unwrap();
        let t = ProjPoint::from_real(&[0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(polar_conic(&e, &t), Err(Error::ZeroForm(_))));
    }

    #[test]
    fn third_point_on_legendre_curve() {
        let p = ProjPoint::from_real(&[0.0, 0.0, 1.0]).unwrap();
        let q = ProjPoint::from_real(&[1.0, 0.0, 1.0]).unwrap();
        let r = third_point(&legendre(), &p, &q, &ToleranceProfile::default()).unwrap();
        assert!(r.distance(&ProjPoint::from_real(&[-1.0, 0.0, 1.0]).unwrap()) < 1e-15);
    }

    #[test]
    fn third_point_of_random_secants() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let profile = ToleranceProfile::default();
        for _ in 0..10 {
            let e = random_cubic(&mut rng);
            let l = HomogeneousForm::linear(&[C64::new(rng.random_range(-1.0..1.0), 0.1), C64::new(1.0, 0.0), C64::new(rng.random_range(-1.0..1.0), 0.0)]);
            let pts = intersect(&e, &l, &profile).unwrap();
            let r = third_point(&e, &pts[0].point, &pts[1].point, &profile).unwrap();
            assert!(e.residual(r.coords()) < 1e-10);
            let line = line_through(&pts[0].point, &pts[1].point, 1e-9).unwrap();
            assert!(incidence(&line, &r) < 1e-12);
            assert!(r.distance(&pts[2].point) < 1e-8);
        }
    }

    #[test]
    fn coincident_points_rejected() {
        let p = ProjPoint::from_real(&[0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            third_point(&legendre(), &p, &p, &ToleranceProfile::default()),
            Err(Error::DegenerateLine(_))
        ));
    }
}
