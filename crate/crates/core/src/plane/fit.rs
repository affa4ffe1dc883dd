use nalgebra::DMatrix;

use super::lines::incidence;
use super::{gradient_rows, monomial_row, monomials, HomogeneousForm, ProjPoint};
use crate::numkernel::{nullspace, RankCertificate, ToleranceProfile, C64};
use crate::{Error, Result};

/// Require the curve to be tangent to `line` at `point`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangencyConstraint {
    point: ProjPoint,
    line: HomogeneousForm,
}

impl TangencyConstraint {
    pub fn new(point: ProjPoint, line: HomogeneousForm, eps_point: f64) -> Result<Self> {
        if line.nvars() != 3 || line.degree() != 1 {
            return Err(Error::InvalidInput("tangent line must be a linear form in 3 variables".into()));
        }
        if incidence(&line, &point) > eps_point {
            return Err(Error::InvalidInput(format!(
                "point {point:?} is not on the required tangent line"
            )));
        }
        Ok(Self { point, line })
    }

    pub fn point(&self) -> &ProjPoint {
        &self.point
    }

    pub fn line(&self) -> &HomogeneousForm {
        &self.line
    }

    /// Two rows `n_k grad_j - n_j grad_k` (`j != k`), `k` the largest
    /// component of the line normal `n`.
    fn rows(&self, degree: usize) -> Vec<Vec<C64>> {
        let n = self.line.coeffs();
        let k = (0..3)
            .max_by(|&a, &b| n[a].norm().total_cmp(&n[b].norm()))
            .expect("three components");
        let grads = gradient_rows(degree, self.point.coords());
        (0..3)
            .filter(|&j| j != k)
            .map(|j| {
                grads[j]
                    .iter()
                    .zip(grads[k].iter())
                    .map(|(gj, gk)| n[k] * gj - n[j] * gk)
                    .collect()
            })
            .collect()
    }
}

/// Result of an interpolation: the form and the rank certificate of its
/// constraint matrix.
#[derive(Debug, Clone)]
pub struct Fit {
    pub form: HomogeneousForm,
    pub certificate: RankCertificate,
}

/// Stacked, row-normalized linear conditions for a plane curve of degree `d`.
pub fn constraint_matrix(degree: usize, points: &[ProjPoint], tangencies: &[TangencyConstraint]) -> DMatrix<C64> {
    let mut rows: Vec<Vec<C64>> = points.iter().map(|p| monomial_row(degree, p.coords())).collect();
    for t in tangencies {
        rows.extend(t.rows(degree));
    }
    let cols = monomials(3, degree).len();
    let mut m = DMatrix::<C64>::zeros(rows.len(), cols);
    for (i, row) in rows.iter().enumerate() {
        let n = row.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let n = if n > 0.0 { n } else { 1.0 };
        for (j, c) in row.iter().enumerate() {
            m[(i, j)] = c / n;
        }
    }
    m
}

/// The unique curve of degree `d` through the points and with the given
/// tangencies.
///
/// Fails with [`Error::AmbiguousRank`] unless the conditions cut out exactly
/// one curve.
pub fn fit_form_constrained(
    degree: usize,
    points: &[ProjPoint],
    tangencies: &[TangencyConstraint],
    profile: &ToleranceProfile,
) -> Result<Fit> {
    if !(1..=4).contains(&degree) {
        return Err(Error::InvalidInput(format!("cannot fit curves of degree {degree}")));
    }
    if points.iter().any(|p| p.coords().len() != 3) {
        return Err(Error::InvalidInput("fit points must lie in P^2".into()));
    }
    let m = constraint_matrix(degree, points, tangencies);
    let context = format!(
        "degree-{degree} fit ({} points, {} tangencies)",
        points.len(),
        tangencies.len()
    );
    let ns = nullspace(&m, profile).map_err(|e| match e {
        Error::AmbiguousRank { certificate, .. } => Error::AmbiguousRank {
            context: context.clone(),
            certificate,
        },
        other => other,
    })?;
    if ns.basis.len() != 1 {
        return Err(Error::AmbiguousRank {
            context: format!("{context}: nullspace dimension {}", ns.basis.len()),
            certificate: ns.certificate,
        });
    }
    let form = HomogeneousForm::from_coeffs(3, degree, ns.basis[0].iter().copied().collect())?.normalized();
    Ok(Fit {
        form,
        certificate: ns.certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::seeded_unitary;
    use crate::plane::{intersect, line_through};
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn circle() -> HomogeneousForm {
        HomogeneousForm::from_real_terms(3, 2, &[(&[2, 0, 0], 1.0), (&[0, 2, 0], 1.0), (&[0, 0, 2], -1.0)]).unwrap()
    }

    fn random_cubic(rng: &mut ChaCha8Rng) -> HomogeneousForm {
        HomogeneousForm::from_coeffs(
            3,
            3,
            (0..10)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap()
    }

    fn sample_points(f: &HomogeneousForm, n: usize, rng: &mut ChaCha8Rng) -> Vec<ProjPoint> {
        let mut out = Vec::new();
        while out.len() < n {
            let l = HomogeneousForm::linear(&[
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                C64::new(1.0, 0.0),
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            ]);
            out.push(intersect(f, &l, &ToleranceProfile::default()).unwrap()[0].point.clone());
        }
        out
    }

    #[test]
    fn unit_circle_through_five_points() {
        let pts: Vec<ProjPoint> = [[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [-1.0, 0.0, 1.0], [0.0, -1.0, 1.0], [3.0, 4.0, 5.0]]
            .iter()
            .map(|c| ProjPoint::from_real(c).unwrap())
            .collect();
        let fit = fit_form_constrained(2, &pts, &[], &ToleranceProfile::default()).unwrap();
        assert!(fit.form.distance(&circle()) < 1e-14);
        assert_eq!(fit.certificate.claimed_rank, 5);
    }

    #[test]
    fn cubic_through_nine_sampled_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..5 {
            let e = random_cubic(&mut rng);
            let pts = sample_points(&e, 9, &mut rng);
            let fit = fit_form_constrained(3, &pts, &[], &ToleranceProfile::default()).unwrap();
            assert!(fit.form.distance(&e.normalized()) < 1e-8);
        }
    }

    #[test]
    fn tangency_pins_the_tangent_line() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let e = random_cubic(&mut rng);
        let pts = sample_points(&e, 9, &mut rng);
        let tangent = HomogeneousForm::linear(&e.gradient(pts[0].coords())).normalized();
        let tc = TangencyConstraint::new(pts[0].clone(), tangent, 1e-9).unwrap();
        let fit = fit_form_constrained(3, &pts[1..8], &[tc], &ToleranceProfile::default()).unwrap();
        assert!(fit.form.distance(&e.normalized()) < 1e-8);
    }

    #[test]
    fn underdetermined_fit_is_ambiguous() {
        let pts: Vec<ProjPoint> = [[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [-1.0, 0.0, 1.0], [0.0, -1.0, 1.0]]
            .iter()
            .map(|c| ProjPoint::from_real(c).unwrap())
            .collect();
        assert!(matches!(
            fit_form_constrained(2, &pts, &[], &ToleranceProfile::default()),
            Err(Error::AmbiguousRank { .. })
        ));
    }

    #[test]
    fn off_line_tangency_rejected() {
        let p = ProjPoint::from_real(&[1.0, 0.0, 1.0]).unwrap();
        let q = ProjPoint::from_real(&[0.0, 1.0, 1.0]).unwrap();
        let r = ProjPoint::from_real(&[0.0, 0.0, 1.0]).unwrap();
        let l = line_through(&q, &r, 1e-9).unwrap();
        assert!(TangencyConstraint::new(p, l, 1e-9).is_err());
    }

    #[test]
    fn fit_is_projectively_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        let e = random_cubic(&mut rng);
        let pts = sample_points(&e, 8, &mut rng);
        let tangent = HomogeneousForm::linear(&e.gradient(pts[0].coords()));
        let tc = TangencyConstraint::new(pts[0].clone(), tangent.clone(), 1e-9).unwrap();
        let profile = ToleranceProfile::default();
        let base = fit_form_constrained(3, &pts[1..], &[tc], &profile).unwrap().form;

        let a = seeded_unitary(3, 5) * C64::new(1.3, 0.0)
            + nalgebra::DMatrix::from_fn(3, 3, |i, j| C64::new(0.1 * (i as f64 - j as f64), 0.05 * (i + j) as f64));
        let a_inv = a.clone().try_inverse().unwrap();
        let map = |p: &ProjPoint| {
            let v = &a * DVector::from_column_slice(p.coords());
            ProjPoint::new(v.as_slice()).unwrap()
        };
        let moved: Vec<ProjPoint> = pts.iter().map(map).collect();
        let l = a_inv.transpose() * DVector::from_column_slice(tangent.coeffs());
        let tc2 = TangencyConstraint::new(moved[0].clone(), HomogeneousForm::linear(l.as_slice()), 1e-9).unwrap();
        let transformed = fit_form_constrained(3, &moved[1..], &[tc2], &profile).unwrap().form;
        assert!(transformed.distance(&base.substitute(&a_inv)) < 1e-7);
    }
}
