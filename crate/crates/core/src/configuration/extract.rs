use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{build_pencil, pencil_fiber};
use crate::numkernel::{with_escalation, RankCertificate, ToleranceProfile, C64};
use crate::plane::{fit_form_constrained, intersect, line_through, meet, set_distance, HomogeneousForm, ProjPoint};
use crate::quartic_theta::{BitangentRecord, Quartic, TwoTorsionClass};
use crate::{Error, Result};

/// A rank certificate labelled with the system it belongs to.
#[derive(Debug, Clone, Serialize)]
pub struct NamedCertificate {
    pub name: String,
    pub certificate: RankCertificate,
}

impl NamedCertificate {
    pub fn new(name: &str, certificate: RankCertificate) -> Self {
        Self {
            name: name.to_string(),
            certificate,
        }
    }
}

/// A cubic `E`, a conic `Q` and the six points of `Q ∩ E`.
#[derive(Debug, Clone)]
pub struct PlaneConfiguration {
    pub e: HomogeneousForm,
    pub q_conic: HomogeneousForm,
    pub q: Vec<ProjPoint>,
    pub certificates: Vec<NamedCertificate>,
}

impl PlaneConfiguration {
    /// Checks shape, incidence of the `q_i` on both curves, distinctness and
    /// smoothness of `E` at the `q_i`.
    pub fn new(e: HomogeneousForm, q_conic: HomogeneousForm, q: Vec<ProjPoint>, profile: &ToleranceProfile) -> Result<Self> {
        if e.nvars() != 3 || e.degree() != 3 || q_conic.nvars() != 3 || q_conic.degree() != 2 {
            return Err(Error::InvalidInput("configuration needs a plane cubic and a plane conic".into()));
        }
        if q.len() != 6 || q.iter().any(|p| p.coords().len() != 3) {
            return Err(Error::InvalidInput("configuration needs six points of P^2".into()));
        }
        let tol = profile.eps_residual.sqrt() * 1e-2;
        for (i, p) in q.iter().enumerate() {
            let r = e.residual(p.coords()).max(q_conic.residual(p.coords()));
            if r > tol {
                return Err(Error::InvalidInput(format!(
                    "marked point {} is off E or Q (residual {r:.3e})",
                    i + 1
                )));
            }
            if e.is_singular_at(p.coords(), 1e-8) {
                return Err(Error::NonGeneric(format!("E is singular at marked point {}", i + 1)));
            }
            if q[i + 1..].iter().any(|x| x.distance(p) < profile.eps_point.sqrt()) {
                return Err(Error::NonGeneric(format!("marked point {} collides with another", i + 1)));
            }
        }
        Ok(Self {
            e: e.normalized(),
            q_conic: q_conic.normalized(),
            q,
            certificates: Vec::new(),
        })
    }

    /// Marked point by 1-based label.
    pub fn point(&self, label: usize) -> &ProjPoint {
        &self.q[label - 1]
    }

    /// Distance between `Q ∩ E` and the marked points as sets.
    pub fn intersection_mismatch(&self, profile: &ToleranceProfile) -> Result<f64> {
        let pts = intersect(&self.q_conic, &self.e, profile)?;
        if pts.iter().any(|p| p.multiplicity != 1) {
            return Ok(f64::INFINITY);
        }
        let pts: Vec<ProjPoint> = pts.into_iter().map(|p| p.point).collect();
        Ok(set_distance(&pts, &self.q))
    }
}

/// Diagnostics of [`extract_configuration`].
#[derive(Debug, Clone, Serialize)]
pub struct ExtractionReport {
    pub fit_fibers: usize,
    pub fit_points: usize,
    pub held_out_points: usize,
    pub held_out_max_residual: f64,
    pub q_on_e_max_residual: f64,
    pub q_on_conic_max_residual: f64,
    pub intersection_mismatch: f64,
    pub resampled_fibers: usize,
}

pub const FIT_FIBERS: usize = 5;
pub const HELD_OUT_FIBERS: usize = 5;
const MAX_FIBER_DRAWS: usize = 40;

/// The three diagonal points of the complete quadrangle on a fiber.
pub fn cross_points(fiber: &[ProjPoint; 4], profile: &ToleranceProfile) -> Result<[ProjPoint; 3]> {
    let l = |a: usize, b: usize| line_through(&fiber[a], &fiber[b], profile.eps_point);
    Ok([
        meet(&l(0, 1)?, &l(2, 3)?, profile.eps_point)?,
        meet(&l(0, 2)?, &l(1, 3)?, profile.eps_point)?,
        meet(&l(0, 3)?, &l(1, 2)?, profile.eps_point)?,
    ])
}

/// `q_i` as the meeting points of the six pairs of the class, in pair order.
pub fn marked_points(bt: &[BitangentRecord], class: &TwoTorsionClass, profile: &ToleranceProfile) -> Result<Vec<ProjPoint>> {
    class
        .pairs()
        .iter()
        .map(|&(a, b)| meet(&bt[a].line, &bt[b].line, profile.eps_point))
        .collect()
}

/// Extract `(E, Q, q_1..q_6)` from a quartic and a two-torsion class.
pub fn extract_configuration(
    c: &Quartic,
    bt: &[BitangentRecord],
    class: &TwoTorsionClass,
    profile: &ToleranceProfile,
) -> Result<(PlaneConfiguration, ExtractionReport)> {
    let q = marked_points(bt, class, profile)?;
    for (i, p) in q.iter().enumerate() {
        if q[i + 1..].iter().any(|x| x.distance(p) < profile.eps_point.sqrt()) {
            return Err(Error::NonGeneric("two marked points coincide".into()));
        }
    }
    let q_fit = with_escalation(profile, |p| fit_form_constrained(2, &q, &[], p)).map_err(non_generic_on_rank)?;

    let pencil = build_pencil(bt, class, profile)?;
    let mut rng = ChaCha8Rng::seed_from_u64(profile.sub_seed(0xf1be_0000));
    let mut fibers: Vec<[ProjPoint; 3]> = Vec::new();
    let mut resampled = 0;
    for _ in 0..MAX_FIBER_DRAWS {
        if fibers.len() == FIT_FIBERS + HELD_OUT_FIBERS {
            break;
        }
        let lambda = [
            C64::new(1.0, 0.0),
            C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
        ];
        match pencil_fiber(c, &pencil, lambda, profile).and_then(|f| cross_points(&f, profile)) {
            Ok(cp) => fibers.push(cp),
            Err(e) if e.is_non_generic() || matches!(e, Error::InvalidInput(_)) => resampled += 1,
            Err(e) => return Err(e),
        }
    }
    if fibers.len() < FIT_FIBERS + HELD_OUT_FIBERS {
        return Err(Error::NonGeneric("too many special fibers in the pencil".into()));
    }
    let mut fit_points: Vec<ProjPoint> = fibers[..FIT_FIBERS].iter().flatten().cloned().collect();
    fit_points.extend(q.iter().cloned());
    let e_fit = with_escalation(profile, |p| fit_form_constrained(3, &fit_points, &[], p)).map_err(non_generic_on_rank)?;
    let e = e_fit.form;

    let held_out_max_residual = fibers[FIT_FIBERS..]
        .iter()
        .flatten()
        .map(|p| e.residual(p.coords()))
        .fold(0.0, f64::max);
    let q_on_e_max_residual = q.iter().map(|p| e.residual(p.coords())).fold(0.0, f64::max);
    let q_on_conic_max_residual = q.iter().map(|p| q_fit.form.residual(p.coords())).fold(0.0, f64::max);
    if held_out_max_residual > 1e-7 {
        return Err(Error::NonGeneric(format!(
            "held-out cross points are off the fitted cubic (residual {held_out_max_residual:.3e})"
        )));
    }
    let mut config = PlaneConfiguration::new(e, q_fit.form, q, profile)?;
    config.certificates = vec![
        NamedCertificate::new("Q through q1..q6", q_fit.certificate),
        NamedCertificate::new("E through cross points and q1..q6", e_fit.certificate),
    ];
    let intersection_mismatch = config.intersection_mismatch(profile)?;
    let report = ExtractionReport {
        fit_fibers: FIT_FIBERS,
        fit_points: fit_points.len(),
        held_out_points: 3 * HELD_OUT_FIBERS,
        held_out_max_residual,
        q_on_e_max_residual,
        q_on_conic_max_residual,
        intersection_mismatch,
        resampled_fibers: resampled,
    };
    Ok((config, report))
}

pub(crate) fn non_generic_on_rank(e: Error) -> Error {
    match e {
        Error::AmbiguousRank { context, certificate } => Error::NonGeneric(format!(
            "{context}: rank certificate failed (claimed rank {}, gap {:.3e})",
            certificate.claimed_rank, certificate.gap_ratio
        )),
        other => other,
    }
}
