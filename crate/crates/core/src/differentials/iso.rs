use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{AffineChart, ResidueForm};
use crate::agm_step::StepOutput;
use crate::numkernel::{ToleranceProfile, C64};
use crate::plane::lines::{cross, line_distance};
use crate::plane::{HomogeneousForm, ProjPoint};
use crate::Result;

/// The canonical isomorphism of the two canonical planes, written in the
/// affine frames of the input and output charts.
#[derive(Debug, Clone)]
pub struct CanonicalIso {
    /// Frame coordinates in, frame coordinates out.
    pub matrix: Matrix3<C64>,
    chart_in: AffineChart,
    chart_out: AffineChart,
}

impl CanonicalIso {
    /// The induced map of the shared plane, `A_out^-1 M A_in`.
    pub fn plane_map(&self) -> Matrix3<C64> {
        self.chart_out.inverse() * self.matrix * self.chart_in.frame()
    }

    /// Composition `other ∘ self`.
    pub fn then(&self, other: &CanonicalIso) -> CanonicalIso {
        CanonicalIso {
            matrix: other.matrix * self.matrix,
            chart_in: self.chart_in.clone(),
            chart_out: other.chart_out.clone(),
        }
    }

    pub fn map_point(&self, p: &ProjPoint) -> Result<ProjPoint> {
        let x = nalgebra::Vector3::from_column_slice(p.coords());
        let y = self.plane_map() * x;
        ProjPoint::new(y.as_slice())
    }

    /// Lines map by the inverse transpose.
    pub fn map_line(&self, l: &HomogeneousForm) -> Result<HomogeneousForm> {
        let inv = self
            .plane_map()
            .try_inverse()
            .ok_or_else(|| crate::Error::ChartDegenerate("singular isomorphism".into()))?;
        let c = nalgebra::Vector3::from_column_slice(l.coeffs());
        let out = inv.transpose() * c;
        Ok(HomogeneousForm::linear(out.as_slice()))
    }

    /// Numerator transport: the residue form in the output chart with the
    /// numerator pulled back along the plane map.
    pub fn transport(&self, form: &ResidueForm, target: &crate::quartic_theta::Quartic) -> Result<ResidueForm> {
        let l = self.map_line(&form.numerator)?;
        ResidueForm::new(target, l, self.chart_out.clone())
    }
}

/// Frame change `A_out A_in^-1`; the plane itself is identified with the
/// identity, since input and output live in one coordinate plane.
pub fn canonical_iso(chart_in: &AffineChart, chart_out: &AffineChart) -> CanonicalIso {
    CanonicalIso {
        matrix: chart_out.frame() * chart_in.inverse(),
        chart_in: chart_in.clone(),
        chart_out: chart_out.clone(),
    }
}

/// Projective distance of a matrix from the identity: the matrix is scaled
/// so that its trace is 3 and the remainder is measured in Frobenius norm.
pub fn off_identity(m: &Matrix3<C64>) -> f64 {
    let tr = m.trace();
    if tr.norm() < 1e-300 {
        return f64::INFINITY;
    }
    let scaled = m * (C64::new(3.0, 0.0) / tr);
    (scaled - Matrix3::identity()).norm()
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoReport {
    pub off_identity: f64,
    pub t_displacement: f64,
    pub pencil_lines: usize,
    pub max_pencil_displacement: f64,
}

/// The isomorphism for a step in the given charts, with its action on `t`
/// and on sampled lines through `t`.
pub fn canonical_iso_report(
    step: &StepOutput,
    chart_in: &AffineChart,
    chart_out: &AffineChart,
    lines: usize,
    profile: &ToleranceProfile,
) -> Result<(CanonicalIso, IsoReport)> {
    let iso = canonical_iso(chart_in, chart_out);
    let t_displacement = iso.map_point(&step.t)?.distance(&step.t);
    let mut rng = ChaCha8Rng::seed_from_u64(profile.sub_seed(0x150_0000));
    let mut max_pencil_displacement: f64 = 0.0;
    for _ in 0..lines {
        let w: Vec<C64> = (0..3)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let l = HomogeneousForm::linear(&cross(step.t.coords(), &w));
        let image = iso.map_line(&l)?;
        max_pencil_displacement = max_pencil_displacement.max(line_distance(&l, &image));
    }
    let report = IsoReport {
        off_identity: off_identity(&iso.plane_map()),
        t_displacement,
        pencil_lines: lines,
        max_pencil_displacement,
    };
    Ok((iso, report))
}
