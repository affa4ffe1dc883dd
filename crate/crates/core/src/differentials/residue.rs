use super::AffineChart;
use crate::numkernel::C64;
use crate::plane::{HomogeneousForm, ProjPoint};
use crate::quartic_theta::Quartic;
use crate::{Error, Result};

/// The differential `l dz1 / (dk_C/dz2)` on `C`, kept symbolic.
#[derive(Debug, Clone)]
pub struct ResidueForm {
    pub numerator: HomogeneousForm,
    pub chart: AffineChart,
    curve: HomogeneousForm,
}

impl ResidueForm {
    pub fn new(c: &Quartic, numerator: HomogeneousForm, chart: AffineChart) -> Result<Self> {
        if numerator.nvars() != 3 || numerator.degree() != 1 {
            return Err(Error::InvalidInput("residue numerator must be a linear form".into()));
        }
        let curve = c.form().normalized();
        if denominator(&curve, &chart).is_zero() {
            return Err(Error::ChartDegenerate("dk_C/dz2 vanishes identically".into()));
        }
        Ok(Self { numerator, chart, curve })
    }

    /// `dk_C/dz2` at a point normalized to `V_inf = 1`.
    fn dk_dz2(&self, x: &[C64; 3]) -> C64 {
        let g = self.curve.gradient(x);
        let d = self.chart.direction(2);
        (0..3).map(|j| g[j] * d[j]).sum()
    }

    /// Coefficient of `dz1` at `p`: `l(p) / (dk_C/dz2)(p)` in the chart.
    /// `None` on the line at infinity or where `dk_C/dz2` vanishes.
    pub fn value(&self, p: &ProjPoint) -> Option<C64> {
        let x = self.chart.normalize(p)?;
        let den = self.dk_dz2(&x);
        if den.norm() < 1e-12 {
            return None;
        }
        Some(self.numerator.eval(&x) / den)
    }

    /// The differential applied to the tangent vector of the path `x + s v`
    /// at `s = 0`; independent of the chart up to a constant factor.
    pub fn pair(&self, x: &[C64], v: &[C64]) -> Option<C64> {
        let a = self.chart.frame();
        let lin = |k: usize, y: &[C64]| -> C64 { (0..3).map(|j| a[(k, j)] * y[j]).sum() };
        let (vx, vv) = (lin(0, x), lin(0, v));
        if vx.norm() < 1e-12 {
            return None;
        }
        let dz1 = (lin(1, v) * vx - lin(1, x) * vv) / (vx * vx);
        let xn = [x[0] / vx, x[1] / vx, x[2] / vx];
        let den = self.dk_dz2(&xn);
        if den.norm() < 1e-12 {
            return None;
        }
        Some(self.numerator.eval(&xn) * dz1 / den)
    }
}

fn denominator(curve: &HomogeneousForm, chart: &AffineChart) -> HomogeneousForm {
    let d = chart.direction(2);
    let mut out = HomogeneousForm::zero(3, curve.degree() - 1);
    for (k, &dk) in d.iter().enumerate() {
        out = out.add(&curve.partial(k).scale(dk));
    }
    out
}

/// The residue forms of the three coordinate linear forms.
pub fn residue_basis(c: &Quartic, chart: &AffineChart) -> Result<[ResidueForm; 3]> {
    let mut out = Vec::with_capacity(3);
    for k in 0..3 {
        let mut l = [C64::new(0.0, 0.0); 3];
        l[k] = C64::new(1.0, 0.0);
        out.push(ResidueForm::new(c, HomogeneousForm::linear(&l), chart.clone())?);
    }
    Ok(out.try_into().expect("three forms"))
}

/// Rank of the numerators of a family of residue forms.
pub fn numerator_rank(forms: &[ResidueForm], tol: f64) -> usize {
    let m = nalgebra::DMatrix::from_fn(forms.len(), 3, |i, j| forms[i].numerator.coeffs()[j]);
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > tol * top).count()
}
