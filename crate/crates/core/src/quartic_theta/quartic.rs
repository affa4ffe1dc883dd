use crate::numkernel::C64;
use crate::plane::{HomogeneousForm, ProjPoint};
use crate::{Error, Result};

/// A plane quartic, assumed smooth.
#[derive(Debug, Clone, PartialEq)]
pub struct Quartic {
    form: HomogeneousForm,
}

impl Quartic {
    pub fn new(form: HomogeneousForm) -> Result<Self> {
        if form.nvars() != 3 || form.degree() != 4 {
            return Err(Error::InvalidInput(format!(
                "a quartic is a degree-4 form in 3 variables, got degree {} in {}",
                form.degree(),
                form.nvars()
            )));
        }
        if form.is_zero() || form.coeffs().iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("quartic coefficients must be finite and not all zero".into()));
        }
        Ok(Self { form })
    }

    pub fn form(&self) -> &HomogeneousForm {
        &self.form
    }

    pub fn eval(&self, p: &[C64]) -> C64 {
        self.form.eval(p)
    }

    /// Spot check of smoothness at computed special points.
    pub fn check_smooth_at(&self, points: &[ProjPoint], tol: f64) -> Result<()> {
        for p in points {
            if self.form.is_singular_at(p.coords(), tol) {
                return Err(Error::NonGeneric(format!("quartic is singular at {p:?}")));
            }
        }
        Ok(())
    }
}
