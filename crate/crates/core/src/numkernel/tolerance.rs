use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Double,
    /// Double precision storage with compensated (double-double) evaluation of
    /// residuals during root polishing and null-vector refinement.
    Extended,
}

impl std::str::FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            other => Err(Error::InvalidInput(format!("unknown precision `{other}`"))),
        }
    }
}

/// Tolerances and sampling seed shared by every numeric operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    /// Relative geometric tolerance for point coincidence.
    pub eps_point: f64,
    /// Singular-value gap threshold for rank decisions.
    pub eps_rank: f64,
    /// Largest acceptable normalized constraint residual.
    pub eps_residual: f64,
    pub max_newton_iters: usize,
    pub seed: u64,
    pub precision: Precision,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self {
            eps_point: 1e-9,
            eps_rank: 1e-8,
            eps_residual: 1e-8,
            max_newton_iters: 200,
            seed: 0x5eed_a9e3,
            precision: Precision::Double,
        }
    }
}

impl ToleranceProfile {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps_point", self.eps_point),
            ("eps_rank", self.eps_rank),
            ("eps_residual", self.eps_residual),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} must lie in (0, 1), got {v}"
                )));
            }
        }
        if self.max_newton_iters == 0 {
            return Err(Error::InvalidInput("max_newton_iters must be positive".into()));
        }
        Ok(())
    }

    pub fn escalated(&self) -> Self {
        Self {
            precision: Precision::Extended,
            ..self.clone()
        }
    }

    /// Iteration budget for iterative solvers at the current precision.
    pub(crate) fn iteration_budget(&self) -> usize {
        match self.precision {
            Precision::Double => self.max_newton_iters,
            Precision::Extended => self.max_newton_iters * 4,
        }
    }

    /// Derive an independent seed for a named sub-computation.
    pub(crate) fn sub_seed(&self, salt: u64) -> u64 {
        // splitmix64 step
        let mut z = self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}
