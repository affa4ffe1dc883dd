use serde::Serialize;

use super::step::{agm_step, StepOutput};
use crate::configuration::PlaneConfiguration;
use crate::numkernel::ToleranceProfile;
use crate::plane::set_distance;
use crate::quartic_theta::FlagSpec;
use crate::Result;

/// Distances of a second step's output from the original configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RoundtripResidual {
    pub flag: String,
    pub e_distance: f64,
    pub q_conic_distance: f64,
    pub point_distance: f64,
    pub t_distance: f64,
}

impl RoundtripResidual {
    pub fn max(&self) -> f64 {
        self.e_distance.max(self.q_conic_distance).max(self.point_distance)
    }
}

/// Result of the negative control: the step with a wrong distinguished pair.
#[derive(Debug, Clone, Serialize)]
pub struct NegativeControl {
    pub flag: String,
    /// `None` when the wrong step itself failed.
    pub residual: Option<f64>,
    pub error: Option<String>,
}

impl NegativeControl {
    pub fn rejected(&self, threshold: f64) -> bool {
        self.residual.is_none_or(|r| r > threshold)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundtripReport {
    pub candidates: Vec<RoundtripResidual>,
    /// Index of the candidate with the smallest residual; the first on ties.
    pub best: usize,
    /// Candidates whose residual is within `1e-9` of the best.
    pub tied: Vec<usize>,
    pub negative_control: NegativeControl,
}

impl RoundtripReport {
    pub fn best(&self) -> &RoundtripResidual {
        &self.candidates[self.best]
    }
}

pub fn compare(original: &PlaneConfiguration, t: &crate::plane::ProjPoint, back: &StepOutput, flag: &FlagSpec) -> RoundtripResidual {
    RoundtripResidual {
        flag: flag.to_string(),
        e_distance: original.e.distance(&back.e_prime),
        q_conic_distance: original.q_conic.distance(&back.q_prime),
        point_distance: set_distance(&original.q, &back.q_points),
        t_distance: t.distance(&back.t),
    }
}

/// Apply the step twice, the second time with each dual flag candidate, and
/// compare with the input. Also runs the step on the output with the
/// distinguished pair `{ram1, ram2}`, which must not return to the input.
pub fn roundtrip_check(config: &PlaneConfiguration, flag: &FlagSpec, profile: &ToleranceProfile) -> Result<(StepOutput, RoundtripReport)> {
    let first = agm_step(config, flag, profile)?;
    let output = first.configuration();
    let mut candidates = Vec::new();
    for cand in &first.partition_candidates {
        let back = agm_step(&output, cand, profile).map_err(|e| e.in_stage("second_step"))?;
        candidates.push(compare(config, &first.t, &back, cand));
    }
    let best = (0..candidates.len())
        .min_by(|&i, &j| candidates[i].max().total_cmp(&candidates[j].max()))
        .expect("three candidates");
    let tied = (0..candidates.len())
        .filter(|&i| candidates[i].max() - candidates[best].max() <= 1e-9)
        .collect();

    let wrong = FlagSpec::new((3, 4), [(1, 2), (5, 6)]).expect("valid");
    let negative_control = match agm_step(&output, &wrong, profile) {
        Ok(back) => NegativeControl {
            flag: wrong.to_string(),
            residual: Some(compare(config, &first.t, &back, &wrong).max()),
            error: None,
        },
        Err(e) => NegativeControl {
            flag: wrong.to_string(),
            residual: None,
            error: Some(e.to_string()),
        },
    };
    Ok((
        first,
        RoundtripReport {
            candidates,
            best,
            tied,
            negative_control,
        },
    ))
}
