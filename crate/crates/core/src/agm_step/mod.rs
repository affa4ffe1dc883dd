//! One AGM step on a plane configuration and the round-trip check.

mod roundtrip;
mod step;

pub use roundtrip::{roundtrip_check, NegativeControl, RoundtripReport, RoundtripResidual};
pub use step::{
    agm_step, dual_partition_candidates, fit_e_prime, fit_q_prime, projection_center, ramification_points, QPrimeFit,
    Ramification, StepOutput, StepResiduals,
};
