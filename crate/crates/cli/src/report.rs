//! The run report: provenance, per-stage certificates and residuals, and a
//! verdict with one entry per check.

use std::collections::BTreeMap;

use agm3::configuration::NamedCertificate;
use agm3::numkernel::{Precision, RankCertificate, ToleranceProfile};
use agm3::plane::{HomogeneousForm, ProjPoint};
use serde::Serialize;
use serde_json::Value;

use crate::input::{form_spec, point_spec, FormSpec, Scalar};

#[derive(Debug, Clone, Serialize)]
pub struct InputInfo {
    pub command: String,
    pub config: Option<String>,
    pub sha256: Option<String>,
    pub seed: u64,
    pub precision: Precision,
    pub eps_point: f64,
    pub eps_rank: f64,
    pub eps_residual: f64,
    pub flag: Option<String>,
    /// Set when the run was repeated at extended precision after a numeric failure.
    pub escalated: bool,
}

impl InputInfo {
    pub fn new(command: &str, config: Option<String>, sha256: Option<String>, profile: &ToleranceProfile, flag: Option<String>) -> Self {
        Self {
            command: command.to_string(),
            config,
            sha256,
            seed: profile.seed,
            precision: profile.precision,
            eps_point: profile.eps_point,
            eps_rank: profile.eps_rank,
            eps_residual: profile.eps_residual,
            flag,
            escalated: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateOut {
    pub name: String,
    pub claimed_rank: usize,
    pub singular_values: Vec<f64>,
    pub gap_ratio: f64,
}

impl CertificateOut {
    pub fn new(name: &str, c: &RankCertificate) -> Self {
        Self {
            name: name.to_string(),
            claimed_rank: c.claimed_rank,
            singular_values: c.singular_values.clone(),
            gap_ratio: c.gap_ratio,
        }
    }
}

impl From<&NamedCertificate> for CertificateOut {
    fn from(c: &NamedCertificate) -> Self {
        Self::new(&c.name, &c.certificate)
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Stage {
    pub name: String,
    pub certificates: Vec<CertificateOut>,
    pub residuals: BTreeMap<String, f64>,
    pub points: BTreeMap<String, Vec<[Scalar; 3]>>,
    pub forms: BTreeMap<String, FormSpec>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
}

impl Stage {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            ..Self::default()
        }
    }

    pub fn cert(mut self, c: impl Into<CertificateOut>) -> Self {
        self.certificates.push(c.into());
        self
    }

    pub fn residual(mut self, name: &str, v: f64) -> Self {
        self.residuals.insert(name.to_string(), v);
        self
    }

    pub fn points<'a>(mut self, name: &str, pts: impl IntoIterator<Item = &'a ProjPoint>) -> Self {
        self.points.insert(name.to_string(), pts.into_iter().map(point_spec).collect());
        self
    }

    pub fn form(mut self, name: &str, f: &HomogeneousForm) -> Self {
        self.forms.insert(name.to_string(), form_spec(&f.normalized()));
        self
    }

    pub fn data(mut self, v: Value) -> Self {
        self.data = v;
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    CheckFailed,
    NonGeneric,
    NumericFailure,
    InvalidInput,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::NonGeneric => 2,
            Status::CheckFailed | Status::NumericFailure => 3,
            Status::InvalidInput => 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorOut {
    pub stages: Vec<String>,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub checks: Vec<Check>,
    pub error: Option<ErrorOut>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub input: InputInfo,
    pub stages: Vec<Stage>,
    pub verdict: Verdict,
    /// Wall-clock milliseconds per stage; the only nondeterministic field.
    pub timings_ms: BTreeMap<String, f64>,
}

/// Accumulates stages, checks and timings while a command runs.
#[derive(Debug, Default)]
pub struct Recorder {
    pub stages: Vec<Stage>,
    pub checks: Vec<Check>,
    pub timings_ms: BTreeMap<String, f64>,
}

impl Recorder {
    pub fn stage(&mut self, s: Stage) {
        self.stages.push(s);
    }

    /// Record `value < threshold` (or `>` when `above` is set).
    pub fn check(&mut self, name: &str, value: f64, threshold: f64, above: bool, detail: impl Into<String>) -> bool {
        let pass = if above { value > threshold } else { value < threshold };
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            value,
            threshold,
            detail: detail.into(),
        });
        pass
    }

    pub fn check_eq(&mut self, name: &str, value: usize, expected: usize) -> bool {
        let pass = value == expected;
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            value: value as f64,
            threshold: expected as f64,
            detail: format!("expected exactly {expected}"),
        });
        pass
    }

    /// Record that timing `key` stayed under `limit_s` seconds. The value is
    /// 1 or 0 so that the verdict stays deterministic; the measured time is
    /// in `timings_ms`.
    pub fn check_runtime(&mut self, name: &str, key: &str, limit_s: f64) -> bool {
        let pass = self.timings_ms.get(key).is_some_and(|ms| ms / 1e3 < limit_s);
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            value: pass as u8 as f64,
            threshold: limit_s,
            detail: format!("timings_ms.{key} below {limit_s} s"),
        });
        pass
    }

    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = std::time::Instant::now();
        let out = f();
        self.timings_ms.insert(name.to_string(), start.elapsed().as_secs_f64() * 1e3);
        out
    }
}
