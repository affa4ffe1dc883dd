//! The input document: quartic or configuration coefficients as exact decimal
//! strings keyed by exponent triples, the class `alpha`, a flag, tolerance
//! overrides and a seed.

use std::collections::BTreeMap;

use agm3::configuration::PlaneConfiguration;
use agm3::numkernel::{Precision, ToleranceProfile, C64};
use agm3::plane::{HomogeneousForm, ProjPoint};
use agm3::quartic_theta::{BitangentRecord, FlagSpec, Quartic};
use serde::{Deserialize, Serialize};

use crate::UsageError;

/// A real decimal string or a `[re, im]` pair of decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(String),
    Complex([String; 2]),
}

/// Monomial coefficients keyed by `"a,b,c"`.
pub type FormSpec = BTreeMap<String, Scalar>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    /// Two bitangent indices, 0-based, in solver order.
    Indices { indices: [usize; 2] },
    /// Two line coefficient triples matched against the computed bitangents.
    Lines { lines: Box<[[Scalar; 3]; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSpec {
    #[serde(rename = "E")]
    pub e: FormSpec,
    #[serde(rename = "Q")]
    pub q_conic: FormSpec,
    pub q: Vec<[Scalar; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_point: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_rank: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_residual: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quartic: Option<FormSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub configuration: Option<ConfigSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<TolSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<Precision>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        serde_json::from_str(text).map_err(|e| UsageError(format!("config: {e}")))
    }

    pub fn profile(&self) -> ToleranceProfile {
        let mut p = ToleranceProfile::default();
        if let Some(t) = &self.tolerances {
            p.eps_point = t.eps_point.unwrap_or(p.eps_point);
            p.eps_rank = t.eps_rank.unwrap_or(p.eps_rank);
            p.eps_residual = t.eps_residual.unwrap_or(p.eps_residual);
        }
        if let Some(s) = self.seed {
            p.seed = s;
        }
        if let Some(pr) = self.precision {
            p.precision = pr;
        }
        p
    }

    pub fn quartic(&self) -> Result<Quartic, UsageError> {
        let spec = self.quartic.as_ref().ok_or_else(|| UsageError("config has no `quartic`".into()))?;
        let f = parse_form(spec, 4).map_err(|e| UsageError(format!("quartic: {}", e.0)))?;
        Quartic::new(f).map_err(|e| UsageError(format!("quartic: {e}")))
    }

    /// Flag from the document: top level first, then the configuration's.
    pub fn flag(&self) -> Option<&str> {
        self.flag
            .as_deref()
            .or_else(|| self.configuration.as_ref().and_then(|c| c.flag.as_deref()))
    }
}

pub fn parse_scalar(s: &Scalar) -> Result<C64, UsageError> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| UsageError(format!("`{t}` is not a finite decimal number")))
    };
    match s {
        Scalar::Real(r) => Ok(C64::new(num(r)?, 0.0)),
        Scalar::Complex([r, i]) => Ok(C64::new(num(r)?, num(i)?)),
    }
}

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn scalar_of(c: C64) -> Scalar {
    Scalar::Complex([format_f64(c.re), format_f64(c.im)])
}

fn parse_exponents(key: &str) -> Result<Vec<u8>, UsageError> {
    key.split(',')
        .map(|p| p.trim().parse::<u8>().map_err(|_| UsageError(format!("bad exponent key `{key}`"))))
        .collect()
}

pub fn parse_form(spec: &FormSpec, degree: usize) -> Result<HomogeneousForm, UsageError> {
    let mut terms = Vec::with_capacity(spec.len());
    for (k, v) in spec {
        let e = parse_exponents(k)?;
        if e.len() != 3 || e.iter().map(|&x| x as usize).sum::<usize>() != degree {
            return Err(UsageError(format!("exponent key `{k}` is not a degree-{degree} monomial in 3 variables")));
        }
        terms.push((e, parse_scalar(v)?));
    }
    HomogeneousForm::from_terms(3, degree, terms).map_err(|e| UsageError(e.to_string()))
}

pub fn form_spec(f: &HomogeneousForm) -> FormSpec {
    f.terms()
        .map(|(e, c)| {
            let key = e[..f.nvars()].iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            (key, scalar_of(c))
        })
        .collect()
}

pub fn parse_point(p: &[Scalar; 3]) -> Result<ProjPoint, UsageError> {
    let c = p.iter().map(parse_scalar).collect::<Result<Vec<_>, _>>()?;
    ProjPoint::new(&c).map_err(|e| UsageError(e.to_string()))
}

pub fn point_spec(p: &ProjPoint) -> [Scalar; 3] {
    let c = p.coords();
    [scalar_of(c[0]), scalar_of(c[1]), scalar_of(c[2])]
}

/// Parse a configuration; domain validation errors are returned as-is so
/// the caller can classify them.
pub fn parse_configuration(spec: &ConfigSpec, profile: &ToleranceProfile) -> Result<agm3::Result<PlaneConfiguration>, UsageError> {
    let e = parse_form(&spec.e, 3)?;
    let q_conic = parse_form(&spec.q_conic, 2)?;
    if spec.q.len() != 6 {
        return Err(UsageError(format!("configuration needs 6 points, got {}", spec.q.len())));
    }
    let q = spec.q.iter().map(parse_point).collect::<Result<Vec<_>, _>>()?;
    Ok(PlaneConfiguration::new(e, q_conic, q, profile))
}

pub fn configuration_spec(c: &PlaneConfiguration, flag: Option<&FlagSpec>) -> ConfigSpec {
    ConfigSpec {
        e: form_spec(&c.e),
        q_conic: form_spec(&c.q_conic),
        q: c.q.iter().map(point_spec).collect(),
        flag: flag.map(|f| f.to_string()),
    }
}

pub fn parse_flag(text: &str) -> Result<FlagSpec, UsageError> {
    text.parse().map_err(|e: agm3::Error| UsageError(format!("flag: {e}")))
}

/// Resolve `alpha` to a pair of bitangent indices.
pub fn resolve_alpha(spec: &AlphaSpec, bt: &[BitangentRecord], profile: &ToleranceProfile) -> Result<(usize, usize), UsageError> {
    match spec {
        AlphaSpec::Indices { indices: [a, b] } => {
            if *a >= bt.len() || *b >= bt.len() || a == b {
                return Err(UsageError(format!("alpha indices must be two distinct values below {}", bt.len())));
            }
            Ok((*a.min(b), *a.max(b)))
        }
        AlphaSpec::Lines { lines } => {
            let mut idx = [0usize; 2];
            for (k, l) in lines.iter().enumerate() {
                let c = l.iter().map(parse_scalar).collect::<Result<Vec<_>, _>>()?;
                let line = HomogeneousForm::linear(&c);
                let hit = bt
                    .iter()
                    .position(|b| agm3::plane::coeff_distance(b.line.coeffs(), line.coeffs()) < profile.eps_point.sqrt())
                    .ok_or_else(|| UsageError(format!("alpha line {} matches no bitangent", k + 1)))?;
                idx[k] = hit;
            }
            if idx[0] == idx[1] {
                return Err(UsageError("alpha lines name the same bitangent".into()));
            }
            Ok((idx[0].min(idx[1]), idx[0].max(idx[1])))
        }
    }
}
