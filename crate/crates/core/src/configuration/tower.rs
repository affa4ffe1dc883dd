use std::collections::BTreeMap;

use serde::Serialize;

use super::PlaneConfiguration;
use crate::numkernel::ToleranceProfile;
use crate::plane::lines::{incidence, line_distance};
use crate::plane::{line_through, HomogeneousForm, ProjPoint};
use crate::quartic_theta::FlagSpec;
use crate::{Error, Result};

/// Local type of a point of P^1 (a line through `t`) in the tower of double
/// covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum TowerType {
    /// The line through the distinguished pair.
    #[serde(rename = "⊂⊂/=")]
    SplitSplitUnramified,
    /// A tangent line from `t`.
    #[serde(rename = "⊂⊂/⊂")]
    SplitSplitRamified,
    /// The line through one of the other four marked points.
    #[serde(rename = "⊂=/=")]
    SplitRamifiedUnramified,
}

impl TowerType {
    pub fn label(&self) -> &'static str {
        match self {
            TowerType::SplitSplitUnramified => "⊂⊂/=",
            TowerType::SplitSplitRamified => "⊂⊂/⊂",
            TowerType::SplitRamifiedUnramified => "⊂=/=",
        }
    }
}

/// A line of the pencil through `t` with its type and the point that
/// determines it.
#[derive(Debug, Clone)]
pub struct PencilLine {
    pub name: String,
    pub kind: TowerType,
    pub line: HomogeneousForm,
    pub through: ProjPoint,
}

#[derive(Debug, Clone)]
pub struct RamificationReport {
    pub lines: Vec<PencilLine>,
    pub type_counts: BTreeMap<&'static str, usize>,
    pub distinct: bool,
    /// Smallest distance between two of the lines, as points of the dual
    /// plane.
    pub min_separation: f64,
}

impl RamificationReport {
    pub fn counts(&self) -> (usize, usize, usize) {
        let get = |t: TowerType| self.type_counts.get(t.label()).copied().unwrap_or(0);
        (
            get(TowerType::SplitSplitUnramified),
            get(TowerType::SplitSplitRamified),
            get(TowerType::SplitRamifiedUnramified),
        )
    }

    pub fn lines_of(&self, kind: TowerType) -> Vec<&HomogeneousForm> {
        self.lines.iter().filter(|l| l.kind == kind).map(|l| &l.line).collect()
    }
}

/// Line through `t` and `p`; the tangent of `E` at `t` when `p = t`.
fn line_from_t(e: &HomogeneousForm, t: &ProjPoint, p: &ProjPoint, profile: &ToleranceProfile) -> Result<HomogeneousForm> {
    if t.distance(p) < 1e-6 {
        let g = e.gradient(t.coords());
        if g.iter().all(|x| x.norm() == 0.0) {
            return Err(Error::NonGeneric("E is singular at t".into()));
        }
        return Ok(HomogeneousForm::linear(&g).normalized());
    }
    line_through(t, p, profile.eps_point)
}

/// Classify the nine special lines through `t` and check they are distinct.
pub fn verify_tower_pattern(
    config: &PlaneConfiguration,
    flag: &FlagSpec,
    t: &ProjPoint,
    ram: &[ProjPoint; 4],
    profile: &ToleranceProfile,
) -> Result<RamificationReport> {
    let (a, b) = flag.pair();
    let (qa, qb) = (config.point(a), config.point(b));
    let base = line_through(qa, qb, profile.eps_point)?;
    if incidence(&base, t) > 1e-8 {
        return Err(Error::InvalidInput("t is not on the line through the distinguished pair".into()));
    }
    let mut lines = vec![PencilLine {
        name: format!("q{a}q{b}"),
        kind: TowerType::SplitSplitUnramified,
        line: base,
        through: qa.clone(),
    }];
    for (k, r) in ram.iter().enumerate() {
        lines.push(PencilLine {
            name: format!("ram{}", k + 1),
            kind: TowerType::SplitSplitRamified,
            line: line_from_t(&config.e, t, r, profile)?,
            through: r.clone(),
        });
    }
    for pair in flag.partition() {
        for j in [pair.0, pair.1] {
            let qj = config.point(j);
            if qj.distance(t) < profile.eps_point.sqrt() {
                return Err(Error::NonGeneric(format!("t coincides with q{j}")));
            }
            lines.push(PencilLine {
                name: format!("q{j}"),
                kind: TowerType::SplitRamifiedUnramified,
                line: line_through(t, qj, profile.eps_point)?,
                through: qj.clone(),
            });
        }
    }
    let mut type_counts = BTreeMap::new();
    for l in &lines {
        *type_counts.entry(l.kind.label()).or_insert(0) += 1;
    }
    let tol = profile.eps_point.sqrt();
    let mut min_separation = f64::INFINITY;
    let mut collisions = Vec::new();
    for (i, x) in lines.iter().enumerate() {
        for y in &lines[i + 1..] {
            let d = line_distance(&x.line, &y.line);
            min_separation = min_separation.min(d);
            if d < tol {
                collisions.push(format!("{} ({}) = {} ({})", x.name, x.kind.label(), y.name, y.kind.label()));
            }
        }
    }
    if !collisions.is_empty() {
        return Err(Error::NonGeneric(format!(
            "non-generic tower: coinciding pencil lines {}",
            collisions.join(", ")
        )));
    }
    Ok(RamificationReport {
        lines,
        type_counts,
        distinct: true,
        min_separation,
    })
}
