use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{DdComplex, Precision, ToleranceProfile, C64};
use crate::{Error, Result};

/// Singular spectrum of a constraint matrix together with the rank decision
/// taken from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankCertificate {
    /// Descending; one value per column.
    pub singular_values: Vec<f64>,
    pub claimed_rank: usize,
    /// `sigma[r] / sigma[r-1]` for claimed rank `r`; 0 when the matrix has
    /// full column rank or is zero.
    pub gap_ratio: f64,
}

impl RankCertificate {
    /// Claimed rank from the spectrum: values below `eps_rank * sigma_max` are
    /// treated as zero.
    pub fn from_spectrum(singular_values: Vec<f64>, eps_rank: f64) -> Self {
        let top = singular_values.first().copied().unwrap_or(0.0);
        let claimed_rank = if top == 0.0 {
            0
        } else {
            singular_values.iter().filter(|&&s| s > eps_rank * top).count()
        };
        let gap_ratio = if claimed_rank == 0 || claimed_rank == singular_values.len() {
            0.0
        } else {
            singular_values[claimed_rank] / singular_values[claimed_rank - 1]
        };
        Self {
            singular_values,
            claimed_rank,
            gap_ratio,
        }
    }

    pub fn nullity(&self) -> usize {
        self.singular_values.len() - self.claimed_rank
    }

    pub fn accepted(&self, eps_rank: f64) -> bool {
        self.gap_ratio < eps_rank
    }
}

#[derive(Debug, Clone)]
pub struct NullspaceResult {
    /// Orthonormal basis of the numerical nullspace.
    pub basis: Vec<DVector<C64>>,
    pub certificate: RankCertificate,
}

fn padded(m: &DMatrix<C64>) -> DMatrix<C64> {
    if m.nrows() >= m.ncols() {
        m.clone()
    } else {
        let mut p = DMatrix::zeros(m.ncols(), m.ncols());
        p.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
        p
    }
}

/// Singular values, descending, one per column.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let mut s: Vec<f64> = padded(m).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Rank-revealing nullspace by SVD.
///
/// Fails with [`Error::AmbiguousRank`] when the spectrum shows no gap below
/// `eps_rank`.
pub fn nullspace(m: &DMatrix<C64>, profile: &ToleranceProfile) -> Result<NullspaceResult> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::InvalidInput("nullspace of an empty matrix".into()));
    }
    let svd = padded(m).svd(true, true);
    let v_t = svd.v_t.as_ref().expect("requested V^H");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let certificate = RankCertificate::from_spectrum(sigma, profile.eps_rank);
    if !certificate.accepted(profile.eps_rank) {
        return Err(Error::AmbiguousRank {
            context: format!("{}x{} system", m.nrows(), m.ncols()),
            certificate,
        });
    }
    let mut basis: Vec<DVector<C64>> = order[certificate.claimed_rank..]
        .iter()
        .map(|&k| v_t.row(k).transpose().map(|c| c.conj()))
        .collect();
    if profile.precision == Precision::Extended && basis.len() == 1 {
        let u = svd.u.as_ref().expect("requested U");
        let range: Vec<(usize, f64)> = order[..certificate.claimed_rank]
            .iter()
            .map(|&k| (k, svd.singular_values[k]))
            .collect();
        basis[0] = refine(m, &padded(m), u, v_t, &range, basis[0].clone());
    }
    Ok(NullspaceResult { basis, certificate })
}

/// One step of residual correction with a compensated residual `M v`.
fn refine(
    m: &DMatrix<C64>,
    pm: &DMatrix<C64>,
    u: &DMatrix<C64>,
    v_t: &DMatrix<C64>,
    range: &[(usize, f64)],
    v: DVector<C64>,
) -> DVector<C64> {
    let mut r = DVector::<C64>::zeros(pm.nrows());
    for i in 0..m.nrows() {
        let mut acc = DdComplex::ZERO;
        for j in 0..m.ncols() {
            acc = acc + DdComplex::from(m[(i, j)]) * DdComplex::from(v[j]);
        }
        r[i] = acc.to_c64();
    }
    let mut delta = DVector::<C64>::zeros(v.len());
    for &(k, s) in range {
        let coef = u.column(k).dotc(&r) / s;
        delta -= v_t.row(k).transpose().map(|c| c.conj()) * coef;
    }
    let w = v + delta;
    let n = w.norm();
    w / C64::new(n, 0.0)
}
