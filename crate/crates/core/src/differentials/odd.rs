use nalgebra::{DMatrix, Matrix4};
use serde::Serialize;

use crate::configuration::SpaceCurveModel;
use crate::numkernel::C64;
use crate::plane::{HomogeneousForm, ProjPoint};
use crate::{Error, Result};

/// Parity decomposition of the canonical differentials of `Y` under the
/// covering involution `x3 -> -x3`.
#[derive(Debug, Clone, Serialize)]
pub struct OddSpaceReport {
    pub even_dim: usize,
    pub odd_dim: usize,
    /// The plane `H`, as the linear form spanning the even differentials.
    pub even_plane: [f64; 4],
    /// Basis of the odd differentials: planes through the vertex.
    pub odd_basis: [[f64; 4]; 3],
    pub vertex: [f64; 4],
    /// Both defining forms are invariant under the involution.
    pub involution_preserves_model: bool,
}

fn involution() -> Matrix4<C64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0).map(|x| C64::new(x, 0.0)))
}

fn invariant(f: &HomogeneousForm) -> bool {
    let s = involution();
    let a = DMatrix::from_fn(4, 4, |i, j| s[(i, j)]);
    f.substitute(&a).distance(f) < 1e-14
}

/// Differentials of the canonical curve `Y` are its linear forms times a
/// generator on which the involution acts by `-1`, so a linear form of
/// parity `e` gives a differential of parity `-e`.
pub fn odd_space_report(model: &SpaceCurveModel) -> Result<OddSpaceReport> {
    let preserved = invariant(&model.q2) && invariant(&model.q3);
    if !preserved {
        return Err(Error::InvalidInput("model is not invariant under x3 -> -x3".into()));
    }
    let s = involution();
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for k in 0..4 {
        let mut l = [0.0; 4];
        l[k] = 1.0;
        // a coordinate form is an eigenvector; its eigenvalue is s[k][k]
        if s[(k, k)].re < 0.0 {
            even.push(l);
        } else {
            odd.push(l);
        }
    }
    let v = model.vertex();
    for l in &odd {
        let val: C64 = l.iter().zip(v.coords()).map(|(a, b)| b * *a).sum();
        if val.norm() > 1e-14 {
            return Err(Error::InvalidInput("odd plane misses the vertex".into()));
        }
    }
    Ok(OddSpaceReport {
        even_dim: even.len(),
        odd_dim: odd.len(),
        even_plane: even[0],
        odd_basis: [odd[0], odd[1], odd[2]],
        vertex: crate::configuration::CONE_VERTEX,
        involution_preserves_model: preserved,
    })
}

/// `phi_Y(L)`: the plane spanned by a line `L` of `H` and the vertex.
pub fn phi_y(line: &HomogeneousForm) -> Result<HomogeneousForm> {
    if line.nvars() != 3 || line.degree() != 1 {
        return Err(Error::InvalidInput("phi_Y takes a line of the plane H".into()));
    }
    Ok(line.lift(4))
}

/// The trace of a plane of P^3 on `H = {x3 = 0}`.
pub fn trace_on_h(plane: &HomogeneousForm) -> HomogeneousForm {
    let c = plane.coeffs();
    let l: Vec<C64> = (0..4)
        .filter(|&k| plane.monomials()[k][3] == 0)
        .map(|k| c[k])
        .collect();
    HomogeneousForm::linear(&l)
}

pub fn vertex_on(plane: &HomogeneousForm, vertex: &ProjPoint) -> bool {
    plane.residual(vertex.coords()) < 1e-14
}
