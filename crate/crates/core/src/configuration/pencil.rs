use nalgebra::DVector;

use crate::numkernel::{nullspace, ToleranceProfile, C64};
use crate::plane::{constraint_matrix, intersect, HomogeneousForm, ProjPoint};
use crate::quartic_theta::{BitangentRecord, Quartic, TwoTorsionClass};
use crate::{Error, Result};

/// Conics through the four contact points of the representative bitangent
/// pair of a class. Their moving intersections with `C` form `|K + alpha|`.
#[derive(Debug, Clone)]
pub struct PencilOfConics {
    basis: [HomogeneousForm; 2],
    base_points: [ProjPoint; 4],
    /// Coordinates of `l1 * l2` in the basis.
    degenerate: [C64; 2],
    degenerate_residual: f64,
}

impl PencilOfConics {
    pub fn basis(&self) -> &[HomogeneousForm; 2] {
        &self.basis
    }

    pub fn base_points(&self) -> &[ProjPoint; 4] {
        &self.base_points
    }

    pub fn degenerate_member(&self) -> [C64; 2] {
        self.degenerate
    }

    /// Relative distance of `l1 * l2` from the span of the basis.
    pub fn degenerate_residual(&self) -> f64 {
        self.degenerate_residual
    }

    pub fn member(&self, lambda: [C64; 2]) -> HomogeneousForm {
        self.basis[0].scale(lambda[0]).add(&self.basis[1].scale(lambda[1]))
    }
}

fn collinear(a: &ProjPoint, b: &ProjPoint, c: &ProjPoint) -> f64 {
    let (a, b, c) = (a.coords(), b.coords(), c.coords());
    (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])).norm()
}

pub fn build_pencil(bt: &[BitangentRecord], class: &TwoTorsionClass, profile: &ToleranceProfile) -> Result<PencilOfConics> {
    let (i, j) = class.representative();
    let base: Vec<ProjPoint> = bt[i].contacts.iter().chain(bt[j].contacts.iter()).cloned().collect();
    for a in 0..4 {
        for b in a + 1..4 {
            for c in b + 1..4 {
                if collinear(&base[a], &base[b], &base[c]) < profile.eps_point.sqrt() {
                    return Err(Error::NonGeneric("three base points of the pencil are collinear".into()));
                }
            }
        }
    }
    let ns = nullspace(&constraint_matrix(2, &base, &[]), profile).map_err(|e| match e {
        Error::AmbiguousRank { certificate, .. } => {
            Error::NonGeneric(format!("pencil base points are special (gap {:.3e})", certificate.gap_ratio))
        }
        other => other,
    })?;
    if ns.basis.len() != 2 {
        return Err(Error::NonGeneric(format!(
            "conics through the base points form a space of dimension {}",
            ns.basis.len()
        )));
    }
    let basis: [HomogeneousForm; 2] = std::array::from_fn(|k| {
        HomogeneousForm::from_coeffs(3, 2, ns.basis[k].iter().copied().collect()).expect("six coefficients")
    });
    let product = bt[i].line.mul(&bt[j].line);
    let v = DVector::from_column_slice(product.coeffs());
    let coords = [ns.basis[0].dotc(&v), ns.basis[1].dotc(&v)];
    let rest = &v - &ns.basis[0] * coords[0] - &ns.basis[1] * coords[1];
    let degenerate_residual = rest.norm() / v.norm();
    if degenerate_residual > profile.eps_residual {
        return Err(Error::NonGeneric(format!(
            "product of the bitangents is not in the pencil (residual {degenerate_residual:.3e})"
        )));
    }
    Ok(PencilOfConics {
        basis,
        base_points: base.try_into().expect("four points"),
        degenerate: coords,
        degenerate_residual,
    })
}

/// The four moving points of a member of the pencil on `C`.
pub fn pencil_fiber(c: &Quartic, pencil: &PencilOfConics, lambda: [C64; 2], profile: &ToleranceProfile) -> Result<[ProjPoint; 4]> {
    let d = pencil.degenerate;
    let cross = (lambda[0] * d[1] - lambda[1] * d[0]).norm()
        / ((lambda[0].norm_sqr() + lambda[1].norm_sqr()).sqrt() * (d[0].norm_sqr() + d[1].norm_sqr()).sqrt());
    if cross < 1e-6 {
        return Err(Error::InvalidInput("the degenerate member of the pencil has no moving fiber".into()));
    }
    let conic = pencil.member(lambda);
    let mut pts = intersect(&conic, c.form(), profile)?;
    for b in &pencil.base_points {
        let (k, dist) = pts
            .iter()
            .enumerate()
            .map(|(k, p)| (k, p.point.distance(b)))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("eight points");
        if dist > 1e-6 {
            return Err(Error::NonGeneric("a base point is missing from the fiber".into()));
        }
        if pts[k].multiplicity > 1 {
            pts[k].multiplicity -= 1;
        } else {
            pts.remove(k);
        }
    }
    if pts.len() != 4 || pts.iter().any(|p| p.multiplicity != 1) {
        return Err(Error::NonGeneric("branch fiber: moving points collide".into()));
    }
    for p in &pts {
        if pencil.base_points.iter().any(|b| b.distance(&p.point) < 1e-6) {
            return Err(Error::NonGeneric("moving point meets a base point".into()));
        }
    }
    Ok(std::array::from_fn(|k| pts[k].point.clone()))
}
