use super::{HomogeneousForm, ProjPoint};
use crate::numkernel::C64;
use crate::{Error, Result};

pub fn cross(a: &[C64], b: &[C64]) -> [C64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// The line through two points of P^2.
pub fn line_through(p: &ProjPoint, q: &ProjPoint, eps_point: f64) -> Result<HomogeneousForm> {
    if p.distance(q) < eps_point {
        return Err(Error::DegenerateLine(format!("points {p:?} and {q:?} coincide")));
    }
    Ok(HomogeneousForm::linear(&cross(p.coords(), q.coords())).normalized())
}

/// Intersection point of two lines.
pub fn meet(l: &HomogeneousForm, m: &HomogeneousForm, eps_point: f64) -> Result<ProjPoint> {
    let (a, b) = (line_point(l), line_point(m));
    if a.distance(&b) < eps_point {
        return Err(Error::DegenerateLine("lines coincide".into()));
    }
    ProjPoint::new(&cross(a.coords(), b.coords()))
}

/// A line regarded as a point of the dual plane, for comparing lines.
pub fn line_point(l: &HomogeneousForm) -> ProjPoint {
    assert_eq!(l.degree(), 1);
    ProjPoint::new(l.coeffs()).expect("nonzero line")
}

pub fn line_distance(l: &HomogeneousForm, m: &HomogeneousForm) -> f64 {
    line_point(l).distance(&line_point(m))
}

/// `|l(p)|` for unit line coefficients and a unit point.
pub fn incidence(l: &HomogeneousForm, p: &ProjPoint) -> f64 {
    l.eval(p.coords()).norm() / l.norm()
}
