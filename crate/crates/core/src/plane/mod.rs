//! Projective geometry on homogeneous forms: points, lines, intersections,
//! polars and interpolation of curves under incidence and tangency conditions.

mod curves;
mod fit;
mod form;
mod intersect;
pub mod lines;
mod point;

pub use curves::{polar_conic, third_point};
pub use fit::{constraint_matrix, fit_form_constrained, Fit, TangencyConstraint};
pub use form::{coeff_distance, gradient_rows, monomial_row, monomials, HomogeneousForm};
pub use intersect::{intersect, IntersectionPoint};
pub(crate) use intersect::point_order;
pub use lines::{line_through, meet};
pub use point::{set_distance, ProjPoint};
