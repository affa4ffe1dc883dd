//! The plane configuration `(E, Q, q_1..q_6)` of a quartic with a two-torsion
//! class, the model of the double cover `Y -> E` in P^3 and the check of the
//! ramification pattern of the tower over the pencil of lines through `t`.

mod extract;
mod pencil;
mod space;
mod tower;

pub use extract::{
    cross_points, extract_configuration, marked_points, ExtractionReport, NamedCertificate, PlaneConfiguration, FIT_FIBERS,
    HELD_OUT_FIBERS,
};
pub(crate) use extract::non_generic_on_rank;
pub use pencil::{build_pencil, pencil_fiber, PencilOfConics};
pub use space::{build_space_model, SpaceCurveModel, CONE_VERTEX};
pub use tower::{verify_tower_pattern, PencilLine, RamificationReport, TowerType};
