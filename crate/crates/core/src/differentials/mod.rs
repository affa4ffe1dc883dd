//! Holomorphic differentials on `C` as Poincaré residues, the canonical
//! isomorphism of a step in affine frames, and the parity split of the
//! differentials on `Y`.

mod chart;
mod iso;
mod odd;
mod residue;

pub use chart::AffineChart;
pub use iso::{canonical_iso, canonical_iso_report, off_identity, CanonicalIso, IsoReport};
pub use odd::{odd_space_report, phi_y, trace_on_h, vertex_on, OddSpaceReport};
pub use residue::{numerator_rank, residue_basis, ResidueForm};
