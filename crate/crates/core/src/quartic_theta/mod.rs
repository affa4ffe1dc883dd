//! Bitangents of a plane quartic and the level-2 structure they carry:
//! two-torsion classes as sets of bitangent pairs, the Weil pairing and flags
//! of marked-point pairs.

mod bitangents;
mod classes;
mod flags;
mod quartic;

pub use bitangents::{bitangents, double_contact_residual, BitangentRecord, BITANGENT_COUNT};
pub use classes::{
    alpha_class, classify_all, is_syzygetic, weil_pairing, weil_pairing_by_support, ClassTable, Syzygy, CLASS_COUNT,
    TwoTorsionClass,
};
pub use flags::{enumerate_flags, FlagEnumeration, FlagSpec};
pub use quartic::Quartic;
