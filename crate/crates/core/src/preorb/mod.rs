//! The 2-category of atlases, compatible systems and their natural transformations.

pub mod laws;
pub mod nat;
pub mod system;

pub use laws::{
    check_2cat_laws, random_gauge_cell, random_gauge_diagram, random_gauge_system, Corruption, CorruptOps, LawDiagram,
    Square,
};
pub use nat::{hcomp_orb, validate_orb_nat_trans, vcomp_orb, CompositionOps, OrbNatTrans, StandardOps};
pub use system::{compose_compatible, validate_compatible_system, CompatibleSystem};
