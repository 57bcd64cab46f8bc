//! Presented étale groupoids, their morphisms and natural transformations.

pub mod axioms;
pub mod morphism;
pub mod nat;
pub mod presentation;

pub use axioms::{check_groupoid_axioms, isotropy_arrows, local_bisection, structural_predicates, StructuralPredicates};
pub use morphism::{compose_morphisms, validate_groupoid_morphism, ArrowFn, ArrowMap, GroupoidMorphism};
pub use nat::{cells_agree, hcomp_grp, validate_grp_nat_trans, vcomp_grp, GrpNatTrans, NatBody};
pub use presentation::{Arrow, ArrowComponent, GroupoidPresentation, Strategy, TranslationData, Unit, UnitComponent};
