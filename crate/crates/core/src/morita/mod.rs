//! Morita equivalences of groupoids and equivalences of atlases.

pub mod bijection;
pub mod check;
pub mod equivalence;
pub mod inclusion;
pub mod reconstruct;

pub use bijection::{bijection_demo, BijectionReport, Verdict};
pub use check::{check_morita, MoritaReport};
pub use equivalence::{
    atlases_equivalent, chart_embedding_ok, common_refinement, find_witness, is_refinement, matching_witness,
    pushforward_atlas, relabel_witness, validate_witness, CommonRefinement, EquivalenceWitness, Leg, Relabeling,
    WitnessEntry,
};
pub use inclusion::{inclusion_morphism, subatlas_inclusion_morphism};
pub use reconstruct::{reconstruct_atlas, reconstruction_morita_morphism, reconstruction_witness, Reconstruction};
