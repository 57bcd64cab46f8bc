//! Charts, embeddings and atlases with a refinement oracle.

#[allow(clippy::module_inception)]
pub mod atlas;
pub mod chart;
pub mod laminar;
pub mod span;
pub mod validate;

pub use atlas::{close_embeddings, Atlas, AtlasParts, EmbSet, Embedding, OracleSpec, Span, SpanWitness};
pub use chart::{
    find_conjugator, has_trivial_stabilizer, induced_homomorphism, overlap_transport, restrict_chart, stabilizer,
    validate_chart, Chart, GroupTable,
};
pub use laminar::{add_chart_laminar, images_in, laminar_violations, relation, Placement, PlacementFailure, Relation};
pub use span::{common_span, common_span_completions, span_commutes};
pub use validate::validate_atlas;
