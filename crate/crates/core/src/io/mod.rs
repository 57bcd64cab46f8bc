//! File formats and the example gallery.

pub mod atlas_file;
pub mod docs;
pub mod gallery;

pub use atlas_file::{atlas_from_json, atlas_hash, atlas_to_json, from_json, parse_atlas, to_canonical_json, ChartDoc, MapDoc};
pub use docs::{
    cell_from_json, cell_to_json, groupoid_from_json, groupoid_to_json, system_from_json, system_to_json, witness_from_json,
    witness_to_json,
};
pub use gallery::{cone_atlas, cone_pair, conductor_for, gallery, standard_gallery, GalleryName, GalleryParams};
