//! Exact computation with reduced complex orbifold atlases and their translation groupoids.

pub mod atlas;
pub mod error;
pub mod functor;
pub mod groupoid;
pub mod io;
pub mod morita;
pub mod numerics;
pub mod preorb;
pub mod report;
pub mod sample;

pub use error::{Error, Result};
