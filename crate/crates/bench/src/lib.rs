//! Shared fixtures for the criterion benches.

use std::sync::Arc;

use orbicat::atlas::Atlas;
use orbicat::functor::build_translation_groupoid;
use orbicat::groupoid::{Arrow, GroupoidPresentation};
use orbicat::io::{gallery, GalleryParams};
use orbicat::sample::Sampler;

pub fn atlas(p: GalleryParams) -> Arc<Atlas> {
    Arc::new(gallery(&p).expect("gallery atlas"))
}

pub fn groupoid(p: GalleryParams) -> Arc<GroupoidPresentation> {
    Arc::new(build_translation_groupoid(atlas(p)).expect("translation groupoid"))
}

/// `n` composable pairs drawn with a fixed seed.
pub fn composable_pairs(g: &GroupoidPresentation, n: usize) -> Vec<(Arrow, Arrow)> {
    let mut s = Sampler::new(7);
    (0..n)
        .map(|_| {
            let a = g.sample_arrow(&mut s);
            let b = g.sample_arrow_from(&g.target(&a).expect("target"), &mut s).expect("arrow from target");
            (a, b)
        })
        .collect()
}
