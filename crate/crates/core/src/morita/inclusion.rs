//! Inclusion morphisms F(sub) → F(full) for sub-atlases.

use std::collections::HashSet;
use std::sync::Arc;

use crate::atlas::Atlas;
use crate::error::{Error, Result};
use crate::functor::TranslationFunctor;
use crate::groupoid::GroupoidMorphism;
use crate::numerics::PolyMap;
use crate::preorb::CompatibleSystem;

/// The inclusion morphism along a chart assignment: identity lifts, and every
/// embedding of `sub` must be an embedding of `full` between the assigned charts.
pub fn inclusion_morphism(sub: &Arc<Atlas>, full: &Arc<Atlas>, theta: Vec<usize>) -> Result<GroupoidMorphism> {
    if sub.dim() != full.dim() || sub.conductor() != full.conductor() {
        return Err(Error::NotASubAtlas("dimension or conductor differs".into()));
    }
    let lifts = vec![PolyMap::identity(sub.conductor(), sub.dim()); sub.n_charts()];
    let f = CompatibleSystem::solve(sub.clone(), full.clone(), theta, lifts).map_err(|e| Error::NotASubAtlas(e.to_string()))?;
    TranslationFunctor::new().on_morphism(&f)
}

/// Charts are matched by id and must carry the same domain and group; every
/// embedding of `sub` must be one of `full`.
pub fn subatlas_inclusion_morphism(sub: &Arc<Atlas>, full: &Arc<Atlas>) -> Result<GroupoidMorphism> {
    let mut theta = Vec::with_capacity(sub.n_charts());
    for c in sub.charts() {
        let idx = full
            .chart_index(&c.id)
            .ok_or_else(|| Error::NotASubAtlas(format!("chart {} is not in the full atlas", c.id)))?;
        let d = full.chart(idx);
        let same_group = c.group.len() == d.group.len() && c.group.iter().collect::<HashSet<_>>() == d.group.iter().collect::<HashSet<_>>();
        if d.domain != c.domain || !same_group {
            return Err(Error::NotASubAtlas(format!("chart {} differs in the full atlas", c.id)));
        }
        theta.push(idx);
    }
    for e in sub.embeddings() {
        if !full.is_embedding(theta[e.src], theta[e.dst], &e.map) {
            return Err(Error::NotASubAtlas(format!(
                "embedding {} -> {} is not in the full atlas",
                sub.chart(e.src).id,
                sub.chart(e.dst).id
            )));
        }
    }
    inclusion_morphism(sub, full, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::validate_groupoid_morphism;
    use crate::io::{cone_pair, gallery, GalleryParams};
    use crate::morita::check_morita;

    #[test]
    fn single_chart_inside_cone_pair() {
        let full = Arc::new(cone_pair(3).unwrap());
        let sub = Arc::new(gallery(&GalleryParams::cone(3)).unwrap());
        let m = subatlas_inclusion_morphism(&sub, &full).unwrap();
        assert!(validate_groupoid_morphism(&m, 50, 1).is_ok());
        let r = check_morita(&m, 50, 1);
        assert!(r.verdict, "{}", r.render_text());
    }

    #[test]
    fn self_inclusion_is_identity() {
        let a = Arc::new(gallery(&GalleryParams::football(2, 3)).unwrap());
        let m = subatlas_inclusion_morphism(&a, &a).unwrap();
        assert!(m.units.iter().enumerate().all(|(u, (c, f))| *c == u && *f == PolyMap::identity(12, 1)));
        assert!(check_morita(&m, 20, 2).verdict);
    }

    #[test]
    fn foreign_chart_is_rejected() {
        let full = Arc::new(cone_pair(3).unwrap());
        let sub = Arc::new(gallery(&GalleryParams::football(3, 3)).unwrap());
        assert!(matches!(subatlas_inclusion_morphism(&sub, &full), Err(Error::NotASubAtlas(_))));
    }
}
