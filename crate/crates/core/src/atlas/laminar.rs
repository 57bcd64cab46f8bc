//! Nested-or-disjoint chart images, and adding charts while keeping that property.
//!
//! An atlas is laminar when, inside every chart, any two embedded images are
//! disjoint or nested, and nesting is witnessed by an embedding between the
//! source charts. Laminar atlases always answer span queries directly.

use std::collections::BTreeMap;

use num_rational::BigRational;

use super::atlas::{close_embeddings, Atlas, Embedding};
use super::chart::Chart;
use crate::error::Result;
use crate::numerics::{AffineMap, Ball, CycNum, PointC};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Disjoint,
    Equal,
    Inside,
    Contains,
    Partial,
}

/// How ball `a` sits relative to ball `b`.
pub fn relation(a: &Ball, b: &Ball) -> Result<Relation> {
    if a == b {
        return Ok(Relation::Equal);
    }
    if !a.intersects(b)? {
        return Ok(Relation::Disjoint);
    }
    if b.contains_ball(a)? {
        return Ok(Relation::Inside);
    }
    if a.contains_ball(b)? {
        return Ok(Relation::Contains);
    }
    Ok(Relation::Partial)
}

/// Images μ(dom e) inside chart c for every other chart e and every μ ∈ Emb(e, c).
pub fn images_in(atlas: &Atlas, c: usize) -> Result<Vec<(usize, AffineMap, Ball)>> {
    let mut out = Vec::new();
    for e in 0..atlas.n_charts() {
        if e == c {
            continue;
        }
        for mu in atlas.embeddings_between(e, c) {
            out.push((e, mu.clone(), atlas.chart(e).domain.image(mu)?));
        }
    }
    Ok(out)
}

fn nesting_witnessed(atlas: &Atlas, inner: usize, mu_inner: &AffineMap, outer: usize, mu_outer: &AffineMap) -> Result<bool> {
    let f = mu_outer.inverse()?.compose(mu_inner)?;
    Ok(atlas.is_embedding(inner, outer, &f))
}

/// Human-readable list of laminarity violations; empty iff laminar.
pub fn laminar_violations(atlas: &Atlas) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for c in 0..atlas.n_charts() {
        let imgs = images_in(atlas, c)?;
        let cid = &atlas.chart(c).id;
        for a in 0..imgs.len() {
            for b in (a + 1)..imgs.len() {
                let (ea, ma, ba) = &imgs[a];
                let (eb, mb, bb) = &imgs[b];
                let ok = match relation(ba, bb)? {
                    Relation::Disjoint => true,
                    Relation::Partial => false,
                    Relation::Inside => nesting_witnessed(atlas, *ea, ma, *eb, mb)?,
                    Relation::Contains => nesting_witnessed(atlas, *eb, mb, *ea, ma)?,
                    Relation::Equal => {
                        nesting_witnessed(atlas, *ea, ma, *eb, mb)? || nesting_witnessed(atlas, *eb, mb, *ea, ma)?
                    }
                };
                if !ok {
                    out.push(format!(
                        "in {cid}: images of {} and {} overlap without nesting",
                        atlas.chart(*ea).id,
                        atlas.chart(*eb).id
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Where a new chart sits: `map` sends new-chart coordinates into chart `chart`.
#[derive(Clone, Debug)]
pub struct Placement {
    pub chart: usize,
    pub map: AffineMap,
}

/// Why a chart could not be placed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlacementFailure {
    /// Some placement map does not intertwine the stabilizer groups.
    NotEquivariant { chart: String },
    /// The point has more isotropy in a placement chart than in the first one.
    IsotropyMismatch { chart: String },
    /// Halving never produced an admissible ball.
    NoRadius,
}

const MAX_HALVINGS: usize = 40;

/// Adds a chart centered at `center` (coordinates of the first placement), with the
/// stabilizer of the center as its group, shrinking the radius from `r2` until the
/// ball fits every placement, is separated from its translates and is laminar with
/// all existing images. Nesting embeddings are added and the result is closed.
pub fn add_chart_laminar(
    atlas: &Atlas,
    id: impl Into<String>,
    center: &PointC,
    r2: &BigRational,
    placements: &[Placement],
) -> Result<std::result::Result<(Atlas, usize), PlacementFailure>> {
    let id: String = id.into();
    let m = atlas.conductor();
    let first = &placements[0];
    let base = atlas.chart(first.chart);
    let c0 = first.map.apply(center)?;
    if !base.contains(&c0)? {
        return Ok(Err(PlacementFailure::NoRadius));
    }
    let inv0 = first.map.inverse()?;
    let group: Vec<AffineMap> = base
        .stabilizer_indices(&c0)?
        .into_iter()
        .map(|k| inv0.compose(&base.group[k])?.compose(&first.map))
        .collect::<Result<Vec<_>>>()?;

    // equivariance does not depend on the radius
    let mut induced: Vec<Vec<usize>> = Vec::new();
    for pl in placements {
        let chart = atlas.chart(pl.chart);
        let mut lam = Vec::new();
        for g in &group {
            let target = pl.map.compose(g)?;
            match chart.group.iter().position(|h| h.compose(&pl.map).map(|x| x == target).unwrap_or(false)) {
                Some(h) => lam.push(h),
                None => return Ok(Err(PlacementFailure::NotEquivariant { chart: chart.id.clone() })),
            }
        }
        let centre_img = pl.map.apply(center)?;
        if !chart.contains(&centre_img)? {
            return Ok(Err(PlacementFailure::NoRadius));
        }
        if chart.stabilizer_indices(&centre_img)?.len() != group.len() {
            return Ok(Err(PlacementFailure::IsotropyMismatch { chart: chart.id.clone() }));
        }
        induced.push(lam);
    }

    let mut ball = Ball::new(center.clone(), CycNum::from_rational(m, r2));
    let new_idx = atlas.n_charts();
    'halving: for _ in 0..MAX_HALVINGS {
        let mut plan: BTreeMap<(usize, usize), AffineMap> = BTreeMap::new();
        for (pl, lam) in placements.iter().zip(&induced) {
            let chart = atlas.chart(pl.chart);
            let img = ball.image(&pl.map)?;
            if !chart.domain.contains_ball(&img)? {
                ball = ball.halved();
                continue 'halving;
            }
            for (h, hm) in chart.group.iter().enumerate() {
                if lam.contains(&h) {
                    continue;
                }
                if img.image(hm)?.intersects(&img)? {
                    ball = ball.halved();
                    continue 'halving;
                }
            }
            plan.entry((new_idx, pl.chart)).or_insert_with(|| pl.map.clone());
            for (e, mu, eb) in images_in(atlas, pl.chart)? {
                match relation(&img, &eb)? {
                    Relation::Disjoint => {}
                    Relation::Partial => {
                        ball = ball.halved();
                        continue 'halving;
                    }
                    Relation::Inside | Relation::Equal => {
                        let f = mu.inverse()?.compose(&pl.map)?;
                        plan.entry((new_idx, e)).or_insert(f);
                    }
                    Relation::Contains => {
                        let f = pl.map.inverse()?.compose(&mu)?;
                        plan.entry((e, new_idx)).or_insert(f);
                    }
                }
            }
        }
        let chart = Chart::new(id.clone(), ball, group.clone());
        let embeddings = plan
            .into_iter()
            .map(|((src, dst), map)| Embedding { src, dst, map })
            .collect::<Vec<_>>();
        let mut parts = atlas.parts().clone();
        parts.charts.push(chart);
        parts.embeddings.extend(embeddings);
        close_embeddings(&mut parts)?;
        return Ok(Ok((Atlas::new(parts)?, new_idx)));
    }
    Ok(Err(PlacementFailure::NoRadius))
}
