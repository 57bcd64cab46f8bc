//! The translation groupoid of an atlas: arrows are classes of triples
//! (λ_ki, x_k, λ_kj) of two embeddings out of a common chart and a point.

use std::collections::HashMap;
use std::sync::Arc;

use crate::atlas::{common_span, common_span_completions, validate_atlas, Atlas, Span};
use crate::error::{Error, Result};
use crate::groupoid::{Arrow, ArrowComponent, GroupoidPresentation, Strategy, TranslationData, Unit, UnitComponent};
use crate::numerics::AffineMap;

/// A triple with embeddings named by chart index and position in the embedding set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub k: usize,
    pub left: (usize, AffineMap),
    pub point: crate::numerics::PointC,
    pub right: (usize, AffineMap),
}

/// Builds F(𝒰). Units are the chart balls; there is one arrow component for every
/// chart k and every pair of embeddings out of k (group elements included).
pub fn build_translation_groupoid(atlas: Arc<Atlas>) -> Result<GroupoidPresentation> {
    let structural = validate_atlas(&atlas, 0, 0);
    if !structural.is_ok() {
        let first = structural.failing().next().map(|c| c.name.clone()).unwrap_or_default();
        return Err(Error::InvalidAtlas(format!("atlas fails {first}")));
    }
    let n = atlas.n_charts();
    let units: Vec<UnitComponent> = atlas
        .charts()
        .iter()
        .map(|c| UnitComponent {
            origin: c.id.clone(),
            ball: c.domain.clone(),
        })
        .collect();
    let mut keys = Vec::new();
    let mut components = Vec::new();
    for k in 0..n {
        let outs: Vec<usize> = (0..n).filter(|&i| !atlas.embeddings_between(k, i).is_empty()).collect();
        for &i in &outs {
            for &j in &outs {
                let li = atlas.embeddings_between(k, i);
                let lj = atlas.embeddings_between(k, j);
                for (a, la) in li.iter().enumerate() {
                    for (b, lb) in lj.iter().enumerate() {
                        keys.push([k, i, j, a, b]);
                        components.push(ArrowComponent {
                            param: atlas.chart(k).domain.clone(),
                            s: (i, la.clone()),
                            t: (j, lb.clone()),
                        });
                    }
                }
            }
        }
    }
    let index: HashMap<[usize; 5], usize> = keys.iter().enumerate().map(|(c, k)| (*k, c)).collect();
    let identity = (0..n)
        .map(|i| {
            let e = atlas.chart(i).group.iter().position(|g| g.is_identity()).expect("validated");
            index[&[i, i, i, e, e]]
        })
        .collect();
    let m = atlas.conductor();
    let dim = atlas.dim();
    let id = AffineMap::identity(m, dim);
    let inverse = keys.iter().map(|&[k, i, j, a, b]| (index[&[k, j, i, b, a]], id.clone())).collect();
    let mut probes: Vec<Unit> = atlas
        .probes()
        .iter()
        .map(|(c, p)| Unit {
            comp: *c,
            point: p.clone(),
        })
        .collect();
    for (i, c) in atlas.charts().iter().enumerate() {
        if !probes.iter().any(|u| u.comp == i) {
            probes.push(Unit {
                comp: i,
                point: c.domain.center.clone(),
            });
        }
    }
    let data = TranslationData { atlas, keys, index };
    GroupoidPresentation::new(
        m,
        dim,
        units,
        components,
        identity,
        inverse,
        probes,
        Strategy::Translation(Arc::new(data)),
    )
}

fn emb(data: &TranslationData, src: usize, dst: usize, idx: usize) -> &AffineMap {
    &data.atlas.embeddings_between(src, dst)[idx]
}

/// The arrow named by a triple; fails if the embeddings are not in the atlas or
/// the point lies outside chart k.
pub fn arrow_of_triple(g: &GroupoidPresentation, t: &Triple) -> Result<Arrow> {
    let Strategy::Translation(data) = &g.strategy else {
        return Err(Error::UnsupportedPresentation("not a translation groupoid".into()));
    };
    let a = &data.atlas;
    let find = |dst: usize, f: &AffineMap| {
        a.emb(t.k, dst)
            .and_then(|s| s.index(f))
            .ok_or_else(|| Error::AtlasMismatch(format!("{f} is not an embedding out of {}", a.chart(t.k).id)))
    };
    let key = [t.k, t.left.0, t.right.0, find(t.left.0, &t.left.1)?, find(t.right.0, &t.right.1)?];
    if !a.contains(t.k, &t.point)? {
        return Err(Error::PointOutsideDomain(a.chart(t.k).id.clone()));
    }
    Ok(Arrow {
        comp: data.index[&key],
        point: t.point.clone(),
    })
}

/// The triple an arrow representative stands for.
pub fn triple_of_arrow(g: &GroupoidPresentation, x: &Arrow) -> Result<Triple> {
    let Strategy::Translation(data) = &g.strategy else {
        return Err(Error::UnsupportedPresentation("not a translation groupoid".into()));
    };
    let [k, i, j, a, b] = data.keys[x.comp];
    Ok(Triple {
        k,
        left: (i, emb(data, k, i, a).clone()),
        point: x.point.clone(),
        right: (j, emb(data, k, j, b).clone()),
    })
}

/// Equality of classes, for arrows with equal source and target.
pub(crate) fn translation_equal(data: &TranslationData, a: &Arrow, b: &Arrow) -> Result<bool> {
    let [k, i, j, x, y] = data.keys[a.comp];
    let [l, i2, j2, x2, y2] = data.keys[b.comp];
    debug_assert!(i == i2 && j == j2);
    let atlas = &data.atlas;
    if k == i && k == j && l == i && l == j {
        // both live in one chart: compare the normal forms (1, g1(x), g2∘g1⁻¹)
        let t = atlas.table(i).expect("validated");
        return Ok(t.mul[y][t.inv[x]] == t.mul[y2][t.inv[x2]]);
    }
    let span = common_span(atlas, k, emb(data, k, i, x), &a.point, l, emb(data, l, i, x2), &b.point, i)?;
    Ok(emb(data, k, j, y).compose(&span.left)? == emb(data, l, j2, y2).compose(&span.right)?)
}

fn product_from_span(data: &TranslationData, a: &Arrow, b: &Arrow, span: &Span) -> Result<Arrow> {
    let [k, i, _, x, _] = data.keys[a.comp];
    let [l, _, h, _, y2] = data.keys[b.comp];
    let left = emb(data, k, i, x).compose(&span.left)?;
    let right = emb(data, l, h, y2).compose(&span.right)?;
    let atlas = &data.atlas;
    let f = span.k;
    let lookup = |dst: usize, map: &AffineMap| {
        atlas
            .emb(f, dst)
            .and_then(|s| s.index(map))
            .ok_or_else(|| Error::InvalidAtlas(format!("composite {} -> {} missing from the atlas", atlas.chart(f).id, atlas.chart(dst).id)))
    };
    let key = [f, i, h, lookup(i, &left)?, lookup(h, &right)?];
    Ok(Arrow {
        comp: data.index[&key],
        point: span.x_k.clone(),
    })
}

fn product_inputs<'a>(data: &'a TranslationData, a: &Arrow, b: &Arrow) -> (usize, &'a AffineMap, usize, &'a AffineMap, usize) {
    let [k, _, j, _, y] = data.keys[a.comp];
    let [l, j2, _, x2, _] = data.keys[b.comp];
    debug_assert_eq!(j, j2);
    (k, emb(data, k, j, y), l, emb(data, l, j, x2), j)
}

/// m([λ_ki, x_k, λ_kj], [λ_lj, x_l, λ_lh]) = [λ_ki∘μ_fk, x_f, λ_lh∘μ_fl] for the
/// common span (f, x_f, μ_fk, μ_fl) over chart j.
pub(crate) fn translation_multiply(data: &TranslationData, a: &Arrow, b: &Arrow) -> Result<Arrow> {
    let (k, lam_kj, l, lam_lj, j) = product_inputs(data, a, b);
    let span = common_span(&data.atlas, k, lam_kj, &a.point, l, lam_lj, &b.point, j)?;
    product_from_span(data, a, b, &span)
}

pub(crate) fn translation_multiply_all(data: &TranslationData, a: &Arrow, b: &Arrow) -> Result<Vec<Arrow>> {
    let (k, lam_kj, l, lam_lj, j) = product_inputs(data, a, b);
    common_span_completions(&data.atlas, k, lam_kj, &a.point, l, lam_lj, &b.point, j)?
        .iter()
        .map(|s| product_from_span(data, a, b, s))
        .collect()
}
