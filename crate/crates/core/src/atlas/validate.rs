//! Report-valued validation of whole atlases.

use super::atlas::{Atlas, Span};
use super::chart::{induced_homomorphism, validate_chart};
use super::laminar::laminar_violations;
use crate::numerics::{AffineMap, PointC};
use crate::report::Report;
use crate::sample::Sampler;

fn span_valid(atlas: &Atlas, i: usize, j: usize, s: &Span, x: Option<&PointC>, y: Option<&PointC>) -> bool {
    let inside = atlas.contains(s.k, &s.x_k).unwrap_or(false);
    let legs = atlas.is_embedding(s.k, i, &s.left) && atlas.is_embedding(s.k, j, &s.right);
    let pts = match (x, y) {
        (Some(x), Some(y)) => {
            s.left.apply(&s.x_k).ok().as_ref() == Some(x) && s.right.apply(&s.x_k).ok().as_ref() == Some(y)
        }
        _ => true,
    };
    inside && legs && pts
}

/// Checks every chart and embedding invariant, the recorded witnesses, and the
/// oracle on `samples` random identified pairs.
pub fn validate_atlas(atlas: &Atlas, samples: usize, seed: u64) -> Report {
    let mut r = Report::new("atlas");
    r.record("atlas.nonempty", atlas.n_charts() > 0, || "no charts: the charts cannot cover".into());
    if atlas.n_charts() == 0 {
        return r;
    }
    for c in atlas.charts() {
        r.absorb("", validate_chart(c));
    }
    if !r.is_ok() {
        return r;
    }
    for e in atlas.embeddings() {
        let (src, dst) = (atlas.chart(e.src), atlas.chart(e.dst));
        let name = || format!("{} -> {}", src.id, dst.id);
        r.record("embedding.distinct_charts", e.src != e.dst, || format!("{}: self-embeddings are group elements", name()));
        if !r.record("embedding.injective", e.map.is_similarity(), || format!("{} is not an injective similarity", name())) {
            continue;
        }
        let img = src.domain.image(&e.map).expect("similarity");
        r.record("embedding.domain", dst.domain.contains_ball(&img).unwrap_or(false), || {
            format!("{}: image {img} exceeds {}", name(), dst.domain)
        });
        r.record("embedding.equivariant", induced_homomorphism(src, dst, &e.map).is_ok(), || {
            format!("{}: some g has no matching h", name())
        });
        let rep = atlas.rep(e.src, e.dst).cloned().unwrap_or_else(|| e.map.clone());
        r.record("embedding.torsor", atlas.is_embedding(e.src, e.dst, &e.map), || {
            format!("{}: {} is not in G_dst·{rep}", name(), e.map)
        });
    }
    for (&(a, b), _) in atlas.reps() {
        if let Some(set) = atlas.emb(a, b) {
            let distinct: std::collections::HashSet<&AffineMap> = set.maps.iter().collect();
            r.record("embedding.torsor_size", distinct.len() == atlas.chart(b).order(), || {
                format!("{} -> {}: {} distinct of {}", atlas.chart(a).id, atlas.chart(b).id, distinct.len(), atlas.chart(b).order())
            });
        }
        for c in atlas.targets_of(b) {
            if c == a {
                continue;
            }
            let f = atlas.embeddings_between(a, b)[0].clone();
            let g = atlas.embeddings_between(b, c)[0].clone();
            let comp = g.compose(&f).expect("dims");
            r.record("atlas.closure", atlas.is_embedding(a, c, &comp), || {
                format!("{} -> {} -> {} composite not representable", atlas.chart(a).id, atlas.chart(b).id, atlas.chart(c).id)
            });
        }
    }
    for w in atlas.witnesses() {
        r.record("witness.span", span_valid(atlas, w.i, w.j, &w.span, None, None), || {
            format!("witness between {} and {} is not a span", atlas.chart(w.i).id, atlas.chart(w.j).id)
        });
    }
    for (c, p) in atlas.probes() {
        r.record("probe.inside", atlas.contains(*c, p).unwrap_or(false), || {
            format!("probe {p} lies outside {}", atlas.chart(*c).id)
        });
    }
    match laminar_violations(atlas) {
        Ok(v) => {
            for msg in v.into_iter().take(5) {
                r.warn(format!("not laminar: {msg}"));
            }
        }
        Err(e) => r.warn(format!("laminarity check failed: {e}")),
    }
    if !r.is_ok() {
        return r;
    }
    let mut s = Sampler::new(seed);
    for _ in 0..samples {
        let i = s.index(atlas.n_charts());
        let x = s.point_in_ball(&atlas.chart(i).domain);
        let targets: Vec<usize> = std::iter::once(i).chain(atlas.targets_of(i)).collect();
        let j = targets[s.index(targets.len())];
        let maps = atlas.embeddings_between(i, j);
        let lam = &maps[s.index(maps.len())];
        let y = lam.apply(&x).expect("dims");
        let first = atlas.refine(i, &x, j, &y);
        let second = atlas.refine(i, &x, j, &y);
        r.record("oracle.deterministic", first == second, || format!("({i}, {x}) vs ({j}, {y})"));
        match first {
            Ok(Some(span)) => {
                r.record("oracle.valid", span_valid(atlas, i, j, &span, Some(&x), Some(&y)), || {
                    format!("invalid span for ({i}, {x}) vs ({j}, {y})")
                });
                let back = atlas.refine(j, &y, i, &x).ok().flatten();
                r.record("oracle.symmetric", back.as_ref() == Some(&span.swapped()), || {
                    format!("swap mismatch at ({i}, {x})")
                });
            }
            Ok(None) => r.fail("oracle.identifies", format!("({i}, {x}) and ({j}, {y}) related by an embedding were not identified")),
            Err(e) => r.fail("oracle.identifies", format!("oracle error {e}")),
        }
    }
    r
}
