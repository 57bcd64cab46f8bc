//! Equivalence of atlases through witness charts, refinements, the common
//! refinement and pushforward along a relabeling.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use num_rational::BigRational;

use crate::atlas::{
    add_chart_laminar, close_embeddings, induced_homomorphism, overlap_transport, restrict_chart, validate_atlas, Atlas,
    Chart, Embedding, OracleSpec, Placement,
};
use crate::error::{Error, Result};
use crate::functor::build_translation_groupoid;
use crate::groupoid::{GroupoidPresentation, Unit};
use crate::numerics::{AffineMap, Ball, CycNum, PointC};
use super::check::witness_points;
use crate::report::Report;
use crate::sample::Sampler;

/// One leg of a witness: a chart named by id and the embedding into it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leg {
    pub chart: String,
    pub map: AffineMap,
}

/// A chart (W, K) with embeddings into a chart of each atlas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessEntry {
    pub chart: Chart,
    pub left: Leg,
    pub right: Leg,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EquivalenceWitness {
    pub entries: Vec<WitnessEntry>,
}

const CONSISTENCY_SAMPLES: usize = 8;
const MAX_HALVINGS: usize = 48;

/// Whether `f` is a chart embedding of `src` into `dst`: an injective similarity
/// with image in the domain, equivariant along an injective homomorphism, and
/// with non-induced elements moving the image off itself.
pub fn chart_embedding_ok(src: &Chart, dst: &Chart, f: &AffineMap) -> Result<bool> {
    if f.dim() != src.dim() || f.dim() != dst.dim() || f.conductor() != dst.conductor() || src.conductor() != dst.conductor() {
        return Ok(false);
    }
    if !f.is_similarity() || !dst.domain.contains_ball(&src.domain.image(f)?)? {
        return Ok(false);
    }
    let Ok(hom) = induced_homomorphism(src, dst, f) else {
        return Ok(false);
    };
    if hom.iter().collect::<HashSet<_>>().len() != hom.len() {
        return Ok(false);
    }
    for h in 0..dst.group.len() {
        if overlap_transport(src, dst, f, h).is_err() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn leg_index(a: &Atlas, leg: &Leg) -> Option<usize> {
    a.chart_index(&leg.chart)
}

/// Points of entry charts (in W coordinates) reachable from unit y of `g`
/// through the legs selected by `side`.
fn entry_points_from(
    g: &GroupoidPresentation,
    y: &Unit,
    legs: &[(usize, &AffineMap, &Ball)],
) -> Result<Vec<(usize, PointC)>> {
    let mut out = Vec::new();
    for a in g.arrows_from(y)? {
        let z = g.target(&a)?;
        for (f, (chart, map, img)) in legs.iter().enumerate() {
            if *chart == z.comp && img.contains_point(&z.point)? {
                out.push((f, map.inverse()?.apply(&z.point)?));
            }
        }
    }
    Ok(out)
}

/// Full witness report: legs, consistency of the identifications the two sides
/// induce, and coverage of the declared witness points of both atlases.
pub fn validate_witness(u1: &Arc<Atlas>, u2: &Arc<Atlas>, w: &EquivalenceWitness, seed: u64) -> Report {
    let mut r = Report::new("equivalence witness");
    let shape = u1.dim() == u2.dim() && u1.conductor() == u2.conductor();
    if !r.record("witness.shape", shape, || "atlases differ in dimension or conductor".into()) {
        return r;
    }
    let mut resolved = Vec::new();
    for (n, e) in w.entries.iter().enumerate() {
        let (Some(a), Some(b)) = (leg_index(u1, &e.left), leg_index(u2, &e.right)) else {
            r.fail("witness.charts", format!("entry {n} names a missing chart"));
            continue;
        };
        let l = chart_embedding_ok(&e.chart, u1.chart(a), &e.left.map).unwrap_or(false);
        r.record("witness.left", l, || format!("entry {n}: left leg is not a chart embedding into {}", e.left.chart));
        let rr = chart_embedding_ok(&e.chart, u2.chart(b), &e.right.map).unwrap_or(false);
        r.record("witness.right", rr, || format!("entry {n}: right leg is not a chart embedding into {}", e.right.chart));
        if l && rr {
            resolved.push((a, b, e));
        }
    }
    if !r.is_ok() {
        return r;
    }
    let (g1, g2) = match (build_translation_groupoid(u1.clone()), build_translation_groupoid(u2.clone())) {
        (Ok(a), Ok(b)) => (a, b),
        _ => {
            r.fail("witness.atlases", "an atlas does not validate");
            return r;
        }
    };
    let img = |e: &WitnessEntry, m: &AffineMap| e.chart.domain.image(m);
    let left_imgs: Vec<Ball> = resolved.iter().map(|(_, _, e)| img(e, &e.left.map)).collect::<Result<_>>().unwrap_or_default();
    let right_imgs: Vec<Ball> = resolved.iter().map(|(_, _, e)| img(e, &e.right.map)).collect::<Result<_>>().unwrap_or_default();
    let left: Vec<_> = resolved.iter().zip(&left_imgs).map(|((a, _, e), b)| (*a, &e.left.map, b)).collect();
    let right: Vec<_> = resolved.iter().zip(&right_imgs).map(|((_, b, e), i)| (*b, &e.right.map, i)).collect();

    let mut s = Sampler::new(seed);
    for (n, (a, b, e)) in resolved.iter().enumerate() {
        let mut pts = vec![e.chart.domain.center.clone()];
        pts.extend((0..CONSISTENCY_SAMPLES).map(|_| s.point_in_ball(&e.chart.domain)));
        for wpt in pts {
            let ok = (|| -> Result<bool> {
                let x1 = Unit { comp: *a, point: e.left.map.apply(&wpt)? };
                let x2 = Unit { comp: *b, point: e.right.map.apply(&wpt)? };
                // whatever one side identifies, the other must identify too
                for (f, w2) in entry_points_from(&g1, &x1, &left)? {
                    let (_, bf, ef) = resolved[f];
                    let y = Unit { comp: bf, point: ef.right.map.apply(&w2)? };
                    if g2.hom(&x2, &y)?.is_empty() {
                        return Ok(false);
                    }
                }
                for (f, w2) in entry_points_from(&g2, &x2, &right)? {
                    let (af, _, ef) = resolved[f];
                    let y = Unit { comp: af, point: ef.left.map.apply(&w2)? };
                    if g1.hom(&x1, &y)?.is_empty() {
                        return Ok(false);
                    }
                }
                Ok(true)
            })()
            .unwrap_or(false);
            r.record("witness.consistent", ok, || format!("entry {n}: the atlases identify different points near {wpt}"));
        }
    }
    for (name, g, legs) in [("witness.covers_left", &g1, &left), ("witness.covers_right", &g2, &right)] {
        for y in witness_points(g) {
            let ok = entry_points_from(g, &y, legs).map(|v| !v.is_empty()).unwrap_or(false);
            r.record(name, ok, || format!("{y} is not covered by any witness chart"));
        }
    }
    r
}

/// True iff the witness validates and covers the declared points of both atlases;
/// a witness with bad legs or inconsistent identifications is an error.
pub fn atlases_equivalent(u1: &Arc<Atlas>, u2: &Arc<Atlas>, w: &EquivalenceWitness) -> Result<bool> {
    let r = validate_witness(u1, u2, w, 0);
    if r.has_failure("witness.shape") {
        return Ok(false);
    }
    if let Some(c) = r.failing().find(|c| !c.name.starts_with("witness.covers")) {
        return Err(Error::WitnessInvalid(format!(
            "{}: {}",
            c.name,
            c.counterexamples.first().cloned().unwrap_or_default()
        )));
    }
    Ok(r.is_ok())
}

/// Every chart i of `u` embeds into chart gamma[i] of `v` by maps[i].
pub fn is_refinement(u: &Atlas, v: &Atlas, gamma: &[usize], maps: &[AffineMap]) -> bool {
    if gamma.len() != u.n_charts() || maps.len() != u.n_charts() {
        return false;
    }
    gamma.iter().zip(maps).enumerate().all(|(i, (&j, f))| {
        j < v.n_charts() && chart_embedding_ok(u.chart(i), v.chart(j), f).unwrap_or(false)
    })
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    let (n, d) = (r.numer(), r.denom());
    if n.sign() == num_bigint::Sign::Minus {
        return None;
    }
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| BigRational::new(sn, sd))
}

/// Witness pairing charts of the same id. Single-chart atlases are matched by the
/// similarity between their domains; otherwise equal charts are matched by the
/// identity and nested ones through the smaller ball.
pub fn matching_witness(u1: &Atlas, u2: &Atlas) -> Option<EquivalenceWitness> {
    if u1.conductor() != u2.conductor() || u1.dim() != u2.dim() {
        return None;
    }
    let m = u1.conductor();
    let n = u1.dim();
    let id = AffineMap::identity(m, n);
    if u1.n_charts() == 1 && u2.n_charts() == 1 {
        let (c1, c2) = (u1.chart(0), u2.chart(0));
        let ratio = c2.domain.r2.as_rational()? / c1.domain.r2.as_rational()?;
        let s = CycNum::from_rational(m, &rational_sqrt(&ratio)?);
        // z ↦ c2 + s (z - c1)
        let shift = c2.domain.center.sub(&c1.domain.center.scale(&s)).ok()?;
        let map = AffineMap::scale_translate(&s, &shift);
        return Some(EquivalenceWitness {
            entries: vec![WitnessEntry {
                chart: c1.clone(),
                left: Leg { chart: c1.id.clone(), map: id },
                right: Leg { chart: c2.id.clone(), map },
            }],
        });
    }
    let mut entries = Vec::new();
    for c1 in u1.charts() {
        let Some(j) = u2.chart_index(&c1.id) else { continue };
        let c2 = u2.chart(j);
        let w = if c1.domain == c2.domain || c2.domain.contains_ball(&c1.domain).ok()? {
            c1.clone()
        } else if c1.domain.contains_ball(&c2.domain).ok()? {
            c2.clone()
        } else {
            continue;
        };
        entries.push(WitnessEntry {
            chart: w,
            left: Leg { chart: c1.id.clone(), map: id.clone() },
            right: Leg { chart: c2.id.clone(), map: id.clone() },
        });
    }
    (!entries.is_empty()).then_some(EquivalenceWitness { entries })
}

fn restricted_into(c: &Chart, x: &PointC, other: &Chart, id: &str) -> Option<Chart> {
    let r2 = c.domain.r2.as_rational()?;
    let (mut w, _) = restrict_chart(c, x, &r2, id).ok()?;
    let idm = AffineMap::identity(c.conductor(), c.dim());
    for _ in 0..MAX_HALVINGS {
        if chart_embedding_ok(&w, other, &idm).ok()? && chart_embedding_ok(&w, c, &idm).ok()? {
            return Some(w);
        }
        w = Chart::new(w.id.clone(), w.domain.halved(), w.group.clone());
    }
    None
}

/// Searches for a witness assuming both atlases use the same coordinates: around
/// every declared point of either atlas, a restricted chart embedding by the
/// identity into a chart of each. `None` means nothing was found at this bound.
pub fn find_witness(u1: &Arc<Atlas>, u2: &Arc<Atlas>) -> Option<EquivalenceWitness> {
    if u1.conductor() != u2.conductor() || u1.dim() != u2.dim() {
        return None;
    }
    let g1 = build_translation_groupoid(u1.clone()).ok()?;
    let g2 = build_translation_groupoid(u2.clone()).ok()?;
    let id = AffineMap::identity(u1.conductor(), u1.dim());
    let mut entries = Vec::new();
    for (flip, (a, b, g)) in [(false, (u1, u2, &g1)), (true, (u2, u1, &g2))] {
        for y in witness_points(g) {
            let c = a.chart(y.comp);
            let stab = c.stabilizer_indices(&y.point).ok()?.len();
            let found = (0..b.n_charts()).find_map(|j| {
                let d = b.chart(j);
                if !d.contains(&y.point).ok()? || d.stabilizer_indices(&y.point).ok()?.len() != stab {
                    return None;
                }
                let w = restricted_into(c, &y.point, d, &format!("w{}", entries.len()))?;
                Some((w, j))
            });
            let (w, j) = found?;
            let (l, r) = (Leg { chart: c.id.clone(), map: id.clone() }, Leg { chart: b.chart(j).id.clone(), map: id.clone() });
            let (left, right) = if flip { (r, l) } else { (l, r) };
            entries.push(WitnessEntry { chart: w, left, right });
        }
    }
    Some(EquivalenceWitness { entries })
}

/// The finite union atlas containing both inputs: `left[i]` and `right[j]` are the
/// indices of their charts in `atlas`.
#[derive(Clone, Debug)]
pub struct CommonRefinement {
    pub atlas: Arc<Atlas>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

fn same_group(a: &[AffineMap], b: &[AffineMap]) -> bool {
    a.len() == b.len() && a.iter().collect::<HashSet<_>>() == b.iter().collect::<HashSet<_>>()
}

fn merged_oracle(m: &Atlas, inputs: [(&Atlas, &[usize]); 2]) -> OracleSpec {
    let tables: Vec<(BTreeSet<usize>, BTreeSet<[usize; 3]>)> = inputs
        .iter()
        .filter_map(|(a, idx)| match a.oracle() {
            OracleSpec::SpanTable(t) => {
                let remap = |e: &[usize; 3]| [idx[e[0]], idx[e[1]], idx[e[2]]];
                Some((idx.iter().copied().collect(), t.iter().map(remap).collect()))
            }
            _ => None,
        })
        .collect();
    if tables.is_empty() {
        return OracleSpec::Gluing;
    }
    let n = m.n_charts();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in 0..n {
                if k == i || k == j || m.emb(k, i).is_none() || m.emb(k, j).is_none() {
                    continue;
                }
                let excluded = tables.iter().any(|(charts, t)| {
                    [i, j, k].iter().all(|c| charts.contains(c)) && !t.contains(&[i, j, k]) && !t.contains(&[j, i, k])
                });
                if !excluded {
                    entries.push([i, j, k]);
                }
            }
        }
    }
    OracleSpec::SpanTable(entries)
}

/// Stand-in for the maximal atlas: u1 together with every chart of u2, placed
/// along the witness and kept laminar. Both inputs are sub-atlases of the result.
pub fn common_refinement(u1: &Arc<Atlas>, u2: &Arc<Atlas>, w: &EquivalenceWitness) -> Result<CommonRefinement> {
    if !atlases_equivalent(u1, u2, w)? {
        return Err(Error::NotEquivalent("witness does not cover both atlases".into()));
    }
    let mut m: Atlas = (**u1).clone();
    let left: Vec<usize> = (0..u1.n_charts()).collect();
    let mut right = Vec::with_capacity(u2.n_charts());
    for c in u2.charts() {
        let mut placements: Vec<Placement> = Vec::new();
        for e in w.entries.iter().filter(|e| e.right.chart == c.id) {
            let a = leg_index(u1, &e.left).expect("validated witness");
            let base = e.left.map.compose(&e.right.map.inverse()?)?;
            for t in 0..u1.n_charts() {
                let mu = if t == a {
                    AffineMap::identity(m.conductor(), m.dim())
                } else if let Some(s) = m.emb(a, t) {
                    s.maps[0].clone()
                } else {
                    continue;
                };
                let map = mu.compose(&base)?;
                if placements.iter().any(|p| p.chart == t) {
                    continue;
                }
                if m.chart(t).domain.contains_ball(&c.domain.image(&map)?)? {
                    placements.push(Placement { chart: t, map });
                }
            }
        }
        if placements.is_empty() {
            return Err(Error::NotEquivalent(format!("chart {} fits no chart along the witness", c.id)));
        }
        let reuse = placements.iter().find(|p| {
            p.map.is_identity() && m.chart(p.chart).domain == c.domain && same_group(&m.chart(p.chart).group, &c.group)
        });
        if let Some(p) = reuse {
            right.push(p.chart);
            continue;
        }
        let mut fresh = format!("{}#2", c.id);
        while m.chart_index(&fresh).is_some() {
            fresh.push('\'');
        }
        let r2 = c
            .domain
            .r2
            .as_rational()
            .ok_or_else(|| Error::NotEquivalent(format!("chart {} has an irrational radius", c.id)))?;
        let (next, idx) = add_chart_laminar(&m, fresh, &c.domain.center, &r2, &placements)?
            .map_err(|f| Error::NotEquivalent(format!("chart {} cannot be placed: {f:?}", c.id)))?;
        let added = next.chart(idx);
        if added.domain != c.domain || !same_group(&added.group, &c.group) {
            return Err(Error::NotEquivalent(format!("chart {} only fits after shrinking", c.id)));
        }
        m = next;
        right.push(idx);
    }
    let mut parts = m.parts().clone();
    for e in u2.embeddings() {
        let (s, d) = (right[e.src], right[e.dst]);
        if s != d && !m.is_embedding(s, d, &e.map) {
            parts.embeddings.push(Embedding { src: s, dst: d, map: e.map.clone() });
        }
    }
    close_embeddings(&mut parts)?;
    let mut probes: Vec<(usize, PointC)> = u1.probes().to_vec();
    for (c, p) in u2.probes() {
        if !probes.contains(&(right[*c], p.clone())) {
            probes.push((right[*c], p.clone()));
        }
    }
    parts.probes = probes;
    parts.witnesses.clear();
    parts.oracle = OracleSpec::Gluing;
    let glued = Atlas::new(parts.clone())?;
    parts.oracle = merged_oracle(&glued, [(u1, &left), (u2, &right)]);
    let atlas = Atlas::new(parts)?;
    let v = validate_atlas(&atlas, 40, 0);
    if !v.is_ok() {
        let first = v.failing().next().map(|c| c.name.clone()).unwrap_or_default();
        return Err(Error::NotEquivalent(format!("union atlas fails {first}")));
    }
    Ok(CommonRefinement {
        atlas: Arc::new(atlas),
        left,
        right,
    })
}

/// A bijective renaming of chart ids; ids not listed keep their name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Relabeling(pub BTreeMap<String, String>);

impl Relabeling {
    pub fn apply(&self, id: &str) -> String {
        self.0.get(id).cloned().unwrap_or_else(|| id.to_string())
    }
}

/// φ₊(U): the same charts and embeddings, with the identifications renamed by φ.
pub fn pushforward_atlas(phi: &Relabeling, u: &Atlas) -> Result<Atlas> {
    for k in phi.0.keys() {
        if u.chart_index(k).is_none() {
            return Err(Error::InvalidRelabeling(format!("{k} is not a chart id")));
        }
    }
    let new_ids: Vec<String> = u.charts().iter().map(|c| phi.apply(&c.id)).collect();
    if new_ids.iter().collect::<HashSet<_>>().len() != new_ids.len() {
        return Err(Error::InvalidRelabeling("relabeling is not injective".into()));
    }
    let mut parts = u.parts().clone();
    for (c, id) in parts.charts.iter_mut().zip(new_ids) {
        c.id = id;
    }
    Atlas::new(parts)
}

/// Identity legs from every chart of u to its renamed copy in φ₊(u).
pub fn relabel_witness(u: &Atlas, phi: &Relabeling) -> EquivalenceWitness {
    let id = AffineMap::identity(u.conductor(), u.dim());
    EquivalenceWitness {
        entries: u
            .charts()
            .iter()
            .map(|c| WitnessEntry {
                chart: c.clone(),
                left: Leg { chart: c.id.clone(), map: id.clone() },
                right: Leg { chart: phi.apply(&c.id), map: id.clone() },
            })
            .collect(),
    }
}
