//! Rebuilding an atlas from an étale groupoid with finite isotropy, and the
//! comparison morphism F(R(G)) → G.

use std::collections::HashSet;
use std::sync::Arc;

use super::check::witness_points;
use super::equivalence::{chart_embedding_ok, EquivalenceWitness, Leg, WitnessEntry};
use crate::atlas::{close_embeddings, validate_atlas, Atlas, AtlasParts, Chart, Embedding, OracleSpec};
use crate::error::{Error, Result};
use crate::functor::{build_translation_groupoid, triple_of_arrow};
use crate::groupoid::{isotropy_arrows, local_bisection, Arrow, ArrowMap, GroupoidMorphism, GroupoidPresentation, Unit};
use crate::numerics::{AffineMap, Ball, PolyMap};
use crate::sample::Sampler;

const MAX_HALVINGS: usize = 40;
const MAX_ROUNDS: usize = 400;

/// R(G) with the unit component every chart lives in. Chart coordinates are the
/// coordinates of that component.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub atlas: Arc<Atlas>,
    pub unit_of: Vec<usize>,
    /// Points around which no admissible chart was found.
    pub skipped: Vec<String>,
}

/// A bisection germ: source component, domain, target component, map.
type Germ = (usize, Ball, usize, AffineMap);

struct Candidate {
    point: Unit,
    ball: Ball,
    group: Vec<AffineMap>,
}

fn germs_from(g: &GroupoidPresentation, u: usize) -> Result<Vec<Germ>> {
    let mut out = Vec::new();
    for c in 0..g.n_components() {
        if g.components[c].s.0 == u {
            let a = Arrow {
                comp: c,
                point: g.components[c].param.center.clone(),
            };
            out.push(local_bisection(g, &a)?);
        }
    }
    Ok(out)
}

/// Whether ball `b` sits cleanly in its component: inside the unit ball, each
/// bisection domain either misses it or contains it, and non-group bisections
/// from the component back to itself move it off itself.
fn self_clean(g: &GroupoidPresentation, u: usize, b: &Ball, group: &[AffineMap], germs: &[Germ]) -> Result<bool> {
    if !g.units[u].ball.contains_ball(b)? {
        return Ok(false);
    }
    for (_, dom, tu, map) in germs {
        if !dom.intersects(b)? {
            continue;
        }
        if !dom.contains_ball(b)? {
            return Ok(false);
        }
        if *tu == u && !group.contains(map) && b.image(map)?.intersects(b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn candidate(g: &GroupoidPresentation, x: &Unit, germs: &[Germ]) -> Result<Option<Candidate>> {
    let mut group: Vec<AffineMap> = Vec::new();
    let mut doms = Vec::new();
    for a in isotropy_arrows(g, x)? {
        let (_, dom, _, map) = local_bisection(g, &a)?;
        if !group.contains(&map) {
            group.push(map);
            doms.push(dom);
        }
    }
    let mut ball = Ball::new(x.point.clone(), g.units[x.comp].ball.r2.clone());
    for _ in 0..MAX_HALVINGS {
        let mut ok = true;
        for (d, f) in doms.iter().zip(&group) {
            ok &= d.contains_ball(&ball)? && ball.image(f)? == ball;
        }
        if ok && self_clean(g, x.comp, &ball, &group, germs)? {
            return Ok(Some(Candidate {
                point: x.clone(),
                ball,
                group,
            }));
        }
        ball = ball.halved();
    }
    Ok(None)
}

/// How the image of chart p under a bisection meets chart q.
enum Meet {
    Apart,
    Nested(AffineMap),
    Clash,
}

fn meet(p: &Candidate, q: &Candidate, germs: &[Germ], same: bool) -> Result<Vec<Meet>> {
    let mut out = Vec::new();
    for (_, dom, tu, map) in germs {
        if *tu != q.point.comp || !dom.contains_ball(&p.ball)? {
            continue;
        }
        if same && p.group.contains(map) {
            continue;
        }
        let img = p.ball.image(map)?;
        out.push(if !img.intersects(&q.ball)? {
            Meet::Apart
        } else if q.ball.contains_ball(&img)? && img != q.ball {
            Meet::Nested(map.clone())
        } else if !same && img.contains_ball(&q.ball)? && img != q.ball {
            // the inverse germ nests q in p
            Meet::Apart
        } else {
            Meet::Clash
        });
    }
    Ok(out)
}

/// Builds R(G): one chart around every probe, every component center and
/// `samples` random units. Each chart carries the isotropy germs at its center
/// and is shrunk until the images of all charts under the bisections of G are
/// nested or disjoint. Nested images become embeddings.
pub fn reconstruct_atlas(g: &GroupoidPresentation, samples: usize, seed: u64) -> Result<Reconstruction> {
    let mut s = Sampler::new(seed);
    let mut points = witness_points(g);
    for _ in 0..samples {
        let x = g.sample_unit(&mut s);
        if !points.contains(&x) {
            points.push(x);
        }
    }
    let germs: Vec<Vec<Germ>> = (0..g.units.len()).map(|u| germs_from(g, u)).collect::<Result<_>>()?;
    let mut cands = Vec::new();
    let mut skipped = Vec::new();
    for x in &points {
        match candidate(g, x, &germs[x.comp])? {
            Some(c) => cands.push(c),
            None => skipped.push(x.to_string()),
        }
    }
    if cands.is_empty() {
        return Err(Error::UnsupportedPresentation("no admissible chart around any point".into()));
    }
    // Shrink the larger ball of any clashing pair until the configuration is laminar.
    let mut rounds = 0;
    let embeddings = loop {
        rounds += 1;
        if rounds > MAX_ROUNDS {
            return Err(Error::UnsupportedPresentation("chart shrinking did not settle".into()));
        }
        let mut clash = None;
        let mut embs = Vec::new();
        'outer: for p in 0..cands.len() {
            for q in 0..cands.len() {
                for m in meet(&cands[p], &cands[q], &germs[cands[p].point.comp], p == q)? {
                    match m {
                        Meet::Apart => {}
                        Meet::Nested(map) if p != q => embs.push(Embedding { src: p, dst: q, map }),
                        _ => {
                            clash = Some((p, q));
                            break 'outer;
                        }
                    }
                }
            }
        }
        let Some((p, q)) = clash else { break embs };
        let bigger = if cands[p].ball.r2_f64() >= cands[q].ball.r2_f64() { p } else { q };
        cands[bigger].ball = cands[bigger].ball.halved();
    };

    let mut seen = HashSet::new();
    let mut charts = Vec::with_capacity(cands.len());
    for (n, c) in cands.iter().enumerate() {
        let origin = &g.units[c.point.comp].origin;
        let mut id = format!("{origin}@{n}");
        while !seen.insert(id.clone()) {
            id.push('\'');
        }
        charts.push(Chart::new(id, c.ball.clone(), c.group.clone()));
    }
    let embeddings: Vec<Embedding> = embeddings
        .into_iter()
        .filter(|e| chart_embedding_ok(&charts[e.src], &charts[e.dst], &e.map).unwrap_or(false))
        .collect();
    let mut parts = AtlasParts {
        conductor: g.conductor,
        dim: g.dim,
        probes: cands.iter().enumerate().map(|(n, c)| (n, c.point.point.clone())).collect(),
        charts,
        embeddings,
        oracle: OracleSpec::Gluing,
        witnesses: Vec::new(),
    };
    close_embeddings(&mut parts)?;
    let atlas = Atlas::new(parts)?;
    let v = validate_atlas(&atlas, 0, 0);
    if !v.is_ok() {
        let first = v.failing().next().map(|c| format!("{}: {:?}", c.name, c.counterexamples.first())).unwrap_or_default();
        return Err(Error::InvalidAtlas(format!("reconstructed atlas fails {first}")));
    }
    Ok(Reconstruction {
        atlas: Arc::new(atlas),
        unit_of: cands.iter().map(|c| c.point.comp).collect(),
        skipped,
    })
}

/// The arrow of G from x realizing the germ `map` into component `v`.
fn realize(g: &GroupoidPresentation, x: &Unit, v: usize, map: &AffineMap) -> Result<Arrow> {
    let y = Unit {
        comp: v,
        point: map.apply(&x.point)?,
    };
    let direct = g.arrows_from(x)?;
    for a in &direct {
        if g.target(a)? == y && local_bisection(g, a)?.3 == *map {
            return Ok(a.clone());
        }
    }
    for a in &direct {
        let (_, _, w, first) = local_bisection(g, a)?;
        let rest = map.compose(&first.inverse()?)?;
        for b in g.arrows_from(&g.target(a)?)? {
            let (_, _, w2, second) = local_bisection(g, &b)?;
            if w2 == v && second == rest && g.target(&b)? == y && w == g.source(&b)?.comp {
                return g.multiply(a, &b);
            }
        }
    }
    Err(Error::UnsupportedPresentation(format!("no arrow of the groupoid realizes {map} at {x}")))
}

/// F(R(G)) → G: the identity on units, and the arrow of (λ_ki, λ_kj) at x goes to
/// the arrow of G from λ_ki(x) to λ_kj(x) with bisection λ_kj∘λ_ki⁻¹.
pub fn reconstruction_morita_morphism(r: &Reconstruction, g: Arc<GroupoidPresentation>) -> Result<GroupoidMorphism> {
    let fr = Arc::new(build_translation_groupoid(r.atlas.clone())?);
    let units = r
        .unit_of
        .iter()
        .map(|&u| (u, PolyMap::identity(g.conductor, g.dim)))
        .collect();
    let unit_of = r.unit_of.clone();
    let (src, dst) = (fr.clone(), g.clone());
    let psi = move |a: &Arrow| -> Result<Arrow> {
        let t = triple_of_arrow(&src, a)?;
        let x = Unit {
            comp: unit_of[t.k],
            point: t.point.clone(),
        };
        let ai = realize(&dst, &x, unit_of[t.left.0], &t.left.1)?;
        let aj = realize(&dst, &x, unit_of[t.right.0], &t.right.1)?;
        dst.multiply(&dst.inverse_of(&ai)?, &aj)
    };
    Ok(GroupoidMorphism {
        src: fr,
        dst: g,
        units,
        arrows: ArrowMap::Pointwise(Arc::new(psi)),
    })
}

/// Identity legs from each reconstructed chart to the chart of `u` it came from,
/// valid when G = F(u).
pub fn reconstruction_witness(r: &Reconstruction, u: &Atlas) -> EquivalenceWitness {
    let id = AffineMap::identity(u.conductor(), u.dim());
    EquivalenceWitness {
        entries: r
            .atlas
            .charts()
            .iter()
            .zip(&r.unit_of)
            .map(|(c, &k)| WitnessEntry {
                chart: c.clone(),
                left: Leg {
                    chart: c.id.clone(),
                    map: id.clone(),
                },
                right: Leg {
                    chart: u.chart(k).id.clone(),
                    map: id.clone(),
                },
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{gallery, standard_gallery, GalleryParams};
    use crate::morita::{atlases_equivalent, check_morita};

    #[test]
    fn reconstruction_of_cone_is_morita() {
        let u = Arc::new(gallery(&GalleryParams::cone(3)).unwrap());
        let g = Arc::new(build_translation_groupoid(u.clone()).unwrap());
        let r = reconstruct_atlas(&g, 4, 1).unwrap();
        assert!(r.skipped.is_empty(), "{:?}", r.skipped);
        let m = reconstruction_morita_morphism(&r, g).unwrap();
        let rep = check_morita(&m, 30, 2);
        assert!(rep.verdict, "{}", rep.render_text());
        assert_eq!(atlases_equivalent(&r.atlas, &u, &reconstruction_witness(&r, &u)), Ok(true));
    }

    #[test]
    fn reconstruction_over_gallery() {
        for (name, u) in standard_gallery() {
            let u = Arc::new(u);
            let g = Arc::new(build_translation_groupoid(u.clone()).unwrap());
            let r = reconstruct_atlas(&g, 2, 3).unwrap_or_else(|e| panic!("{name}: {e}"));
            let m = reconstruction_morita_morphism(&r, g).unwrap();
            let rep = check_morita(&m, 20, 5);
            assert!(rep.verdict, "{name}: {}", rep.render_text());
            let w = reconstruction_witness(&r, &u);
            assert_eq!(atlases_equivalent(&r.atlas, &u, &w), Ok(true), "{name}");
        }
    }
}
