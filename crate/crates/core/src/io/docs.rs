//! Documents for groupoid presentations, compatible systems, 2-cells and
//! equivalence witnesses. Atlases are referenced by the hash of their canonical form.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::atlas_file::{atlas_hash, check_point, from_json, to_canonical_json, ChartDoc, MapDoc, MAX_CONDUCTOR};
use crate::atlas::Atlas;
use crate::error::{Error, Result};
use crate::functor::build_translation_groupoid;
use crate::groupoid::{ArrowComponent, GroupoidPresentation, Strategy, Unit, UnitComponent};
use crate::morita::{EquivalenceWitness, Leg, Relabeling, WitnessEntry};
use crate::numerics::{AffineMap, Ball, CycNum, Poly, PolyMap};
use crate::preorb::{CompatibleSystem, OrbNatTrans};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct BallDoc {
    center: Vec<CycNum>,
    radius2: CycNum,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct UnitDoc {
    origin: String,
    #[serde(flatten)]
    ball: BallDoc,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct SideDoc {
    unit: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<CycNum>>,
    b: Vec<CycNum>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct ComponentDoc {
    param: BallDoc,
    s: SideDoc,
    t: SideDoc,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct InverseDoc {
    component: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<CycNum>>,
    b: Vec<CycNum>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct UnitPointDoc {
    unit: usize,
    point: Vec<CycNum>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum StrategyDoc {
    Translation { atlas_hash: String, keys: Vec<[usize; 5]> },
    Action { mul: Vec<Vec<usize>> },
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct GroupoidDoc {
    conductor: u32,
    dimension: usize,
    strategy: StrategyDoc,
    units: Vec<UnitDoc>,
    components: Vec<ComponentDoc>,
    identity: Vec<usize>,
    inverse: Vec<InverseDoc>,
    #[serde(default)]
    probes: Vec<UnitPointDoc>,
}

fn ball_doc(b: &Ball) -> BallDoc {
    BallDoc {
        center: b.center.0.clone(),
        radius2: b.r2.clone(),
    }
}

fn ball_of(d: &BallDoc, m: u32, n: usize, at: &str) -> Result<Ball> {
    let c = check_point(&d.center, m, n, &format!("{at}.center"))?;
    if d.radius2.conductor() != m {
        return Err(Error::parse(format!("{at}.radius2"), "wrong conductor"));
    }
    Ok(Ball::new(c, d.radius2.clone()))
}

fn side_doc(s: &(usize, AffineMap)) -> SideDoc {
    SideDoc {
        unit: s.0,
        a: s.1.matrix().to_vec(),
        b: s.1.offset().0.clone(),
    }
}

fn map_of(a: &[Vec<CycNum>], b: &[CycNum], m: u32, at: &str) -> Result<AffineMap> {
    MapDoc { a: a.to_vec(), b: b.to_vec() }.to_map(m, at)
}

fn groupoid_doc(g: &GroupoidPresentation) -> GroupoidDoc {
    let strategy = match &g.strategy {
        Strategy::Translation(d) => StrategyDoc::Translation {
            atlas_hash: atlas_hash(&d.atlas),
            keys: d.keys.clone(),
        },
        Strategy::Action { mul } => StrategyDoc::Action { mul: mul.clone() },
    };
    GroupoidDoc {
        conductor: g.conductor,
        dimension: g.dim,
        strategy,
        units: g
            .units
            .iter()
            .map(|u| UnitDoc {
                origin: u.origin.clone(),
                ball: ball_doc(&u.ball),
            })
            .collect(),
        components: g
            .components
            .iter()
            .map(|c| ComponentDoc {
                param: ball_doc(&c.param),
                s: side_doc(&c.s),
                t: side_doc(&c.t),
            })
            .collect(),
        identity: g.identity.clone(),
        inverse: g
            .inverse
            .iter()
            .map(|(c, f)| InverseDoc {
                component: *c,
                a: f.matrix().to_vec(),
                b: f.offset().0.clone(),
            })
            .collect(),
        probes: g
            .probes
            .iter()
            .map(|u| UnitPointDoc {
                unit: u.comp,
                point: u.point.0.clone(),
            })
            .collect(),
    }
}

pub fn groupoid_to_json(g: &GroupoidPresentation) -> String {
    to_canonical_json(&groupoid_doc(g))
}

/// Parses a presentation. A translation groupoid is rebuilt from `atlas`, whose
/// hash must match, and must agree with the document component by component.
pub fn groupoid_from_json(text: &str, atlas: Option<Arc<Atlas>>) -> Result<GroupoidPresentation> {
    let doc: GroupoidDoc = from_json(text)?;
    let (m, n) = (doc.conductor, doc.dimension);
    if m == 0 || m > MAX_CONDUCTOR {
        return Err(Error::parse("conductor", format!("unsupported conductor {m}")));
    }
    match &doc.strategy {
        StrategyDoc::Translation { atlas_hash: h, .. } => {
            let a = atlas.ok_or_else(|| Error::parse("strategy", "a translation groupoid needs its source atlas"))?;
            if atlas_hash(&a) != *h {
                return Err(Error::parse("strategy.atlas_hash", "does not match the given atlas"));
            }
            let g = build_translation_groupoid(a)?;
            if groupoid_doc(&g) != doc {
                return Err(Error::parse("components", "document differs from the translation groupoid of the atlas"));
            }
            Ok(g)
        }
        StrategyDoc::Action { mul } => {
            let units = doc
                .units
                .iter()
                .enumerate()
                .map(|(k, u)| {
                    Ok(UnitComponent {
                        origin: u.origin.clone(),
                        ball: ball_of(&u.ball, m, n, &format!("units[{k}]"))?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let components = doc
                .components
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let at = format!("components[{k}]");
                    Ok(ArrowComponent {
                        param: ball_of(&c.param, m, n, &format!("{at}.param"))?,
                        s: (c.s.unit, map_of(&c.s.a, &c.s.b, m, &format!("{at}.s"))?),
                        t: (c.t.unit, map_of(&c.t.a, &c.t.b, m, &format!("{at}.t"))?),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let inverse = doc
                .inverse
                .iter()
                .enumerate()
                .map(|(k, i)| Ok((i.component, map_of(&i.a, &i.b, m, &format!("inverse[{k}]"))?)))
                .collect::<Result<Vec<_>>>()?;
            let probes = doc
                .probes
                .iter()
                .enumerate()
                .map(|(k, p)| {
                    Ok(Unit {
                        comp: p.unit,
                        point: check_point(&p.point, m, n, &format!("probes[{k}].point"))?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let nc = components.len();
            if mul.len() != nc || mul.iter().any(|row| row.len() != nc || row.iter().any(|&x| x >= nc)) {
                return Err(Error::parse("strategy.mul", "table does not match the components"));
            }
            GroupoidPresentation::new(m, n, units, components, doc.identity.clone(), inverse, probes, Strategy::Action { mul: mul.clone() })
                .map_err(|e| Error::parse("groupoid", e.to_string()))
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    exp: Vec<u32>,
    coeff: CycNum,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct LiftDoc {
    in_dim: usize,
    components: Vec<Vec<TermDoc>>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct AssignmentDoc {
    src: String,
    dst: String,
    images: Vec<MapDoc>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct SystemDoc {
    src_hash: String,
    dst_hash: String,
    theta: Vec<String>,
    embeddings: Vec<AssignmentDoc>,
    lifts: Vec<LiftDoc>,
}

fn lift_doc(f: &PolyMap) -> LiftDoc {
    LiftDoc {
        in_dim: f.in_dim,
        components: f
            .comps
            .iter()
            .map(|p| {
                p.terms
                    .iter()
                    .map(|(e, c)| TermDoc {
                        exp: e.clone(),
                        coeff: c.clone(),
                    })
                    .collect()
            })
            .collect(),
    }
}

fn lift_of(d: &LiftDoc, m: u32, at: &str) -> Result<PolyMap> {
    let mut comps = Vec::with_capacity(d.components.len());
    for (k, terms) in d.components.iter().enumerate() {
        let mut p = Poly::zero(d.in_dim);
        for t in terms {
            if t.exp.len() != d.in_dim || t.coeff.conductor() != m {
                return Err(Error::parse(format!("{at}.components[{k}]"), "term does not match the lift"));
            }
            p.add_term(t.exp.clone(), t.coeff.clone());
        }
        comps.push(p);
    }
    PolyMap::new(m, d.in_dim, comps).map_err(|e| Error::parse(at, e.to_string()))
}

fn system_doc(f: &CompatibleSystem) -> SystemDoc {
    let sid = |k: usize| f.src.chart(k).id.clone();
    SystemDoc {
        src_hash: atlas_hash(&f.src),
        dst_hash: atlas_hash(&f.dst),
        theta: f.theta.iter().map(|&t| f.dst.chart(t).id.clone()).collect(),
        embeddings: f
            .maps
            .iter()
            .map(|(&(i, j), v)| AssignmentDoc {
                src: sid(i),
                dst: sid(j),
                images: v.iter().map(MapDoc::from_map).collect(),
            })
            .collect(),
        lifts: f.lifts.iter().map(lift_doc).collect(),
    }
}

pub fn system_to_json(f: &CompatibleSystem) -> String {
    to_canonical_json(&system_doc(f))
}

fn system_of(doc: &SystemDoc, src: Arc<Atlas>, dst: Arc<Atlas>) -> Result<CompatibleSystem> {
    if atlas_hash(&src) != doc.src_hash || atlas_hash(&dst) != doc.dst_hash {
        return Err(Error::parse("src_hash", "atlas hashes do not match the given atlases"));
    }
    let theta = doc
        .theta
        .iter()
        .enumerate()
        .map(|(k, id)| dst.chart_index(id).ok_or_else(|| Error::parse(format!("theta[{k}]"), format!("unknown chart {id:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let m = src.conductor();
    let lifts = doc
        .lifts
        .iter()
        .enumerate()
        .map(|(k, l)| lift_of(l, m, &format!("lifts[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    let mut maps = BTreeMap::new();
    for (k, a) in doc.embeddings.iter().enumerate() {
        let at = format!("embeddings[{k}]");
        let (Some(i), Some(j)) = (src.chart_index(&a.src), src.chart_index(&a.dst)) else {
            return Err(Error::parse(at, "unknown chart"));
        };
        let images = a
            .images
            .iter()
            .enumerate()
            .map(|(n, d)| d.to_map(m, &format!("{at}.images[{n}]")))
            .collect::<Result<Vec<_>>>()?;
        maps.insert((i, j), images);
    }
    Ok(CompatibleSystem {
        src,
        dst,
        theta,
        maps,
        lifts,
    })
}

/// Parses a compatible system between the two given atlases. The embedding
/// assignment is taken as written; `validate_compatible_system` judges it.
pub fn system_from_json(text: &str, src: Arc<Atlas>, dst: Arc<Atlas>) -> Result<CompatibleSystem> {
    system_of(&from_json(text)?, src, dst)
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct CellDoc {
    from: SystemDoc,
    to: SystemDoc,
    components: Vec<MapDoc>,
}

pub fn cell_to_json(d: &OrbNatTrans) -> String {
    to_canonical_json(&CellDoc {
        from: system_doc(&d.f1),
        to: system_doc(&d.f2),
        components: d.comps.iter().map(MapDoc::from_map).collect(),
    })
}

pub fn cell_from_json(text: &str, src: Arc<Atlas>, dst: Arc<Atlas>) -> Result<OrbNatTrans> {
    let doc: CellDoc = from_json(text)?;
    let m = src.conductor();
    Ok(OrbNatTrans {
        f1: Arc::new(system_of(&doc.from, src.clone(), dst.clone())?),
        f2: Arc::new(system_of(&doc.to, src, dst)?),
        comps: doc
            .components
            .iter()
            .enumerate()
            .map(|(k, c)| c.to_map(m, &format!("components[{k}]")))
            .collect::<Result<Vec<_>>>()?,
    })
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct LegDoc {
    chart: String,
    #[serde(rename = "A")]
    a: Vec<Vec<CycNum>>,
    b: Vec<CycNum>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    chart: ChartDoc,
    left: LegDoc,
    right: LegDoc,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct WitnessFileDoc {
    conductor: u32,
    dimension: usize,
    entries: Vec<EntryDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    relabel: BTreeMap<String, String>,
}

fn leg_doc(l: &Leg) -> LegDoc {
    LegDoc {
        chart: l.chart.clone(),
        a: l.map.matrix().to_vec(),
        b: l.map.offset().0.clone(),
    }
}

/// A witness file: the entries and, optionally, the relabeling of chart ids the
/// second atlas was pushed forward along.
pub fn witness_to_json(w: &EquivalenceWitness, m: u32, n: usize, relabel: Option<&Relabeling>) -> String {
    to_canonical_json(&WitnessFileDoc {
        conductor: m,
        dimension: n,
        entries: w
            .entries
            .iter()
            .map(|e| EntryDoc {
                chart: ChartDoc::from_chart(&e.chart),
                left: leg_doc(&e.left),
                right: leg_doc(&e.right),
            })
            .collect(),
        relabel: relabel.map(|r| r.0.clone()).unwrap_or_default(),
    })
}

pub fn witness_from_json(text: &str) -> Result<(EquivalenceWitness, Option<Relabeling>)> {
    let doc: WitnessFileDoc = from_json(text)?;
    let (m, n) = (doc.conductor, doc.dimension);
    if m == 0 || m > MAX_CONDUCTOR {
        return Err(Error::parse("conductor", format!("unsupported conductor {m}")));
    }
    let mut entries = Vec::with_capacity(doc.entries.len());
    for (k, e) in doc.entries.iter().enumerate() {
        let at = format!("entries[{k}]");
        let leg = |l: &LegDoc, side: &str| -> Result<Leg> {
            Ok(Leg {
                chart: l.chart.clone(),
                map: map_of(&l.a, &l.b, m, &format!("{at}.{side}"))?,
            })
        };
        entries.push(WitnessEntry {
            chart: e.chart.to_chart(m, n, &format!("{at}.chart"))?,
            left: leg(&e.left, "left")?,
            right: leg(&e.right, "right")?,
        });
    }
    let relabel = (!doc.relabel.is_empty()).then_some(Relabeling(doc.relabel));
    Ok((EquivalenceWitness { entries }, relabel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{cone_pair, gallery, standard_gallery, GalleryParams};
    use crate::morita::{matching_witness, relabel_witness};
    use crate::preorb::random_gauge_cell;
    use crate::sample::Sampler;

    #[test]
    fn translation_groupoids_round_trip() {
        for (name, a) in standard_gallery() {
            let a = Arc::new(a);
            let g = build_translation_groupoid(a.clone()).unwrap();
            let text = groupoid_to_json(&g);
            let back = groupoid_from_json(&text, Some(a)).unwrap();
            assert_eq!(groupoid_to_json(&back), text, "{name}");
        }
    }

    #[test]
    fn translation_groupoid_needs_matching_atlas() {
        let a = Arc::new(gallery(&GalleryParams::cone(3)).unwrap());
        let b = Arc::new(gallery(&GalleryParams::cone(2)).unwrap());
        let text = groupoid_to_json(&build_translation_groupoid(a).unwrap());
        assert!(matches!(groupoid_from_json(&text, Some(b)), Err(Error::Parse { .. })));
        assert!(matches!(groupoid_from_json(&text, None), Err(Error::Parse { .. })));
    }

    #[test]
    fn action_groupoid_round_trip() {
        let ball = Ball::new(crate::numerics::PointC::zero(12, 1), CycNum::one(12));
        let rot: Vec<AffineMap> = (0..3).map(|k| AffineMap::scalar(&CycNum::zeta(12, 4 * k), 1)).collect();
        let g = GroupoidPresentation::action("b", ball, rot, None).unwrap();
        let text = groupoid_to_json(&g);
        let back = groupoid_from_json(&text, None).unwrap();
        assert!(back.same_structure(&g));
        assert_eq!(groupoid_to_json(&back), text);
    }

    #[test]
    fn systems_and_cells_round_trip() {
        let a = Arc::new(cone_pair(3).unwrap());
        let cell = random_gauge_cell(&a, &mut Sampler::new(3));
        let text = cell_to_json(&cell);
        let back = cell_from_json(&text, a.clone(), a.clone()).unwrap();
        assert_eq!(back.comps, cell.comps);
        assert_eq!(*back.f1, *cell.f1);
        assert_eq!(*back.f2, *cell.f2);
        let s = system_to_json(&cell.f1);
        assert_eq!(system_to_json(&system_from_json(&s, a.clone(), a).unwrap()), s);
    }

    #[test]
    fn witnesses_round_trip() {
        let a = gallery(&GalleryParams::football(2, 3)).unwrap();
        let phi = Relabeling(a.charts().iter().map(|c| (c.id.clone(), format!("{}'", c.id))).collect());
        let w = relabel_witness(&a, &phi);
        let text = witness_to_json(&w, 12, 1, Some(&phi));
        let (back, r) = witness_from_json(&text).unwrap();
        assert_eq!(back, w);
        assert_eq!(r, Some(phi));
        let c = gallery(&GalleryParams::cone(3)).unwrap();
        let w = matching_witness(&c, &c).unwrap();
        assert_eq!(witness_from_json(&witness_to_json(&w, 12, 1, None)).unwrap(), (w, None));
    }
}
