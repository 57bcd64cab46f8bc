//! The two conditions of a Morita (essential) equivalence, checked on a morphism.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::groupoid::{GroupoidMorphism, GroupoidPresentation, Unit};
use crate::report::Report;
use crate::sample::Sampler;

/// Evidence for condition (i) (surjectivity up to arrows, étale certification) and
/// condition (ii) (the square is cartesian on sampled hom-sets).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoritaReport {
    pub condition_i: Report,
    pub condition_ii: Report,
    /// Target unit points that no arrow connects to the image of ψ.
    pub unreached: Vec<String>,
    pub verdict: bool,
}

impl MoritaReport {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "condition (i):");
        s.push_str(&self.condition_i.render_text());
        let _ = writeln!(s, "condition (ii):");
        s.push_str(&self.condition_ii.render_text());
        for u in &self.unreached {
            let _ = writeln!(s, "unreached: {u}");
        }
        let _ = writeln!(s, "morita verdict: {}", if self.verdict { "pass" } else { "fail" });
        s
    }
}

/// A source unit whose image is y, if the preimage is decidable and exists.
fn preimages(m: &GroupoidMorphism, y: &Unit) -> (Vec<Unit>, bool) {
    let mut out = Vec::new();
    let mut undecided = false;
    for u in 0..m.units.len() {
        match m.unit_preimage(u, y) {
            Some(Some(p)) => out.push(Unit { comp: u, point: p }),
            Some(None) => {}
            None => undecided = true,
        }
    }
    (out, undecided)
}

fn reached(m: &GroupoidMorphism, y: &Unit) -> Result<(bool, bool)> {
    let h = &m.dst;
    let mut undecided = false;
    for a in h.arrows_from(y)? {
        let (pre, und) = preimages(m, &h.target(&a)?);
        undecided |= und;
        if !pre.is_empty() {
            return Ok((true, false));
        }
    }
    Ok((false, undecided))
}

/// Probes plus every unit component center.
pub(crate) fn witness_points(h: &GroupoidPresentation) -> Vec<Unit> {
    let mut pts = h.probes.clone();
    for (c, u) in h.units.iter().enumerate() {
        let centre = Unit {
            comp: c,
            point: u.ball.center.clone(),
        };
        if !pts.contains(&centre) {
            pts.push(centre);
        }
    }
    pts
}

/// Compares Ψ: Hom(x1, x2) → Hom(ψx1, ψx2) for one pair.
fn compare_homs(m: &GroupoidMorphism, x1: &Unit, x2: &Unit, r: &mut Report) -> Result<()> {
    let (g, h) = (&m.src, &m.dst);
    let (y1, y2) = (m.apply_unit(x1)?, m.apply_unit(x2)?);
    let src_hom = g.hom(x1, x2)?;
    let images = src_hom.iter().map(|a| m.apply_arrow(a)).collect::<Result<Vec<_>>>()?;
    let mut lands = true;
    for b in &images {
        lands &= h.source(b)? == y1 && h.target(b)? == y2;
    }
    r.record("morita.eta_well_defined", lands, || format!("an arrow {x1} -> {x2} maps outside Hom({y1}, {y2})"));
    let distinct = h.dedup_arrows(images.clone())?.len() == images.len();
    r.record("morita.injective", distinct, || format!("two arrows {x1} -> {x2} have equal images"));
    let target_hom = h.hom(&y1, &y2)?;
    let mut onto = true;
    for t in &target_hom {
        let mut hit = false;
        for b in &images {
            if h.arrow_equal(t, b)? {
                hit = true;
                break;
            }
        }
        onto &= hit;
    }
    r.record("morita.surjective_on_hom", onto, || {
        format!("Hom({y1}, {y2}) has {} arrows, {} come from Hom({x1}, {x2})", target_hom.len(), images.len())
    });
    Ok(())
}

/// Condition (i): ψ is étale (structurally) and every declared witness point of
/// the target is reached by an arrow from the image of ψ. Condition (ii): on
/// `samples` pairs of related units and pairs built from preimages, Ψ is a
/// bijection of hom-sets.
pub fn check_morita(m: &GroupoidMorphism, samples: usize, seed: u64) -> MoritaReport {
    let (g, h) = (&*m.src, &*m.dst);
    let mut ri = Report::new("morita condition (i)");
    let etale = g.dim == h.dim
        && m.units.iter().all(|(_, f)| f.as_affine().map(|a| a.is_similarity() && a.inverse().is_ok()).unwrap_or(false));
    ri.record("morita.etale", etale, || "ψ is not a local isomorphism on every component".into());
    let mut unreached = Vec::new();
    for y in witness_points(h) {
        match reached(m, &y) {
            Ok((true, _)) => ri.pass("morita.surjective"),
            Ok((false, undecided)) => {
                let why = if undecided { "undecided" } else { "unreached" };
                ri.fail("morita.surjective", format!("{y} {why}"));
                unreached.push(y.to_string());
            }
            Err(e) => ri.fail("morita.surjective", format!("{y}: {e}")),
        }
    }

    let mut rii = Report::new("morita condition (ii)");
    let mut s = Sampler::new(seed);
    for _ in 0..samples {
        let x1 = g.sample_unit(&mut s);
        let related = (|| -> Result<Unit> { g.target(&g.sample_arrow_from(&x1, &mut s)?) })();
        match related.and_then(|x2| compare_homs(m, &x1, &x2, &mut rii)) {
            Ok(()) => {}
            Err(e) => rii.fail("morita.pairs", format!("{x1}: {e}")),
        }
        // pairs whose target-side hom-set is nonempty by construction
        let derived = (|| -> Result<()> {
            let y1 = m.apply_unit(&x1)?;
            let arrows = h.arrows_from(&y1)?;
            let a = &arrows[s.index(arrows.len())];
            let (pre, _) = preimages(m, &h.target(a)?);
            for x2 in pre {
                compare_homs(m, &x1, &x2, &mut rii)?;
            }
            Ok(())
        })();
        if let Err(e) = derived {
            rii.fail("morita.pairs", format!("{x1}: {e}"));
        }
    }
    let verdict = ri.is_ok() && rii.is_ok();
    MoritaReport {
        condition_i: ri,
        condition_ii: rii,
        unreached,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::build_translation_groupoid;
    use crate::groupoid::ArrowMap;
    use crate::io::{gallery, GalleryParams};
    use crate::numerics::{PointC, PolyMap};
    use std::sync::Arc;

    #[test]
    fn point_into_cone_misses_off_center_probes() {
        let pt = Arc::new(build_translation_groupoid(Arc::new(gallery(&GalleryParams::point()).unwrap())).unwrap());
        let cone = Arc::new(build_translation_groupoid(Arc::new(gallery(&GalleryParams::cone(3)).unwrap())).unwrap());
        let origin = PointC::zero(12, 1);
        let m = GroupoidMorphism {
            units: vec![(0, PolyMap::constant(12, 0, &origin))],
            arrows: ArrowMap::Table(vec![(cone.identity[0], PolyMap::constant(12, 0, &origin))]),
            src: pt,
            dst: cone,
        };
        let r = check_morita(&m, 10, 1);
        assert!(!r.verdict);
        assert!(r.condition_i.has_failure("morita.surjective"));
        assert!(r.unreached.iter().any(|u| u.contains("1/4")), "{:?}", r.unreached);
        assert!(r.condition_ii.has_failure("morita.surjective_on_hom"));
    }
}
