//! Groupoid axioms on samples, isotropy, and the étale/proper/effective predicates.

use serde::{Deserialize, Serialize};

use super::presentation::{Arrow, GroupoidPresentation, Unit};
use crate::error::{Error, Result};
use crate::numerics::{AffineMap, Ball};
use crate::report::Report;
use crate::sample::Sampler;

/// Checks the structure maps on `samples` random units, arrows and composable
/// triples. Every sampled tuple is composable by construction.
pub fn check_groupoid_axioms(g: &GroupoidPresentation, samples: usize, seed: u64) -> Report {
    let mut r = Report::new("groupoid axioms");
    let mut s = Sampler::new(seed);
    for _ in 0..samples {
        let x = g.sample_unit(&mut s);
        let ok = (|| -> Result<bool> {
            let e = g.unit_arrow(&x)?;
            Ok(g.source(&e)? == x && g.target(&e)? == x)
        })()
        .unwrap_or(false);
        r.record("axiom.unit_ends", ok, || format!("s(e(x)) or t(e(x)) differs from x = {x}"));

        let a = g.sample_arrow(&mut s);
        let ok = (|| -> Result<bool> {
            let ia = g.inverse_of(&a)?;
            Ok(g.contains_arrow(&ia)? && g.source(&ia)? == g.target(&a)? && g.target(&ia)? == g.source(&a)?)
        })()
        .unwrap_or(false);
        r.record("axiom.inverse_ends", ok, || format!("s∘i ≠ t or t∘i ≠ s at {a}"));

        let ok = (|| -> Result<bool> { g.arrow_equal(&g.inverse_of(&g.inverse_of(&a)?)?, &a) })().unwrap_or(false);
        r.record("axiom.inverse_involution", ok, || format!("i(i(g)) ≠ g at {a}"));

        let ok = (|| -> Result<bool> {
            let l = g.multiply(&g.unit_arrow(&g.source(&a)?)?, &a)?;
            let rr = g.multiply(&a, &g.unit_arrow(&g.target(&a)?)?)?;
            Ok(g.arrow_equal(&l, &a)? && g.arrow_equal(&rr, &a)?)
        })()
        .unwrap_or(false);
        r.record("axiom.unit_law", ok, || format!("m(e∘s(g), g) or m(g, e∘t(g)) differs from g = {a}"));

        let ok = (|| -> Result<bool> {
            let ia = g.inverse_of(&a)?;
            let l = g.multiply(&a, &ia)?;
            let rr = g.multiply(&ia, &a)?;
            Ok(g.arrow_equal(&l, &g.unit_arrow(&g.source(&a)?)?)? && g.arrow_equal(&rr, &g.unit_arrow(&g.target(&a)?)?)?)
        })()
        .unwrap_or(false);
        r.record("axiom.inverse_law", ok, || format!("g·g⁻¹ or g⁻¹·g is not a unit at {a}"));

        let triple = (|| -> Result<(Arrow, Arrow)> {
            let b = g.sample_arrow_from(&g.target(&a)?, &mut s)?;
            let c = g.sample_arrow_from(&g.target(&b)?, &mut s)?;
            Ok((b, c))
        })();
        let Ok((b, c)) = triple else {
            r.fail("axiom.sampling", format!("no composable tuple after {a}"));
            continue;
        };
        let ok = (|| -> Result<bool> {
            let ab = g.multiply(&a, &b)?;
            Ok(g.source(&ab)? == g.source(&a)? && g.target(&ab)? == g.target(&b)?)
        })()
        .unwrap_or(false);
        r.record("axiom.product_ends", ok, || format!("s or t of m({a}, {b}) is wrong"));

        let ok = (|| -> Result<bool> {
            let all = g.multiply_all(&a, &b)?;
            let first = &all[0];
            for p in &all[1..] {
                if !g.arrow_equal(first, p)? {
                    return Ok(false);
                }
            }
            Ok(true)
        })()
        .unwrap_or(false);
        r.record("axiom.product_well_defined", ok, || format!("span completions disagree on m({a}, {b})"));

        let ok = (|| -> Result<bool> {
            let l = g.multiply(&g.multiply(&a, &b)?, &c)?;
            let rr = g.multiply(&a, &g.multiply(&b, &c)?)?;
            g.arrow_equal(&l, &rr)
        })()
        .unwrap_or(false);
        r.record("axiom.associativity", ok, || format!("associativity fails on ({a}, {b}, {c})"));

        let ok = (|| -> Result<bool> {
            let l = g.inverse_of(&g.multiply(&a, &b)?)?;
            let rr = g.multiply(&g.inverse_of(&b)?, &g.inverse_of(&a)?)?;
            g.arrow_equal(&l, &rr)
        })()
        .unwrap_or(false);
        r.record("axiom.inverse_of_product", ok, || format!("i(m(g,h)) ≠ m(i(h), i(g)) at ({a}, {b})"));
    }
    r
}

/// The isotropy group at x, one representative per class.
pub fn isotropy_arrows(g: &GroupoidPresentation, x: &Unit) -> Result<Vec<Arrow>> {
    if !g.contains_unit(x)? {
        return Err(Error::PointOutsideUnitSpace);
    }
    g.hom(x, x)
}

/// The local bisection through an arrow's component: t∘s⁻¹ on s(param), as a map
/// between unit components.
pub fn local_bisection(g: &GroupoidPresentation, a: &Arrow) -> Result<(usize, Ball, usize, AffineMap)> {
    let c = g
        .components
        .get(a.comp)
        .ok_or_else(|| Error::UnsupportedPresentation(format!("no component {}", a.comp)))?;
    let map = c.t.1.compose(&c.s.1.inverse()?)?;
    Ok((c.s.0, c.param.image(&c.s.1)?, c.t.0, map))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralPredicates {
    pub etale: bool,
    pub proper: bool,
    pub effective: bool,
    /// The first unit at which a predicate failed, if any.
    pub witness: Option<String>,
}

/// Étale is decided from the presentation (all s, t maps are invertible affine maps
/// of equal dimension); properness and effectiveness are checked at the probes and
/// at `samples` random units.
pub fn structural_predicates(g: &GroupoidPresentation, samples: usize, seed: u64) -> Result<StructuralPredicates> {
    let etale = g.components.iter().all(|c| {
        c.param.dim() == g.dim && c.s.1.dim() == g.dim && c.t.1.dim() == g.dim && c.s.1.inverse().is_ok() && c.t.1.inverse().is_ok()
    });
    let mut s = Sampler::new(seed);
    let mut points: Vec<Unit> = g.probes.clone();
    points.extend((0..samples).map(|_| g.sample_unit(&mut s)));
    let mut proper = true;
    let mut effective = true;
    let mut witness = None;
    for x in &points {
        // fibres of (s, t) over (x, y): finite, and bounded by the component count
        let from = g.arrows_from(x)?;
        if from.len() > g.n_components() {
            proper = false;
            witness.get_or_insert_with(|| x.to_string());
        }
        let iso = isotropy_arrows(g, x)?;
        let e = g.unit_arrow(x)?;
        for h in &iso {
            if g.arrow_equal(h, &e)? {
                continue;
            }
            let (su, _, tu, map) = local_bisection(g, h)?;
            if su == tu && map.is_identity() {
                effective = false;
                witness.get_or_insert_with(|| x.to_string());
            }
        }
    }
    Ok(StructuralPredicates {
        etale,
        proper,
        effective,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::translation::build_translation_groupoid;
    use crate::io::{gallery, standard_gallery, GalleryParams};
    use crate::numerics::{CycNum, PointC};
    use std::sync::Arc;

    #[test]
    fn gallery_groupoids_satisfy_axioms() {
        for (name, a) in standard_gallery() {
            let g = build_translation_groupoid(Arc::new(a)).unwrap();
            let r = check_groupoid_axioms(&g, 40, 7);
            assert!(r.is_ok(), "{name}: {}", r.render_text());
            let p = structural_predicates(&g, 20, 1).unwrap();
            assert!(p.etale && p.proper && p.effective, "{name}: {p:?}");
        }
    }

    #[test]
    fn cone_isotropy_orders() {
        let g = build_translation_groupoid(Arc::new(gallery(&GalleryParams::cone(3)).unwrap())).unwrap();
        let origin = Unit {
            comp: 0,
            point: PointC::zero(12, 1),
        };
        assert_eq!(isotropy_arrows(&g, &origin).unwrap().len(), 3);
        let off = Unit {
            comp: 0,
            point: PointC::scalar(CycNum::from_ratio(12, 1, 4)),
        };
        assert_eq!(isotropy_arrows(&g, &off).unwrap().len(), 1);
        let outside = Unit {
            comp: 0,
            point: PointC::scalar(CycNum::from_int(12, 2)),
        };
        assert_eq!(isotropy_arrows(&g, &outside), Err(Error::PointOutsideUnitSpace));
    }

    #[test]
    fn trivial_action_is_not_effective() {
        let ball = Ball::new(PointC::zero(4, 1), CycNum::one(4));
        let id = AffineMap::identity(4, 1);
        let g = GroupoidPresentation::action("b", ball, vec![id.clone(), id], Some(vec![vec![0, 1], vec![1, 0]])).unwrap();
        assert!(check_groupoid_axioms(&g, 20, 3).is_ok());
        let p = structural_predicates(&g, 5, 0).unwrap();
        assert!(p.etale && p.proper);
        assert!(!p.effective);
    }

    #[test]
    fn football_isotropy_at_poles() {
        let g = build_translation_groupoid(Arc::new(gallery(&GalleryParams::football(2, 3)).unwrap())).unwrap();
        let south = Unit {
            comp: 1,
            point: PointC::scalar(CycNum::from_ratio(12, 3, 2)),
        };
        assert_eq!(isotropy_arrows(&g, &south).unwrap().len(), 3);
    }
}
