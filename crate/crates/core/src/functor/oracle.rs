//! Comparisons of F(𝒰) against independent descriptions: the action groupoid of a
//! single chart, and the stabilizer orders of the charts.

use std::sync::Arc;

use super::translation::{arrow_of_triple, build_translation_groupoid, Triple};
use crate::atlas::{Atlas, GroupTable};
use crate::error::{Error, Result};
use crate::groupoid::{isotropy_arrows, Arrow, GroupoidPresentation, Strategy, Unit};
use crate::numerics::AffineMap;
use crate::report::Report;
use crate::sample::Sampler;

/// For a single-chart atlas (B, G): (x, g) ↦ [1, x, g] is a bijection from the
/// action groupoid G ⋉ B onto the arrows of F(𝒰) over each sampled x, and carries
/// s, t, e, i and m to the action formulas.
pub fn check_action_oracle(a: &Arc<Atlas>, samples: usize, seed: u64) -> Result<Report> {
    if a.n_charts() != 1 {
        return Err(Error::UnsupportedPresentation("the action oracle needs a single-chart atlas".into()));
    }
    let g = build_translation_groupoid(a.clone())?;
    let c = a.chart(0);
    let act = GroupoidPresentation::action(&c.id, c.domain.clone(), c.group.clone(), None)?;
    let t = GroupTable::build(&c.group).ok_or_else(|| Error::InvalidChart("group table".into()))?;
    let id = AffineMap::identity(a.conductor(), a.dim());
    let tau = |x: &Unit, k: usize| -> Result<Arrow> {
        arrow_of_triple(
            &g,
            &Triple {
                k: 0,
                left: (0, id.clone()),
                point: x.point.clone(),
                right: (0, c.group[k].clone()),
            },
        )
    };
    let mut r = Report::new("action groupoid oracle");
    let mut s = Sampler::new(seed);
    let order = c.order();
    for n in 0..samples {
        let x = if n == 0 { Unit { comp: 0, point: c.domain.center.clone() } } else { g.sample_unit(&mut s) };
        let ok = (|| -> Result<[bool; 5]> {
            let taus = (0..order).map(|k| tau(&x, k)).collect::<Result<Vec<_>>>()?;
            let mut ends = true;
            for (k, a) in taus.iter().enumerate() {
                let oracle = Arrow { comp: k, point: x.point.clone() };
                ends &= g.source(a)? == act.source(&oracle)? && g.target(a)? == act.target(&oracle)?;
            }
            // injective: distinct elements give distinct classes; surjective: every
            // arrow out of x is one of them
            let mut distinct = true;
            for i in 0..order {
                for j in i + 1..order {
                    if g.target(&taus[i])? == g.target(&taus[j])? {
                        distinct &= !g.arrow_equal(&taus[i], &taus[j])?;
                    }
                }
            }
            let mut onto = true;
            for b in g.arrows_from(&x)? {
                let mut hit = false;
                for a in &taus {
                    if g.target(a)? == g.target(&b)? && g.arrow_equal(a, &b)? {
                        hit = true;
                        break;
                    }
                }
                onto &= hit;
            }
            let unit = g.arrow_equal(&g.unit_arrow(&x)?, &taus[t.identity])?;
            let k = s.index(order);
            let h = s.index(order);
            let gx = g.target(&taus[k])?;
            let lhs = g.multiply(&taus[k], &tau(&gx, h)?)?;
            let mut algebra = g.arrow_equal(&lhs, &taus[t.mul[h][k]])?;
            algebra &= g.arrow_equal(&g.inverse_of(&taus[k])?, &tau(&gx, t.inv[k])?)?;
            let prod = act.multiply(&Arrow { comp: k, point: x.point.clone() }, &Arrow { comp: h, point: gx.point.clone() })?;
            algebra &= prod.comp == t.mul[h][k];
            Ok([ends, distinct, onto, unit, algebra])
        })();
        let [ends, distinct, onto, unit, algebra] = ok.unwrap_or([false; 5]);
        r.record("oracle.ends", ends, || format!("s or t differ from (x, g(x)) at {x}"));
        r.record("oracle.injective", distinct, || format!("two group elements give one arrow at {x}"));
        r.record("oracle.surjective", onto, || format!("an arrow out of {x} is not of the form (x, g)"));
        r.record("oracle.unit", unit, || format!("e({x}) differs from (x, 1)"));
        r.record("oracle.algebra", algebra, || format!("m or i differs from the action formulas at {x}"));
    }
    Ok(r)
}

/// |Iso(x)| equals the stabilizer order of x in its chart, at the probes and at
/// `samples` random units of a translation groupoid.
pub fn check_isotropy(g: &GroupoidPresentation, samples: usize, seed: u64) -> Result<Report> {
    let Strategy::Translation(data) = &g.strategy else {
        return Err(Error::UnsupportedPresentation("not a translation groupoid".into()));
    };
    let mut r = Report::new("isotropy");
    let mut s = Sampler::new(seed);
    let mut pts = g.probes.clone();
    pts.extend((0..samples).map(|_| g.sample_unit(&mut s)));
    for x in pts {
        let stab = data.atlas.chart(x.comp).stabilizer_indices(&x.point)?.len();
        let iso = isotropy_arrows(g, &x)?.len();
        r.record("isotropy.order", iso == stab, || format!("|Iso({x})| = {iso}, stabilizer order {stab}"));
    }
    Ok(r)
}
