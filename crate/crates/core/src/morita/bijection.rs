//! Side-by-side decision of atlas equivalence and Morita equivalence of the
//! translation groupoids, on one pair of atlases.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::check::{check_morita, witness_points};
use super::equivalence::{atlases_equivalent, common_refinement, find_witness, matching_witness, EquivalenceWitness};
use super::inclusion::inclusion_morphism;
use crate::atlas::Atlas;
use crate::functor::build_translation_groupoid;
use crate::groupoid::{isotropy_arrows, GroupoidPresentation};
use crate::sample::Sampler;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Equivalent,
    Inequivalent,
    /// Nothing found at the search bound.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BijectionReport {
    pub atlas_verdict: Verdict,
    pub groupoid_verdict: Verdict,
    /// Both verdicts are decided and equal.
    pub agree: bool,
    pub notes: Vec<String>,
}

/// Isotropy orders over the declared points and `samples` random units.
fn isotropy_orders(g: &GroupoidPresentation, samples: usize, seed: u64) -> BTreeSet<usize> {
    let mut s = Sampler::new(seed);
    let mut pts = witness_points(g);
    pts.extend((0..samples).map(|_| g.sample_unit(&mut s)));
    pts.iter().filter_map(|x| isotropy_arrows(g, x).ok().map(|v| v.len())).collect()
}

/// Orders of chart stabilizers at the same points, computed on the atlas.
fn stabilizer_orders(a: &Atlas, g: &GroupoidPresentation, samples: usize, seed: u64) -> BTreeSet<usize> {
    let mut s = Sampler::new(seed);
    let mut pts = witness_points(g);
    pts.extend((0..samples).map(|_| g.sample_unit(&mut s)));
    pts.iter()
        .filter_map(|x| a.chart(x.comp).stabilizer_indices(&x.point).ok().map(|v| v.len()))
        .collect()
}

/// Decides U1 ~ U2 on the atlas side (invariants, then a witness) and
/// F(U1) ~ F(U2) on the groupoid side (invariants, then Morita morphisms into
/// the common refinement). The two verdicts should agree.
pub fn bijection_demo(
    u1: &Arc<Atlas>,
    u2: &Arc<Atlas>,
    witness: Option<&EquivalenceWitness>,
    samples: usize,
    seed: u64,
) -> BijectionReport {
    let mut notes = Vec::new();
    let gs = (build_translation_groupoid(u1.clone()), build_translation_groupoid(u2.clone()));
    let (g1, g2) = match gs {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => {
            for e in [a.err(), b.err()].into_iter().flatten() {
                notes.push(format!("invalid input: {e}"));
            }
            return BijectionReport {
                atlas_verdict: Verdict::Unknown,
                groupoid_verdict: Verdict::Unknown,
                agree: false,
                notes,
            };
        }
    };

    let atlas_verdict = if u1.dim() != u2.dim() {
        notes.push(format!("atlas: dimensions {} and {} differ", u1.dim(), u2.dim()));
        Verdict::Inequivalent
    } else {
        let (o1, o2) = (stabilizer_orders(u1, &g1, samples, seed), stabilizer_orders(u2, &g2, samples, seed));
        if o1 != o2 {
            notes.push(format!("atlas: stabilizer orders {o1:?} and {o2:?} differ"));
            Verdict::Inequivalent
        } else {
            let found = witness
                .cloned()
                .or_else(|| matching_witness(u1, u2).filter(|w| atlases_equivalent(u1, u2, w).unwrap_or(false)))
                .or_else(|| find_witness(u1, u2));
            match found.as_ref().map(|w| atlases_equivalent(u1, u2, w)) {
                Some(Ok(true)) => {
                    notes.push(format!("atlas: witness with {} charts", found.map(|w| w.entries.len()).unwrap_or(0)));
                    Verdict::Equivalent
                }
                Some(Ok(false)) => {
                    notes.push("atlas: witness does not cover, not found at this bound".into());
                    Verdict::Unknown
                }
                Some(Err(e)) => {
                    notes.push(format!("atlas: {e}"));
                    Verdict::Unknown
                }
                None => {
                    notes.push("atlas: no witness found at this bound".into());
                    Verdict::Unknown
                }
            }
        }
    };

    let groupoid_verdict = if g1.dim != g2.dim {
        notes.push("groupoid: unit space dimensions differ".into());
        Verdict::Inequivalent
    } else {
        let (o1, o2) = (isotropy_orders(&g1, samples, seed), isotropy_orders(&g2, samples, seed));
        if o1 != o2 {
            notes.push(format!("groupoid: isotropy orders {o1:?} and {o2:?} differ"));
            Verdict::Inequivalent
        } else {
            let w = witness
                .cloned()
                .or_else(|| matching_witness(u1, u2).filter(|w| atlases_equivalent(u1, u2, w).unwrap_or(false)))
                .or_else(|| find_witness(u1, u2));
            let refined = w.ok_or_else(|| "no witness".to_string()).and_then(|w| common_refinement(u1, u2, &w).map_err(|e| e.to_string()));
            match refined {
                Ok(cr) => {
                    let mut both = true;
                    for (name, u, theta) in [("left", u1, &cr.left), ("right", u2, &cr.right)] {
                        let ok = inclusion_morphism(u, &cr.atlas, theta.clone())
                            .map(|m| check_morita(&m, samples.min(64), seed).verdict)
                            .unwrap_or(false);
                        if !ok {
                            notes.push(format!("groupoid: {name} inclusion into the common refinement is not Morita"));
                        }
                        both &= ok;
                    }
                    if both {
                        notes.push(format!("groupoid: Morita through a refinement with {} charts", cr.atlas.n_charts()));
                        Verdict::Equivalent
                    } else {
                        Verdict::Unknown
                    }
                }
                Err(e) => {
                    notes.push(format!("groupoid: no common refinement ({e}), not found at this bound"));
                    Verdict::Unknown
                }
            }
        }
    };
    let agree = atlas_verdict == groupoid_verdict && atlas_verdict != Verdict::Unknown;
    BijectionReport {
        atlas_verdict,
        groupoid_verdict,
        agree,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{gallery, GalleryParams};
    use crate::morita::{pushforward_atlas, relabel_witness, Relabeling};
    use num_rational::BigRational;

    fn shared(p: GalleryParams) -> Arc<Atlas> {
        Arc::new(gallery(&p).unwrap())
    }

    #[test]
    fn equivalent_pairs_agree() {
        let r = |p: i64, q: i64| BigRational::new(p.into(), q.into());
        let pairs = [
            (shared(GalleryParams::cone(3)), shared(GalleryParams::cone(3).with_radius(r(3, 4)))),
            (
                shared(GalleryParams::teardrop(3).with_radius(r(1, 10))),
                shared(GalleryParams::teardrop(3).with_radius(r(1, 20))),
            ),
        ];
        for (a, b) in pairs {
            let rep = bijection_demo(&a, &b, None, 10, 1);
            assert!(rep.agree && rep.atlas_verdict == Verdict::Equivalent, "{rep:?}");
        }
        let a = shared(GalleryParams::football(2, 3));
        let phi = Relabeling(a.charts().iter().map(|c| (c.id.clone(), format!("{}#b", c.id))).collect());
        let b = Arc::new(pushforward_atlas(&phi, &a).unwrap());
        let w = relabel_witness(&a, &phi);
        let rep = bijection_demo(&a, &b, Some(&w), 10, 1);
        assert!(rep.agree && rep.groupoid_verdict == Verdict::Equivalent, "{rep:?}");
    }

    #[test]
    fn inequivalent_pairs_agree() {
        let pairs = [
            (GalleryParams::cone(3), GalleryParams::cone(2)),
            (GalleryParams::cone(3), GalleryParams::global_quotient(2, 2)),
            (GalleryParams::football(2, 3), GalleryParams::teardrop(3)),
        ];
        for (a, b) in pairs {
            let rep = bijection_demo(&shared(a), &shared(b), None, 10, 1);
            assert!(rep.agree && rep.atlas_verdict == Verdict::Inequivalent, "{rep:?}");
        }
    }
}
