//! Compatible systems: the 1-cells between atlases.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::atlas::Atlas;
use crate::error::{Error, Result};
use crate::numerics::{AffineMap, PolyMap};
use crate::report::Report;
use crate::sample::Sampler;

/// A morphism of atlases. `maps[(i, j)][n]` is the image of the n-th element of
/// `src.embeddings_between(i, j)` (group elements when i = j); it is an element of
/// `dst.embeddings_between(theta[i], theta[j])`.
#[derive(Clone, Debug)]
pub struct CompatibleSystem {
    pub src: Arc<Atlas>,
    pub dst: Arc<Atlas>,
    pub theta: Vec<usize>,
    pub maps: BTreeMap<(usize, usize), Vec<AffineMap>>,
    pub lifts: Vec<PolyMap>,
}

impl PartialEq for CompatibleSystem {
    fn eq(&self, other: &Self) -> bool {
        same_atlas(&self.src, &other.src)
            && same_atlas(&self.dst, &other.dst)
            && self.theta == other.theta
            && self.maps == other.maps
            && self.lifts == other.lifts
    }
}

impl Eq for CompatibleSystem {}

pub(crate) fn same_atlas(a: &Arc<Atlas>, b: &Arc<Atlas>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Every (src, dst) chart pair with a nonempty embedding set, including i = i.
pub(crate) fn embedding_pairs(a: &Atlas) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..a.n_charts() {
        for j in 0..a.n_charts() {
            if !a.embeddings_between(i, j).is_empty() {
                out.push((i, j));
            }
        }
    }
    out
}

impl CompatibleSystem {
    /// Derives the embedding assignment from the lifts: f̃(λ) is the unique dst
    /// embedding μ with lift_j∘λ = μ∘lift_i.
    pub fn solve(src: Arc<Atlas>, dst: Arc<Atlas>, theta: Vec<usize>, lifts: Vec<PolyMap>) -> Result<Self> {
        check_shapes(&src, &dst, &theta, &lifts)?;
        let mut maps = BTreeMap::new();
        for (i, j) in embedding_pairs(&src) {
            let cands = dst.embeddings_between(theta[i], theta[j]);
            let mut row = Vec::new();
            for lam in src.embeddings_between(i, j) {
                let lhs = lifts[j].after_affine(lam)?;
                let mut found = None;
                for mu in cands {
                    if lifts[i].then_affine(mu)? == lhs {
                        found = Some(mu.clone());
                        break;
                    }
                }
                row.push(found.ok_or_else(|| {
                    Error::InvalidSystem(format!(
                        "no embedding of {} into {} matches {lam} from {} to {}",
                        dst.chart(theta[i]).id,
                        dst.chart(theta[j]).id,
                        src.chart(i).id,
                        src.chart(j).id
                    ))
                })?);
            }
            maps.insert((i, j), row);
        }
        Ok(CompatibleSystem {
            src,
            dst,
            theta,
            maps,
            lifts,
        })
    }

    /// The identity system 1_𝒰.
    pub fn identity(a: Arc<Atlas>) -> Self {
        let m = a.conductor();
        let n = a.dim();
        let maps = embedding_pairs(&a)
            .into_iter()
            .map(|(i, j)| ((i, j), a.embeddings_between(i, j).to_vec()))
            .collect();
        CompatibleSystem {
            theta: (0..a.n_charts()).collect(),
            lifts: vec![PolyMap::identity(m, n); a.n_charts()],
            maps,
            src: a.clone(),
            dst: a,
        }
    }

    /// Self-system of an atlas twisted by one group element a_i per chart:
    /// lifts a_i and f̃(λ) = a_j∘λ∘a_i⁻¹.
    pub fn gauge(a: Arc<Atlas>, twist: &[usize]) -> Result<Self> {
        if twist.len() != a.n_charts() {
            return Err(Error::InvalidSystem("one twist per chart required".into()));
        }
        let el = |i: usize| &a.chart(i).group[twist[i]];
        let mut maps = BTreeMap::new();
        for (i, j) in embedding_pairs(&a) {
            let inv = el(i).inverse()?;
            let row = a
                .embeddings_between(i, j)
                .iter()
                .map(|lam| el(j).compose(lam)?.compose(&inv))
                .collect::<Result<Vec<_>>>()?;
            maps.insert((i, j), row);
        }
        Ok(CompatibleSystem {
            theta: (0..a.n_charts()).collect(),
            lifts: (0..a.n_charts()).map(|i| PolyMap::from_affine(el(i))).collect(),
            maps,
            src: a.clone(),
            dst: a,
        })
    }

    /// The image of an arbitrary src embedding λ: chart i → chart j.
    pub fn map_embedding(&self, i: usize, j: usize, lam: &AffineMap) -> Result<&AffineMap> {
        let idx = self
            .src
            .emb(i, j)
            .and_then(|s| s.index(lam))
            .ok_or_else(|| Error::InvalidSystem(format!("{lam} is not an embedding from {} to {}", i, j)))?;
        self.maps
            .get(&(i, j))
            .and_then(|row| row.get(idx))
            .ok_or_else(|| Error::InvalidSystem(format!("no image recorded for an embedding {i} -> {j}")))
    }
}

fn check_shapes(src: &Atlas, dst: &Atlas, theta: &[usize], lifts: &[PolyMap]) -> Result<()> {
    if theta.len() != src.n_charts() || lifts.len() != src.n_charts() {
        return Err(Error::InvalidSystem("one chart image and one lift per source chart required".into()));
    }
    if theta.iter().any(|&t| t >= dst.n_charts()) {
        return Err(Error::InvalidSystem("chart assignment points past the target atlas".into()));
    }
    for f in lifts {
        if f.in_dim != src.dim() || f.out_dim() != dst.dim() || f.m != dst.conductor() || src.conductor() != dst.conductor() {
            return Err(Error::InvalidSystem("lift has the wrong shape".into()));
        }
    }
    Ok(())
}

/// Checks the embedding assignment lands in the right torsors, preserves
/// composition and identities, satisfies the cube condition, and that lifts map
/// chart balls into chart balls.
pub fn validate_compatible_system(f: &CompatibleSystem) -> Report {
    let mut r = Report::new("compatible system");
    if let Err(e) = check_shapes(&f.src, &f.dst, &f.theta, &f.lifts) {
        r.fail("system.shape", e.to_string());
        return r;
    }
    let (src, dst) = (&*f.src, &*f.dst);
    let pairs = embedding_pairs(src);
    for &(i, j) in &pairs {
        let Some(row) = f.maps.get(&(i, j)) else {
            r.fail("system.assignment", format!("no images for {} -> {}", src.chart(i).id, src.chart(j).id));
            continue;
        };
        let lams = src.embeddings_between(i, j);
        r.record("system.assignment", row.len() == lams.len(), || {
            format!("{} -> {}: {} images for {} embeddings", src.chart(i).id, src.chart(j).id, row.len(), lams.len())
        });
        for (lam, mu) in lams.iter().zip(row) {
            let (ti, tj) = (f.theta[i], f.theta[j]);
            r.record("system.torsor", dst.is_embedding(ti, tj, mu), || {
                format!("image of {lam} is not an embedding {} -> {}", dst.chart(ti).id, dst.chart(tj).id)
            });
            // cube condition
            let ok = match (f.lifts[j].after_affine(lam), f.lifts[i].then_affine(mu)) {
                (Ok(a), Ok(b)) => a == b,
                _ => false,
            };
            r.record("system.cube", ok, || {
                format!("lift_{}∘{lam} differs from {mu}∘lift_{}", src.chart(j).id, src.chart(i).id)
            });
        }
        if i == j {
            let idx = lams.iter().position(|g| g.is_identity());
            r.record("system.identity", idx.map(|k| row.get(k).map(|g| g.is_identity()).unwrap_or(false)) == Some(true), || {
                format!("identity of {} not sent to an identity", src.chart(i).id)
            });
        }
    }
    for &(i, j) in &pairs {
        for &(j2, k) in &pairs {
            if j2 != j {
                continue;
            }
            for (a, lam) in src.embeddings_between(i, j).iter().enumerate() {
                for (b, nu) in src.embeddings_between(j, k).iter().enumerate() {
                    let ok = (|| -> Result<bool> {
                        let comp = nu.compose(lam)?;
                        let lhs = f.map_embedding(i, k, &comp)?;
                        let rhs = f.maps[&(j, k)][b].compose(&f.maps[&(i, j)][a])?;
                        Ok(*lhs == rhs)
                    })()
                    .unwrap_or(false);
                    r.record("system.functorial", ok, || {
                        format!(
                            "f({nu}∘{lam}) differs from the composite of images ({} -> {} -> {})",
                            src.chart(i).id,
                            src.chart(j).id,
                            src.chart(k).id
                        )
                    });
                }
            }
        }
    }
    let mut s = Sampler::new(0x5eed);
    for (i, lift) in f.lifts.iter().enumerate() {
        let dom = &src.chart(i).domain;
        let target = &dst.chart(f.theta[i]).domain;
        let mut pts = vec![dom.center.clone()];
        pts.extend((0..8).map(|_| s.point_in_ball(dom)));
        for x in pts {
            let ok = lift.eval(&x).and_then(|y| target.contains_point(&y)).unwrap_or(false);
            r.record("system.lift_into_chart", ok, || format!("lift of {} sends {x} outside the target", src.chart(i).id));
        }
        let certified = match lift.as_affine() {
            Some(a) if a.is_similarity() => dom.image(&a).and_then(|b| target.contains_ball(&b)).unwrap_or(false),
            _ => lift.maps_ball_into(dom, target).unwrap_or(false),
        };
        if !certified {
            r.warn(format!("lift of {}: ball containment not certified by the coefficient bound", src.chart(i).id));
        }
    }
    r
}

/// g∘f: chart maps, embedding images and lifts all compose.
pub fn compose_compatible(g: &CompatibleSystem, f: &CompatibleSystem) -> Result<CompatibleSystem> {
    if !same_atlas(&f.dst, &g.src) {
        return Err(Error::AtlasMismatch("f.dst differs from g.src".into()));
    }
    let theta: Vec<usize> = f.theta.iter().map(|&t| g.theta[t]).collect();
    let mut maps = BTreeMap::new();
    for (&(i, j), row) in &f.maps {
        let (ti, tj) = (f.theta[i], f.theta[j]);
        let out = row
            .iter()
            .map(|mu| g.map_embedding(ti, tj, mu).cloned())
            .collect::<Result<Vec<_>>>()?;
        maps.insert((i, j), out);
    }
    let lifts = f
        .lifts
        .iter()
        .enumerate()
        .map(|(i, l)| g.lifts[f.theta[i]].compose(l))
        .collect::<Result<Vec<_>>>()?;
    Ok(CompatibleSystem {
        src: f.src.clone(),
        dst: g.dst.clone(),
        theta,
        maps,
        lifts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{cone_pair, gallery, GalleryParams};
    use crate::numerics::CycNum;

    fn cone3() -> Arc<Atlas> {
        Arc::new(cone_pair(3).unwrap())
    }

    #[test]
    fn identity_system_validates() {
        let a = cone3();
        let r = validate_compatible_system(&CompatibleSystem::identity(a));
        assert!(r.is_ok_strict(), "{}", r.render_text());
    }

    #[test]
    fn squaring_system_is_valid() {
        let a = cone3();
        let m = a.conductor();
        let sq = PolyMap::monomial(&CycNum::one(m), 2);
        let f = CompatibleSystem::solve(a.clone(), a.clone(), vec![0, 1], vec![sq.clone(), sq]).unwrap();
        let r = validate_compatible_system(&f);
        assert!(r.is_ok(), "{}", r.render_text());
        // (ζ₃z)² = ζ₃²z²
        let z3 = AffineMap::scalar(&CycNum::zeta(m, 4), 1);
        let z3sq = AffineMap::scalar(&CycNum::zeta(m, 8), 1);
        assert_eq!(f.map_embedding(0, 0, &z3).unwrap(), &z3sq);
    }

    #[test]
    fn translated_lift_breaks_the_cube() {
        let a = cone3();
        let m = a.conductor();
        let shift = AffineMap::translation(&crate::numerics::PointC::scalar(CycNum::from_ratio(m, 1, 10)), m);
        assert!(CompatibleSystem::solve(a.clone(), a.clone(), vec![0, 1], vec![PolyMap::from_affine(&shift); 2]).is_err());
        let mut f = CompatibleSystem::identity(a);
        f.lifts = vec![PolyMap::from_affine(&shift); 2];
        let r = validate_compatible_system(&f);
        assert!(r.has_failure("system.cube"));
    }

    #[test]
    fn composition_of_squares_is_fourth_power() {
        let a = cone3();
        let m = a.conductor();
        let sq = PolyMap::monomial(&CycNum::one(m), 2);
        let f = CompatibleSystem::solve(a.clone(), a.clone(), vec![0, 1], vec![sq.clone(), sq]).unwrap();
        let ff = compose_compatible(&f, &f).unwrap();
        assert_eq!(ff.lifts[0], PolyMap::monomial(&CycNum::one(m), 4));
        assert!(validate_compatible_system(&ff).is_ok());
        let id = CompatibleSystem::identity(a);
        assert_eq!(compose_compatible(&f, &id).unwrap(), f);
        assert_eq!(compose_compatible(&id, &f).unwrap(), f);
    }

    #[test]
    fn gauge_systems_validate_on_football() {
        let a = Arc::new(gallery(&GalleryParams::football(2, 3)).unwrap());
        let f = CompatibleSystem::gauge(a, &[1, 2, 0, 0]).unwrap();
        let r = validate_compatible_system(&f);
        assert!(r.is_ok_strict(), "{}", r.render_text());
    }
}
