//! Natural transformations of compatible systems (2-cells) and their compositions.

use std::sync::Arc;

use super::system::{compose_compatible, same_atlas, CompatibleSystem};
use crate::error::{Error, Result};
use crate::numerics::AffineMap;
use crate::report::Report;

/// δ: f1 ⇒ f2, one target embedding δ_i: f1(U_i) → f2(U_i) per source chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbNatTrans {
    pub f1: Arc<CompatibleSystem>,
    pub f2: Arc<CompatibleSystem>,
    pub comps: Vec<AffineMap>,
}

fn same_system(a: &Arc<CompatibleSystem>, b: &Arc<CompatibleSystem>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl OrbNatTrans {
    /// The identity 2-cell i_f̃.
    pub fn identity(f: Arc<CompatibleSystem>) -> Self {
        let m = f.dst.conductor();
        let n = f.dst.dim();
        OrbNatTrans {
            comps: vec![AffineMap::identity(m, n); f.theta.len()],
            f1: f.clone(),
            f2: f,
        }
    }

    /// Solves δ_i from the lifts: the embedding with lift2_i = δ_i∘lift1_i.
    pub fn solve(f1: Arc<CompatibleSystem>, f2: Arc<CompatibleSystem>) -> Result<Self> {
        if !same_atlas(&f1.src, &f2.src) || !same_atlas(&f1.dst, &f2.dst) {
            return Err(Error::BoundaryMismatch("systems have different atlases".into()));
        }
        let dst = &f1.dst;
        let mut comps = Vec::new();
        for i in 0..f1.theta.len() {
            let found = dst
                .embeddings_between(f1.theta[i], f2.theta[i])
                .iter()
                .find(|d| f1.lifts[i].then_affine(d).map(|x| x == f2.lifts[i]).unwrap_or(false))
                .cloned()
                .ok_or_else(|| Error::InvalidCell(format!("no component at {}", f1.src.chart(i).id)))?;
            comps.push(found);
        }
        Ok(OrbNatTrans { f1, f2, comps })
    }
}

/// Conditions (i) and (ii), naming the failing chart or embedding.
pub fn validate_orb_nat_trans(d: &OrbNatTrans) -> Report {
    let mut r = Report::new("orbifold 2-cell");
    let (f1, f2) = (&d.f1, &d.f2);
    if !same_atlas(&f1.src, &f2.src) || !same_atlas(&f1.dst, &f2.dst) || d.comps.len() != f1.theta.len() {
        r.fail("cell.boundary", "systems or component count do not match");
        return r;
    }
    let src = &f1.src;
    for (i, delta) in d.comps.iter().enumerate() {
        let id = &src.chart(i).id;
        r.record("cell.embedding", f1.dst.is_embedding(f1.theta[i], f2.theta[i], delta), || {
            format!("component at {id} is not an embedding")
        });
        let ok = f1.lifts[i].then_affine(delta).map(|x| x == f2.lifts[i]).unwrap_or(false);
        r.record("cell.lifts", ok, || format!("component at {id} does not carry lift1 to lift2"));
    }
    for (&(i, j), row1) in &f1.maps {
        let Some(row2) = f2.maps.get(&(i, j)) else {
            r.fail("cell.naturality", format!("second system lacks {} -> {}", src.chart(i).id, src.chart(j).id));
            continue;
        };
        for (l1, l2) in row1.iter().zip(row2) {
            let ok = match (l2.compose(&d.comps[i]), d.comps[j].compose(l1)) {
                (Ok(a), Ok(b)) => a == b,
                _ => false,
            };
            r.record("cell.naturality", ok, || {
                format!("square fails on an embedding {} -> {}", src.chart(i).id, src.chart(j).id)
            });
        }
    }
    r
}

/// How composites are computed; the law checker is generic so that corrupted
/// implementations can be fed to it.
pub trait CompositionOps {
    fn compose(&self, g: &CompatibleSystem, f: &CompatibleSystem) -> Result<CompatibleSystem>;
    fn vcomp(&self, s: &OrbNatTrans, d: &OrbNatTrans) -> Result<OrbNatTrans>;
    fn hcomp(&self, e: &OrbNatTrans, d: &OrbNatTrans) -> Result<OrbNatTrans>;
}

/// The correct compositions.
#[derive(Clone, Copy, Debug, Default)]
pub struct StandardOps;

impl CompositionOps for StandardOps {
    fn compose(&self, g: &CompatibleSystem, f: &CompatibleSystem) -> Result<CompatibleSystem> {
        compose_compatible(g, f)
    }

    fn vcomp(&self, s: &OrbNatTrans, d: &OrbNatTrans) -> Result<OrbNatTrans> {
        vcomp_orb(s, d)
    }

    fn hcomp(&self, e: &OrbNatTrans, d: &OrbNatTrans) -> Result<OrbNatTrans> {
        hcomp_orb(e, d)
    }
}

/// σ⊙δ with components σ_i∘δ_i.
pub fn vcomp_orb(s: &OrbNatTrans, d: &OrbNatTrans) -> Result<OrbNatTrans> {
    if !same_system(&d.f2, &s.f1) {
        return Err(Error::BoundaryMismatch("δ ends where σ does not start".into()));
    }
    if s.comps.len() != d.comps.len() {
        return Err(Error::InvalidCell("component counts differ".into()));
    }
    let comps = s
        .comps
        .iter()
        .zip(&d.comps)
        .map(|(a, b)| a.compose(b))
        .collect::<Result<Vec<_>>>()?;
    Ok(OrbNatTrans {
        f1: d.f1.clone(),
        f2: s.f2.clone(),
        comps,
    })
}

/// η∗δ with components η_{Θ_f2(i)}∘g1(δ_i), between g1∘f1 and g2∘f2.
pub fn hcomp_orb(e: &OrbNatTrans, d: &OrbNatTrans) -> Result<OrbNatTrans> {
    if !same_atlas(&d.f1.dst, &e.f1.src) {
        return Err(Error::BoundaryMismatch("δ and η are not horizontally composable".into()));
    }
    if d.comps.len() != d.f1.theta.len() || e.comps.len() != e.f1.theta.len() {
        return Err(Error::InvalidCell("component count does not match the source atlas".into()));
    }
    let g1 = &e.f1;
    let mut comps = Vec::new();
    for (i, delta) in d.comps.iter().enumerate() {
        let (a, b) = (d.f1.theta[i], d.f2.theta[i]);
        let moved = g1.map_embedding(a, b, delta)?;
        comps.push(e.comps[b].compose(moved)?);
    }
    Ok(OrbNatTrans {
        f1: Arc::new(compose_compatible(&e.f1, &d.f1)?),
        f2: Arc::new(compose_compatible(&e.f2, &d.f2)?),
        comps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::cone_pair;
    use crate::numerics::{CycNum, PolyMap};

    fn rot(a: &Arc<crate::atlas::Atlas>, k: i64) -> Arc<CompatibleSystem> {
        let m = a.conductor();
        let lift = PolyMap::monomial(&CycNum::zeta(m, k), 1);
        Arc::new(CompatibleSystem::solve(a.clone(), a.clone(), vec![0, 1], vec![lift; 2]).unwrap())
    }

    #[test]
    fn rotation_cell_on_cone3() {
        let a = Arc::new(cone_pair(3).unwrap());
        let (f1, f2) = (rot(&a, 0), rot(&a, 4));
        let d = OrbNatTrans::solve(f1.clone(), f2.clone()).unwrap();
        assert!(validate_orb_nat_trans(&d).is_ok());
        let z3 = AffineMap::scalar(&CycNum::zeta(12, 4), 1);
        assert_eq!(d.comps, vec![z3.clone(), z3.clone()]);
        let mut bad = d.clone();
        bad.comps[1] = AffineMap::scalar(&CycNum::zeta(12, 8), 1);
        let r = validate_orb_nat_trans(&bad);
        assert!(r.has_failure("cell.lifts"));
    }

    #[test]
    fn vertical_and_horizontal_units() {
        let a = Arc::new(cone_pair(3).unwrap());
        let (f1, f2) = (rot(&a, 0), rot(&a, 4));
        let d = OrbNatTrans::solve(f1.clone(), f2.clone()).unwrap();
        let left = vcomp_orb(&OrbNatTrans::identity(f2.clone()), &d).unwrap();
        assert_eq!(left, d);
        let right = vcomp_orb(&d, &OrbNatTrans::identity(f1.clone())).unwrap();
        assert_eq!(right, d);
        let dd = vcomp_orb(&OrbNatTrans::solve(f2.clone(), rot(&a, 8)).unwrap(), &d).unwrap();
        assert_eq!(dd.comps[0], AffineMap::scalar(&CycNum::zeta(12, 8), 1));
        assert!(validate_orb_nat_trans(&dd).is_ok());
        let id = Arc::new(CompatibleSystem::identity(a.clone()));
        let h = hcomp_orb(&OrbNatTrans::identity(id.clone()), &d).unwrap();
        assert_eq!(h.comps, d.comps);
        assert!(validate_orb_nat_trans(&h).is_ok());
    }
}
