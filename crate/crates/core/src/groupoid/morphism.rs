//! Morphisms of presented groupoids.

use std::fmt;
use std::sync::Arc;

use super::presentation::{Arrow, GroupoidPresentation, Unit};
use crate::error::{Error, Result};
use crate::numerics::{PolyMap, PointC};
use crate::report::Report;
use crate::sample::Sampler;

pub type ArrowFn = dyn Fn(&Arrow) -> Result<Arrow> + Send + Sync;

/// Ψ on arrows: either per-component (target component, parameter map) or a
/// procedure on representatives.
#[derive(Clone)]
pub enum ArrowMap {
    Table(Vec<(usize, PolyMap)>),
    Pointwise(Arc<ArrowFn>),
}

impl fmt::Debug for ArrowMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArrowMap::Table(t) => f.debug_tuple("Table").field(t).finish(),
            ArrowMap::Pointwise(_) => f.write_str("Pointwise(..)"),
        }
    }
}

/// (ψ, Ψ): ψ sends unit component u to `units[u].0` through the polynomial map `units[u].1`.
#[derive(Clone, Debug)]
pub struct GroupoidMorphism {
    pub src: Arc<GroupoidPresentation>,
    pub dst: Arc<GroupoidPresentation>,
    pub units: Vec<(usize, PolyMap)>,
    pub arrows: ArrowMap,
}

impl GroupoidMorphism {
    pub fn identity(g: Arc<GroupoidPresentation>) -> Self {
        let (m, n) = (g.conductor, g.dim);
        GroupoidMorphism {
            units: (0..g.units.len()).map(|u| (u, PolyMap::identity(m, n))).collect(),
            arrows: ArrowMap::Table((0..g.n_components()).map(|c| (c, PolyMap::identity(m, n))).collect()),
            src: g.clone(),
            dst: g,
        }
    }

    pub fn apply_unit(&self, x: &Unit) -> Result<Unit> {
        let (c, f) = self.units.get(x.comp).ok_or(Error::PointOutsideUnitSpace)?;
        Ok(Unit {
            comp: *c,
            point: f.eval(&x.point)?,
        })
    }

    pub fn apply_arrow(&self, g: &Arrow) -> Result<Arrow> {
        match &self.arrows {
            ArrowMap::Table(t) => {
                let (c, f) = t
                    .get(g.comp)
                    .ok_or_else(|| Error::UnsupportedPresentation("arrow table is too short".into()))?;
                Ok(Arrow {
                    comp: *c,
                    point: f.eval(&g.point)?,
                })
            }
            ArrowMap::Pointwise(f) => f(g),
        }
    }

    /// The unit points of x's component mapped onto y, when that preimage is computable:
    /// `Some(None)` means provably no preimage, `None` means undecided.
    pub fn unit_preimage(&self, u: usize, y: &Unit) -> Option<Option<PointC>> {
        let (c, f) = &self.units[u];
        if *c != y.comp {
            return Some(None);
        }
        if f.in_dim == 0 {
            let img = f.eval(&PointC(vec![])).ok()?;
            return Some(if img == y.point { Some(PointC(vec![])) } else { None });
        }
        let a = f.as_affine()?;
        let x = a.inverse().ok()?.apply(&y.point).ok()?;
        let inside = self.src.units[u].ball.contains_point(&x).ok()?;
        Some(if inside { Some(x) } else { None })
    }
}

/// N∘M.
pub fn compose_morphisms(n: &GroupoidMorphism, m: &GroupoidMorphism) -> Result<GroupoidMorphism> {
    if !Arc::ptr_eq(&m.dst, &n.src) && !m.dst.same_structure(&n.src) {
        return Err(Error::BoundaryMismatch("morphisms are not composable".into()));
    }
    let units = m
        .units
        .iter()
        .map(|(c, f)| {
            let (c2, g) = &n.units[*c];
            Ok((*c2, g.compose(f)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let arrows = match (&n.arrows, &m.arrows) {
        (ArrowMap::Table(tn), ArrowMap::Table(tm)) => ArrowMap::Table(
            tm.iter()
                .map(|(c, f)| {
                    let (c2, g) = &tn[*c];
                    Ok((*c2, g.compose(f)?))
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        _ => {
            let (n2, m2) = (n.clone(), m.clone());
            ArrowMap::Pointwise(Arc::new(move |g: &Arrow| n2.apply_arrow(&m2.apply_arrow(g)?)))
        }
    };
    Ok(GroupoidMorphism {
        src: m.src.clone(),
        dst: n.dst.clone(),
        units,
        arrows,
    })
}

/// Checks that (ψ, Ψ) commutes with s, t, e, i and m, and that ψ = s'∘Ψ∘e.
/// s and t are compared exactly per component for table morphisms; everything else
/// is checked on `samples` random units, arrows and composable pairs.
pub fn validate_groupoid_morphism(mm: &GroupoidMorphism, samples: usize, seed: u64) -> Report {
    let mut r = Report::new("groupoid morphism");
    let (g, h) = (&*mm.src, &*mm.dst);
    let units_ok = mm.units.len() == g.units.len() && mm.units.iter().all(|(c, f)| *c < h.units.len() && f.in_dim == g.dim && f.out_dim() == h.dim);
    let table_ok = match &mm.arrows {
        ArrowMap::Table(t) => t.len() == g.n_components() && t.iter().all(|(c, _)| *c < h.n_components()),
        ArrowMap::Pointwise(_) => true,
    };
    if !r.record("morphism.shape", units_ok && table_ok, || "unit or arrow table does not match the groupoids".into()) {
        return r;
    }
    if let ArrowMap::Table(t) = &mm.arrows {
        for (c, comp) in g.components.iter().enumerate() {
            let (c2, f) = &t[c];
            let img = &h.components[*c2];
            for (name, ours, theirs) in [("morphism.source", &comp.s, &img.s), ("morphism.target", &comp.t, &img.t)] {
                let (u, psi) = &mm.units[ours.0];
                let ok = *u == theirs.0
                    && match (f.then_affine(&theirs.1), psi.after_affine(&ours.1)) {
                        (Ok(a), Ok(b)) => a == b,
                        _ => false,
                    };
                r.record(name, ok, || format!("component w{c} -> w{c2}"));
            }
        }
    }
    let mut s = Sampler::new(seed);
    for _ in 0..samples {
        let x = g.sample_unit(&mut s);
        let res = (|| -> Result<(bool, bool, bool)> {
            let px = mm.apply_unit(&x)?;
            let lands = h.contains_unit(&px)?;
            let img_e = mm.apply_arrow(&g.unit_arrow(&x)?)?;
            let e_ok = lands && h.arrow_equal(&img_e, &h.unit_arrow(&px)?)?;
            let redundant = h.source(&img_e)? == px;
            Ok((lands, e_ok, redundant))
        })();
        let (lands, e_ok, red) = res.unwrap_or((false, false, false));
        r.record("morphism.units_land", lands, || format!("ψ({x}) outside the target units"));
        r.record("morphism.identity", e_ok, || format!("Ψ(e({x})) differs from e'(ψ({x}))"));
        r.record("morphism.redundancy", red, || format!("s'∘Ψ∘e differs from ψ at {x}"));

        let a = g.sample_arrow(&mut s);
        let res = (|| -> Result<[bool; 4]> {
            let pa = mm.apply_arrow(&a)?;
            let lands = h.contains_arrow(&pa)?;
            let st = h.source(&pa)? == mm.apply_unit(&g.source(&a)?)? && h.target(&pa)? == mm.apply_unit(&g.target(&a)?)?;
            let inv = h.arrow_equal(&mm.apply_arrow(&g.inverse_of(&a)?)?, &h.inverse_of(&pa)?)?;
            // representative independence
            let mut well = true;
            for b in g.arrows_from(&g.source(&a)?)? {
                if b != a && g.arrow_equal(&a, &b)? {
                    well &= h.arrow_equal(&pa, &mm.apply_arrow(&b)?)?;
                }
            }
            Ok([lands, st, inv, well])
        })();
        let [lands, st, inv, well] = res.unwrap_or([false; 4]);
        r.record("morphism.arrows_land", lands, || format!("Ψ({a}) outside the target arrows"));
        r.record("morphism.source_target", st, || format!("s', t' of Ψ({a}) differ from ψ∘s, ψ∘t"));
        r.record("morphism.inverse", inv, || format!("Ψ(i({a})) differs from i'(Ψ({a}))"));
        r.record("morphism.well_defined", well, || format!("equal representatives of {a} have different images"));

        let res = (|| -> Result<bool> {
            let b = g.sample_arrow_from(&g.target(&a)?, &mut s)?;
            let lhs = mm.apply_arrow(&g.multiply(&a, &b)?)?;
            let rhs = h.multiply(&mm.apply_arrow(&a)?, &mm.apply_arrow(&b)?)?;
            h.arrow_equal(&lhs, &rhs)
        })();
        r.record("morphism.multiplication", res.unwrap_or(false), || format!("Ψ∘m differs from m'∘(Ψ×Ψ) after {a}"));
    }
    r
}
