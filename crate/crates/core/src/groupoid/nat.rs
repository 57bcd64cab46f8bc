//! Natural transformations between groupoid morphisms.

use std::sync::Arc;

use super::morphism::{compose_morphisms, ArrowMap, GroupoidMorphism};
use super::presentation::{Arrow, Unit};
use crate::error::{Error, Result};
use crate::numerics::PolyMap;
use crate::report::Report;
use crate::sample::Sampler;

/// How the components α(x) are computed.
#[derive(Clone, Debug)]
pub enum NatBody {
    /// Per unit component: target arrow component and parameter map.
    Table(Vec<(usize, PolyMap)>),
    /// β⊙α, evaluated as m'(α(x), β(x)).
    Vertical(Box<GrpNatTrans>, Box<GrpNatTrans>),
    /// β∗α, evaluated as m''(Ψ_β(α(x)), β(φ_α(x))).
    Horizontal(Box<GrpNatTrans>, Box<GrpNatTrans>),
}

/// α: (ψ, Ψ) ⇒ (φ, Φ), with α(x) an arrow from ψ(x) to φ(x).
#[derive(Clone, Debug)]
pub struct GrpNatTrans {
    pub from: Arc<GroupoidMorphism>,
    pub to: Arc<GroupoidMorphism>,
    pub body: NatBody,
}

pub(crate) fn same_morphism(a: &Arc<GroupoidMorphism>, b: &Arc<GroupoidMorphism>) -> bool {
    if Arc::ptr_eq(a, b) {
        return true;
    }
    let ends = (Arc::ptr_eq(&a.src, &b.src) || a.src.same_structure(&b.src))
        && (Arc::ptr_eq(&a.dst, &b.dst) || a.dst.same_structure(&b.dst));
    ends && a.units == b.units
        && match (&a.arrows, &b.arrows) {
            (ArrowMap::Table(x), ArrowMap::Table(y)) => x == y,
            (ArrowMap::Pointwise(x), ArrowMap::Pointwise(y)) => Arc::ptr_eq(x, y),
            _ => false,
        }
}

impl GrpNatTrans {
    /// i_(ψ,Ψ) = e'∘ψ.
    pub fn identity(m: Arc<GroupoidMorphism>) -> Self {
        let body = NatBody::Table(m.units.iter().map(|(c, f)| (m.dst.identity[*c], f.clone())).collect());
        GrpNatTrans {
            from: m.clone(),
            to: m,
            body,
        }
    }

    pub fn eval(&self, x: &Unit) -> Result<Arrow> {
        match &self.body {
            NatBody::Table(t) => {
                let (c, f) = t.get(x.comp).ok_or(Error::PointOutsideUnitSpace)?;
                Ok(Arrow {
                    comp: *c,
                    point: f.eval(&x.point)?,
                })
            }
            NatBody::Vertical(b, a) => self.from.dst.multiply(&a.eval(x)?, &b.eval(x)?),
            NatBody::Horizontal(b, a) => {
                let first = b.from.apply_arrow(&a.eval(x)?)?;
                let second = b.eval(&a.to.apply_unit(x)?)?;
                b.from.dst.multiply(&first, &second)
            }
        }
    }
}

/// Condition (i) s'∘α = ψ, t'∘α = φ (exactly per component for tables, and on
/// samples), and condition (ii) naturality on sampled arrows.
pub fn validate_grp_nat_trans(a: &GrpNatTrans, samples: usize, seed: u64) -> Report {
    let mut r = Report::new("groupoid 2-cell");
    let (from, to) = (&a.from, &a.to);
    let ends = (Arc::ptr_eq(&from.src, &to.src) || from.src.same_structure(&to.src))
        && (Arc::ptr_eq(&from.dst, &to.dst) || from.dst.same_structure(&to.dst));
    if !r.record("cell.boundary", ends, || "morphisms have different ends".into()) {
        return r;
    }
    let (g, h) = (&*from.src, &*from.dst);
    if let NatBody::Table(t) = &a.body {
        if !r.record("cell.shape", t.len() == g.units.len() && t.iter().all(|(c, _)| *c < h.n_components()), || {
            "component table does not match the unit space".into()
        }) {
            return r;
        }
        for (u, (c, f)) in t.iter().enumerate() {
            let comp = &h.components[*c];
            for (name, side, m) in [("cell.source", &comp.s, from), ("cell.target", &comp.t, to)] {
                let (mu, psi) = &m.units[u];
                let ok = *mu == side.0 && f.then_affine(&side.1).map(|x| x == *psi).unwrap_or(false);
                r.record(name, ok, || format!("unit component u{u} -> w{c}"));
            }
        }
    }
    let mut s = Sampler::new(seed);
    for _ in 0..samples {
        let x = g.sample_unit(&mut s);
        let ends_ok = (|| -> Result<bool> {
            let ax = a.eval(&x)?;
            Ok(h.source(&ax)? == from.apply_unit(&x)? && h.target(&ax)? == to.apply_unit(&x)?)
        })()
        .unwrap_or(false);
        r.record("cell.ends", ends_ok, || format!("α({x}) does not run from ψ({x}) to φ({x})"));
        let arrow = g.sample_arrow(&mut s);
        let nat = (|| -> Result<bool> {
            let lhs = h.multiply(&a.eval(&g.source(&arrow)?)?, &to.apply_arrow(&arrow)?)?;
            let rhs = h.multiply(&from.apply_arrow(&arrow)?, &a.eval(&g.target(&arrow)?)?)?;
            h.arrow_equal(&lhs, &rhs)
        })()
        .unwrap_or(false);
        r.record("cell.naturality", nat, || format!("m'(α∘s, Φ) differs from m'(Ψ, α∘t) at {arrow}"));
    }
    r
}

/// β⊙α for α: ψ ⇒ φ and β: φ ⇒ χ.
pub fn vcomp_grp(b: &GrpNatTrans, a: &GrpNatTrans) -> Result<GrpNatTrans> {
    if !same_morphism(&a.to, &b.from) {
        return Err(Error::BoundaryMismatch("α ends where β does not start".into()));
    }
    Ok(GrpNatTrans {
        from: a.from.clone(),
        to: b.to.clone(),
        body: NatBody::Vertical(Box::new(b.clone()), Box::new(a.clone())),
    })
}

/// β∗α for α between morphisms G → H and β between morphisms H → K.
pub fn hcomp_grp(b: &GrpNatTrans, a: &GrpNatTrans) -> Result<GrpNatTrans> {
    let ok = Arc::ptr_eq(&a.from.dst, &b.from.src) || a.from.dst.same_structure(&b.from.src);
    if !ok {
        return Err(Error::BoundaryMismatch("α and β are not horizontally composable".into()));
    }
    Ok(GrpNatTrans {
        from: Arc::new(compose_morphisms(&b.from, &a.from)?),
        to: Arc::new(compose_morphisms(&b.to, &a.to)?),
        body: NatBody::Horizontal(Box::new(b.clone()), Box::new(a.clone())),
    })
}

/// Pointwise comparison of two cells with the same boundary on sampled units.
pub fn cells_agree(a: &GrpNatTrans, b: &GrpNatTrans, samples: usize, seed: u64) -> Result<Option<Unit>> {
    let g = &a.from.src;
    let h = &a.from.dst;
    let mut s = Sampler::new(seed);
    for _ in 0..samples {
        let x = g.sample_unit(&mut s);
        if !h.arrow_equal(&a.eval(&x)?, &b.eval(&x)?)? {
            return Ok(Some(x));
        }
    }
    Ok(None)
}
