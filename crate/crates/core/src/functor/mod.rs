//! The functor F from atlases to étale groupoids, on objects, 1-cells and 2-cells.

pub mod oracle;
pub mod translation;

use std::sync::{Arc, Mutex};

use crate::atlas::Atlas;
use crate::error::{Error, Result};
use crate::groupoid::{
    cells_agree, compose_morphisms, hcomp_grp, validate_groupoid_morphism, validate_grp_nat_trans, vcomp_grp, ArrowMap,
    GroupoidMorphism, GroupoidPresentation, GrpNatTrans, NatBody, Strategy,
};
use crate::numerics::AffineMap;
use crate::preorb::{CompatibleSystem, CompositionOps, LawDiagram, OrbNatTrans};
use crate::report::Report;

pub use oracle::{check_action_oracle, check_isotropy};
pub use translation::{arrow_of_triple, build_translation_groupoid, triple_of_arrow, Triple};

/// F with a cache of translation groupoids, so systems over the same atlas share
/// one presentation.
#[derive(Default)]
pub struct TranslationFunctor {
    cache: Mutex<Vec<(Arc<Atlas>, Arc<GroupoidPresentation>)>>,
}

impl TranslationFunctor {
    pub fn new() -> Self {
        Self::default()
    }

    /// F(𝒰).
    pub fn on_atlas(&self, a: &Arc<Atlas>) -> Result<Arc<GroupoidPresentation>> {
        let mut cache = self.cache.lock().expect("cache lock");
        if let Some((_, g)) = cache.iter().find(|(b, _)| Arc::ptr_eq(a, b) || **a == **b) {
            return Ok(g.clone());
        }
        let g = Arc::new(build_translation_groupoid(a.clone())?);
        cache.push((a.clone(), g.clone()));
        Ok(g)
    }

    /// F(f̃) = (ψ, Ψ): ψ is lift_i on unit component i, and the component of
    /// (λ_ki, λ_kj) goes to that of (f̃(λ_ki), f̃(λ_kj)) through lift_k.
    pub fn on_morphism(&self, f: &CompatibleSystem) -> Result<GroupoidMorphism> {
        let g = self.on_atlas(&f.src)?;
        let h = self.on_atlas(&f.dst)?;
        let (Strategy::Translation(gd), Strategy::Translation(hd)) = (&g.strategy, &h.strategy) else {
            return Err(Error::UnsupportedPresentation("not a translation groupoid".into()));
        };
        if f.theta.len() != f.src.n_charts() || f.lifts.len() != f.src.n_charts() {
            return Err(Error::InvalidSystem("one chart image and one lift per chart required".into()));
        }
        let units = f.theta.iter().copied().zip(f.lifts.iter().cloned()).collect();
        let dst_index = |src: usize, dst: usize, mu: &AffineMap| {
            f.dst
                .emb(src, dst)
                .and_then(|s| s.index(mu))
                .ok_or_else(|| Error::InvalidSystem(format!("image {mu} is not an embedding of the target atlas")))
        };
        let mut table = Vec::with_capacity(gd.keys.len());
        for &[k, i, j, a, b] in &gd.keys {
            let image = |dst: usize, idx: usize| -> Result<usize> {
                let mu = f
                    .maps
                    .get(&(k, dst))
                    .and_then(|row| row.get(idx))
                    .ok_or_else(|| Error::InvalidSystem(format!("no image recorded for an embedding {k} -> {dst}")))?;
                dst_index(f.theta[k], f.theta[dst], mu)
            };
            let key = [f.theta[k], f.theta[i], f.theta[j], image(i, a)?, image(j, b)?];
            let c = *hd
                .index
                .get(&key)
                .ok_or_else(|| Error::InvalidSystem("image component missing from the target groupoid".into()))?;
            table.push((c, f.lifts[k].clone()));
        }
        Ok(GroupoidMorphism {
            src: g,
            dst: h,
            units,
            arrows: ArrowMap::Table(table),
        })
    }

    /// F(δ): α(x) on unit component i is the class (id, lift1_i(x), δ_i) over chart Θ1(i).
    pub fn on_cell(&self, d: &OrbNatTrans) -> Result<GrpNatTrans> {
        let from = Arc::new(self.on_morphism(&d.f1)?);
        let to = Arc::new(self.on_morphism(&d.f2)?);
        let Strategy::Translation(hd) = &from.dst.strategy else {
            return Err(Error::UnsupportedPresentation("not a translation groupoid".into()));
        };
        let dst = &d.f1.dst;
        if d.comps.len() != d.f1.theta.len() {
            return Err(Error::InvalidCell("one component per source chart required".into()));
        }
        let mut table = Vec::with_capacity(d.comps.len());
        for (i, delta) in d.comps.iter().enumerate() {
            let (a, b) = (d.f1.theta[i], d.f2.theta[i]);
            let e = dst.chart(a).group.iter().position(|g| g.is_identity()).expect("validated chart");
            let idx = dst
                .emb(a, b)
                .and_then(|s| s.index(delta))
                .ok_or_else(|| Error::InvalidCell(format!("component at {} is not an embedding", d.f1.src.chart(i).id)))?;
            let c = *hd
                .index
                .get(&[a, a, b, e, idx])
                .ok_or_else(|| Error::InvalidCell("component missing from the target groupoid".into()))?;
            table.push((c, d.f1.lifts[i].clone()));
        }
        Ok(GrpNatTrans {
            from,
            to,
            body: NatBody::Table(table),
        })
    }
}

fn same_table(a: &GroupoidMorphism, b: &GroupoidMorphism) -> bool {
    a.units == b.units
        && match (&a.arrows, &b.arrows) {
            (ArrowMap::Table(x), ArrowMap::Table(y)) => x == y,
            _ => false,
        }
}

/// Checks that F preserves identities and composition of 1-cells exactly, that
/// F of every cell is a valid natural transformation, and that F commutes with
/// both compositions of 2-cells at `samples` units. `ops` computes the 2-category
/// composites on the atlas side.
pub fn check_functor_laws(d: &LawDiagram, ops: &dyn CompositionOps, samples: usize, seed: u64) -> Result<Report> {
    let fun = TranslationFunctor::new();
    let mut r = Report::new("functor laws");
    for (name, s) in [("f", &d.f), ("g", &d.g), ("h", &d.h)] {
        let id = CompatibleSystem::identity(s.src.clone());
        let ok = match fun.on_morphism(&id) {
            Ok(m) => same_table(&m, &GroupoidMorphism::identity(fun.on_atlas(&s.src)?)),
            Err(_) => false,
        };
        r.record("functor.identity", ok, || format!("F(1) is not the identity at the source of {name}"));
        match fun.on_morphism(s) {
            Ok(m) => {
                let v = validate_groupoid_morphism(&m, samples, seed);
                r.record("functor.morphism", v.is_ok(), || {
                    format!("F({name}) fails {:?}", v.failing().next().map(|c| c.name.clone()))
                });
            }
            Err(e) => r.fail("functor.morphism", format!("F({name}): {e}")),
        }
    }
    let pairs = [("g∘f", &d.g, &d.f), ("h∘g", &d.h, &d.g)];
    for (name, g, f) in pairs {
        let ok = (|| -> Result<bool> {
            let lhs = fun.on_morphism(&ops.compose(g, f)?)?;
            let rhs = compose_morphisms(&fun.on_morphism(g)?, &fun.on_morphism(f)?)?;
            Ok(same_table(&lhs, &rhs))
        })()
        .unwrap_or(false);
        r.record("functor.composition", ok, || format!("F({name}) differs from the composite of the images"));
    }
    for (name, c) in [("α", &d.alpha), ("β", &d.beta), ("γ", &d.gamma)] {
        match fun.on_cell(c) {
            Ok(fc) => {
                let v = validate_grp_nat_trans(&fc, samples, seed);
                r.record("functor.cell", v.is_ok(), || {
                    format!("F({name}) fails {:?}", v.failing().next().map(|c| c.name.clone()))
                });
            }
            Err(e) => r.fail("functor.cell", format!("F({name}): {e}")),
        }
        let ok = (|| -> Result<bool> {
            let lhs = fun.on_cell(&OrbNatTrans::identity(c.f1.clone()))?;
            let rhs = GrpNatTrans::identity(Arc::new(fun.on_morphism(&c.f1)?));
            Ok(cells_agree(&lhs, &rhs, samples, seed)?.is_none())
        })()
        .unwrap_or(false);
        r.record("functor.identity_cell", ok, || format!("F(i) differs from the identity at the source of {name}"));
    }
    let agree = |lhs: Result<GrpNatTrans>, rhs: Result<GrpNatTrans>| -> bool {
        match (lhs, rhs) {
            (Ok(a), Ok(b)) => {
                let v = validate_grp_nat_trans(&a, samples, seed);
                v.is_ok() && matches!(cells_agree(&a, &b, samples, seed), Ok(None))
            }
            _ => false,
        }
    };
    if let Some(s) = &d.square {
        let ok = agree(
            ops.vcomp(&s.sigma, &s.delta).and_then(|x| fun.on_cell(&x)),
            fun.on_cell(&s.sigma).and_then(|a| fun.on_cell(&s.delta).and_then(|b| vcomp_grp(&a, &b))),
        );
        r.record("functor.vertical", ok, || "F(σ⊙δ) differs from F(σ)⊙F(δ)".into());
        let ok = agree(
            ops.hcomp(&s.eta, &s.delta).and_then(|x| fun.on_cell(&x)),
            fun.on_cell(&s.eta).and_then(|a| fun.on_cell(&s.delta).and_then(|b| hcomp_grp(&a, &b))),
        );
        r.record("functor.horizontal", ok, || "F(η∗δ) differs from F(η)∗F(δ)".into());
    }
    let ok = agree(
        ops.hcomp(&d.beta, &d.alpha).and_then(|x| fun.on_cell(&x)),
        fun.on_cell(&d.beta).and_then(|a| fun.on_cell(&d.alpha).and_then(|b| hcomp_grp(&a, &b))),
    );
    r.record("functor.horizontal", ok, || "F(β∗α) differs from F(β)∗F(α)".into());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{cone_pair, standard_gallery};
    use crate::preorb::{random_gauge_diagram, CorruptOps, Corruption, StandardOps};
    use crate::sample::Sampler;

    #[test]
    fn functor_laws_hold_on_gallery() {
        for (name, a) in standard_gallery() {
            let a = Arc::new(a);
            let mut s = Sampler::new(5);
            let d = random_gauge_diagram(&a, &mut s);
            let r = check_functor_laws(&d, &StandardOps, 10, 2).unwrap();
            assert!(r.is_ok(), "{name}: {}", r.render_text());
        }
    }

    #[test]
    fn corrupted_theta_breaks_composition() {
        let a = Arc::new(cone_pair(3).unwrap());
        let mut s = Sampler::new(1);
        let d = random_gauge_diagram(&a, &mut s);
        let r = check_functor_laws(&d, &CorruptOps(Corruption::Theta), 10, 2).unwrap();
        assert!(r.has_failure("functor.composition"));
        let r = check_functor_laws(&d, &CorruptOps(Corruption::Vertical), 10, 2).unwrap();
        assert!(r.has_failure("functor.vertical"));
        let r = check_functor_laws(&d, &CorruptOps(Corruption::Horizontal), 10, 2).unwrap();
        assert!(r.has_failure("functor.horizontal"));
    }

    #[test]
    fn f_of_identity_system_is_identity() {
        let a = Arc::new(cone_pair(4).unwrap());
        let fun = TranslationFunctor::new();
        let m = fun.on_morphism(&CompatibleSystem::identity(a.clone())).unwrap();
        assert!(same_table(&m, &GroupoidMorphism::identity(fun.on_atlas(&a).unwrap())));
    }
}
