//! Executable 2-category laws for compatible systems and their 2-cells.

use std::sync::Arc;

use super::nat::{validate_orb_nat_trans, CompositionOps, OrbNatTrans};
use super::system::{same_atlas, CompatibleSystem};
use crate::atlas::Atlas;
use crate::error::{Error, Result};
use crate::report::Report;
use crate::sample::Sampler;

/// Two vertically stacked pairs of cells, δ, σ, τ: f1 ⇒ f2 ⇒ f3 ⇒ f4 over 𝒰 → 𝒱 and
/// η, μ: g1 ⇒ g2 ⇒ g3 over 𝒱 → 𝒲.
#[derive(Clone, Debug)]
pub struct Square {
    pub delta: OrbNatTrans,
    pub sigma: OrbNatTrans,
    pub tau: OrbNatTrans,
    pub eta: OrbNatTrans,
    pub mu: OrbNatTrans,
}

/// Composable systems f: 𝒰 → 𝒱, g: 𝒱 → 𝒲, h: 𝒲 → 𝒵, cells α, β, γ over the
/// same three steps, and an optional interchange square.
#[derive(Clone, Debug)]
pub struct LawDiagram {
    pub f: Arc<CompatibleSystem>,
    pub g: Arc<CompatibleSystem>,
    pub h: Arc<CompatibleSystem>,
    pub alpha: OrbNatTrans,
    pub beta: OrbNatTrans,
    pub gamma: OrbNatTrans,
    pub square: Option<Square>,
}

fn typed(d: &LawDiagram) -> Result<()> {
    let ok_sys = same_atlas(&d.f.dst, &d.g.src) && same_atlas(&d.g.dst, &d.h.src);
    let over = |c: &OrbNatTrans, s: &CompatibleSystem| same_atlas(&c.f1.src, &s.src) && same_atlas(&c.f1.dst, &s.dst);
    let ok_cells = over(&d.alpha, &d.f) && over(&d.beta, &d.g) && over(&d.gamma, &d.h);
    let ok_square = d.square.as_ref().is_none_or(|s| {
        over(&s.delta, &d.f)
            && s.delta.f2 == s.sigma.f1
            && s.sigma.f2 == s.tau.f1
            && over(&s.eta, &d.g)
            && s.eta.f2 == s.mu.f1
    });
    if ok_sys && ok_cells && ok_square {
        Ok(())
    } else {
        Err(Error::IllTypedDiagram("cells or systems are not composable as declared".into()))
    }
}

/// Verifies associativity and unit laws for systems, unit and associativity laws
/// for both compositions of 2-cells, the interchange law, and that every computed
/// composite cell validates. Equality is structural.
pub fn check_2cat_laws(d: &LawDiagram, ops: &dyn CompositionOps) -> Result<Report> {
    typed(d)?;
    let mut r = Report::new("2-category laws");
    let id = |a: &Arc<Atlas>| Arc::new(CompatibleSystem::identity(a.clone()));
    let cell = |c: &CompatibleSystem| OrbNatTrans::identity(Arc::new(c.clone()));
    let closure = |r: &mut Report, c: &Result<OrbNatTrans>| {
        if let Ok(c) = c {
            let v = validate_orb_nat_trans(c);
            r.record("closure", v.is_ok(), || format!("composite cell fails {:?}", v.failing().next().map(|x| &x.name)));
        }
    };

    let left = ops.compose(&d.h, &d.g).and_then(|hg| ops.compose(&hg, &d.f));
    let right = ops.compose(&d.g, &d.f).and_then(|gf| ops.compose(&d.h, &gf));
    r.record("system.associativity", matches!((&left, &right), (Ok(a), Ok(b)) if a == b), || {
        "(h∘g)∘f differs from h∘(g∘f)".into()
    });
    for (name, s) in [("f", &d.f), ("g", &d.g), ("h", &d.h)] {
        let ru = ops.compose(s, &id(&s.src));
        let lu = ops.compose(&id(&s.dst), s);
        r.record("system.unit", matches!(&ru, Ok(x) if x == &**s) && matches!(&lu, Ok(x) if x == &**s), || {
            format!("{name}∘1 or 1∘{name} differs from {name}")
        });
    }

    for (name, c) in [("α", &d.alpha), ("β", &d.beta), ("γ", &d.gamma)] {
        let a = ops.vcomp(c, &cell(&c.f1));
        let b = ops.vcomp(&cell(&c.f2), c);
        closure(&mut r, &a);
        closure(&mut r, &b);
        r.record("vertical.unit", matches!(&a, Ok(x) if x == c) && matches!(&b, Ok(x) if x == c), || {
            format!("{name}⊙i or i⊙{name} differs from {name}")
        });
        let hr = ops.hcomp(c, &cell(&id(&c.f1.src)));
        let hl = ops.hcomp(&cell(&id(&c.f1.dst)), c);
        closure(&mut r, &hr);
        closure(&mut r, &hl);
        r.record("horizontal.unit", matches!(&hr, Ok(x) if x == c) && matches!(&hl, Ok(x) if x == c), || {
            format!("{name}∗i_𝒰 or i_𝒱∗{name} differs from {name}")
        });
    }

    let gb = ops.hcomp(&d.gamma, &d.beta);
    closure(&mut r, &gb);
    let l = gb.and_then(|x| ops.hcomp(&x, &d.alpha));
    let ba = ops.hcomp(&d.beta, &d.alpha);
    closure(&mut r, &ba);
    let rr = ba.and_then(|x| ops.hcomp(&d.gamma, &x));
    closure(&mut r, &l);
    closure(&mut r, &rr);
    r.record("horizontal.associativity", matches!((&l, &rr), (Ok(a), Ok(b)) if a == b), || {
        "(γ∗β)∗α differs from γ∗(β∗α)".into()
    });

    if let Some(s) = &d.square {
        let sd = ops.vcomp(&s.sigma, &s.delta);
        let ts = ops.vcomp(&s.tau, &s.sigma);
        closure(&mut r, &sd);
        closure(&mut r, &ts);
        let l = sd.as_ref().map_err(Clone::clone).and_then(|x| ops.vcomp(&s.tau, x));
        let rr = ts.and_then(|x| ops.vcomp(&x, &s.delta));
        r.record("vertical.associativity", matches!((&l, &rr), (Ok(a), Ok(b)) if a == b), || {
            "(τ⊙σ)⊙δ differs from τ⊙(σ⊙δ)".into()
        });
        let me = ops.vcomp(&s.mu, &s.eta);
        closure(&mut r, &me);
        let lhs = match (&me, &sd) {
            (Ok(a), Ok(b)) => ops.hcomp(a, b),
            _ => Err(Error::IllTypedDiagram("vertical composite failed".into())),
        };
        let ms = ops.hcomp(&s.mu, &s.sigma);
        let ed = ops.hcomp(&s.eta, &s.delta);
        closure(&mut r, &ms);
        closure(&mut r, &ed);
        let rhs = match (&ms, &ed) {
            (Ok(a), Ok(b)) => ops.vcomp(a, b),
            _ => Err(Error::IllTypedDiagram("horizontal composite failed".into())),
        };
        closure(&mut r, &lhs);
        closure(&mut r, &rhs);
        r.record("interchange", matches!((&lhs, &rhs), (Ok(a), Ok(b)) if a == b), || {
            "(μ⊙η)∗(σ⊙δ) differs from (μ∗σ)⊙(η∗δ)".into()
        });
    }
    Ok(r)
}

fn random_twist(a: &Atlas, s: &mut Sampler) -> Vec<usize> {
    (0..a.n_charts()).map(|i| s.index(a.chart(i).order())).collect()
}

/// A gauge self-system with random group elements per chart.
pub fn random_gauge_system(a: &Arc<Atlas>, s: &mut Sampler) -> Arc<CompatibleSystem> {
    Arc::new(CompatibleSystem::gauge(a.clone(), &random_twist(a, s)).expect("gauge systems always build"))
}

/// A random 2-cell between two fresh gauge self-systems.
pub fn random_gauge_cell(a: &Arc<Atlas>, s: &mut Sampler) -> OrbNatTrans {
    let f1 = random_gauge_system(a, s);
    let f2 = random_gauge_system(a, s);
    OrbNatTrans::solve(f1, f2).expect("gauge systems are always 2-isomorphic")
}

/// A fully populated law diagram of gauge self-systems of one atlas.
pub fn random_gauge_diagram(a: &Arc<Atlas>, s: &mut Sampler) -> LawDiagram {
    let stack = |s: &mut Sampler, n: usize| -> Vec<OrbNatTrans> {
        let systems: Vec<_> = (0..=n).map(|_| random_gauge_system(a, s)).collect();
        systems
            .windows(2)
            .map(|w| OrbNatTrans::solve(w[0].clone(), w[1].clone()).expect("gauge cells exist"))
            .collect()
    };
    let fs = stack(s, 3);
    let gs = stack(s, 2);
    LawDiagram {
        f: random_gauge_system(a, s),
        g: random_gauge_system(a, s),
        h: random_gauge_system(a, s),
        alpha: random_gauge_cell(a, s),
        beta: random_gauge_cell(a, s),
        gamma: random_gauge_cell(a, s),
        square: Some(Square {
            delta: fs[0].clone(),
            sigma: fs[1].clone(),
            tau: fs[2].clone(),
            eta: gs[0].clone(),
            mu: gs[1].clone(),
        }),
    }
}

/// Which composite a [`CorruptOps`] tampers with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corruption {
    Compose,
    /// The composite sends the first chart to a different chart when there is one.
    Theta,
    Vertical,
    Horizontal,
}

/// Correct compositions except for one deliberately broken table.
#[derive(Clone, Copy, Debug)]
pub struct CorruptOps(pub Corruption);

fn corrupt_cell(mut c: OrbNatTrans) -> OrbNatTrans {
    let dst = &c.f2.dst;
    let chart = dst.chart(c.f2.theta[0]);
    match chart.group.iter().find(|g| !g.is_identity()) {
        Some(g) => c.comps[0] = g.compose(&c.comps[0]).expect("same dimension"),
        None => {
            let extra = c.comps[0].clone();
            c.comps.push(extra);
        }
    }
    c
}

impl CompositionOps for CorruptOps {
    fn compose(&self, g: &CompatibleSystem, f: &CompatibleSystem) -> Result<CompatibleSystem> {
        let mut out = super::system::compose_compatible(g, f)?;
        if self.0 == Corruption::Theta && out.dst.n_charts() > 1 {
            out.theta[0] = (out.theta[0] + 1) % out.dst.n_charts();
        } else if matches!(self.0, Corruption::Compose | Corruption::Theta) {
            let first = out.maps.keys().next().copied();
            if let Some(k) = first {
                out.maps.remove(&k);
            }
        }
        Ok(out)
    }

    fn vcomp(&self, s: &OrbNatTrans, d: &OrbNatTrans) -> Result<OrbNatTrans> {
        let out = super::nat::vcomp_orb(s, d)?;
        Ok(if self.0 == Corruption::Vertical { corrupt_cell(out) } else { out })
    }

    fn hcomp(&self, e: &OrbNatTrans, d: &OrbNatTrans) -> Result<OrbNatTrans> {
        let out = super::nat::hcomp_orb(e, d)?;
        Ok(if self.0 == Corruption::Horizontal { corrupt_cell(out) } else { out })
    }
}

#[cfg(test)]
mod tests {
    use super::super::nat::StandardOps;
    use super::*;
    use crate::io::{gallery, standard_gallery, GalleryParams};

    #[test]
    fn laws_hold_on_random_gauge_diagrams() {
        for (name, a) in standard_gallery() {
            let a = Arc::new(a);
            let mut s = Sampler::new(11);
            for _ in 0..3 {
                let d = random_gauge_diagram(&a, &mut s);
                let r = check_2cat_laws(&d, &StandardOps).unwrap();
                assert!(r.is_ok(), "{name}: {}", r.render_text());
            }
        }
    }

    #[test]
    fn corruptions_are_named() {
        let a = Arc::new(gallery(&GalleryParams::cone(3)).unwrap());
        let d = random_gauge_diagram(&a, &mut Sampler::new(3));
        let r = check_2cat_laws(&d, &CorruptOps(Corruption::Compose)).unwrap();
        assert!(r.has_failure("system.unit"));
        let r = check_2cat_laws(&d, &CorruptOps(Corruption::Vertical)).unwrap();
        assert!(r.has_failure("vertical.unit"));
        let r = check_2cat_laws(&d, &CorruptOps(Corruption::Horizontal)).unwrap();
        assert!(r.has_failure("horizontal.unit"));
    }

    #[test]
    fn ill_typed_diagram_is_rejected() {
        let a = Arc::new(gallery(&GalleryParams::cone(3)).unwrap());
        let b = Arc::new(gallery(&GalleryParams::cone(2)).unwrap());
        let mut d = random_gauge_diagram(&a, &mut Sampler::new(3));
        d.g = Arc::new(CompatibleSystem::identity(b));
        assert!(matches!(check_2cat_laws(&d, &StandardOps), Err(Error::IllTypedDiagram(_))));
    }
}
