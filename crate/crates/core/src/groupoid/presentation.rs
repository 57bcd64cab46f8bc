//! Étale groupoids presented by finitely many ball components.

use std::collections::HashMap;
use std::sync::Arc;

use crate::atlas::Atlas;
use crate::error::{Error, Result};
use crate::numerics::{AffineMap, Ball, PointC};
use crate::sample::Sampler;

/// A ball of the unit space, tagged with the chart it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitComponent {
    pub origin: String,
    pub ball: Ball,
}

/// A piece of the arrow space: a parameter ball with source and target maps into
/// unit components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowComponent {
    pub param: Ball,
    pub s: (usize, AffineMap),
    pub t: (usize, AffineMap),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Unit {
    pub comp: usize,
    pub point: PointC,
}

/// A representative of an arrow class: component index and parameter point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow {
    pub comp: usize,
    pub point: PointC,
}

impl std::fmt::Display for Unit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "u{}:{}", self.comp, self.point)
    }
}

impl std::fmt::Display for Arrow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "w{}:{}", self.comp, self.point)
    }
}

/// How equality and multiplication of arrows are decided.
#[derive(Clone, Debug)]
pub enum Strategy {
    /// Translation groupoid of an atlas; component k·(i,j) indexes a pair of embeddings.
    Translation(Arc<TranslationData>),
    /// Action groupoid G ⋉ B: one component per group element, `mul[a][b]` = a∘b.
    Action { mul: Vec<Vec<usize>> },
}

/// Bookkeeping for translation groupoids: the atlas and the index of each
/// component key (k, i, j, index of λ_ki, index of λ_kj).
#[derive(Clone, Debug)]
pub struct TranslationData {
    pub atlas: Arc<Atlas>,
    pub keys: Vec<[usize; 5]>,
    pub index: HashMap<[usize; 5], usize>,
}

#[derive(Clone, Debug)]
pub struct GroupoidPresentation {
    pub conductor: u32,
    pub dim: usize,
    pub units: Vec<UnitComponent>,
    pub components: Vec<ArrowComponent>,
    /// `identity[u]`: the component carrying e on unit component u, with parameter = point.
    pub identity: Vec<usize>,
    /// `inverse[c] = (c', f)`: i(c, p) = (c', f(p)).
    pub inverse: Vec<(usize, AffineMap)>,
    /// Unit points at which surjectivity is certified.
    pub probes: Vec<Unit>,
    pub strategy: Strategy,
    pub(crate) s_inv: Vec<AffineMap>,
    pub(crate) by_source: Vec<Vec<usize>>,
}

impl GroupoidPresentation {
    /// Assembles a presentation, checking shapes and precomputing inverse source maps.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        conductor: u32,
        dim: usize,
        units: Vec<UnitComponent>,
        components: Vec<ArrowComponent>,
        identity: Vec<usize>,
        inverse: Vec<(usize, AffineMap)>,
        probes: Vec<Unit>,
        strategy: Strategy,
    ) -> Result<Self> {
        if identity.len() != units.len() || inverse.len() != components.len() {
            return Err(Error::UnsupportedPresentation("identity or inverse table has the wrong length".into()));
        }
        let mut s_inv = Vec::with_capacity(components.len());
        let mut by_source = vec![Vec::new(); units.len()];
        for (k, c) in components.iter().enumerate() {
            if c.s.0 >= units.len() || c.t.0 >= units.len() {
                return Err(Error::UnsupportedPresentation(format!("component {k} points past the unit space")));
            }
            if c.param.dim() != dim || c.s.1.dim() != dim || c.t.1.dim() != dim {
                return Err(Error::UnsupportedPresentation(format!("component {k} has the wrong dimension")));
            }
            s_inv.push(
                c.s.1
                    .inverse()
                    .map_err(|_| Error::UnsupportedPresentation(format!("source map of component {k} is not invertible")))?,
            );
            by_source[c.s.0].push(k);
        }
        if identity.iter().any(|&c| c >= components.len()) || inverse.iter().any(|(c, _)| *c >= components.len()) {
            return Err(Error::UnsupportedPresentation("structure table points past the components".into()));
        }
        Ok(GroupoidPresentation {
            conductor,
            dim,
            units,
            components,
            identity,
            inverse,
            probes,
            strategy,
            s_inv,
            by_source,
        })
    }

    /// The action groupoid of a finite group acting on one ball; `mul` may be given
    /// explicitly (needed when two elements act identically).
    pub fn action(origin: &str, ball: Ball, elements: Vec<AffineMap>, mul: Option<Vec<Vec<usize>>>) -> Result<Self> {
        let m = ball.conductor();
        let n = ball.dim();
        let mul = match mul {
            Some(t) => t,
            None => {
                crate::atlas::GroupTable::build(&elements)
                    .ok_or_else(|| Error::UnsupportedPresentation("elements do not form a group".into()))?
                    .mul
            }
        };
        let size = elements.len();
        if mul.len() != size || mul.iter().any(|r| r.len() != size || r.iter().any(|&x| x >= size)) {
            return Err(Error::UnsupportedPresentation("multiplication table has the wrong shape".into()));
        }
        let identity = (0..size)
            .find(|&e| (0..size).all(|g| mul[e][g] == g && mul[g][e] == g))
            .ok_or_else(|| Error::UnsupportedPresentation("table has no identity".into()))?;
        let inv = (0..size)
            .map(|g| (0..size).find(|&h| mul[g][h] == identity))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::UnsupportedPresentation("table has no inverses".into()))?;
        let id = AffineMap::identity(m, n);
        let components = elements
            .iter()
            .map(|g| ArrowComponent {
                param: ball.clone(),
                s: (0, id.clone()),
                t: (0, g.clone()),
            })
            .collect();
        let inverse = (0..size).map(|g| (inv[g], elements[g].clone())).collect();
        let probes = vec![Unit {
            comp: 0,
            point: ball.center.clone(),
        }];
        let units = vec![UnitComponent {
            origin: origin.to_string(),
            ball,
        }];
        GroupoidPresentation::new(m, n, units, components, vec![identity], inverse, probes, Strategy::Action { mul })
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn source(&self, g: &Arrow) -> Result<Unit> {
        let c = &self.components[g.comp];
        Ok(Unit {
            comp: c.s.0,
            point: c.s.1.apply(&g.point)?,
        })
    }

    pub fn target(&self, g: &Arrow) -> Result<Unit> {
        let c = &self.components[g.comp];
        Ok(Unit {
            comp: c.t.0,
            point: c.t.1.apply(&g.point)?,
        })
    }

    pub fn contains_unit(&self, x: &Unit) -> Result<bool> {
        match self.units.get(x.comp) {
            Some(u) => u.ball.contains_point(&x.point),
            None => Ok(false),
        }
    }

    pub fn contains_arrow(&self, g: &Arrow) -> Result<bool> {
        match self.components.get(g.comp) {
            Some(c) => c.param.contains_point(&g.point),
            None => Ok(false),
        }
    }

    pub fn unit_arrow(&self, x: &Unit) -> Result<Arrow> {
        if !self.contains_unit(x)? {
            return Err(Error::PointOutsideUnitSpace);
        }
        Ok(Arrow {
            comp: self.identity[x.comp],
            point: x.point.clone(),
        })
    }

    pub fn inverse_of(&self, g: &Arrow) -> Result<Arrow> {
        let (c, f) = &self.inverse[g.comp];
        Ok(Arrow {
            comp: *c,
            point: f.apply(&g.point)?,
        })
    }

    /// Every representative with source x, one per component whose source image contains x.
    pub fn arrows_from(&self, x: &Unit) -> Result<Vec<Arrow>> {
        if !self.contains_unit(x)? {
            return Err(Error::PointOutsideUnitSpace);
        }
        let mut out = Vec::new();
        for &c in &self.by_source[x.comp] {
            let p = self.s_inv[c].apply(&x.point)?;
            if self.components[c].param.contains_point(&p)? {
                out.push(Arrow { comp: c, point: p });
            }
        }
        Ok(out)
    }

    /// Decides whether two representatives name the same arrow.
    pub fn arrow_equal(&self, a: &Arrow, b: &Arrow) -> Result<bool> {
        if a == b {
            return Ok(true);
        }
        if self.source(a)? != self.source(b)? || self.target(a)? != self.target(b)? {
            return Ok(false);
        }
        match &self.strategy {
            Strategy::Action { .. } => Ok(false),
            Strategy::Translation(data) => crate::functor::translation::translation_equal(data, a, b),
        }
    }

    /// m(a, b) for t(a) = s(b): first a, then b.
    pub fn multiply(&self, a: &Arrow, b: &Arrow) -> Result<Arrow> {
        if self.target(a)? != self.source(b)? {
            return Err(Error::NotComposable);
        }
        match &self.strategy {
            Strategy::Action { mul } => Ok(Arrow {
                comp: mul[b.comp][a.comp],
                point: a.point.clone(),
            }),
            Strategy::Translation(data) => crate::functor::translation::translation_multiply(data, a, b),
        }
    }

    /// Every product m(a, b) reachable through the different span completions.
    pub fn multiply_all(&self, a: &Arrow, b: &Arrow) -> Result<Vec<Arrow>> {
        match &self.strategy {
            Strategy::Action { .. } => Ok(vec![self.multiply(a, b)?]),
            Strategy::Translation(data) => {
                if self.target(a)? != self.source(b)? {
                    return Err(Error::NotComposable);
                }
                crate::functor::translation::translation_multiply_all(data, a, b)
            }
        }
    }

    /// Removes representatives equal to an earlier one.
    pub fn dedup_arrows(&self, arrows: Vec<Arrow>) -> Result<Vec<Arrow>> {
        let mut out: Vec<Arrow> = Vec::new();
        'next: for g in arrows {
            for h in &out {
                if self.arrow_equal(&g, h)? {
                    continue 'next;
                }
            }
            out.push(g);
        }
        Ok(out)
    }

    /// Arrow classes from x to y.
    pub fn hom(&self, x: &Unit, y: &Unit) -> Result<Vec<Arrow>> {
        let mut cands = Vec::new();
        for g in self.arrows_from(x)? {
            if self.target(&g)? == *y {
                cands.push(g);
            }
        }
        self.dedup_arrows(cands)
    }

    pub fn sample_unit(&self, s: &mut Sampler) -> Unit {
        let comp = s.index(self.units.len());
        Unit {
            comp,
            point: s.point_in_ball(&self.units[comp].ball),
        }
    }

    pub fn sample_arrow(&self, s: &mut Sampler) -> Arrow {
        let comp = s.index(self.components.len());
        Arrow {
            comp,
            point: s.point_in_ball(&self.components[comp].param),
        }
    }

    /// A random arrow with source x (the identity if x has no other arrows).
    pub fn sample_arrow_from(&self, x: &Unit, s: &mut Sampler) -> Result<Arrow> {
        let all = self.arrows_from(x)?;
        if all.is_empty() {
            return self.unit_arrow(x);
        }
        Ok(all[s.index(all.len())].clone())
    }

    /// Structural equality ignoring the strategy payload and unit origins.
    pub fn same_structure(&self, other: &GroupoidPresentation) -> bool {
        self.conductor == other.conductor
            && self.dim == other.dim
            && self.units.iter().map(|u| &u.ball).eq(other.units.iter().map(|u| &u.ball))
            && self.components == other.components
            && self.identity == other.identity
            && self.inverse == other.inverse
            && self.probes == other.probes
            && match (&self.strategy, &other.strategy) {
                (Strategy::Action { mul: a }, Strategy::Action { mul: b }) => a == b,
                (Strategy::Translation(a), Strategy::Translation(b)) => a.keys == b.keys,
                _ => false,
            }
    }
}
