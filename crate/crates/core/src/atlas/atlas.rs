//! Atlases: charts, embedding torsors, the refinement oracle and spans.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use super::chart::{find_conjugator, Chart, GroupTable};
use crate::error::{Error, Result};
use crate::numerics::{AffineMap, PointC};

/// A stored embedding between charts, by chart index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub src: usize,
    pub dst: usize,
    pub map: AffineMap,
}

/// Which charts may serve as the middle of a span between two charts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleSpec {
    /// Single chart; points are identified iff related by the group.
    GlobalQuotient,
    /// Any chart embedding into both.
    Gluing,
    /// Explicit bridge entries (i, j, k), plus the direct embeddings between i and j.
    SpanTable(Vec<[usize; 3]>),
}

/// Marked span: `left(x_k)` in chart i and `right(x_k)` in chart j.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Span {
    pub k: usize,
    pub x_k: PointC,
    pub left: AffineMap,
    pub right: AffineMap,
}

impl Span {
    pub fn swapped(&self) -> Span {
        Span {
            k: self.k,
            x_k: self.x_k.clone(),
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }
}

/// A span recorded in the atlas file as evidence that charts i and j overlap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanWitness {
    pub i: usize,
    pub j: usize,
    pub span: Span,
}

/// The raw ingredients of an atlas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtlasParts {
    pub conductor: u32,
    pub dim: usize,
    pub charts: Vec<Chart>,
    pub embeddings: Vec<Embedding>,
    pub oracle: OracleSpec,
    pub witnesses: Vec<SpanWitness>,
    pub probes: Vec<(usize, PointC)>,
}

/// All embeddings from one chart to another: G_dst · rep.
#[derive(Clone, Debug)]
pub struct EmbSet {
    pub maps: Vec<AffineMap>,
    pub inverses: Vec<AffineMap>,
    lookup: HashMap<AffineMap, usize>,
}

impl EmbSet {
    fn new(maps: Vec<AffineMap>) -> Option<EmbSet> {
        let inverses = maps.iter().map(|f| f.inverse().ok()).collect::<Option<Vec<_>>>()?;
        let lookup = maps.iter().enumerate().map(|(k, f)| (f.clone(), k)).collect();
        Some(EmbSet { maps, inverses, lookup })
    }

    pub fn index(&self, f: &AffineMap) -> Option<usize> {
        self.lookup.get(f).copied()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }
}

/// An orbifold atlas. Immutable once built; derived tables are computed eagerly.
#[derive(Clone, Debug)]
pub struct Atlas {
    parts: AtlasParts,
    index: HashMap<String, usize>,
    tables: Vec<Option<GroupTable>>,
    reps: BTreeMap<(usize, usize), AffineMap>,
    emb: HashMap<(usize, usize), EmbSet>,
}

impl PartialEq for Atlas {
    fn eq(&self, other: &Self) -> bool {
        self.parts == other.parts
    }
}

impl Eq for Atlas {}

impl Atlas {
    /// Fails only on structural problems (ids, indices, dimensions, conductors);
    /// mathematical invariants are left to `validate_atlas`.
    pub fn new(parts: AtlasParts) -> Result<Atlas> {
        let mut index = HashMap::new();
        for (k, c) in parts.charts.iter().enumerate() {
            if index.insert(c.id.clone(), k).is_some() {
                return Err(Error::InvalidAtlas(format!("duplicate chart id {}", c.id)));
            }
            if c.dim() != parts.dim {
                return Err(Error::DimMismatch(c.dim(), parts.dim));
            }
            if c.conductor() != parts.conductor {
                return Err(Error::ConductorMismatch(c.conductor(), parts.conductor));
            }
            for g in &c.group {
                if g.dim() != parts.dim || g.conductor() != parts.conductor {
                    return Err(Error::InvalidChart(format!("group element of {} has wrong shape", c.id)));
                }
            }
        }
        let n = parts.charts.len();
        let check_map = |f: &AffineMap, what: &str| -> Result<()> {
            if f.dim() != parts.dim || f.conductor() != parts.conductor {
                return Err(Error::InvalidAtlas(format!("{what} has wrong dimension or conductor")));
            }
            Ok(())
        };
        let mut reps = BTreeMap::new();
        for e in &parts.embeddings {
            if e.src >= n || e.dst >= n {
                return Err(Error::InvalidAtlas("embedding refers to a missing chart".into()));
            }
            check_map(&e.map, "embedding")?;
            reps.entry((e.src, e.dst)).or_insert_with(|| e.map.clone());
        }
        for w in &parts.witnesses {
            if w.i >= n || w.j >= n || w.span.k >= n {
                return Err(Error::InvalidAtlas("witness refers to a missing chart".into()));
            }
            check_map(&w.span.left, "witness leg")?;
            check_map(&w.span.right, "witness leg")?;
        }
        for (c, p) in &parts.probes {
            if *c >= n || p.dim() != parts.dim {
                return Err(Error::InvalidAtlas("probe refers to a missing chart or has wrong dimension".into()));
            }
        }
        if let OracleSpec::SpanTable(entries) = &parts.oracle {
            if entries.iter().any(|e| e.iter().any(|&c| c >= n)) {
                return Err(Error::InvalidAtlas("span table refers to a missing chart".into()));
            }
        }
        let tables: Vec<Option<GroupTable>> = parts.charts.iter().map(|c| GroupTable::build(&c.group)).collect();
        let mut emb = HashMap::new();
        for (k, c) in parts.charts.iter().enumerate() {
            if tables[k].is_some() {
                if let Some(s) = EmbSet::new(c.group.clone()) {
                    emb.insert((k, k), s);
                }
            }
        }
        for (&(s, d), rep) in &reps {
            if s == d || tables[d].is_none() {
                continue;
            }
            let maps = parts.charts[d]
                .group
                .iter()
                .map(|h| h.compose(rep))
                .collect::<Result<Vec<_>>>()?;
            if let Some(set) = EmbSet::new(maps) {
                emb.insert((s, d), set);
            }
        }
        Ok(Atlas {
            parts,
            index,
            tables,
            reps,
            emb,
        })
    }

    pub fn parts(&self) -> &AtlasParts {
        &self.parts
    }

    pub fn into_parts(self) -> AtlasParts {
        self.parts
    }

    pub fn conductor(&self) -> u32 {
        self.parts.conductor
    }

    pub fn dim(&self) -> usize {
        self.parts.dim
    }

    pub fn charts(&self) -> &[Chart] {
        &self.parts.charts
    }

    pub fn chart(&self, i: usize) -> &Chart {
        &self.parts.charts[i]
    }

    pub fn n_charts(&self) -> usize {
        self.parts.charts.len()
    }

    pub fn chart_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn embeddings(&self) -> &[Embedding] {
        &self.parts.embeddings
    }

    pub fn oracle(&self) -> &OracleSpec {
        &self.parts.oracle
    }

    pub fn witnesses(&self) -> &[SpanWitness] {
        &self.parts.witnesses
    }

    pub fn probes(&self) -> &[(usize, PointC)] {
        &self.parts.probes
    }

    pub fn table(&self, i: usize) -> Option<&GroupTable> {
        self.tables[i].as_ref()
    }

    pub fn rep(&self, src: usize, dst: usize) -> Option<&AffineMap> {
        if src == dst {
            return None;
        }
        self.reps.get(&(src, dst))
    }

    pub fn reps(&self) -> impl Iterator<Item = (&(usize, usize), &AffineMap)> {
        self.reps.iter()
    }

    /// Emb(src, dst); the chart group when src = dst.
    pub fn emb(&self, src: usize, dst: usize) -> Option<&EmbSet> {
        self.emb.get(&(src, dst))
    }

    pub fn embeddings_between(&self, src: usize, dst: usize) -> &[AffineMap] {
        self.emb(src, dst).map(|s| s.maps.as_slice()).unwrap_or(&[])
    }

    pub fn is_embedding(&self, src: usize, dst: usize, f: &AffineMap) -> bool {
        self.emb(src, dst).and_then(|s| s.index(f)).is_some()
    }

    /// Charts receiving an embedding from `src` (excluding itself).
    pub fn targets_of(&self, src: usize) -> Vec<usize> {
        (0..self.n_charts()).filter(|&d| d != src && self.emb.contains_key(&(src, d))).collect()
    }

    pub fn contains(&self, i: usize, x: &PointC) -> Result<bool> {
        self.chart(i).contains(x)
    }

    /// Candidate middle charts for spans between i and j, in increasing order.
    pub fn bridges(&self, i: usize, j: usize) -> Vec<usize> {
        let both = |k: usize| self.emb.contains_key(&(k, i)) && self.emb.contains_key(&(k, j));
        let mut out = BTreeSet::new();
        match &self.parts.oracle {
            OracleSpec::GlobalQuotient => {
                if i == j {
                    out.insert(i);
                }
            }
            OracleSpec::Gluing => {
                out.extend((0..self.n_charts()).filter(|&k| both(k)));
            }
            OracleSpec::SpanTable(entries) => {
                for e in entries {
                    if ((e[0] == i && e[1] == j) || (e[0] == j && e[1] == i)) && both(e[2]) {
                        out.insert(e[2]);
                    }
                }
                for k in [i, j] {
                    if both(k) {
                        out.insert(k);
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    fn search(&self, i: usize, x: &PointC, j: usize, y: &PointC, all: bool) -> Result<Vec<Span>> {
        let mut out = Vec::new();
        for k in self.bridges(i, j) {
            let (Some(left), Some(right)) = (self.emb(k, i), self.emb(k, j)) else {
                continue;
            };
            for (lam, lam_inv) in left.maps.iter().zip(&left.inverses) {
                let x_k = lam_inv.apply(x)?;
                if !self.contains(k, &x_k)? {
                    continue;
                }
                for mu in &right.maps {
                    if mu.apply(&x_k)? == *y {
                        out.push(Span {
                            k,
                            x_k: x_k.clone(),
                            left: lam.clone(),
                            right: mu.clone(),
                        });
                        if !all {
                            return Ok(out);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// The oracle: a span identifying (i, x) with (j, y), or `None`.
    /// Queries are answered in a canonical orientation, so swapping the
    /// arguments swaps the legs of the answer.
    pub fn refine(&self, i: usize, x: &PointC, j: usize, y: &PointC) -> Result<Option<Span>> {
        if (j, y) < (i, x) {
            return Ok(self.search(j, y, i, x, false)?.pop().map(|s| s.swapped()));
        }
        Ok(self.search(i, x, j, y, false)?.pop())
    }

    /// Every span the oracle's search would consider, in search order.
    pub fn refine_all(&self, i: usize, x: &PointC, j: usize, y: &PointC) -> Result<Vec<Span>> {
        self.search(i, x, j, y, true)
    }

    /// Index h of the group element of chart `dst` with h∘lam = mu.
    pub fn conjugator(&self, dst: usize, lam: &AffineMap, mu: &AffineMap) -> Result<usize> {
        find_conjugator(self.chart(dst), lam, mu)
    }

    /// Atlas with extra charts and embeddings appended (ids must be fresh).
    pub fn extended(&self, charts: Vec<Chart>, embeddings: Vec<Embedding>) -> Result<Atlas> {
        let mut parts = self.parts.clone();
        parts.charts.extend(charts);
        parts.embeddings.extend(embeddings);
        Atlas::new(parts)
    }

    pub fn with_probes(&self, probes: Vec<(usize, PointC)>) -> Result<Atlas> {
        let mut parts = self.parts.clone();
        parts.probes = probes;
        Atlas::new(parts)
    }

    pub fn with_oracle(&self, oracle: OracleSpec) -> Result<Atlas> {
        let mut parts = self.parts.clone();
        parts.oracle = oracle;
        Atlas::new(parts)
    }

    pub fn shared(self) -> Arc<Atlas> {
        Arc::new(self)
    }
}

/// Adds composites of stored embeddings until every composable pair has a
/// representative for its endpoints.
pub fn close_embeddings(parts: &mut AtlasParts) -> Result<()> {
    loop {
        let mut have: BTreeMap<(usize, usize), AffineMap> = BTreeMap::new();
        for e in &parts.embeddings {
            have.entry((e.src, e.dst)).or_insert_with(|| e.map.clone());
        }
        let mut added = Vec::new();
        for (&(a, b), f) in &have {
            for (&(b2, c), g) in have.range((b, 0)..(b + 1, 0)) {
                debug_assert_eq!(b2, b);
                if a != c && !have.contains_key(&(a, c)) && !added.iter().any(|e: &Embedding| e.src == a && e.dst == c) {
                    added.push(Embedding {
                        src: a,
                        dst: c,
                        map: g.compose(f)?,
                    });
                }
            }
        }
        if added.is_empty() {
            return Ok(());
        }
        parts.embeddings.extend(added);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{Ball, CycNum};

    fn cone_pair() -> Atlas {
        let m = 12;
        let big = Chart::cyclic("big", Ball::new(PointC::scalar(CycNum::zero(m)), CycNum::one(m)), 3);
        let small = Chart::cyclic("small", Ball::new(PointC::scalar(CycNum::zero(m)), CycNum::from_ratio(m, 1, 4)), 3);
        Atlas::new(AtlasParts {
            conductor: m,
            dim: 1,
            charts: vec![big, small],
            embeddings: vec![Embedding {
                src: 1,
                dst: 0,
                map: AffineMap::identity(m, 1),
            }],
            oracle: OracleSpec::Gluing,
            witnesses: vec![],
            probes: vec![],
        })
        .unwrap()
    }

    #[test]
    fn torsor_has_group_size() {
        let a = cone_pair();
        assert_eq!(a.embeddings_between(1, 0).len(), 3);
        assert!(a.embeddings_between(0, 1).is_empty());
        assert_eq!(a.bridges(0, 1), vec![1]);
        assert_eq!(a.bridges(0, 0), vec![0, 1]);
    }

    #[test]
    fn oracle_identifies_rotated_points_and_is_symmetric() {
        let a = cone_pair();
        let m = 12;
        let x = PointC::scalar(CycNum::from_ratio(m, 1, 8));
        let y = PointC::scalar(CycNum::zeta(m, 4) * CycNum::from_ratio(m, 1, 8));
        let s = a.refine(0, &x, 1, &y).unwrap().unwrap();
        assert_eq!(s.left.apply(&s.x_k).unwrap(), x);
        assert_eq!(s.right.apply(&s.x_k).unwrap(), y);
        assert_eq!(a.refine(1, &y, 0, &x).unwrap().unwrap(), s.swapped());
        // 1/2 is outside the small chart
        let far = PointC::scalar(CycNum::from_ratio(m, 1, 2));
        assert!(a.refine(0, &far, 1, &far).unwrap().is_none());
    }

    #[test]
    fn closure_adds_composites() {
        let m = 4;
        let mk = |id: &str, r: i64| Chart::trivial(id, Ball::new(PointC::scalar(CycNum::zero(m)), CycNum::from_ratio(m, 1, r)));
        let id = AffineMap::identity(m, 1);
        let mut parts = AtlasParts {
            conductor: m,
            dim: 1,
            charts: vec![mk("a", 1), mk("b", 4), mk("c", 16)],
            embeddings: vec![
                Embedding { src: 2, dst: 1, map: id.clone() },
                Embedding { src: 1, dst: 0, map: id.clone() },
            ],
            oracle: OracleSpec::Gluing,
            witnesses: vec![],
            probes: vec![],
        };
        close_embeddings(&mut parts).unwrap();
        let a = Atlas::new(parts).unwrap();
        assert!(a.rep(2, 0).is_some());
    }
}
