//! Uniformizing systems and the group-theoretic facts about their embeddings.

use std::collections::HashMap;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::numerics::{AffineMap, Ball, CycNum, PointC};
use crate::report::Report;

/// A ball domain with a finite group of similarities acting on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub id: String,
    pub domain: Ball,
    pub group: Vec<AffineMap>,
}

/// Multiplication table of a chart group: `mul[a][b]` indexes g_a ∘ g_b.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    pub mul: Vec<Vec<usize>>,
    pub inv: Vec<usize>,
    pub identity: usize,
}

impl GroupTable {
    /// `None` if the list has duplicates, lacks the identity, or is not closed.
    pub fn build(group: &[AffineMap]) -> Option<GroupTable> {
        let lookup = index_of(group)?;
        let identity = group.iter().position(|g| g.is_identity())?;
        let mut mul = vec![vec![0; group.len()]; group.len()];
        for (a, ga) in group.iter().enumerate() {
            for (b, gb) in group.iter().enumerate() {
                mul[a][b] = *lookup.get(&ga.compose(gb).ok()?)?;
            }
        }
        let inv = (0..group.len())
            .map(|a| (0..group.len()).find(|&b| mul[a][b] == identity))
            .collect::<Option<Vec<_>>>()?;
        Some(GroupTable { mul, inv, identity })
    }

    pub fn order(&self) -> usize {
        self.inv.len()
    }
}

fn index_of(group: &[AffineMap]) -> Option<HashMap<AffineMap, usize>> {
    let mut lookup = HashMap::new();
    for (k, g) in group.iter().enumerate() {
        if lookup.insert(g.clone(), k).is_some() {
            return None;
        }
    }
    Some(lookup)
}

impl Chart {
    pub fn new(id: impl Into<String>, domain: Ball, group: Vec<AffineMap>) -> Self {
        Chart {
            id: id.into(),
            domain,
            group,
        }
    }

    /// The chart (B, {1}).
    pub fn trivial(id: impl Into<String>, domain: Ball) -> Self {
        let m = domain.conductor();
        let n = domain.dim();
        Chart::new(id, domain, vec![AffineMap::identity(m, n)])
    }

    /// Ball about `center` with the cyclic rotation group of order p about it.
    pub fn cyclic(id: impl Into<String>, domain: Ball, p: u32) -> Self {
        let m = domain.conductor();
        assert!(m.is_multiple_of(p), "rotation order must divide the conductor");
        let step = (m / p) as i64;
        let group = (0..p as i64)
            .map(|k| AffineMap::about(&CycNum::zeta(m, k * step), &domain.center))
            .collect();
        Chart::new(id, domain, group)
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn conductor(&self) -> u32 {
        self.domain.conductor()
    }

    pub fn order(&self) -> usize {
        self.group.len()
    }

    pub fn contains(&self, x: &PointC) -> Result<bool> {
        self.domain.contains_point(x)
    }

    fn require_inside(&self, x: &PointC) -> Result<()> {
        if !self.contains(x)? {
            return Err(Error::PointOutsideDomain(self.id.clone()));
        }
        Ok(())
    }

    /// Indices of group elements fixing `x`.
    pub fn stabilizer_indices(&self, x: &PointC) -> Result<Vec<usize>> {
        self.require_inside(x)?;
        let mut out = Vec::new();
        for (k, g) in self.group.iter().enumerate() {
            if g.apply(x)? == *x {
                out.push(k);
            }
        }
        Ok(out)
    }

    pub fn group_index(&self, g: &AffineMap) -> Option<usize> {
        self.group.iter().position(|h| h == g)
    }
}

/// Lists every violated chart invariant; an empty report means a valid reduced chart.
pub fn validate_chart(c: &Chart) -> Report {
    let mut r = Report::new(format!("chart {}", c.id));
    let m = c.conductor();
    let n = c.dim();
    r.record("chart.radius_positive", crate::numerics::sign_real(&c.domain.r2).map(|s| s > 0).unwrap_or(false), || {
        format!("radius² {} is not positive", c.domain.r2)
    });
    for (k, g) in c.group.iter().enumerate() {
        r.record("chart.dimension", g.dim() == n && g.conductor() == m, || {
            format!("element {k} has dim {} conductor {}", g.dim(), g.conductor())
        });
    }
    if r.has_failure("chart.dimension") {
        return r;
    }
    r.record("chart.identity", c.group.iter().any(|g| g.is_identity()), || "identity missing".into());
    let mut seen: HashMap<&AffineMap, usize> = HashMap::new();
    for (k, g) in c.group.iter().enumerate() {
        let dup = seen.insert(g, k);
        r.record("chart.faithful", dup.is_none(), || format!("element {k} repeats element {}", dup.unwrap_or(0)));
    }
    for (k, g) in c.group.iter().enumerate() {
        r.record("chart.similarity", g.is_similarity(), || format!("element {k} is not a similarity"));
    }
    if r.has_failure("chart.similarity") {
        return r;
    }
    for (a, ga) in c.group.iter().enumerate() {
        for (b, gb) in c.group.iter().enumerate() {
            let prod = ga.compose(gb).expect("same dims");
            r.record("chart.closed", seen.contains_key(&prod), || format!("g{a}∘g{b} = {prod} not listed"));
        }
        let inv = ga.inverse().expect("similarity");
        r.record("chart.inverse", seen.contains_key(&inv), || format!("inverse of g{a} not listed"));
        let img = c.domain.image(ga).expect("similarity");
        r.record("chart.preserves_domain", img == c.domain || (c.domain.contains_ball(&img).unwrap_or(false) && img.contains_ball(&c.domain).unwrap_or(false)), || {
            format!("g{a} maps {} to {img}", c.domain)
        });
    }
    r
}

/// Group elements fixing `x`.
pub fn stabilizer(c: &Chart, x: &PointC) -> Result<Vec<AffineMap>> {
    Ok(c.stabilizer_indices(x)?.into_iter().map(|k| c.group[k].clone()).collect())
}

pub fn has_trivial_stabilizer(c: &Chart, x: &PointC) -> Result<bool> {
    Ok(c.stabilizer_indices(x)?.len() == 1)
}

/// The unique index h in `dst.group` with h∘lam = mu, found by full enumeration.
pub fn find_conjugator(dst: &Chart, lam: &AffineMap, mu: &AffineMap) -> Result<usize> {
    let mut found = None;
    for (k, h) in dst.group.iter().enumerate() {
        if h.compose(lam)? == *mu {
            if found.is_some() {
                return Err(Error::NotUnique(format!("two elements of {} conjugate the maps", dst.id)));
            }
            found = Some(k);
        }
    }
    found.ok_or_else(|| Error::NoConjugator(format!("no h in {} with h∘λ = μ", dst.id)))
}

/// Λ as an index map G_src → G_dst with lam∘g = Λ(g)∘lam.
pub fn induced_homomorphism(src: &Chart, dst: &Chart, lam: &AffineMap) -> Result<Vec<usize>> {
    src.group
        .iter()
        .map(|g| find_conjugator(dst, lam, &lam.compose(g)?))
        .collect()
}

/// If h moves lam(domain) onto an overlapping set, the g in G_src with Λ(g) = h.
pub fn overlap_transport(src: &Chart, dst: &Chart, lam: &AffineMap, h: usize) -> Result<Option<usize>> {
    let img = src.domain.image(lam)?;
    let moved = img.image(&dst.group[h])?;
    if !moved.intersects(&img)? {
        return Ok(None);
    }
    let lambda = induced_homomorphism(src, dst, lam)?;
    match lambda.iter().position(|&x| x == h) {
        Some(g) => Ok(Some(g)),
        None => Err(Error::NoConjugator(format!(
            "element {h} of {} overlaps the image but is not induced",
            dst.id
        ))),
    }
}

const MAX_HALVINGS: usize = 48;

/// Chart on B(x, r) with the stabilizer of x, shrinking r until the ball is inside the
/// domain, stabilizer-invariant and disjoint from its other translates.
pub fn restrict_chart(c: &Chart, x: &PointC, r2: &BigRational, id: impl Into<String>) -> Result<(Chart, AffineMap)> {
    let stab = c.stabilizer_indices(x)?;
    let m = c.conductor();
    let mut ball = Ball::new(x.clone(), CycNum::from_rational(m, r2));
    for _ in 0..MAX_HALVINGS {
        if restriction_ok(c, &ball, &stab)? {
            let group = stab.iter().map(|&k| c.group[k].clone()).collect();
            let chart = Chart::new(id, ball, group);
            return Ok((chart, AffineMap::identity(m, c.dim())));
        }
        ball = ball.halved();
    }
    Err(Error::InvalidChart(format!("no admissible radius around {x} in {}", c.id)))
}

fn restriction_ok(c: &Chart, ball: &Ball, stab: &[usize]) -> Result<bool> {
    if !c.domain.contains_ball(ball)? {
        return Ok(false);
    }
    for (k, g) in c.group.iter().enumerate() {
        let img = ball.image(g)?;
        if stab.contains(&k) {
            if img != *ball {
                return Ok(false);
            }
        } else if img.intersects(ball)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone(p: u32) -> Chart {
        let m = 12;
        Chart::cyclic("c", Ball::new(PointC::scalar(CycNum::zero(m)), CycNum::one(m)), p)
    }

    fn pt(z: CycNum) -> PointC {
        PointC::scalar(z)
    }

    #[test]
    fn cone_is_valid() {
        let r = validate_chart(&cone(3));
        assert!(r.is_ok(), "{}", r.render_text());
    }

    #[test]
    fn duplicate_identity_breaks_faithfulness() {
        let mut c = cone(3);
        c.group.push(AffineMap::identity(12, 1));
        assert!(validate_chart(&c).has_failure("chart.faithful"));
    }

    #[test]
    fn dilation_breaks_domain() {
        let m = 12;
        let c = Chart::new(
            "bad",
            Ball::new(pt(CycNum::zero(m)), CycNum::one(m)),
            vec![AffineMap::identity(m, 1), AffineMap::scalar(&CycNum::from_int(m, 2), 1)],
        );
        assert!(validate_chart(&c).has_failure("chart.preserves_domain"));
    }

    #[test]
    fn stabilizers() {
        let c = cone(3);
        assert_eq!(stabilizer(&c, &pt(CycNum::zero(12))).unwrap().len(), 3);
        assert_eq!(stabilizer(&c, &pt(CycNum::from_ratio(12, 1, 4))).unwrap().len(), 1);
        assert!(has_trivial_stabilizer(&c, &pt(CycNum::from_ratio(12, 1, 4))).unwrap());
        assert!(!has_trivial_stabilizer(&c, &pt(CycNum::zero(12))).unwrap());
        assert_eq!(
            stabilizer(&c, &pt(CycNum::from_int(12, 2))),
            Err(Error::PointOutsideDomain("c".into()))
        );
    }

    #[test]
    fn conjugators() {
        let m = 12;
        let c = cone(3);
        let incl = AffineMap::identity(m, 1);
        let rot = AffineMap::scalar(&CycNum::zeta(m, 4), 1);
        assert_eq!(c.group[find_conjugator(&c, &incl, &incl).unwrap()], incl);
        assert_eq!(c.group[find_conjugator(&c, &incl, &rot).unwrap()], rot);
        let shift = AffineMap::translation(&pt(CycNum::from_ratio(m, 1, 4)), m);
        assert!(matches!(find_conjugator(&c, &incl, &shift), Err(Error::NoConjugator(_))));
    }

    #[test]
    fn induced_maps() {
        let m = 12;
        let c = cone(3);
        let lam = AffineMap::scalar(&CycNum::zeta(m, 1), 1);
        let l = induced_homomorphism(&c, &c, &lam).unwrap();
        assert_eq!(l, vec![0, 1, 2]);
        let c6 = cone(6);
        let t = GroupTable::build(&c6.group).unwrap();
        let l6 = induced_homomorphism(&c6, &c6, &lam).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(l6[t.mul[a][b]], t.mul[l6[a]][l6[b]]);
            }
        }
    }

    #[test]
    fn transport() {
        let m = 12;
        let c = cone(3);
        let (sub, incl) = restrict_chart(&c, &pt(CycNum::zero(m)), &BigRational::new(1.into(), 4.into()), "s").unwrap();
        assert_eq!(sub.order(), 3);
        assert_eq!(overlap_transport(&sub, &c, &incl, 1).unwrap(), Some(1));
        // a sub-ball off the axis is moved off itself by the half turn
        let c2 = Chart::cyclic("c2", c.domain.clone(), 2);
        let small = Chart::trivial("s", Ball::new(pt(CycNum::from_ratio(m, 1, 2)), CycNum::from_ratio(m, 1, 64)));
        let id = AffineMap::identity(m, 1);
        assert_eq!(overlap_transport(&small, &c2, &id, 0).unwrap(), Some(0));
        assert_eq!(overlap_transport(&small, &c2, &id, 1).unwrap(), None);
    }

    #[test]
    fn restriction_halves_off_axis() {
        let m = 12;
        let c = cone(3);
        let x = pt(CycNum::from_ratio(m, 1, 4));
        let (sub, _) = restrict_chart(&c, &x, &BigRational::from_integer(1.into()), "s").unwrap();
        assert_eq!(sub.order(), 1);
        assert!(validate_chart(&sub).is_ok());
        let rotated = sub.domain.image(&c.group[1]).unwrap();
        assert!(!rotated.intersects(&sub.domain).unwrap());
        let (sub0, _) = restrict_chart(&c, &pt(CycNum::zero(m)), &BigRational::new(1.into(), 4.into()), "s0").unwrap();
        assert_eq!(sub0.domain.r2, CycNum::from_ratio(m, 1, 4));
        assert_eq!(sub0.order(), 3);
    }
}
