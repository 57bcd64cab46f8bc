//! Polynomial maps ℂⁿ → ℂᵏ with cyclotomic coefficients.

use std::collections::BTreeMap;
use std::fmt;

use super::affine::AffineMap;
use super::ball::Ball;
use super::cyclotomic::CycNum;
use super::point::PointC;
use crate::error::{Error, Result};

/// Sparse polynomial in `n` variables; exponent vectors map to nonzero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    pub n: usize,
    pub terms: BTreeMap<Vec<u32>, CycNum>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: CycNum) -> Self {
        let mut p = Self::zero(n);
        p.add_term(vec![0; n], c);
        p
    }

    pub fn variable(n: usize, k: usize, m: u32) -> Self {
        let mut e = vec![0; n];
        e[k] = 1;
        let mut p = Self::zero(n);
        p.add_term(e, CycNum::one(m));
        p
    }

    pub fn add_term(&mut self, exp: Vec<u32>, c: CycNum) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&exp) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(exp, s);
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, s: &CycNum) -> Poly {
        let mut out = Poly::zero(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, p: &PointC, m: u32) -> Result<CycNum> {
        if p.dim() != self.n {
            return Err(Error::DimMismatch(self.n, p.dim()));
        }
        let mut acc = CycNum::zero(m);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (z, k) in p.coords().iter().zip(e) {
                if *k > 0 {
                    t = t.checked_mul(&z.pow(*k))?;
                }
            }
            acc = acc.checked_add(&t)?;
        }
        Ok(acc)
    }

    /// Substitutes polynomial `subs[k]` (in `inner_n` variables) for variable k.
    pub fn substitute(&self, subs: &[Poly], inner_n: usize, m: u32) -> Poly {
        let mut out = Poly::zero(inner_n);
        let mut cache: Vec<Vec<Poly>> = subs.iter().map(|_| Vec::new()).collect();
        for (e, c) in &self.terms {
            let mut t = Poly::constant(inner_n, c.clone());
            for (k, &pw) in e.iter().enumerate() {
                if pw == 0 {
                    continue;
                }
                let powers = &mut cache[k];
                if powers.is_empty() {
                    powers.push(Poly::constant(inner_n, CycNum::one(m)));
                }
                while powers.len() <= pw as usize {
                    let next = powers.last().unwrap().mul(&subs[k]);
                    powers.push(next);
                }
                t = t.mul(&powers[pw as usize]);
            }
            out = out.add(&t);
        }
        out
    }
}

/// A polynomial map with fixed source and target dimensions and conductor.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyMap {
    pub m: u32,
    pub in_dim: usize,
    pub comps: Vec<Poly>,
}

impl PolyMap {
    pub fn new(m: u32, in_dim: usize, comps: Vec<Poly>) -> Result<Self> {
        for p in &comps {
            if p.n != in_dim {
                return Err(Error::DimMismatch(p.n, in_dim));
            }
            for c in p.terms.values() {
                if c.conductor() != m {
                    return Err(Error::ConductorMismatch(c.conductor(), m));
                }
            }
        }
        Ok(PolyMap { m, in_dim, comps })
    }

    pub fn out_dim(&self) -> usize {
        self.comps.len()
    }

    pub fn identity(m: u32, n: usize) -> Self {
        PolyMap {
            m,
            in_dim: n,
            comps: (0..n).map(|k| Poly::variable(n, k, m)).collect(),
        }
    }

    pub fn constant(m: u32, in_dim: usize, value: &PointC) -> Self {
        PolyMap {
            m,
            in_dim,
            comps: value.coords().iter().map(|c| Poly::constant(in_dim, c.clone())).collect(),
        }
    }

    pub fn from_affine(f: &AffineMap) -> Self {
        let n = f.dim();
        let m = f.conductor();
        let comps = (0..n)
            .map(|i| {
                let mut p = Poly::constant(n, f.offset().coords()[i].clone());
                for j in 0..n {
                    let mut e = vec![0; n];
                    e[j] = 1;
                    p.add_term(e, f.matrix()[i][j].clone());
                }
                p
            })
            .collect();
        PolyMap { m, in_dim: n, comps }
    }

    /// One-variable monomial map z ↦ c·z^k.
    pub fn monomial(c: &CycNum, k: u32) -> Self {
        let mut p = Poly::zero(1);
        p.add_term(vec![k], c.clone());
        PolyMap {
            m: c.conductor(),
            in_dim: 1,
            comps: vec![p],
        }
    }

    /// The affine map this polynomial map equals, if its degree is at most one.
    pub fn as_affine(&self) -> Option<AffineMap> {
        let n = self.in_dim;
        if self.out_dim() != n || self.comps.iter().any(|p| p.degree() > 1) {
            return None;
        }
        let mut a = vec![vec![CycNum::zero(self.m); n]; n];
        let mut b = vec![CycNum::zero(self.m); n];
        for (i, p) in self.comps.iter().enumerate() {
            for (e, c) in &p.terms {
                match e.iter().position(|&k| k == 1) {
                    Some(j) => a[i][j] = c.clone(),
                    None => b[i] = c.clone(),
                }
            }
        }
        AffineMap::new(self.m, a, PointC(b)).ok()
    }

    pub fn eval(&self, p: &PointC) -> Result<PointC> {
        self.comps.iter().map(|q| q.eval(p, self.m)).collect::<Result<Vec<_>>>().map(PointC)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolyMap) -> Result<PolyMap> {
        if inner.out_dim() != self.in_dim {
            return Err(Error::DimMismatch(inner.out_dim(), self.in_dim));
        }
        if inner.m != self.m {
            return Err(Error::ConductorMismatch(inner.m, self.m));
        }
        let comps = self
            .comps
            .iter()
            .map(|p| p.substitute(&inner.comps, inner.in_dim, self.m))
            .collect();
        Ok(PolyMap {
            m: self.m,
            in_dim: inner.in_dim,
            comps,
        })
    }

    pub fn then_affine(&self, f: &AffineMap) -> Result<PolyMap> {
        PolyMap::from_affine(f).compose(self)
    }

    pub fn after_affine(&self, f: &AffineMap) -> Result<PolyMap> {
        self.compose(&PolyMap::from_affine(f))
    }

    pub fn degree(&self) -> u32 {
        self.comps.iter().map(|p| p.degree()).max().unwrap_or(0)
    }

    /// Sufficient condition for f(src) ⊆ dst: |f(c) - c'| + Σ_{α≠0}|a_α| r^{|α|} < r',
    /// with coefficients expanded at the source center. Evaluated in floating point
    /// with a safety margin, so `true` is reliable and `false` is inconclusive.
    pub fn maps_ball_into(&self, src: &Ball, dst: &Ball) -> Result<bool> {
        if self.out_dim() == 0 {
            return Ok(true);
        }
        let r = src.r2_f64().max(0.0).sqrt();
        let rp = dst.r2_f64().max(0.0).sqrt();
        let shift = PolyMap::from_affine(&AffineMap::translation(&src.center, self.m));
        let local = self.compose(&shift)?;
        let mut spread2 = 0.0;
        for p in &local.comps {
            let mut s = 0.0;
            for (e, c) in &p.terms {
                let deg: u32 = e.iter().sum();
                if deg > 0 {
                    let (re, im) = c.to_c64();
                    s += (re * re + im * im).sqrt() * r.powi(deg as i32);
                }
            }
            spread2 += s * s;
        }
        let fc = self.eval(&src.center)?;
        let off = fc.sub(&dst.center)?;
        let off = off
            .to_c64()
            .iter()
            .map(|(re, im)| re * re + im * im)
            .sum::<f64>()
            .sqrt();
        let total = off + spread2.sqrt();
        Ok(total * (1.0 + 1e-9) + 1e-12 < rp)
    }
}

impl fmt::Debug for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.comps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if p.terms.is_empty() {
                write!(f, "0")?;
            }
            for (k, (e, c)) in p.terms.iter().enumerate() {
                if k > 0 {
                    write!(f, " + ")?;
                }
                write!(f, "({c})")?;
                for (v, pw) in e.iter().enumerate() {
                    if *pw > 0 {
                        write!(f, "*z{v}^{pw}")?;
                    }
                }
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_of_square_is_fourth_power() {
        let sq = PolyMap::monomial(&CycNum::one(12), 2);
        assert_eq!(sq.compose(&sq).unwrap(), PolyMap::monomial(&CycNum::one(12), 4));
    }

    #[test]
    fn affine_roundtrip() {
        let f = AffineMap::scale_translate(&CycNum::zeta(12, 1), &PointC::scalar(CycNum::from_ratio(12, 1, 3)));
        assert_eq!(PolyMap::from_affine(&f).as_affine().unwrap(), f);
    }

    #[test]
    fn rotation_equivariance_of_square() {
        let m = 3;
        let sq = PolyMap::monomial(&CycNum::one(m), 2);
        let r = AffineMap::scalar(&CycNum::zeta(m, 1), 1);
        let r2 = AffineMap::scalar(&CycNum::zeta(m, 2), 1);
        assert_eq!(sq.after_affine(&r).unwrap(), sq.then_affine(&r2).unwrap());
    }

    #[test]
    fn eval_matches_composition() {
        let m = 4;
        let p = PolyMap::monomial(&CycNum::zeta(m, 1), 3);
        let x = PointC::scalar(CycNum::from_ratio(m, 1, 2) + CycNum::zeta(m, 1));
        let f = AffineMap::scale_translate(&CycNum::from_int(m, 2), &PointC::scalar(CycNum::one(m)));
        let lhs = p.after_affine(&f).unwrap().eval(&x).unwrap();
        let rhs = p.eval(&f.apply(&x).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn ball_bound() {
        let m = 4;
        let unit = Ball::new(PointC::scalar(CycNum::zero(m)), CycNum::one(m));
        let sq = PolyMap::monomial(&CycNum::one(m), 2);
        assert!(!sq.maps_ball_into(&unit, &unit).unwrap());
        let half = Ball::new(PointC::scalar(CycNum::zero(m)), CycNum::from_ratio(m, 1, 4));
        assert!(sq.maps_ball_into(&half, &unit).unwrap());
    }
}
