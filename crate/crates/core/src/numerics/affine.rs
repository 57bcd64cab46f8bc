//! Affine maps z ↦ Az + b over ℚ(ζ_m), normally similarities.

use std::fmt;

use super::cyclotomic::CycNum;
use super::point::PointC;
use super::sign::sign_real;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineMap {
    m: u32,
    a: Vec<Vec<CycNum>>,
    b: PointC,
}

impl AffineMap {
    pub fn new(m: u32, a: Vec<Vec<CycNum>>, b: PointC) -> Result<Self> {
        let n = b.dim();
        if a.len() != n {
            return Err(Error::DimMismatch(a.len(), n));
        }
        for row in &a {
            if row.len() != n {
                return Err(Error::DimMismatch(row.len(), n));
            }
            for z in row {
                if z.conductor() != m {
                    return Err(Error::ConductorMismatch(z.conductor(), m));
                }
            }
        }
        for z in b.coords() {
            if z.conductor() != m {
                return Err(Error::ConductorMismatch(z.conductor(), m));
            }
        }
        Ok(AffineMap { m, a, b })
    }

    pub fn identity(m: u32, n: usize) -> Self {
        Self::scalar(&CycNum::one(m), n)
    }

    /// z ↦ s·z in every coordinate.
    pub fn scalar(s: &CycNum, n: usize) -> Self {
        let m = s.conductor();
        let a = (0..n)
            .map(|i| (0..n).map(|j| if i == j { s.clone() } else { CycNum::zero(m) }).collect())
            .collect();
        AffineMap { m, a, b: PointC::zero(m, n) }
    }

    pub fn translation(t: &PointC, m: u32) -> Self {
        let mut f = Self::identity(m, t.dim());
        f.b = t.clone();
        f
    }

    /// z ↦ s·z + t.
    pub fn scale_translate(s: &CycNum, t: &PointC) -> Self {
        let mut f = Self::scalar(s, t.dim());
        f.b = t.clone();
        f
    }

    /// z ↦ s·(z - c) + c.
    pub fn about(s: &CycNum, c: &PointC) -> Self {
        let shift = c.sub(&c.scale(s)).expect("same dimension");
        Self::scale_translate(s, &shift)
    }

    pub fn conductor(&self) -> u32 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    pub fn matrix(&self) -> &[Vec<CycNum>] {
        &self.a
    }

    pub fn offset(&self) -> &PointC {
        &self.b
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.m, self.dim())
    }

    pub fn apply(&self, p: &PointC) -> Result<PointC> {
        if p.dim() != self.dim() {
            return Err(Error::DimMismatch(self.dim(), p.dim()));
        }
        let mut out = Vec::with_capacity(self.dim());
        for (row, bi) in self.a.iter().zip(self.b.coords()) {
            let mut acc = bi.clone();
            for (aij, pj) in row.iter().zip(p.coords()) {
                if !aij.is_zero() {
                    acc = acc.checked_add(&aij.checked_mul(pj)?)?;
                }
            }
            out.push(acc);
        }
        Ok(PointC(out))
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &AffineMap) -> Result<AffineMap> {
        if self.dim() != g.dim() {
            return Err(Error::DimMismatch(self.dim(), g.dim()));
        }
        if self.m != g.m {
            return Err(Error::ConductorMismatch(self.m, g.m));
        }
        let n = self.dim();
        let mut a = vec![vec![CycNum::zero(self.m); n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = CycNum::zero(self.m);
                for k in 0..n {
                    if !self.a[i][k].is_zero() && !g.a[k][j].is_zero() {
                        acc = acc + &self.a[i][k] * &g.a[k][j];
                    }
                }
                *cell = acc;
            }
        }
        let b = self.apply(&g.b)?;
        Ok(AffineMap { m: self.m, a, b })
    }

    /// λ with A*A = λ·Id, if A is a similarity matrix. Dimension 0 gives 1.
    pub fn similarity_factor(&self) -> Option<CycNum> {
        let n = self.dim();
        if n == 0 {
            return Some(CycNum::one(self.m));
        }
        let mut lambda = None;
        for i in 0..n {
            for j in 0..n {
                let mut acc = CycNum::zero(self.m);
                for k in 0..n {
                    acc = acc + self.a[k][i].conj() * &self.a[k][j];
                }
                if i == j {
                    match &lambda {
                        None => lambda = Some(acc),
                        Some(l) if *l == acc => {}
                        Some(_) => return None,
                    }
                } else if !acc.is_zero() {
                    return None;
                }
            }
        }
        lambda
    }

    /// True iff A*A = λ·Id with λ > 0.
    pub fn is_similarity(&self) -> bool {
        match self.similarity_factor() {
            Some(l) => sign_real(&l).map(|s| s > 0).unwrap_or(false),
            None => false,
        }
    }

    /// Inverse of a similarity: A⁻¹ = A*/λ.
    pub fn inverse(&self) -> Result<AffineMap> {
        let lambda = self.similarity_factor().ok_or(Error::NotInvertible)?;
        if lambda.is_zero() {
            return Err(Error::NotInvertible);
        }
        let inv_l = lambda.checked_inv()?;
        let n = self.dim();
        let a: Vec<Vec<CycNum>> = (0..n)
            .map(|i| (0..n).map(|j| self.a[j][i].conj() * &inv_l).collect())
            .collect();
        let lin = AffineMap {
            m: self.m,
            a,
            b: PointC::zero(self.m, n),
        };
        let b = lin.apply(&self.b)?;
        Ok(AffineMap {
            m: self.m,
            a: lin.a,
            b: PointC(b.0.into_iter().map(|z| -z).collect()),
        })
    }

    pub fn lift_to(&self, m: u32) -> Result<AffineMap> {
        let a = self
            .a
            .iter()
            .map(|row| row.iter().map(|z| z.lift_to(m)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(AffineMap {
            m,
            a,
            b: self.b.lift_to(m)?,
        })
    }
}

/// Exact equality of canonical forms.
pub fn affine_equal(f: &AffineMap, g: &AffineMap) -> bool {
    f == g
}

pub fn affine_compose(f: &AffineMap, g: &AffineMap) -> Result<AffineMap> {
    f.compose(g)
}

impl fmt::Debug for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim() == 1 {
            return write!(f, "z -> ({})z + ({})", self.a[0][0], self.b.coords()[0]);
        }
        write!(f, "z -> [")?;
        for (i, row) in self.a.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, z) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{z}")?;
            }
        }
        write!(f, "]z + {}", self.b)
    }
}
