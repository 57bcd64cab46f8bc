//! Open balls with exact membership, containment and intersection predicates.

use std::fmt;

use super::affine::AffineMap;
use super::cyclotomic::CycNum;
use super::point::PointC;
use super::sign::sign_real;
use crate::error::{Error, Result};

/// Open ball B(center, √r2). In dimension 0 it is the single point.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ball {
    pub center: PointC,
    pub r2: CycNum,
}

fn positive(x: &CycNum) -> bool {
    sign_real(x).expect("real-subfield value") > 0
}

fn nonnegative(x: &CycNum) -> bool {
    sign_real(x).expect("real-subfield value") >= 0
}

impl Ball {
    pub fn new(center: PointC, r2: CycNum) -> Self {
        Ball { center, r2 }
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn conductor(&self) -> u32 {
        self.r2.conductor()
    }

    fn d2(&self, p: &PointC) -> Result<Option<CycNum>> {
        self.center.dist2(p)
    }

    pub fn contains_point(&self, p: &PointC) -> Result<bool> {
        match self.d2(p)? {
            None => Ok(true),
            Some(d) => Ok(positive(&(&self.r2 - &d))),
        }
    }

    /// `other ⊆ self`.
    pub fn contains_ball(&self, other: &Ball) -> Result<bool> {
        let d = match self.d2(&other.center)? {
            None => return Ok(true),
            Some(d) => d,
        };
        let (r, rp) = (&self.r2, &other.r2);
        if !nonnegative(&(r - rp)) {
            return Ok(false);
        }
        let s = &(r + rp) - &d;
        if !nonnegative(&s) {
            return Ok(false);
        }
        let four = CycNum::from_int(r.conductor(), 4);
        Ok(nonnegative(&(&(&s * &s) - &(&four * &(r * rp)))))
    }

    pub fn intersects(&self, other: &Ball) -> Result<bool> {
        let d = match self.d2(&other.center)? {
            None => return Ok(true),
            Some(d) => d,
        };
        let (r, rp) = (&self.r2, &other.r2);
        let t = &(&d - r) - rp;
        if !nonnegative(&t) {
            return Ok(true);
        }
        let four = CycNum::from_int(r.conductor(), 4);
        Ok(positive(&(&(&four * &(r * rp)) - &(&t * &t))))
    }

    pub fn image(&self, f: &AffineMap) -> Result<Ball> {
        let lambda = f.similarity_factor().ok_or(Error::NotInvertible)?;
        Ok(Ball {
            center: f.apply(&self.center)?,
            r2: &self.r2 * &lambda,
        })
    }

    /// Same center, radius² divided by 4.
    pub fn halved(&self) -> Ball {
        let q = CycNum::from_ratio(self.conductor(), 1, 4);
        Ball {
            center: self.center.clone(),
            r2: &self.r2 * &q,
        }
    }

    pub fn r2_f64(&self) -> f64 {
        self.r2.to_c64().0
    }
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B({}, r2={})", self.center, self.r2)
    }
}
