use std::fmt;

use serde::{Deserialize, Serialize};

use super::cyclotomic::CycNum;
use crate::error::{Error, Result};

/// A point of ℂⁿ with exact cyclotomic coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointC(pub Vec<CycNum>);

impl PointC {
    pub fn new(coords: Vec<CycNum>) -> Self {
        PointC(coords)
    }

    pub fn zero(m: u32, n: usize) -> Self {
        PointC(vec![CycNum::zero(m); n])
    }

    /// One-dimensional point.
    pub fn scalar(z: CycNum) -> Self {
        PointC(vec![z])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[CycNum] {
        &self.0
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<Vec<_>>>()
            .map(PointC)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(b))
            .collect::<Result<Vec<_>>>()
            .map(PointC)
    }

    pub fn scale(&self, s: &CycNum) -> Self {
        PointC(self.0.iter().map(|a| a * s).collect())
    }

    /// Squared hermitian norm Σ|z_k|², in the real subfield. `None` in dimension 0.
    pub fn norm2(&self) -> Option<CycNum> {
        let mut it = self.0.iter();
        let first = it.next()?.abs2();
        Some(it.fold(first, |acc, z| acc + z.abs2()))
    }

    pub fn dist2(&self, other: &Self) -> Result<Option<CycNum>> {
        Ok(self.sub(other)?.norm2())
    }

    pub fn to_c64(&self) -> Vec<(f64, f64)> {
        self.0.iter().map(|z| z.to_c64()).collect()
    }

    pub fn lift_to(&self, m: u32) -> Result<Self> {
        self.0.iter().map(|z| z.lift_to(m)).collect::<Result<Vec<_>>>().map(PointC)
    }
}

impl fmt::Debug for PointC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PointC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, z) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{z}")?;
        }
        write!(f, ")")
    }
}
