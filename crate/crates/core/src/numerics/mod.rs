//! Exact arithmetic over ℚ(ζ_m) and the affine calculus built on it.

pub mod affine;
pub mod ball;
pub mod cyclotomic;
pub mod point;
pub mod poly;
pub mod sign;

pub use affine::{affine_compose, affine_equal, AffineMap};
pub use ball::Ball;
pub use cyclotomic::{parse_rational, rational_to_string, CycNum};
pub use point::PointC;
pub use poly::{Poly, PolyMap};
pub use sign::{sign_real, sign_real_exact};

use crate::error::Result;

/// Field operation selector for [`cyc_ops`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycOp {
    Add,
    Mul,
    Inv,
    Conj,
}

/// Binary operations use both arguments; `Inv` and `Conj` ignore `b` except for the conductor check.
pub fn cyc_ops(a: &CycNum, b: &CycNum, kind: CycOp) -> Result<CycNum> {
    if a.conductor() != b.conductor() {
        return Err(crate::error::Error::ConductorMismatch(a.conductor(), b.conductor()));
    }
    match kind {
        CycOp::Add => a.checked_add(b),
        CycOp::Mul => a.checked_mul(b),
        CycOp::Inv => a.checked_inv(),
        CycOp::Conj => Ok(a.conj()),
    }
}
