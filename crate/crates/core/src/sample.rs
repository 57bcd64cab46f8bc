//! Seeded sampling of exact points.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::{sign_real, Ball, CycNum, PointC};

const GRID: i64 = 32;

/// Deterministic sampler; every sampled set in the crate derives from one of these.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Child sampler with a stream derived from this one, for independent sub-tasks.
    pub fn fork(&mut self) -> Sampler {
        Sampler::new(self.rng.gen())
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn small_int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    fn grid_unit(&mut self) -> BigRational {
        BigRational::new(BigInt::from(self.rng.gen_range(-GRID..=GRID)), BigInt::from(GRID))
    }

    /// A point of the open ball, with small dyadic-over-grid coordinates offsets.
    /// Falls back to the center after repeated rejection.
    pub fn point_in_ball(&mut self, ball: &Ball) -> PointC {
        let m = ball.conductor();
        let n = ball.dim();
        if n == 0 {
            return ball.center.clone();
        }
        let rho = rational_below_sqrt(ball);
        let dir = imaginary_direction(m);
        for _ in 0..64 {
            let coords = ball
                .center
                .coords()
                .iter()
                .map(|c| {
                    let a = CycNum::from_rational(m, &(&self.grid_unit() * &rho));
                    let mut z = c + &a;
                    if let Some(u) = &dir {
                        let b = CycNum::from_rational(m, &(&self.grid_unit() * &rho));
                        z = z + &(&b * u);
                    }
                    z
                })
                .collect();
            let p = PointC(coords);
            if ball.contains_point(&p).unwrap_or(false) {
                return p;
            }
        }
        ball.center.clone()
    }
}

/// A non-real root of unity to spread samples off the real axis, if the field has one.
pub fn imaginary_direction(m: u32) -> Option<CycNum> {
    if m.is_multiple_of(4) {
        Some(CycNum::zeta(m, (m / 4) as i64))
    } else if m >= 3 {
        Some(CycNum::zeta(m, 1))
    } else {
        None
    }
}

/// A positive rational ρ with ρ² ≤ r², of the form k/2^10.
fn rational_below_sqrt(ball: &Ball) -> BigRational {
    let approx = ball.r2_f64().max(0.0).sqrt();
    let scale = 1024i64;
    let mut k = (approx * scale as f64).floor() as i64;
    loop {
        if k <= 0 {
            return BigRational::new(1.into(), (scale * 1024).into());
        }
        let rho = BigRational::new(k.into(), scale.into());
        let rho2 = CycNum::from_rational(ball.conductor(), &(&rho * &rho));
        if sign_real(&(&ball.r2 - &rho2)).unwrap_or(-1) >= 0 {
            return rho;
        }
        k -= 1;
    }
}
