//! Shared helpers for the integration tests: a high-precision evaluator for
//! cyclotomic numbers and random element generators.
#![allow(dead_code)]

use std::collections::HashMap;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::FromPrimitive;
use orbicat::numerics::CycNum;
use rand::Rng;

const P: usize = 512;
const RM: RoundingMode = RoundingMode::ToEven;

/// Evaluates Σ c_k ζ^k with ζ = exp(2πi/m) in 512-bit floating point, independently
/// of the crate's own fixed-point sign routine.
pub struct Oracle {
    cc: Consts,
    roots: HashMap<u32, Vec<(BigFloat, BigFloat)>>,
    eps: BigFloat,
}

impl Default for Oracle {
    fn default() -> Self {
        Self::new()
    }
}

impl Oracle {
    pub fn new() -> Self {
        Oracle {
            cc: Consts::new().expect("constants cache"),
            roots: HashMap::new(),
            eps: BigFloat::from_f64(2f64.powi(-400), P),
        }
    }

    fn int(&mut self, v: &BigInt) -> BigFloat {
        BigFloat::parse(&v.to_string(), Radix::Dec, P, RM, &mut self.cc)
    }

    fn rational(&mut self, r: &BigRational) -> BigFloat {
        let n = self.int(r.numer());
        let d = self.int(r.denom());
        n.div(&d, P, RM)
    }

    fn roots(&mut self, m: u32) -> &[(BigFloat, BigFloat)] {
        if !self.roots.contains_key(&m) {
            let two_pi = self.cc.pi(P, RM).mul(&BigFloat::from_word(2, P), P, RM);
            let step = two_pi.div(&BigFloat::from_word(m as u64, P), P, RM);
            let table = (0..m)
                .map(|k| {
                    let t = step.mul(&BigFloat::from_word(k as u64, P), P, RM);
                    (t.cos(P, RM, &mut self.cc), t.sin(P, RM, &mut self.cc))
                })
                .collect();
            self.roots.insert(m, table);
        }
        &self.roots[&m]
    }

    /// Real and imaginary parts, plus Σ|c_k| as an error scale.
    pub fn eval(&mut self, x: &CycNum) -> (BigFloat, BigFloat, BigFloat) {
        let coeffs: Vec<BigFloat> = x.coeffs().iter().map(|c| self.rational(c)).collect();
        let roots = self.roots(x.conductor()).to_vec();
        let (mut re, mut im, mut mag) = (BigFloat::from_word(0, P), BigFloat::from_word(0, P), BigFloat::from_word(1, P));
        for (c, (cs, sn)) in coeffs.iter().zip(roots) {
            re = re.add(&c.mul(&cs, P, RM), P, RM);
            im = im.add(&c.mul(&sn, P, RM), P, RM);
            mag = mag.add(&c.abs(), P, RM);
        }
        (re, im, mag)
    }

    /// Sign of the real part when it is clearly away from zero; None in the
    /// indistinguishable band.
    pub fn sign(&mut self, x: &CycNum) -> Option<i8> {
        let (re, _, mag) = self.eval(x);
        let band = mag.mul(&self.eps, P, RM);
        if re.abs().cmp(&band).unwrap_or(0) <= 0 {
            None
        } else if re.is_negative() {
            Some(-1)
        } else {
            Some(1)
        }
    }

    /// The two numbers evaluate to the same complex value up to the error band.
    pub fn same_value(&self, a: &(BigFloat, BigFloat, BigFloat), b: &(BigFloat, BigFloat, BigFloat)) -> bool {
        let band = a.2.add(&b.2, P, RM).mul(&self.eps, P, RM);
        let dr = a.0.sub(&b.0, P, RM).abs();
        let di = a.1.sub(&b.1, P, RM).abs();
        dr.cmp(&band).unwrap_or(1) <= 0 && di.cmp(&band).unwrap_or(1) <= 0
    }

    /// Product and sum of two evaluations.
    pub fn mul(&self, a: &(BigFloat, BigFloat, BigFloat), b: &(BigFloat, BigFloat, BigFloat)) -> (BigFloat, BigFloat, BigFloat) {
        let re = a.0.mul(&b.0, P, RM).sub(&a.1.mul(&b.1, P, RM), P, RM);
        let im = a.0.mul(&b.1, P, RM).add(&a.1.mul(&b.0, P, RM), P, RM);
        (re, im, a.2.mul(&b.2, P, RM))
    }

    pub fn add(&self, a: &(BigFloat, BigFloat, BigFloat), b: &(BigFloat, BigFloat, BigFloat)) -> (BigFloat, BigFloat, BigFloat) {
        (a.0.add(&b.0, P, RM), a.1.add(&b.1, P, RM), a.2.add(&b.2, P, RM))
    }
}

pub const CONDUCTORS: [u32; 7] = [3, 4, 5, 7, 8, 12, 24];

/// A random element with small rational coefficients on ζ^0..ζ^{m-1}.
pub fn random_cyc(rng: &mut impl Rng, m: u32) -> CycNum {
    let len = m as usize;
    let coeffs: Vec<BigRational> = (0..len)
        .map(|_| {
            if rng.gen_bool(0.4) {
                BigRational::from_integer(0.into())
            } else {
                BigRational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=6).into())
            }
        })
        .collect();
    CycNum::from_power_coeffs(m, &coeffs)
}

/// A random real element, sometimes shifted by a rational approximation of
/// itself so that the result is within about 1e-15 of zero.
pub fn random_real(rng: &mut impl Rng, m: u32) -> CycNum {
    let a = random_cyc(rng, m);
    let r = &a + &a.conj();
    match rng.gen_range(0..4) {
        0 => {
            let (v, _) = r.to_c64();
            let approx = BigRational::from_f64(v).unwrap_or_else(|| BigRational::from_integer(0.into()));
            &r - &CycNum::from_rational(m, &approx)
        }
        // exact zero reached through different arithmetic paths
        1 => &(&r * &CycNum::from_int(m, 2)) - &(&r + &r),
        _ => r,
    }
}
