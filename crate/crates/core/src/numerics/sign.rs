//! Exact sign of real-subfield elements.
//!
//! Zero is decided by canonical form. Otherwise a floating filter is tried, then
//! fixed-point interval evaluation of Σ c_k cos(2πk/m) at doubling precision.

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive, Zero};

use super::cyclotomic::CycNum;
use crate::error::{Error, Result};

pub fn sign_real(x: &CycNum) -> Result<i8> {
    if !x.is_real() {
        return Err(Error::NotReal);
    }
    if x.is_zero() {
        return Ok(0);
    }
    if x.is_rational() {
        return Ok(sign_of(&x.numerators()[0]));
    }
    if let Some(s) = float_filter(x) {
        return Ok(s);
    }
    Ok(interval_sign(x))
}

/// Same as [`sign_real`] but skips the floating filter.
pub fn sign_real_exact(x: &CycNum) -> Result<i8> {
    if !x.is_real() {
        return Err(Error::NotReal);
    }
    if x.is_zero() {
        return Ok(0);
    }
    Ok(interval_sign(x))
}

fn sign_of(v: &BigInt) -> i8 {
    match v.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

fn float_filter(x: &CycNum) -> Option<i8> {
    let m = x.conductor() as f64;
    let den = x.denominator().to_f64()?;
    if !den.is_finite() {
        return None;
    }
    let mut v = 0.0f64;
    let mut mag = 0.0f64;
    for (k, a) in x.numerators().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let a = a.to_f64()? / den;
        if !a.is_finite() {
            return None;
        }
        let t = a * (std::f64::consts::TAU * k as f64 / m).cos();
        v += t;
        mag += a.abs();
    }
    let err = 1e-12 * mag + 1e-300;
    if v > err {
        Some(1)
    } else if v < -err {
        Some(-1)
    } else {
        None
    }
}

fn interval_sign(x: &CycNum) -> i8 {
    let m = x.conductor() as u64;
    let mut prec = 64u32;
    loop {
        let pi = FixedPi::new(prec);
        let mut total = BigInt::zero();
        let mut err = BigInt::zero();
        for (k, a) in x.numerators().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let (c, e) = cos_two_pi_frac(k as u64, m, &pi, prec);
            total += a * c;
            err += a.abs() * e;
        }
        if total.abs() > err {
            return sign_of(&total);
        }
        prec *= 2;
        assert!(prec <= 1 << 20, "sign determination did not converge");
    }
}

struct FixedPi {
    value: BigInt,
    err: BigInt,
}

impl FixedPi {
    fn new(prec: u32) -> Self {
        let (a5, t5) = atan_inv(5, prec);
        let (a239, t239) = atan_inv(239, prec);
        let value = a5 * 16 - a239 * 4;
        let err = BigInt::from(16 * (2 * t5 + 2) + 4 * (2 * t239 + 2));
        FixedPi { value, err }
    }
}

/// atan(1/n) scaled by 2^prec, with the number of series terms used.
fn atan_inv(n: u64, prec: u32) -> (BigInt, u64) {
    let one = BigInt::from(1) << prec;
    let n2 = BigInt::from(n * n);
    let mut pw = &one / n;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !pw.is_zero() {
        let term = &pw / (2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        pw /= &n2;
        k += 1;
    }
    (sum, k)
}

/// cos(2πk/m) scaled by 2^prec, with an error bound in ulps.
fn cos_two_pi_frac(k: u64, m: u64, pi: &FixedPi, prec: u32) -> (BigInt, BigInt) {
    // reduce r = k/m to an angle in [0, π/4]; work with numerators over 8m
    let mut num = (k % m) * 8;
    let den = m * 8;
    let mut negate = false;
    if 2 * num > den {
        num = den - num;
    }
    if 4 * num > den {
        num = den / 2 - num;
        negate = true;
    }
    let use_sin = 8 * num > den;
    if use_sin {
        num = den / 4 - num;
    }
    let theta = (&pi.value * (2 * num)) / den;
    let theta_err = &pi.err + 1;
    let (v, e) = taylor(&theta, &theta_err, prec, use_sin);
    (if negate { -v } else { v }, e)
}

fn taylor(theta: &BigInt, theta_err: &BigInt, prec: u32, sine: bool) -> (BigInt, BigInt) {
    let one = BigInt::from(1) << prec;
    let mut term = if sine { theta.clone() } else { one };
    let mut sum = term.clone();
    let mut n: u64 = if sine { 1 } else { 0 };
    let mut count = 1u64;
    while !term.is_zero() {
        term = (&term * theta) >> prec;
        term = (&term * theta) >> prec;
        term /= (n + 1) * (n + 2);
        term = -term;
        n += 2;
        sum += &term;
        count += 1;
    }
    let err = (theta_err * 4 + 8) * (count + 2);
    (sum, err)
}
