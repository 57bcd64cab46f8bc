//! Elements of the cyclotomic field ℚ(ζ_m) in canonical power-basis form.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Per-conductor tables shared by all elements of one field.
pub(crate) struct FieldCtx {
    pub m: u32,
    /// Degree φ(m) of the field.
    pub d: usize,
    /// `pow[e]` is ζ^e reduced to length d, for e < 2m.
    pow: Vec<Vec<BigInt>>,
    /// Exponents k in 2..m coprime to m; the nontrivial Galois automorphisms ζ ↦ ζ^k.
    galois: Vec<u32>,
}

fn cyclotomic_poly(m: u32) -> Vec<BigInt> {
    // x^m - 1 divided by Φ_d for every proper divisor d
    let mut num: Vec<BigInt> = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = poly_div_exact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut r = num.to_vec();
    let dn = den.len() - 1;
    let qn = num.len() - 1 - dn;
    let mut q = vec![BigInt::zero(); qn + 1];
    for k in (0..=qn).rev() {
        let c = r[k + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (t, dc) in den.iter().enumerate() {
            r[k + t] -= &c * dc;
        }
        q[k] = c;
    }
    debug_assert!(r.iter().all(|x| x.is_zero()));
    q
}

fn build_ctx(m: u32) -> FieldCtx {
    let phi = cyclotomic_poly(m);
    let d = phi.len() - 1;
    let mut pow = Vec::with_capacity(2 * m as usize);
    let mut cur = vec![BigInt::zero(); d];
    if d > 0 {
        cur[0] = BigInt::one();
    }
    for _ in 0..(2 * m as usize).max(2 * d) {
        pow.push(cur.clone());
        // multiply by x and reduce
        let lead = cur[d - 1].clone();
        let mut next = vec![BigInt::zero(); d];
        for k in (1..d).rev() {
            next[k] = cur[k - 1].clone();
        }
        if !lead.is_zero() {
            for k in 0..d {
                next[k] -= &lead * &phi[k];
            }
        }
        cur = next;
    }
    let galois = (2..m).filter(|k| k.gcd(&m) == 1).collect();
    FieldCtx {
        m,
        d,
        pow,
        galois,
    }
}

pub(crate) fn field_ctx(m: u32) -> Arc<FieldCtx> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<FieldCtx>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(c) = cache.read().unwrap().get(&m) {
        return c.clone();
    }
    let ctx = Arc::new(build_ctx(m));
    cache.write().unwrap().entry(m).or_insert(ctx).clone()
}

/// An element of ℚ(ζ_m), stored as integer numerators over one positive common
/// denominator, reduced modulo Φ_m and in lowest terms.
#[derive(Clone)]
pub struct CycNum {
    ctx: Arc<FieldCtx>,
    nums: Vec<BigInt>,
    den: BigInt,
}

impl CycNum {
    fn from_parts(ctx: Arc<FieldCtx>, mut nums: Vec<BigInt>, mut den: BigInt) -> Self {
        debug_assert_eq!(nums.len(), ctx.d);
        if den.is_negative() {
            den = -den;
            for n in nums.iter_mut() {
                *n = -&*n;
            }
        }
        let mut g = den.clone();
        for n in &nums {
            if g.is_one() {
                break;
            }
            g = g.gcd(n);
        }
        if nums.iter().all(|n| n.is_zero()) {
            den = BigInt::one();
        } else if !g.is_one() {
            den /= &g;
            for n in nums.iter_mut() {
                *n /= &g;
            }
        }
        CycNum { ctx, nums, den }
    }

    pub fn zero(m: u32) -> Self {
        let ctx = field_ctx(m);
        let d = ctx.d;
        CycNum {
            ctx,
            nums: vec![BigInt::zero(); d],
            den: BigInt::one(),
        }
    }

    pub fn one(m: u32) -> Self {
        Self::from_int(m, 1)
    }

    pub fn from_int(m: u32, v: i64) -> Self {
        let mut z = Self::zero(m);
        z.nums[0] = BigInt::from(v);
        z
    }

    pub fn from_ratio(m: u32, p: i64, q: i64) -> Self {
        Self::from_rational(m, &BigRational::new(p.into(), q.into()))
    }

    pub fn from_rational(m: u32, r: &BigRational) -> Self {
        let ctx = field_ctx(m);
        let mut nums = vec![BigInt::zero(); ctx.d];
        nums[0] = r.numer().clone();
        Self::from_parts(ctx, nums, r.denom().clone())
    }

    /// ζ_m^k for any integer k.
    pub fn zeta(m: u32, k: i64) -> Self {
        let ctx = field_ctx(m);
        let e = k.rem_euclid(m as i64) as usize;
        let nums = ctx.pow[e].clone();
        CycNum {
            ctx,
            nums,
            den: BigInt::one(),
        }
    }

    /// Builds from coefficients of ζ^0..ζ^{len-1} of any length, reducing mod Φ_m.
    pub fn from_power_coeffs(m: u32, coeffs: &[BigRational]) -> Self {
        let ctx = field_ctx(m);
        let mut den = BigInt::one();
        for c in coeffs {
            den = den.lcm(c.denom());
        }
        let mut nums = vec![BigInt::zero(); ctx.d];
        for (e, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let scaled = c.numer() * (&den / c.denom());
            let row = &ctx.pow[e % ctx.m as usize];
            for k in 0..ctx.d {
                if !row[k].is_zero() {
                    nums[k] += &scaled * &row[k];
                }
            }
        }
        Self::from_parts(ctx, nums, den)
    }

    pub fn conductor(&self) -> u32 {
        self.ctx.m
    }

    pub fn degree(&self) -> usize {
        self.ctx.d
    }

    /// Canonical coefficient of ζ^k for k < φ(m).
    pub fn coeff(&self, k: usize) -> BigRational {
        BigRational::new(self.nums[k].clone(), self.den.clone())
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        (0..self.ctx.d).map(|k| self.coeff(k)).collect()
    }

    pub(crate) fn numerators(&self) -> &[BigInt] {
        &self.nums
    }

    pub(crate) fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.nums.iter().all(|n| n.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.nums[0].is_one() && self.nums[1..].iter().all(|n| n.is_zero())
    }

    /// True when only the constant coefficient is nonzero.
    pub fn is_rational(&self) -> bool {
        self.nums[1..].iter().all(|n| n.is_zero())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coeff(0))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx.m != other.ctx.m {
            return Err(Error::ConductorMismatch(self.ctx.m, other.ctx.m));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.den == other.den {
            let nums = self.nums.iter().zip(&other.nums).map(|(a, b)| a + b).collect();
            return Ok(Self::from_parts(self.ctx.clone(), nums, self.den.clone()));
        }
        let nums = self
            .nums
            .iter()
            .zip(&other.nums)
            .map(|(a, b)| a * &other.den + b * &self.den)
            .collect();
        Ok(Self::from_parts(self.ctx.clone(), nums, &self.den * &other.den))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let d = self.ctx.d;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ctx.m));
        }
        if other.is_rational() {
            return Ok(self.scale_parts(&other.nums[0], &other.den));
        }
        if self.is_rational() {
            return Ok(other.scale_parts(&self.nums[0], &self.den));
        }
        let mut conv = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in self.nums.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.nums.iter().enumerate() {
                if !b.is_zero() {
                    conv[i + j] += a * b;
                }
            }
        }
        let mut nums: Vec<BigInt> = conv[..d].to_vec();
        for (e, c) in conv.iter().enumerate().skip(d) {
            if c.is_zero() {
                continue;
            }
            for (k, r) in self.ctx.pow[e].iter().enumerate() {
                if !r.is_zero() {
                    nums[k] += c * r;
                }
            }
        }
        Ok(Self::from_parts(self.ctx.clone(), nums, &self.den * &other.den))
    }

    fn scale_parts(&self, num: &BigInt, den: &BigInt) -> Self {
        let nums = self.nums.iter().map(|a| a * num).collect();
        Self::from_parts(self.ctx.clone(), nums, &self.den * den)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        self.scale_parts(r.numer(), r.denom())
    }

    fn neg_ref(&self) -> Self {
        CycNum {
            ctx: self.ctx.clone(),
            nums: self.nums.iter().map(|a| -a).collect(),
            den: self.den.clone(),
        }
    }

    /// Image under the Galois automorphism ζ ↦ ζ^k (k coprime to m).
    pub fn galois(&self, k: u32) -> Self {
        let m = self.ctx.m as u64;
        let mut nums = vec![BigInt::zero(); self.ctx.d];
        for (e, a) in self.nums.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let idx = ((e as u64 * k as u64) % m) as usize;
            for (t, r) in self.ctx.pow[idx].iter().enumerate() {
                if !r.is_zero() {
                    nums[t] += a * r;
                }
            }
        }
        Self::from_parts(self.ctx.clone(), nums, self.den.clone())
    }

    /// Complex conjugation ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        let m = self.ctx.m;
        if m <= 2 {
            return self.clone();
        }
        self.galois(m - 1)
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// Field norm down to ℚ.
    pub fn norm(&self) -> BigRational {
        let mut p = self.clone();
        for &k in &self.ctx.galois {
            p = p.checked_mul(&self.galois(k)).unwrap();
        }
        p.coeff(0)
    }

    pub fn checked_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_rational() {
            let mut nums = vec![BigInt::zero(); self.ctx.d];
            nums[0] = self.den.clone();
            return Ok(Self::from_parts(self.ctx.clone(), nums, self.nums[0].clone()));
        }
        // product of the other conjugates, divided by the norm
        let mut p = Self::one(self.ctx.m);
        for &k in &self.ctx.galois {
            p = p.checked_mul(&self.galois(k))?;
        }
        let n = self.checked_mul(&p)?;
        debug_assert!(n.is_rational());
        let inv_n = BigRational::new(n.den.clone(), n.nums[0].clone());
        Ok(p.scale(&inv_n))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.checked_inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.ctx.m);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// |x|² = x·conj(x), always in the real subfield.
    pub fn abs2(&self) -> Self {
        self * &self.conj()
    }

    /// Floating approximation of the complex value under ζ ↦ e^{2πi/m}.
    pub fn to_c64(&self) -> (f64, f64) {
        let m = self.ctx.m as f64;
        let den = self.den.to_f64().unwrap_or(f64::INFINITY);
        let mut re = 0.0;
        let mut im = 0.0;
        for (e, a) in self.nums.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let v = a.to_f64().unwrap_or(f64::NAN) / den;
            let th = std::f64::consts::TAU * e as f64 / m;
            re += v * th.cos();
            im += v * th.sin();
        }
        (re, im)
    }

    /// Converts into a larger conductor that is a multiple of the current one.
    pub fn lift_to(&self, m: u32) -> Result<Self> {
        let cur = self.ctx.m;
        if m == cur {
            return Ok(self.clone());
        }
        if !m.is_multiple_of(cur) {
            return Err(Error::ConductorMismatch(cur, m));
        }
        let step = (m / cur) as usize;
        let mut coeffs = vec![BigRational::zero(); m as usize];
        for (e, c) in self.coeffs().into_iter().enumerate() {
            coeffs[e * step] = c;
        }
        Ok(Self::from_power_coeffs(m, &coeffs))
    }

    /// Length-m list of "p/q" strings (canonical coefficients padded with zeros).
    pub fn to_strings(&self) -> Vec<String> {
        let mut out: Vec<String> = self.coeffs().iter().map(rational_to_string).collect();
        out.resize(self.ctx.m as usize, "0".to_string());
        out
    }

    pub fn from_strings(items: &[String]) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::parse("cycnum", "empty coefficient list"));
        }
        let m = u32::try_from(items.len()).map_err(|_| Error::parse("cycnum", "too many coefficients"))?;
        let coeffs = items
            .iter()
            .enumerate()
            .map(|(k, s)| parse_rational(s).map_err(|e| Error::parse(format!("cycnum[{k}]"), e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_power_coeffs(m, &coeffs))
    }
}

pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses "p", "p/q" or "-p/q" into a rational; a zero denominator is an error.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let (p, q) = match t.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (t, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| Error::parse("rational", format!("bad numerator in {s:?}")))?;
    let q: BigInt = q.parse().map_err(|_| Error::parse("rational", format!("bad denominator in {s:?}")))?;
    if q.is_zero() {
        return Err(Error::parse("rational", format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(p, q))
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.m == other.ctx.m && self.den == other.den && self.nums == other.nums
    }
}

impl Eq for CycNum {}

impl Hash for CycNum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ctx.m.hash(state);
        self.den.hash(state);
        self.nums.hash(state);
    }
}

impl PartialOrd for CycNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Arbitrary but total order on canonical data; not the order of real numbers.
impl Ord for CycNum {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ctx
            .m
            .cmp(&other.ctx.m)
            .then_with(|| self.nums.cmp(&other.nums))
            .then_with(|| self.den.cmp(&other.den))
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (k, a.is_one()) {
                (0, _) => write!(f, "{}", rational_to_string(&a))?,
                (_, true) => write!(f, "z{}^{}", self.ctx.m, k)?,
                _ => write!(f, "{}*z{}^{}", rational_to_string(&a), self.ctx.m, k)?,
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&CycNum> for &CycNum {
            type Output = CycNum;
            fn $method(self, rhs: &CycNum) -> CycNum {
                self.$checked(rhs).expect("cyclotomic conductor mismatch")
            }
        }
        impl $tr<CycNum> for CycNum {
            type Output = CycNum;
            fn $method(self, rhs: CycNum) -> CycNum {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&CycNum> for CycNum {
            type Output = CycNum;
            fn $method(self, rhs: &CycNum) -> CycNum {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        self.neg_ref()
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        self.neg_ref()
    }
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        CycNum::from_strings(&items).map_err(serde::de::Error::custom)
    }
}
