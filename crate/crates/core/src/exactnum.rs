//! Exact integer primitives: `q`-th roots and comparisons against
//! `b * 2^(p/q)` without any floating-point trust in the verdict.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision nonnegative integer. Every growth value in the crate
/// is one of these.
pub type ExactInt = BigUint;

/// A rational exponent `p/q` of 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatExp {
    pub p: i64,
    pub q: u32,
}

impl RatExp {
    pub fn new(p: i64, q: u32) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("exponent denominator must be positive"));
        }
        Ok(RatExp { p, q }.normalized())
    }

    pub const fn int(p: i64) -> Self {
        RatExp { p, q: 1 }
    }

    pub const ZERO: RatExp = RatExp { p: 0, q: 1 };

    /// `1/q`.
    pub fn recip(q: u64) -> Self {
        let q = u32::try_from(q).expect("exponent denominator exceeds u32");
        assert!(q > 0, "exponent denominator must be positive");
        RatExp { p: 1, q }
    }

    pub fn normalized(self) -> Self {
        let g = (self.p.unsigned_abs()).gcd(&(self.q as u64)).max(1);
        RatExp {
            p: self.p / g as i64,
            q: (self.q as u64 / g) as u32,
        }
    }

    fn from_i128(p: i128, q: i128) -> Self {
        let g = p.unsigned_abs().gcd(&q.unsigned_abs()).max(1) as i128;
        let (p, q) = (p / g, q / g);
        RatExp {
            p: i64::try_from(p).expect("exponent numerator overflow"),
            q: u32::try_from(q).expect("exponent denominator overflow"),
        }
    }

    pub fn add(self, other: RatExp) -> RatExp {
        let p = self.p as i128 * other.q as i128 + other.p as i128 * self.q as i128;
        Self::from_i128(p, self.q as i128 * other.q as i128)
    }

    pub fn sub(self, other: RatExp) -> RatExp {
        self.add(RatExp {
            p: -other.p,
            q: other.q,
        })
    }

    pub fn mul(self, other: RatExp) -> RatExp {
        Self::from_i128(
            self.p as i128 * other.p as i128,
            self.q as i128 * other.q as i128,
        )
    }

    pub fn mul_int(self, k: i64) -> RatExp {
        Self::from_i128(self.p as i128 * k as i128, self.q as i128)
    }

    pub fn is_negative(self) -> bool {
        self.p < 0
    }

    pub fn to_f64(self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl fmt::Display for RatExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

impl FromStr for RatExp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected p or p/q, got {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => RatExp::new(
                p.trim().parse().map_err(|_| bad())?,
                q.trim().parse().map_err(|_| bad())?,
            ),
            None => Ok(RatExp::int(s.trim().parse().map_err(|_| bad())?)),
        }
    }
}

/// Approximate `log2(a)`; `-inf` for zero. Accurate to about 1e-15 relative.
pub fn log2_approx(a: &ExactInt) -> f64 {
    let bits = a.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return (a.to_u64().unwrap() as f64).log2();
    }
    log2_wide(a)
}

// log2 for wide values; split out so the hot path above stays branch-light.
fn log2_wide(a: &ExactInt) -> f64 {
    let bits = a.bits();
    let shift = bits - 64;
    let top = (a >> shift).to_u64().unwrap();
    (top as f64).log2() + shift as f64
}

/// Width of the band around a floating-point tie inside which a log-domain
/// verdict is not trusted and exact arithmetic decides.
pub fn float_slack(magnitude: f64) -> f64 {
    1e-9 * (1.0 + magnitude.abs())
}

/// Largest `r` with `r^q <= a`.
pub fn iroot(a: &ExactInt, q: u64) -> Result<ExactInt> {
    if q == 0 {
        return Err(Error::invalid("root degree must be at least 1"));
    }
    let q = u32::try_from(q).map_err(|_| Error::invalid("root degree too large"))?;
    Ok(iroot_u32(a, q))
}

pub(crate) fn iroot_u32(a: &ExactInt, q: u32) -> ExactInt {
    debug_assert!(q >= 1);
    if q == 1 || a.is_zero() {
        return a.clone();
    }
    let bits = a.bits();
    if bits <= q as u64 {
        // 1 <= a < 2^q
        return BigUint::one();
    }
    let step = |x: &BigUint| -> BigUint {
        let xq1 = x.pow(q - 1);
        (x * (q - 1) + a / xq1) / q
    };
    let mut x = step(&initial_root_guess(a, q));
    loop {
        let y = step(&x);
        if y >= x {
            break;
        }
        x = y;
    }
    while x.pow(q) > *a {
        x -= 1u32;
    }
    loop {
        let next = &x + 1u32;
        if next.pow(q) <= *a {
            x = next;
        } else {
            break;
        }
    }
    x
}

fn initial_root_guess(a: &ExactInt, q: u32) -> BigUint {
    let l = log2_approx(a) / q as f64;
    let guess = floor_pow2_f64(l);
    // overshoot slightly so Newton descends
    let guess = &guess + (&guess >> 30u32) + 2u32;
    guess.max(BigUint::one())
}

/// Approximately `floor(2^l)` for `l >= 0`, built from the f64 mantissa.
fn floor_pow2_f64(l: f64) -> BigUint {
    let ip = l.floor();
    let frac = l - ip;
    let mant = (frac.exp2() * (1u64 << 52) as f64) as u64;
    let ip = ip as i64;
    if ip >= 52 {
        BigUint::from(mant) << (ip - 52) as u64
    } else {
        BigUint::from(mant >> (52 - ip) as u64)
    }
}

/// Exact order of `a` versus `b * 2^(p/q)`.
///
/// A log-domain estimate decides unless it lies within [`float_slack`] of a
/// tie, in which case `a^q` is compared with `b^q * 2^p` (or `a^q * 2^-p`
/// with `b^q` when `p < 0`).
pub fn cmp_pow2(a: &ExactInt, b: &ExactInt, e: RatExp) -> Ordering {
    if b.is_zero() {
        return if a.is_zero() {
            Ordering::Equal
        } else {
            Ordering::Greater
        };
    }
    if a.is_zero() {
        return Ordering::Less;
    }
    let la = log2_approx(a);
    let lb = log2_approx(b);
    let et = e.to_f64();
    let diff = la - lb - et;
    if diff.abs() > float_slack(la.abs() + lb.abs() + et.abs()) {
        return if diff > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        };
    }
    cmp_pow2_exact(a, b, e)
}

/// [`cmp_pow2`] without the floating-point prefilter.
pub fn cmp_pow2_exact(a: &ExactInt, b: &ExactInt, e: RatExp) -> Ordering {
    let lhs = a.pow(e.q);
    let rhs = b.pow(e.q);
    if e.p >= 0 {
        lhs.cmp(&(rhs << e.p as u64))
    } else {
        (lhs << e.p.unsigned_abs()).cmp(&rhs)
    }
}

/// `floor(a * 2^(p/q))` for `p >= 0`, computed as `iroot(a^q * 2^p, q)`.
pub fn floor_mul_pow2(a: &ExactInt, e: RatExp) -> Result<ExactInt> {
    if e.is_negative() {
        return Err(Error::invalid("floor_mul_pow2 needs a nonnegative exponent"));
    }
    Ok(iroot_u32(&(a.pow(e.q) << e.p as u64), e.q))
}

/// `floor(2^(p/q))` for `p >= 0`.
pub fn floor_pow2(e: RatExp) -> Result<ExactInt> {
    floor_mul_pow2(&BigUint::one(), e)
}

/// Repeated `floor(a * 2^(p/q))` for a fixed exponent.
///
/// Keeps a fixed-point bracket `c_lo / 2^P <= 2^(p/q) < (c_lo + 1) / 2^P`
/// with `P` above the operand width. When both ends of the bracket floor to
/// the same integer that integer is the answer; otherwise the upper
/// candidate is settled exactly.
#[derive(Clone, Debug)]
pub struct Pow2Scaler {
    e: RatExp,
    frac_bits: u64,
    c_lo: BigUint,
}

impl Pow2Scaler {
    pub fn new(e: RatExp) -> Result<Self> {
        if e.is_negative() {
            return Err(Error::invalid("Pow2Scaler needs a nonnegative exponent"));
        }
        let mut s = Pow2Scaler {
            e,
            frac_bits: 0,
            c_lo: BigUint::zero(),
        };
        s.set_precision(256);
        Ok(s)
    }

    pub fn exponent(&self) -> RatExp {
        self.e
    }

    fn set_precision(&mut self, frac_bits: u64) {
        let radicand = BigUint::one() << (self.e.p as u64 + self.e.q as u64 * frac_bits);
        self.c_lo = iroot_u32(&radicand, self.e.q);
        self.frac_bits = frac_bits;
    }

    pub fn apply(&mut self, a: &ExactInt) -> ExactInt {
        if a.bits() + 32 > self.frac_bits {
            self.set_precision(2 * (a.bits() + 64));
        }
        let lo_prod = a * &self.c_lo;
        let lo = &lo_prod >> self.frac_bits;
        let hi = (lo_prod + a) >> self.frac_bits;
        if lo == hi {
            return lo;
        }
        let target = a.pow(self.e.q) << self.e.p as u64;
        if hi.pow(self.e.q) <= target {
            hi
        } else {
            lo
        }
    }
}

/// Serde adapters that write big integers as decimal strings.
pub mod dec {
    use super::ExactInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &ExactInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ExactInt, D::Error> {
        let s = String::deserialize(d)?;
        ExactInt::parse_bytes(s.as_bytes(), 10)
            .ok_or_else(|| serde::de::Error::custom(format!("not a decimal integer: {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: u64) -> ExactInt {
        ExactInt::from(n)
    }

    #[test]
    fn iroot_examples() {
        assert_eq!(iroot(&big(8), 3).unwrap(), big(2));
        assert_eq!(iroot(&big(0), 5).unwrap(), big(0));
        // 141^2 = 19881 <= 20000 < 20164 = 142^2
        assert_eq!(iroot(&big(20000), 2).unwrap(), big(141));
        assert!(iroot(&big(20000), 0).is_err());
    }

    #[test]
    fn iroot_large_degree() {
        let a = BigUint::one() << 5000u32;
        let r = iroot(&a, 1164).unwrap();
        assert!(r.pow(1164) <= a);
        assert!((&r + 1u32).pow(1164) > a);
    }

    #[test]
    fn cmp_pow2_examples() {
        let half = RatExp::new(1, 2).unwrap();
        assert_eq!(cmp_pow2(&big(141), &big(100), half), Ordering::Less);
        assert_eq!(cmp_pow2(&big(142), &big(100), half), Ordering::Greater);
        assert_eq!(cmp_pow2(&big(8), &big(8), RatExp::ZERO), Ordering::Equal);
        assert_eq!(cmp_pow2(&big(4), &big(8), RatExp::int(-1)), Ordering::Equal);
        assert_eq!(cmp_pow2(&big(0), &big(0), half), Ordering::Equal);
        assert_eq!(cmp_pow2(&big(1), &big(0), half), Ordering::Greater);
    }

    #[test]
    fn floor_mul_pow2_examples() {
        let half = RatExp::new(1, 2).unwrap();
        assert_eq!(floor_mul_pow2(&big(100), half).unwrap(), big(141));
        assert_eq!(floor_mul_pow2(&big(77), RatExp::ZERO).unwrap(), big(77));
        assert_eq!(floor_mul_pow2(&big(5), RatExp::int(1)).unwrap(), big(10));
        assert!(floor_mul_pow2(&big(5), RatExp::int(-1)).is_err());
    }

    #[test]
    fn ratexp_arithmetic() {
        let a = RatExp::new(1, 6).unwrap();
        let b = RatExp::new(1, 8).unwrap();
        assert_eq!(a.add(b), RatExp::new(7, 24).unwrap());
        assert_eq!(a.sub(b), RatExp::new(1, 24).unwrap());
        assert_eq!(a.mul_int(12), RatExp::int(2));
        assert_eq!("3/9".parse::<RatExp>().unwrap(), RatExp { p: 1, q: 3 });
        assert!("1/0".parse::<RatExp>().is_err());
    }

    #[test]
    fn scaler_matches_direct_floor() {
        let e = RatExp::new(1, 6).unwrap();
        let mut s = Pow2Scaler::new(e).unwrap();
        let mut a = big(1) << 64u32;
        for _ in 0..300 {
            let next = s.apply(&a);
            assert_eq!(next, floor_mul_pow2(&a, e).unwrap());
            a = next;
        }
    }

    proptest! {
        #[test]
        fn iroot_sandwich(a in any::<u128>(), q in 1u64..12) {
            let a = BigUint::from(a);
            let r = iroot(&a, q).unwrap();
            prop_assert!(r.pow(q as u32) <= a);
            prop_assert!((&r + 1u32).pow(q as u32) > a);
        }

        #[test]
        fn floor_mul_brackets(a in 1u64.., p in 0i64..20, q in 1u32..30) {
            let a = big(a);
            let e = RatExp::new(p, q).unwrap();
            let r = floor_mul_pow2(&a, e).unwrap();
            prop_assert_ne!(cmp_pow2(&r, &a, e), Ordering::Greater);
            prop_assert_eq!(cmp_pow2(&(&r + 1u32), &a, e), Ordering::Greater);
        }

        #[test]
        fn scaler_agrees(a in 1u128.., p in 0i64..5, q in 1u32..40) {
            let a = BigUint::from(a);
            let e = RatExp::new(p, q).unwrap();
            let mut s = Pow2Scaler::new(e).unwrap();
            prop_assert_eq!(s.apply(&a), floor_mul_pow2(&a, e).unwrap());
        }
    }
}
