//! Exact rational helpers and the two interval types used for certification:
//! [`Interval`] (f64 endpoints, outward rounded) and [`RatInterval`]
//! (rational endpoints, optionally rounded outward to a dyadic grid).

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `p/q`, a signed integer, or a finite decimal such as `0.55` or `1e-4`
/// into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::invalid(format!("not a rational number: `{text}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::invalid("zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{whole}{frac}0").parse().map_err(|_| bad())?;
    let all = all / BigInt::from(10);
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

pub fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << (e as usize))
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << ((-e) as usize))
    }
}

/// Nearest multiple of `2^-bits`, ties away from zero (odd-symmetric).
pub fn round_dyadic(x: &BigRational, bits: u32) -> BigRational {
    let den = BigInt::one() << bits as usize;
    let scaled = x.numer() * &den;
    let (q, r) = scaled.abs().div_rem(x.denom());
    let q = if (r << 1usize) >= *x.denom() { q + 1 } else { q };
    let q = if x.is_negative() { -q } else { q };
    BigRational::new(q, den)
}

pub fn floor_dyadic(x: &BigRational, bits: u32) -> BigRational {
    let den = BigInt::one() << bits as usize;
    let q = (x.numer() * &den).div_floor(x.denom());
    BigRational::new(q, den)
}

pub fn ceil_dyadic(x: &BigRational, bits: u32) -> BigRational {
    let den = BigInt::one() << bits as usize;
    let q = -((-(x.numer() * &den)).div_floor(x.denom()));
    BigRational::new(q, den)
}

/// Rational upper bound on `sqrt(x)` with roughly 64 bits of relative accuracy.
pub fn sqrt_upper(x: &BigRational) -> BigRational {
    assert!(!x.is_negative(), "sqrt of a negative rational");
    if x.is_zero() {
        return BigRational::zero();
    }
    let (k, isq) = scaled_isqrt(x);
    BigRational::new(isq + 1, x.denom() << k)
}

/// Rational lower bound on `sqrt(x)`.
pub fn sqrt_lower(x: &BigRational) -> BigRational {
    assert!(!x.is_negative(), "sqrt of a negative rational");
    if x.is_zero() {
        return BigRational::zero();
    }
    let (k, isq) = scaled_isqrt(x);
    BigRational::new(isq, x.denom() << k)
}

// sqrt(n/d) = sqrt(n d 4^k) / (d 2^k); k chosen so the integer root has >= 64 bits.
fn scaled_isqrt(x: &BigRational) -> (usize, BigInt) {
    let nd = x.numer() * x.denom();
    let bits = nd.bits() as i64;
    let k = ((130 - bits) / 2).max(0) as usize;
    let scaled = nd << (2 * k);
    (k, scaled.sqrt())
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Largest f64 not exceeding `x`.
pub fn to_f64_down(x: &BigRational) -> f64 {
    let mut v = to_f64(x);
    while v.is_finite() && BigRational::from_float(v).is_some_and(|r| &r > x) {
        v = v.next_down();
    }
    v
}

/// Smallest f64 not below `x`.
pub fn to_f64_up(x: &BigRational) -> f64 {
    let mut v = to_f64(x);
    while v.is_finite() && BigRational::from_float(v).is_some_and(|r| &r < x) {
        v = v.next_up();
    }
    v
}

pub fn from_f64(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite float")
}

/// Closed interval with f64 endpoints; every operation rounds outward.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn from_rational(x: &BigRational) -> Self {
        Interval {
            lo: to_f64_down(x),
            hi: to_f64_up(x),
        }
    }

    pub fn from_rationals(lo: &BigRational, hi: &BigRational) -> Self {
        Interval {
            lo: to_f64_down(lo),
            hi: to_f64_up(hi),
        }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo).next_up()
    }

    /// Upper bound on the distance from `mid()` to any point of the interval.
    pub fn radius(&self) -> f64 {
        let m = self.mid();
        (self.hi - m).max(m - self.lo).next_up()
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn abs(&self) -> Interval {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            -*self
        } else {
            Interval::new(0.0, self.hi.max(-self.lo))
        }
    }

    pub fn powi(&self, n: u32) -> Interval {
        let mut acc = Interval::point(1.0);
        for _ in 0..n {
            acc = acc * *self;
        }
        acc
    }

    pub fn scale(&self, k: f64) -> Interval {
        *self * Interval::point(k)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval::new((self.lo + o.lo).next_down(), (self.hi + o.hi).next_up())
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval::new((self.lo - o.hi).next_down(), (self.hi - o.lo).next_up())
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let c = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exact = self.lo == self.hi && o.lo == o.hi && lo.abs() < 9.0e15 && {
            // products of small integers are exact; everything else widens
            self.lo.fract() == 0.0 && o.lo.fract() == 0.0
        };
        if exact {
            Interval::new(lo, hi)
        } else {
            Interval::new(lo.next_down(), hi.next_up())
        }
    }
}

/// Closed interval with exact rational endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        RatInterval { lo, hi }
    }

    pub fn point(v: BigRational) -> Self {
        RatInterval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Sign of every point in the interval, if it is uniform and nonzero.
    pub fn strict_sign(&self) -> Option<Sign> {
        if self.lo.is_positive() {
            Some(Sign::Plus)
        } else if self.hi.is_negative() {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    /// Widens the endpoints outward to multiples of `2^-bits`.
    pub fn rounded(self, bits: u32) -> Self {
        RatInterval {
            lo: floor_dyadic(&self.lo, bits),
            hi: ceil_dyadic(&self.hi, bits),
        }
    }

    pub fn to_interval(&self) -> Interval {
        Interval::from_rationals(&self.lo, &self.hi)
    }

    pub fn add(&self, o: &RatInterval) -> RatInterval {
        RatInterval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn sub(&self, o: &RatInterval) -> RatInterval {
        RatInterval::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }

    pub fn mul(&self, o: &RatInterval) -> RatInterval {
        if !self.lo.is_negative() && !o.lo.is_negative() {
            return RatInterval::new(&self.lo * &o.lo, &self.hi * &o.hi);
        }
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RatInterval::new(lo, hi)
    }

    pub fn scale(&self, k: &BigRational) -> RatInterval {
        if k.is_negative() {
            RatInterval::new(&self.hi * k, &self.lo * k)
        } else {
            RatInterval::new(&self.lo * k, &self.hi * k)
        }
    }

    /// `1/x` for an interval that excludes zero.
    pub fn recip(&self) -> Option<RatInterval> {
        self.strict_sign()?;
        Some(RatInterval::new(self.hi.recip(), self.lo.recip()))
    }
}

/// Neumaier-compensated accumulator for long floating sums.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Binary entropy `h(q) = -q log2 q - (1-q) log2 (1-q)`.
pub fn binary_entropy(q: f64) -> f64 {
    if q <= 0.0 || q >= 1.0 {
        return 0.0;
    }
    -q * q.log2() - (1.0 - q) * (1.0 - q).log2()
}

/// `-p log2 p` with the convention `0 log 0 = 0`.
pub fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(parse_rational("3/5").unwrap(), rat(3, 5));
        assert_eq!(parse_rational("0.55").unwrap(), rat(11, 20));
        assert_eq!(parse_rational("-2").unwrap(), int(-2));
        assert_eq!(parse_rational("1e-4").unwrap(), rat(1, 10_000));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn dyadic_rounding_is_odd_symmetric() {
        let x = rat(5, 3);
        assert_eq!(round_dyadic(&-x.clone(), 7), -round_dyadic(&x, 7));
        assert_eq!(round_dyadic(&rat(3, 8), 2), rat(2, 4));
        assert!(floor_dyadic(&x, 5) <= x && x <= ceil_dyadic(&x, 5));
    }

    #[test]
    fn sqrt_bounds_bracket() {
        for (n, d) in [(2, 1), (1, 3), (10_000_000_007, 3), (1, 1 << 40)] {
            let x = rat(n, d);
            let (lo, hi) = (sqrt_lower(&x), sqrt_upper(&x));
            assert!(&lo * &lo <= x && &hi * &hi >= x);
            assert!(to_f64(&(&hi - &lo)) <= 1e-15 * to_f64(&hi));
        }
    }

    #[test]
    fn outward_conversion_brackets() {
        let x = rat(1, 3);
        let i = Interval::from_rational(&x);
        assert!(from_f64(i.lo) <= x && from_f64(i.hi) >= x);
        let y = Interval::point(0.1) * Interval::point(3.0);
        assert!(y.contains(0.30000000000000004) && y.lo < y.hi);
    }
}
