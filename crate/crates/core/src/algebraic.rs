//! Real algebraic numbers and exact arithmetic in `Q(λ)`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{pow2, to_f64, Interval, RatInterval};
use crate::factor::{irreducible_factors, Irreducibility};
use crate::poly::IntPolynomial;

/// Width (in bits) of the enclosure computed at construction.
pub const CACHED_BITS: u32 = 120;

/// A real root of an irreducible integer polynomial, selected by an isolating interval.
#[derive(Clone)]
pub struct AlgebraicNumber {
    min_poly: IntPolynomial,
    lo: BigRational,
    hi: BigRational,
    cached: RatInterval,
    irreducibility: Irreducibility,
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraicNumber({} ~ {:.17})", self.min_poly, self.to_f64())
    }
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.min_poly == other.min_poly
            && self.cached.lo <= other.cached.hi
            && other.cached.lo <= self.cached.hi
    }
}

/// How a real root of a polynomial is picked.
#[derive(Clone, Debug)]
pub enum RootSelector {
    /// 0-based index among the real roots in ascending order.
    Index(usize),
    /// The unique root in a closed interval.
    Interval(BigRational, BigRational),
    /// The unique root in the open interval (0, 1).
    UnitInterval,
}

impl AlgebraicNumber {
    /// The unique root of `p` in `[lo, hi]`. `p` is reduced to the irreducible
    /// factor that vanishes there.
    pub fn new(p: &IntPolynomial, lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo > hi {
            return Err(Error::RootSelection(format!("empty interval [{lo}, {hi}]")));
        }
        let sf = p.square_free();
        let count = sf.count_roots_in(&lo, &hi);
        if count != 1 {
            return Err(Error::RootSelection(format!(
                "{p} has {count} distinct real roots in [{lo}, {hi}], expected 1"
            )));
        }
        let (factors, irreducibility) = irreducible_factors(&sf)?;
        let f = factors
            .into_iter()
            .find(|f| f.count_roots_in(&lo, &hi) == 1)
            .expect("some factor vanishes in the interval");
        Ok(Self::from_isolated(f, lo, hi, irreducibility))
    }

    pub fn select(p: &IntPolynomial, selector: &RootSelector) -> Result<Self> {
        match selector {
            RootSelector::Index(k) => Self::from_root_index(p, *k),
            RootSelector::Interval(lo, hi) => Self::new(p, lo.clone(), hi.clone()),
            RootSelector::UnitInterval => Self::in_unit_interval(p),
        }
    }

    /// The `k`-th real root of `p` in ascending order (0-based).
    pub fn from_root_index(p: &IntPolynomial, k: usize) -> Result<Self> {
        let sf = p.square_free();
        let sturm = sf.sturm_sequence();
        let total = sturm.count_all();
        if k >= total {
            return Err(Error::RootSelection(format!("{p} has {total} real roots, index {k} requested")));
        }
        let two = BigRational::from_integer(2.into());
        let floor = -sf.root_bound();
        let (mut lo, mut hi) = (floor.clone(), sf.root_bound());
        // the k-th root lies in (lo, hi] with exactly k roots in (floor, lo]
        while sturm.count_half_open(&lo, &hi) > 1 {
            let mid = (&lo + &hi) / &two;
            if sturm.count_half_open(&floor, &mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        while sturm.count_in(&lo, &hi) != 1 {
            let mid = (&lo + &hi) / &two;
            if sturm.count_half_open(&mid, &hi) == 1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Self::new(p, lo, hi)
    }

    /// The unique root of `p` strictly between 0 and 1.
    pub fn in_unit_interval(p: &IntPolynomial) -> Result<Self> {
        let sf = p.square_free();
        let zero = BigRational::zero();
        let one = BigRational::one();
        let n = sf.count_roots_in(&zero, &one)
            - usize::from(sf.sign_at(&zero) == 0)
            - usize::from(sf.sign_at(&one) == 0);
        if n != 1 {
            return Err(Error::RootSelection(format!("{p} has {n} roots in (0, 1), expected 1")));
        }
        let total_below = sf.sturm_sequence().count_half_open(&(-sf.root_bound()), &zero);
        Self::from_root_index(p, total_below + usize::from(sf.sign_at(&zero) == 0))
    }

    pub fn rational(q: &BigRational) -> Self {
        Self::from_isolated(IntPolynomial::linear_for(q), q.clone(), q.clone(), Irreducibility::Proven)
    }

    fn from_isolated(min_poly: IntPolynomial, lo: BigRational, hi: BigRational, irr: Irreducibility) -> Self {
        let min_poly = if min_poly.leading().is_negative() { min_poly.neg() } else { min_poly };
        let mut a = AlgebraicNumber {
            cached: RatInterval::new(lo.clone(), hi.clone()),
            min_poly,
            lo,
            hi,
            irreducibility: irr,
        };
        if a.min_poly.degree() == 1 {
            let c = a.min_poly.coeffs();
            let r = BigRational::new(-c[0].clone(), c[1].clone());
            a.cached = RatInterval::point(r.clone());
            a.lo = r.clone();
            a.hi = r;
        } else {
            a.cached = a.bisect(a.cached.clone(), CACHED_BITS);
        }
        a
    }

    /// `1/x`, for nonzero `x`.
    pub fn reciprocal(&self) -> Result<Self> {
        if let Some(q) = self.as_rational() {
            if q.is_zero() {
                return Err(Error::invalid("reciprocal of zero"));
            }
            return Ok(Self::rational(&q.recip()));
        }
        let enc = self.cached.recip().ok_or_else(|| Error::invalid("reciprocal of zero"))?;
        let rp = self.min_poly.reciprocal();
        Ok(Self::from_isolated(rp, enc.lo, enc.hi, self.irreducibility))
    }

    pub fn min_poly(&self) -> &IntPolynomial {
        &self.min_poly
    }

    pub fn degree(&self) -> usize {
        self.min_poly.degree()
    }

    pub fn irreducibility(&self) -> Irreducibility {
        self.irreducibility
    }

    pub fn isolating_interval(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        (self.degree() == 1).then(|| self.cached.lo.clone())
    }

    pub fn is_algebraic_integer(&self) -> bool {
        self.min_poly.is_monic()
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&((&self.cached.lo + &self.cached.hi) / BigRational::from_integer(2.into())))
    }

    /// Outward-rounded f64 enclosure.
    pub fn interval(&self) -> Interval {
        self.cached.to_interval()
    }

    /// Rational enclosure of width at most `2^-bits`.
    pub fn enclosure(&self, bits: u32) -> RatInterval {
        if bits <= CACHED_BITS || self.cached.is_point() {
            return self.cached.clone();
        }
        self.bisect(self.cached.clone(), bits)
    }

    fn bisect(&self, mut iv: RatInterval, bits: u32) -> RatInterval {
        let target = pow2(-(bits as i64));
        let two = BigRational::from_integer(2.into());
        let mut s_lo = self.min_poly.sign_at(&iv.lo);
        if s_lo == 0 {
            return RatInterval::point(iv.lo);
        }
        if self.min_poly.sign_at(&iv.hi) == 0 {
            return RatInterval::point(iv.hi);
        }
        // enclosures are kept dyadic so that later arithmetic stays cheap
        while iv.width() > target {
            let w = iv.width();
            let k = (w.denom().bits() as i64 - w.numer().bits() as i64 + 2).max(1) as u32;
            let mid = crate::exact::round_dyadic(&((&iv.lo + &iv.hi) / &two), k.max(8) + 8);
            let mid = if mid <= iv.lo || mid >= iv.hi { (&iv.lo + &iv.hi) / &two } else { mid };
            let s = self.min_poly.sign_at(&mid);
            if s == 0 {
                return RatInterval::point(mid);
            }
            if s == s_lo {
                iv.lo = mid;
                s_lo = s;
            } else {
                iv.hi = mid;
            }
        }
        iv
    }

    /// Exact sign of `q(x)`.
    pub fn sign_of(&self, q: &[BigRational]) -> i32 {
        let lcm = q.iter().fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
        let ints: Vec<BigInt> = q.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        self.sign_of_int(&ints)
    }

    pub fn sign_of_int(&self, q: &[BigInt]) -> i32 {
        let Ok(qp) = IntPolynomial::new(q.to_vec()) else {
            // constant or zero
            return q.first().map_or(0, |c| c.signum().try_into().unwrap_or(0));
        };
        if let Some(r) = self.as_rational() {
            return qp.sign_at(&r);
        }
        let g = qp.gcd(&self.min_poly);
        if g.degree() >= 1 && g.count_roots_in(&self.lo, &self.hi) >= 1 {
            return 0;
        }
        let mut bits = CACHED_BITS;
        loop {
            let iv = self.enclosure(bits);
            if let Some(s) = horner_interval(q, &iv).strict_sign() {
                return if s == num_bigint::Sign::Plus { 1 } else { -1 };
            }
            bits *= 2;
        }
    }

    /// Exact comparison with a rational.
    pub fn cmp_rational(&self, q: &BigRational) -> std::cmp::Ordering {
        if q < &self.cached.lo {
            return std::cmp::Ordering::Greater;
        }
        if q > &self.cached.hi {
            return std::cmp::Ordering::Less;
        }
        let lin = IntPolynomial::linear_for(q);
        self.sign_of_int(lin.coeffs()).cmp(&0)
    }
}

pub(crate) fn horner_interval(q: &[BigInt], x: &RatInterval) -> RatInterval {
    let mut acc = RatInterval::point(BigRational::zero());
    for c in q.iter().rev() {
        acc = acc.mul(x).add(&RatInterval::point(BigRational::from_integer(c.clone())));
    }
    acc
}

/// Serializable description of an algebraic number.
#[derive(Clone, Debug, Serialize)]
pub struct AlgebraicSummary {
    pub min_poly: Vec<String>,
    pub value: f64,
    pub degree: usize,
    pub irreducibility: Irreducibility,
}

impl AlgebraicNumber {
    pub fn summary(&self) -> AlgebraicSummary {
        AlgebraicSummary {
            min_poly: self.min_poly.coeffs().iter().map(|c| c.to_string()).collect(),
            value: self.to_f64(),
            degree: self.degree(),
            irreducibility: self.irreducibility,
        }
    }
}

/// `Q(λ)` as `Q[x] / (min_poly)`.
#[derive(Clone, Debug)]
pub struct NumberField {
    generator: AlgebraicNumber,
    /// minimal polynomial divided by its leading coefficient, without the leading 1
    monic_tail: Vec<BigRational>,
}

/// Coordinates in the power basis `1, λ, ..., λ^{d-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coords: Vec<BigRational>,
}

impl FieldElement {
    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

impl NumberField {
    pub fn new(generator: AlgebraicNumber) -> Self {
        let lc = BigRational::from_integer(generator.min_poly.leading().clone());
        let d = generator.degree();
        let monic_tail = generator.min_poly.coeffs()[..d]
            .iter()
            .map(|c| BigRational::from_integer(c.clone()) / &lc)
            .collect();
        NumberField { generator, monic_tail }
    }

    pub fn generator(&self) -> &AlgebraicNumber {
        &self.generator
    }

    pub fn degree(&self) -> usize {
        self.generator.degree()
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coords: vec![BigRational::zero(); self.degree()] }
    }

    pub fn one(&self) -> FieldElement {
        self.from_coeffs(&[BigRational::one()])
    }

    /// Reduces a polynomial in λ (ascending coefficients).
    pub fn from_coeffs(&self, c: &[BigRational]) -> FieldElement {
        let d = self.degree();
        let mut v: Vec<BigRational> = c.to_vec();
        while v.len() > d {
            let top = v.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let base = v.len() - d;
            for (i, t) in self.monic_tail.iter().enumerate() {
                v[base + i] -= &top * t;
            }
        }
        v.resize(d, BigRational::zero());
        FieldElement { coords: v }
    }

    pub fn from_ints(&self, c: &[i64]) -> FieldElement {
        let r: Vec<BigRational> = c.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        self.from_coeffs(&r)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement { coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect() }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement { coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect() }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement { coords: a.coords.iter().map(|x| -x).collect() }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let mut prod = vec![BigRational::zero(); 2 * self.degree().max(1) - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        self.from_coeffs(&prod)
    }

    pub fn sign(&self, a: &FieldElement) -> i32 {
        self.generator.sign_of(&a.coords)
    }

    /// f64 enclosure of the value.
    pub fn interval(&self, a: &FieldElement) -> Interval {
        let x = self.generator.enclosure(CACHED_BITS);
        let mut acc = RatInterval::point(BigRational::zero());
        for c in a.coords.iter().rev() {
            acc = acc.mul(&x).add(&RatInterval::point(c.clone()));
        }
        acc.to_interval()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    #[test]
    fn golden_parameter() {
        let a = AlgebraicNumber::in_unit_interval(&p(&[-1, 1, 1])).unwrap();
        assert!((a.to_f64() - 0.6180339887498949).abs() < 1e-15);
        assert!(a.enclosure(CACHED_BITS).width() <= pow2(-(CACHED_BITS as i64)));
        let inv = a.reciprocal().unwrap();
        assert!((inv.to_f64() - 1.618033988749895).abs() < 1e-15);
        assert_eq!(inv.min_poly().coeffs(), p(&[-1, -1, 1]).coeffs());
    }

    #[test]
    fn root_indices_ascending() {
        let q = p(&[0, -2, 0, 1]); // roots -sqrt2, 0, sqrt2
        let v: Vec<f64> = (0..3).map(|k| AlgebraicNumber::from_root_index(&q, k).unwrap().to_f64()).collect();
        assert!((v[0] + 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(v[1], 0.0);
        assert!((v[2] - 2f64.sqrt()).abs() < 1e-15);
        assert!(AlgebraicNumber::from_root_index(&q, 3).is_err());
    }

    #[test]
    fn reducible_input_switches_factor() {
        // (x^2 + x - 1)(x - 3): the root in (0,1) has minimal polynomial x^2 + x - 1
        let q = p(&[-1, 1, 1]).mul(&p(&[-3, 1]));
        let a = AlgebraicNumber::in_unit_interval(&q).unwrap();
        assert_eq!(a.degree(), 2);
        let b = AlgebraicNumber::from_root_index(&q, 2).unwrap();
        assert_eq!(b.as_rational(), Some(rat(3, 1)));
    }

    #[test]
    fn interval_selection_rejects_ambiguity() {
        let q = p(&[-1, -1, 1]);
        assert!(AlgebraicNumber::new(&q, rat(-2, 1), rat(2, 1)).is_err());
        assert!(AlgebraicNumber::new(&q, rat(1, 1), rat(2, 1)).is_ok());
    }

    #[test]
    fn exact_signs_in_field() {
        let a = AlgebraicNumber::in_unit_interval(&p(&[-1, 1, 1])).unwrap();
        let k = NumberField::new(a.clone());
        // λ^2 + λ - 1 = 0
        assert!(k.from_ints(&[-1, 1, 1]).is_zero());
        // λ^3 = 2λ - 1
        assert_eq!(k.from_ints(&[0, 0, 0, 1]), k.from_ints(&[-1, 2]));
        let x = k.from_ints(&[0, 1]);
        let x2 = k.mul(&x, &x);
        assert_eq!(x2, k.from_ints(&[1, -1]));
        assert_eq!(k.sign(&k.from_ints(&[-1, 2])), 1); // 2λ - 1 > 0
        assert_eq!(a.sign_of_int(&[BigInt::from(-1), BigInt::from(1), BigInt::from(1)]), 0);
        assert_eq!(a.cmp_rational(&rat(5, 8)), std::cmp::Ordering::Less);
        assert!(k.interval(&x).contains(0.6180339887498949));
    }

    #[test]
    fn high_precision_enclosure() {
        let a = AlgebraicNumber::in_unit_interval(&p(&[-1, 1, 1])).unwrap();
        let iv = a.enclosure(300);
        assert!(iv.width() <= pow2(-300));
        assert!(p(&[-1, 1, 1]).sign_at(&iv.lo) != p(&[-1, 1, 1]).sign_at(&iv.hi));
    }
}
