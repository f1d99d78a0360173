//! Integer polynomials: parsing, exact arithmetic, primitive gcds,
//! square-free decomposition and Sturm sequences.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer polynomial with ascending coefficients and a nonzero leading term.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<BigInt>", into = "Vec<BigInt>")]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl TryFrom<Vec<BigInt>> for IntPolynomial {
    type Error = Error;
    fn try_from(v: Vec<BigInt>) -> Result<Self> {
        IntPolynomial::new(v)
    }
}

impl From<IntPolynomial> for Vec<BigInt> {
    fn from(p: IntPolynomial) -> Self {
        p.coeffs
    }
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self> {
        trim(&mut coeffs);
        if coeffs.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(IntPolynomial { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn from_raw(coeffs: Vec<BigInt>) -> Self {
        debug_assert!(coeffs.last().is_some_and(|c| !c.is_zero()));
        IntPolynomial { coeffs }
    }

    /// `q x - p` for the rational `p/q`.
    pub fn linear_for(value: &BigRational) -> Self {
        Self::from_raw(vec![-value.numer().clone(), value.denom().clone()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().unwrap()
    }

    pub fn constant_term(&self) -> &BigInt {
        &self.coeffs[0]
    }

    pub fn is_monic(&self) -> bool {
        self.leading().abs().is_one()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive part normalized to a positive leading coefficient.
    pub fn primitive(&self) -> Self {
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        Self::from_raw(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn neg(&self) -> Self {
        Self::from_raw(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn derivative(&self) -> Option<Self> {
        if self.degree() == 0 {
            return None;
        }
        let d = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect();
        Some(Self::from_raw(d))
    }

    /// `x^deg p(1/x)`, after removing any factor of `x`.
    pub fn reciprocal(&self) -> Self {
        let mut c: Vec<BigInt> = self.coeffs.iter().rev().cloned().collect();
        trim(&mut c);
        Self::from_raw(c)
    }

    /// Largest `k` with `x^k | p`.
    pub fn x_adic_order(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// `p / x^k` for the full `x`-adic order `k`.
    pub fn strip_x_factors(&self) -> Self {
        Self::from_raw(self.coeffs[self.x_adic_order()..].to_vec())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_raw(mul_raw(&self.coeffs, &other.coeffs))
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Sign of `p(x)` computed in integer arithmetic.
    pub fn sign_at(&self, x: &BigRational) -> i32 {
        sign_raw_at(&self.coeffs, x)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        use num_traits::ToPrimitive;
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Primitive gcd with positive leading coefficient.
    pub fn gcd(&self, other: &Self) -> Self {
        let g = gcd_raw(&self.coeffs, &other.coeffs);
        Self::from_raw(g)
    }

    /// Exact quotient over `Z[x]`, if `other` divides `self`.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        let (q, r) = divrem_over_z(&self.coeffs, &other.coeffs)?;
        if r.is_empty() {
            Some(Self::from_raw(q))
        } else {
            None
        }
    }

    pub fn is_square_free(&self) -> bool {
        match self.derivative() {
            None => true,
            Some(d) => self.gcd(&d).degree() == 0,
        }
    }

    /// Primitive square-free part (product of the distinct irreducible factors).
    pub fn square_free(&self) -> Self {
        let p = self.primitive();
        match p.derivative() {
            None => p,
            Some(d) => {
                let g = p.gcd(&d);
                p.div_exact(&g).expect("gcd divides").primitive()
            }
        }
    }

    /// Yun decomposition `p = c * prod s_k^k` with primitive, pairwise coprime,
    /// square-free `s_k`; factors of degree zero are omitted.
    pub fn square_free_decomposition(&self) -> Vec<(Self, usize)> {
        let a = self.primitive();
        let Some(da) = a.derivative() else {
            return Vec::new();
        };
        let b = a.gcd(&da);
        let mut c = a.div_exact(&b).unwrap().primitive();
        let mut d = sub_raw(&da.div_exact(&b).unwrap().coeffs, &deriv_raw(&c.coeffs));
        let mut out = Vec::new();
        let mut k = 1;
        while c.degree() > 0 {
            let ak = if d.is_empty() {
                c.clone()
            } else {
                IntPolynomial::from_raw(gcd_raw(&c.coeffs, &d))
            };
            if ak.degree() > 0 {
                out.push((ak.clone(), k));
            }
            let nc = c.div_exact(&ak).unwrap();
            d = if d.is_empty() {
                Vec::new()
            } else {
                let dq = divrem_over_z(&d, &ak.coeffs).unwrap().0;
                sub_raw(&dq, &deriv_raw(&nc.coeffs))
            };
            c = nc;
            k += 1;
        }
        out
    }

    /// Sturm sequence of the square-free part, with positive rescalings only.
    pub fn sturm_sequence(&self) -> SturmSequence {
        let p = self.square_free();
        let mut seq = vec![p.coeffs.clone()];
        if let Some(d) = p.derivative() {
            seq.push(d.primitive().coeffs);
        }
        while seq.len() >= 2 {
            let n = seq.len();
            let r = prem_positive(&seq[n - 2], &seq[n - 1]);
            if r.is_empty() {
                break;
            }
            let neg: Vec<BigInt> = r.iter().map(|c| -c).collect();
            seq.push(primitive_positive_scale(neg));
        }
        SturmSequence { polys: seq }
    }

    /// Number of distinct real roots in the closed interval `[a, b]`.
    pub fn count_roots_in(&self, a: &BigRational, b: &BigRational) -> usize {
        self.sturm_sequence().count_in(a, b)
    }

    pub fn count_real_roots(&self) -> usize {
        self.sturm_sequence().count_all()
    }

    /// Cauchy bound: every complex root has modulus below this value.
    pub fn root_bound(&self) -> BigRational {
        let lc = BigRational::from_integer(self.leading().abs());
        let m = self.coeffs[..self.degree()]
            .iter()
            .map(|c| BigRational::from_integer(c.abs()) / &lc)
            .max()
            .unwrap_or_else(BigRational::zero);
        m + BigRational::one()
    }

    /// The polynomial `h` with `x^k p(x) ... = x^k h(x + 1/x)` for a reciprocal
    /// polynomial of even degree `2k`. Returns `None` if `p` is not reciprocal.
    pub fn trace_polynomial(&self) -> Option<Self> {
        let n = self.degree();
        if n % 2 == 1 {
            return None;
        }
        let same = self.coeffs.iter().zip(self.coeffs.iter().rev()).all(|(a, b)| a == b);
        if !same {
            return None;
        }
        let k = n / 2;
        // Dickson polynomials D_m(y) = x^m + x^-m with D_0 = 2, D_1 = y.
        let mut dickson: Vec<Vec<BigInt>> = vec![vec![BigInt::from(2)], vec![BigInt::zero(), BigInt::one()]];
        for m in 2..=k {
            let mut shifted = vec![BigInt::zero()];
            shifted.extend(dickson[m - 1].iter().cloned());
            dickson.push(sub_raw(&shifted, &dickson[m - 2]));
        }
        let mut h = vec![self.coeffs[k].clone()];
        for m in 1..=k {
            let scaled: Vec<BigInt> = dickson[m].iter().map(|c| c * &self.coeffs[k + m]).collect();
            h = add_raw(&h, &scaled);
        }
        Some(Self::from_raw(h))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_mag = !mag.is_one() || i == 0;
            if show_mag {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial({self})")
    }
}

/// A Sturm chain; sign variations count distinct real roots.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    polys: Vec<Vec<BigInt>>,
}

impl SturmSequence {
    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn variations_at(&self, x: &BigRational) -> usize {
        variations(self.polys.iter().map(|p| sign_raw_at(p, x)))
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        variations(self.polys.iter().map(|p| {
            let s = if p.last().unwrap().is_positive() { 1 } else { -1 };
            if positive || (p.len() - 1) % 2 == 0 {
                s
            } else {
                -s
            }
        }))
    }

    /// Distinct roots in `(a, b]`.
    pub fn count_half_open(&self, a: &BigRational, b: &BigRational) -> usize {
        if a >= b {
            return 0;
        }
        self.variations_at(a) - self.variations_at(b)
    }

    /// Distinct roots in `[a, b]`.
    pub fn count_in(&self, a: &BigRational, b: &BigRational) -> usize {
        if a > b {
            return 0;
        }
        let at_a = usize::from(sign_raw_at(&self.polys[0], a) == 0);
        self.count_half_open(a, b) + at_a
    }

    pub fn count_all(&self) -> usize {
        self.variations_at_infinity(false) - self.variations_at_infinity(true)
    }

    pub fn base(&self) -> IntPolynomial {
        IntPolynomial::from_raw(self.polys[0].clone())
    }
}

fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut count = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Parses `x^2 - x - 1`, `2x - 1`, `-3*x^4 + 7`, or a JSON array of ascending
/// integer coefficients such as `[-1, -1, 1]`. Constants are rejected.
pub fn parse_polynomial(text: &str) -> Result<IntPolynomial> {
    let t = text.trim();
    let p = if t.starts_with('[') {
        parse_coefficient_list(text)?
    } else {
        parse_terms(text)?
    };
    if p.degree() == 0 {
        return Err(Error::Syntax {
            text: text.to_string(),
            reason: "constant polynomial has no roots".into(),
        });
    }
    Ok(p)
}

fn parse_coefficient_list(text: &str) -> Result<IntPolynomial> {
    let values: Vec<serde_json::Value> = serde_json::from_str(text).map_err(|e| Error::Syntax {
        text: text.to_string(),
        reason: e.to_string(),
    })?;
    let mut coeffs = Vec::with_capacity(values.len());
    for v in values {
        let c = match &v {
            serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string().parse::<BigInt>().unwrap(),
            serde_json::Value::String(s) => s
                .trim()
                .parse::<BigInt>()
                .map_err(|_| Error::NonIntegerCoefficient(s.clone()))?,
            other => return Err(Error::NonIntegerCoefficient(other.to_string())),
        };
        coeffs.push(c);
    }
    IntPolynomial::new(coeffs)
}

fn parse_terms(text: &str) -> Result<IntPolynomial> {
    let syntax = |reason: &str| Error::Syntax {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let s: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(syntax("empty input"));
    }
    let mut coeffs: Vec<BigInt> = Vec::new();
    let mut i = 0;
    while i < s.len() {
        let mut sign = BigInt::one();
        if s[i] == '+' || s[i] == '-' {
            if s[i] == '-' {
                sign = -sign;
            }
            i += 1;
        } else if i > 0 {
            return Err(syntax("expected `+` or `-` between terms"));
        }
        let start = i;
        while i < s.len() && (s[i].is_ascii_digit() || s[i] == '.') {
            i += 1;
        }
        let digits: String = s[start..i].iter().collect();
        if digits.contains('.') {
            return Err(Error::NonIntegerCoefficient(digits));
        }
        let mag: Option<BigInt> = if digits.is_empty() {
            None
        } else {
            Some(digits.parse().map_err(|_| syntax("bad integer"))?)
        };
        if i < s.len() && s[i] == '/' {
            return Err(Error::NonIntegerCoefficient(format!("{digits}/...")));
        }
        if i < s.len() && s[i] == '*' {
            if mag.is_none() {
                return Err(syntax("`*` without a coefficient"));
            }
            i += 1;
            if i >= s.len() || !matches!(s[i], 'x' | 'X') {
                return Err(syntax("expected `x` after `*`"));
            }
        }
        let mut exp = 0usize;
        if i < s.len() && matches!(s[i], 'x' | 'X') {
            i += 1;
            exp = 1;
            if i < s.len() && s[i] == '^' {
                i += 1;
                let es = i;
                while i < s.len() && s[i].is_ascii_digit() {
                    i += 1;
                }
                if es == i {
                    return Err(syntax("missing exponent after `^`"));
                }
                exp = s[es..i].iter().collect::<String>().parse().map_err(|_| syntax("bad exponent"))?;
                if exp > 4096 {
                    return Err(syntax("exponent too large"));
                }
            }
        } else if mag.is_none() {
            return Err(syntax("empty term"));
        }
        if i < s.len() && s[i] != '+' && s[i] != '-' {
            return Err(syntax(&format!("unexpected character `{}`", s[i])));
        }
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, BigInt::zero());
        }
        coeffs[exp] += sign * mag.unwrap_or_else(BigInt::one);
    }
    IntPolynomial::new(coeffs)
}

// ---- raw coefficient-vector arithmetic (empty vector = zero polynomial) ----

pub(crate) fn trim(c: &mut Vec<BigInt>) {
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
}

pub(crate) fn add_raw(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut out: Vec<BigInt> = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_default();
            let y = b.get(i).cloned().unwrap_or_default();
            x + y
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn sub_raw(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let nb: Vec<BigInt> = b.iter().map(|c| -c).collect();
    add_raw(a, &nb)
}

pub(crate) fn mul_raw(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn deriv_raw(a: &[BigInt]) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn sign_raw_at(p: &[BigInt], x: &BigRational) -> i32 {
    if p.is_empty() {
        return 0;
    }
    // q^n p(u/q) = sum c_i u^i q^(n-i), same sign as p(x) since q > 0
    let (u, q) = (x.numer(), x.denom());
    let mut acc = BigInt::zero();
    let mut qpow = BigInt::one();
    let n = p.len() - 1;
    let mut terms = vec![BigInt::zero(); p.len()];
    for i in (0..=n).rev() {
        terms[i] = qpow.clone();
        qpow *= q;
    }
    let mut upow = BigInt::one();
    for (i, c) in p.iter().enumerate() {
        if !c.is_zero() {
            acc += c * &upow * &terms[i];
        }
        upow *= u;
    }
    match acc.sign() {
        num_bigint::Sign::Plus => 1,
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
    }
}

fn content_raw(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn primitive_positive_scale(a: Vec<BigInt>) -> Vec<BigInt> {
    let g = content_raw(&a);
    if g.is_zero() || g.is_one() {
        return a;
    }
    a.into_iter().map(|c| c / &g).collect()
}

/// Pseudo-remainder of `a` by `b` scaled by a positive constant.
fn prem_positive(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = b.last().unwrap().clone();
    let mut steps = 0usize;
    while !r.is_empty() && r.len() > db {
        let shift = r.len() - 1 - db;
        let lr = r.last().unwrap().clone();
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (j, c) in b.iter().enumerate() {
            r[j + shift] -= &lr * c;
        }
        trim(&mut r);
        steps += 1;
    }
    // r was scaled by lb^steps; fix the sign so the net multiplier is positive
    if lb.is_negative() && steps % 2 == 1 {
        for c in r.iter_mut() {
            *c = -&*c;
        }
    }
    primitive_positive_scale(r)
}

fn gcd_raw(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut x = primitive_positive_scale(a.to_vec());
    let mut y = primitive_positive_scale(b.to_vec());
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = prem_positive(&x, &y);
        x = y;
        y = r;
    }
    let mut g = primitive_positive_scale(x);
    if g.last().is_some_and(|c| c.is_negative()) {
        for c in g.iter_mut() {
            *c = -&*c;
        }
    }
    g
}

/// Division over `Z[x]`; `None` if a non-integral quotient coefficient arises.
fn divrem_over_z(a: &[BigInt], b: &[BigInt]) -> Option<(Vec<BigInt>, Vec<BigInt>)> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lb = b.last().unwrap();
    if r.len() <= db {
        return Some((Vec::new(), r));
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    while !r.is_empty() && r.len() > db {
        let shift = r.len() - 1 - db;
        let (qc, rem) = r.last().unwrap().div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        for (j, c) in b.iter().enumerate() {
            r[j + shift] -= &qc * c;
        }
        q[shift] = qc;
        trim(&mut r);
    }
    trim(&mut q);
    Some((q, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    #[test]
    fn parses_human_syntax() {
        assert_eq!(parse_polynomial("x^2 - x - 1").unwrap(), p(&[-1, -1, 1]));
        assert_eq!(parse_polynomial("2x - 1").unwrap(), p(&[-1, 2]));
        assert_eq!(parse_polynomial("-3*x^4 + 7").unwrap(), p(&[7, 0, 0, 0, -3]));
        assert_eq!(
            parse_polynomial("x^10 + x^9 - x^7 - x^6 - x^5 - x^4 - x^3 + x + 1").unwrap(),
            p(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1])
        );
        assert_eq!(parse_polynomial("[-1, -1, 1]").unwrap(), p(&[-1, -1, 1]));
    }

    #[test]
    fn parse_rejections() {
        assert!(matches!(parse_polynomial("x^2 - 0.5"), Err(Error::NonIntegerCoefficient(_))));
        assert!(matches!(parse_polynomial("x - x"), Err(Error::ZeroPolynomial)));
        assert!(matches!(parse_polynomial("[0, 0]"), Err(Error::ZeroPolynomial)));
        assert!(matches!(parse_polynomial("[1, 0.5]"), Err(Error::NonIntegerCoefficient(_))));
        assert!(parse_polynomial("x^").is_err());
        assert!(parse_polynomial("x y").is_err());
        assert!(parse_polynomial("7").is_err());
    }

    #[test]
    fn display_round_trips() {
        for text in ["x^3 - x - 2", "2x - 1", "-x^2 + 3"] {
            let q = parse_polynomial(text).unwrap();
            assert_eq!(parse_polynomial(&q.to_string()).unwrap(), q);
        }
    }

    #[test]
    fn gcd_and_square_free() {
        let a = p(&[-1, -1, 1]).mul(&p(&[-3, 1]));
        let b = p(&[-1, -1, 1]).mul(&p(&[2, 1]));
        assert_eq!(a.gcd(&b), p(&[-1, -1, 1]));
        let sq = p(&[-1, -1, 1]).mul(&p(&[-1, -1, 1])).mul(&p(&[1, 1]));
        assert_eq!(sq.square_free(), p(&[-1, -1, 1]).mul(&p(&[1, 1])));
        let dec = sq.square_free_decomposition();
        assert_eq!(dec, vec![(p(&[1, 1]), 1), (p(&[-1, -1, 1]), 2)]);
    }

    #[test]
    fn yun_handles_content_and_high_multiplicity() {
        let f = p(&[-1, 2]).mul(&p(&[-1, 2])).mul(&p(&[-1, 2])).mul(&p(&[0, 6]));
        let dec = f.square_free_decomposition();
        assert_eq!(dec, vec![(p(&[0, 1]), 1), (p(&[-1, 2]), 3)]);
    }

    #[test]
    fn sturm_counts() {
        let golden = p(&[1, -1, -1]); // 1 - x - x^2
        assert_eq!(golden.count_roots_in(&rat(1, 2), &rat(63, 100)), 1);
        assert_eq!(p(&[1, 1, 1]).count_roots_in(&rat(-10, 1), &rat(10, 1)), 0);
        assert_eq!(p(&[-1, -1, 1]).count_roots_in(&rat(1, 2), &rat(63, 100)), 0);
        assert_eq!(p(&[-2, -1, 0, 1]).count_real_roots(), 1);
        // closed interval includes an endpoint root
        assert_eq!(p(&[-1, 2]).count_roots_in(&rat(1, 2), &rat(1, 1)), 1);
        assert_eq!(p(&[-1, 2]).count_roots_in(&rat(0, 1), &rat(1, 2)), 1);
        // multiplicities collapse
        let double = p(&[-1, 1]).mul(&p(&[-1, 1]));
        assert_eq!(double.count_roots_in(&rat(0, 1), &rat(2, 1)), 1);
    }

    #[test]
    fn trace_polynomial_of_reciprocal() {
        // x^2 - 3x + 1 = x (y - 3) with y = x + 1/x
        assert_eq!(p(&[1, -3, 1]).trace_polynomial().unwrap(), p(&[-3, 1]));
        // x^4 + 1 = x^2 (y^2 - 2)
        assert_eq!(p(&[1, 0, 0, 0, 1]).trace_polynomial().unwrap(), p(&[-2, 0, 1]));
        assert!(p(&[1, 2, 3]).trace_polynomial().is_none());
    }

    #[test]
    fn exact_division() {
        let a = p(&[-1, -1, 1]).mul(&p(&[3, 2]));
        assert_eq!(a.div_exact(&p(&[3, 2])).unwrap(), p(&[-1, -1, 1]));
        assert!(a.div_exact(&p(&[1, 1])).is_none());
    }
}
