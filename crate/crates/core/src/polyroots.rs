//! The families `P_d` of polynomials with coefficients in {-1, 0, 1}.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebraic::AlgebraicNumber;
use crate::error::{Error, Result};
use crate::exact::{rat, RatInterval};
use crate::poly::{IntPolynomial, SturmSequence};
use crate::roots::certified_roots;

/// Largest `d` enumerated without an explicit cap override.
pub const ENUMERATION_CAP: usize = 12;
pub const TRANSVERSALITY_CAP: usize = 10;
pub const SEPARATION_CAP: usize = 6;
pub const NEAREST_CAP: usize = 10;

/// A canonical pattern: ascending coefficients, first nonzero one equal to `+1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PdPolynomial {
    pub coeffs: Vec<i8>,
}

impl PdPolynomial {
    pub fn new(coeffs: Vec<i8>) -> Result<Self> {
        if coeffs.iter().any(|c| !(-1..=1).contains(c)) {
            return Err(Error::invalid("coefficients must lie in {-1, 0, 1}"));
        }
        let Some(first) = coeffs.iter().find(|c| **c != 0) else {
            return Err(Error::ZeroPolynomial);
        };
        let coeffs = if *first < 0 { coeffs.iter().map(|c| -c).collect() } else { coeffs };
        Ok(PdPolynomial { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != 0).unwrap_or(0)
    }

    pub fn to_poly(&self) -> IntPolynomial {
        IntPolynomial::from_i64(&self.coeffs.iter().map(|&c| c as i64).collect::<Vec<_>>()).expect("nonzero pattern")
    }

    fn big_coeffs(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }
}

impl fmt::Display for PdPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

impl fmt::Debug for PdPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pd({self})")
    }
}

/// `(3^{d+1} - 1) / 2`.
pub fn pd_count(d: usize) -> u64 {
    (3u64.pow(d as u32 + 1) - 1) / 2
}

fn check_cap(d: usize, cap: usize) -> Result<()> {
    if d > cap {
        return Err(Error::CapExceeded { what: "d", requested: d as u64, cap: cap as u64 });
    }
    Ok(())
}

/// Pattern with base-3 index `i` (digit `k` gives `c_k + 1`), if canonical.
fn pattern_at(d: usize, mut i: u64) -> Option<PdPolynomial> {
    let mut coeffs = Vec::with_capacity(d + 1);
    for _ in 0..=d {
        coeffs.push((i % 3) as i8 - 1);
        i /= 3;
    }
    (coeffs.iter().find(|c| **c != 0) == Some(&1)).then_some(PdPolynomial { coeffs })
}

fn all_patterns(d: usize) -> impl Iterator<Item = PdPolynomial> {
    (0..3u64.pow(d as u32 + 1)).filter_map(move |i| pattern_at(d, i))
}

/// Every canonical nonzero pattern of length `d + 1` exactly once.
pub fn enumerate_pd(d: usize) -> Result<impl Iterator<Item = PdPolynomial>> {
    enumerate_pd_capped(d, ENUMERATION_CAP)
}

pub fn enumerate_pd_capped(d: usize, cap: usize) -> Result<impl Iterator<Item = PdPolynomial>> {
    check_cap(d, cap)?;
    Ok(all_patterns(d))
}

/// Patterns with at least one root in `[a, b]`.
pub fn enumerate_pd_in(d: usize, a: &BigRational, b: &BigRational) -> Result<Vec<PdPolynomial>> {
    Ok(enumerate_pd(d)?
        .filter(|p| count_zeros_interval(&p.to_poly(), a, b).map_or(false, |n| n > 0))
        .collect())
}

/// Distinct real roots in the closed interval `[a, b]`.
pub fn count_zeros_interval(p: &IntPolynomial, a: &BigRational, b: &BigRational) -> Result<usize> {
    if a >= b {
        return Err(Error::invalid("empty interval"));
    }
    if p.degree() == 0 {
        return Ok(0);
    }
    Ok(p.sturm_sequence().count_in(a, b))
}

/// Distinct real roots in `[a, beta]` for an algebraic right endpoint.
fn count_to_algebraic(s: &SturmSequence, p: &IntPolynomial, a: &BigRational, beta: &AlgebraicNumber) -> Result<usize> {
    let mut bits = 64;
    let mut on_beta = None;
    while bits <= 8192 {
        let e = beta.enclosure(bits);
        let below = s.count_in(a, &e.lo);
        let above = s.count_in(a, &e.hi);
        if below == above {
            return Ok(below);
        }
        let hit = *on_beta.get_or_insert_with(|| beta.sign_of_int(p.coeffs()) == 0);
        if hit && above == below + 1 {
            return Ok(above);
        }
        bits *= 2;
    }
    Err(Error::Undecided(format!("root of {p} too close to the endpoint")))
}

#[derive(Clone, Debug, Serialize)]
pub struct TransversalityReport {
    pub d: usize,
    pub interval: (String, String),
    pub max_count: usize,
    pub witness: Option<String>,
    pub patterns_checked: u64,
    /// patterns with more than one zero, in enumeration order
    pub violations: Vec<String>,
}

/// `2^{-2/3}`, the positive root of `4x^3 - 1`.
pub fn transversality_endpoint() -> AlgebraicNumber {
    AlgebraicNumber::in_unit_interval(&IntPolynomial::from_i64(&[-1, 0, 0, 4]).unwrap()).unwrap()
}

/// Maximum number of zeros in `[1/2, 2^{-2/3}]` over `P_d`.
pub fn transversality_audit(d: usize) -> Result<TransversalityReport> {
    transversality_audit_capped(d, TRANSVERSALITY_CAP)
}

pub fn transversality_audit_capped(d: usize, cap: usize) -> Result<TransversalityReport> {
    check_cap(d, cap)?;
    let a = rat(1, 2);
    let beta = transversality_endpoint();
    let total = 3u64.pow(d as u32 + 1);
    let counts: Vec<(u64, usize)> = (0..total)
        .into_par_iter()
        .filter_map(|i| pattern_at(d, i).map(|p| (i, p)))
        .map(|(i, p)| {
            let poly = p.to_poly();
            if poly.degree() == 0 {
                return Ok((i, 0));
            }
            let s = poly.sturm_sequence();
            Ok((i, count_to_algebraic(&s, &poly, &a, &beta)?))
        })
        .collect::<Result<_>>()?;
    let mut max_count = 0;
    let mut witness = None;
    let mut violations = Vec::new();
    for &(i, c) in &counts {
        if c > max_count {
            max_count = c;
            witness = Some(i);
        }
        if c > 1 && violations.len() < 64 {
            violations.push(pattern_at(d, i).unwrap().to_string());
        }
    }
    Ok(TransversalityReport {
        d,
        interval: ("1/2".into(), "2^(-2/3)".into()),
        max_count,
        witness: witness.map(|i| pattern_at(d, i).unwrap().to_string()),
        patterns_checked: counts.len() as u64,
        violations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NearestRoot {
    pub d: usize,
    pub distance: f64,
    pub lo: f64,
    pub hi: f64,
    pub witness: String,
    pub root_re: f64,
    pub root_im: f64,
    pub exact: bool,
}

/// Distance from `λ` to the nearest complex root of any `P ∈ P_d`.
pub fn nearest_root(lambda: &AlgebraicNumber, d: usize) -> Result<NearestRoot> {
    check_cap(d, NEAREST_CAP)?;
    let l = lambda.enclosure(160);
    let best = all_patterns(d)
        .enumerate()
        .par_bridge()
        .map(|(k, p)| -> Result<Option<(usize, NearestRoot)>> {
            let poly = p.to_poly();
            if poly.degree() == 0 {
                return Ok(None);
            }
            if lambda.sign_of_int(poly.coeffs()) == 0 {
                let v = lambda.to_f64();
                let nr = NearestRoot { d, distance: 0.0, lo: 0.0, hi: 0.0, witness: p.to_string(), root_re: v, root_im: 0.0, exact: true };
                return Ok(Some((k, nr)));
            }
            let roots = certified_roots(&poly, 1e-40)?;
            let mut local: Option<NearestRoot> = None;
            for r in &roots.roots {
                let dx = RatInterval::new(&r.re - &l.hi, &r.re - &l.lo).to_interval();
                let im = crate::exact::Interval::from_rational(&r.im);
                let dist2 = dx * dx + im * im;
                let rad = r.radius_f64();
                let lo = (dist2.lo.max(0.0).sqrt().next_down() - rad).max(0.0);
                let hi = dist2.hi.sqrt().next_up() + rad;
                if local.as_ref().map_or(true, |b| hi < b.hi) {
                    let c = r.center_f64();
                    local = Some(NearestRoot { d, distance: 0.5 * (lo + hi), lo, hi, witness: p.to_string(), root_re: c.re, root_im: c.im, exact: false });
                }
            }
            Ok(local.map(|nr| (k, nr)))
        })
        .collect::<Result<Vec<_>>>()?;
    best.into_iter()
        .flatten()
        .min_by(|a, b| a.1.hi.partial_cmp(&b.1.hi).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)))
        .map(|(_, nr)| nr)
        .ok_or_else(|| Error::invalid("P_0 has no roots"))
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    pub d: usize,
    pub region: (String, String),
    pub distinct_roots: usize,
    /// midpoint of the certified enclosure of the minimum
    pub min_pairwise_distance: Option<f64>,
    pub min_lo: Option<f64>,
    pub min_hi: Option<f64>,
    pub witness: Option<(String, f64, String, f64)>,
    /// `exp(-4 d ln d)`
    pub mahler_bound: f64,
    pub bound_holds: bool,
}

#[derive(Clone)]
struct IsolatedRoot {
    pattern: usize,
    iv: RatInterval,
}

/// Real roots of a square-free `s` in `[a, b]`, each in an interval of width at most `2^-bits`.
fn isolate(s: &SturmSequence, a: &BigRational, b: &BigRational, bits: u32) -> Vec<RatInterval> {
    let base = s.base();
    let mut out = Vec::new();
    if base.sign_at(a) == 0 {
        out.push(RatInterval::point(a.clone()));
    }
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((lo, hi)) = stack.pop() {
        let n = s.count_half_open(&lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push(refine(s, lo, hi, bits));
            continue;
        }
        let mid = (&lo + &hi) / BigInt::from(2);
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out
}

/// Shrinks `(lo, hi]` holding one root.
fn refine(s: &SturmSequence, mut lo: BigRational, mut hi: BigRational, bits: u32) -> RatInterval {
    let base = s.base();
    if base.sign_at(&hi) == 0 {
        return RatInterval::point(hi);
    }
    let eps = crate::exact::pow2(-(bits as i64));
    while &hi - &lo > eps {
        let mid = (&lo + &hi) / BigInt::from(2);
        if base.sign_at(&mid) == 0 {
            return RatInterval::point(mid);
        }
        if s.count_half_open(&lo, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    RatInterval::new(lo, hi)
}

fn overlaps(x: &RatInterval, y: &RatInterval) -> bool {
    x.lo <= y.hi && y.lo <= x.hi
}

/// Minimum distance between distinct real roots in `[a, b]` over all of `P_d`.
pub fn separation_scan(d: usize, a: &BigRational, b: &BigRational) -> Result<SeparationReport> {
    separation_scan_capped(d, a, b, SEPARATION_CAP)
}

pub fn separation_scan_capped(d: usize, a: &BigRational, b: &BigRational, cap: usize) -> Result<SeparationReport> {
    check_cap(d, cap)?;
    if a >= b {
        return Err(Error::invalid("empty region"));
    }
    let patterns: Vec<PdPolynomial> = all_patterns(d).collect();
    let seqs: Vec<Option<(IntPolynomial, SturmSequence)>> = patterns
        .par_iter()
        .map(|p| {
            let poly = p.to_poly();
            (poly.degree() > 0).then(|| {
                let s = poly.square_free();
                let seq = s.sturm_sequence();
                (s, seq)
            })
        })
        .collect();
    let mut bits = 96u32;
    let mut roots: Vec<IsolatedRoot> = seqs
        .par_iter()
        .enumerate()
        .flat_map_iter(|(k, sq)| {
            sq.iter()
                .flat_map(|(_, seq)| isolate(seq, a, b, bits))
                .map(move |iv| IsolatedRoot { pattern: k, iv })
                .collect::<Vec<_>>()
        })
        .collect();
    let classes = loop {
        roots.sort_by(|x, y| x.iv.lo.cmp(&y.iv.lo).then(x.pattern.cmp(&y.pattern)));
        let mut classes: Vec<IsolatedRoot> = Vec::new();
        let mut clash = Vec::new();
        for (i, r) in roots.iter().enumerate() {
            match classes.last_mut() {
                Some(c) if overlaps(&c.iv, &r.iv) => {
                    let (sa, sb) = (&seqs[c.pattern].as_ref().unwrap().0, &seqs[r.pattern].as_ref().unwrap().0);
                    let lo = (&c.iv.lo).max(&r.iv.lo).clone();
                    let hi = (&c.iv.hi).min(&r.iv.hi).clone();
                    let g = sa.gcd(sb);
                    if g.degree() > 0 && g.count_roots_in(&lo, &hi) > 0 {
                        c.iv = RatInterval::new(lo, hi);
                    } else {
                        clash.push(i);
                    }
                }
                _ => classes.push(r.clone()),
            }
        }
        if clash.is_empty() {
            break classes;
        }
        bits *= 2;
        if bits > 8192 {
            return Err(Error::Undecided("distinct roots closer than 2^-8192".into()));
        }
        for r in roots.iter_mut() {
            if !r.iv.is_point() {
                let seq = &seqs[r.pattern].as_ref().unwrap().1;
                r.iv = refine(seq, r.iv.lo.clone(), r.iv.hi.clone(), bits);
            }
        }
    };
    let mahler_bound = if d > 1 { (-4.0 * d as f64 * (d as f64).ln()).exp() } else { 1.0 };
    let mut best: Option<(f64, f64, f64, usize)> = None;
    for (i, w) in classes.windows(2).enumerate() {
        let lo = crate::exact::to_f64_down(&(&w[1].iv.lo - &w[0].iv.hi));
        let hi = crate::exact::to_f64_up(&(&w[1].iv.hi - &w[0].iv.lo));
        let mid = 0.5 * (lo + hi);
        if best.map_or(true, |b| mid < b.0) {
            best = Some((mid, lo, hi, i));
        }
    }
    let min_lo = classes
        .windows(2)
        .map(|w| crate::exact::to_f64_down(&(&w[1].iv.lo - &w[0].iv.hi)))
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.min(x))));
    let witness = best.map(|(_, _, _, i)| {
        let (x, y) = (&classes[i], &classes[i + 1]);
        (
            patterns[x.pattern].to_string(),
            x.iv.to_interval().mid(),
            patterns[y.pattern].to_string(),
            y.iv.to_interval().mid(),
        )
    });
    Ok(SeparationReport {
        d,
        region: (a.to_string(), b.to_string()),
        distinct_roots: classes.len(),
        min_pairwise_distance: best.map(|b| b.0),
        min_lo,
        min_hi: best.map(|b| b.2),
        witness,
        mahler_bound,
        bound_holds: min_lo.map_or(true, |m| m >= mahler_bound),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SmallValueReport {
    pub p_over_q: String,
    pub d: usize,
    pub threshold: String,
    pub count: u64,
    pub min_nonzero: String,
    pub min_nonzero_f64: f64,
    pub witness: String,
    /// `q^{-d}`
    pub floor: String,
    pub floor_holds: bool,
}

/// Counts canonical `P ∈ P_d` with `0 < |P(p/q)| < threshold`.
pub fn count_small_values(x: &BigRational, d: usize, threshold: &BigRational) -> Result<SmallValueReport> {
    check_cap(d, ENUMERATION_CAP)?;
    if !threshold.is_positive() {
        return Err(Error::invalid("threshold must be positive"));
    }
    let (p, q) = (x.numer(), x.denom());
    let overflow = || Error::Overflow(format!("{x} at degree {d} exceeds i128"));
    // P(p/q) q^d = Σ c_i p^i q^{d-i}
    let weights: Vec<i128> = (0..=d)
        .map(|i| {
            let w = num_traits::pow(p.clone(), i) * num_traits::pow(q.clone(), d - i);
            w.to_i128().ok_or_else(overflow)
        })
        .collect::<Result<_>>()?;
    // every |N| is bounded by the sum of the weights
    weights.iter().try_fold(0i128, |acc, w| acc.checked_add(w.checked_abs()?)).ok_or_else(overflow)?;
    let qd = num_traits::pow(q.clone(), d);
    // |N| < threshold q^d  iff  |N| <= ceil(threshold q^d) - 1
    let scaled = threshold * BigRational::from_integer(qd.clone());
    let limit = (scaled.ceil().to_integer() - BigInt::one()).to_i128().unwrap_or(i128::MAX);
    let (count, min_pair) = (0..3u64.pow(d as u32 + 1))
        .into_par_iter()
        .filter_map(|i| pattern_at(d, i).map(|pat| (i, pat)))
        .map(|(i, pat)| {
            let n: i128 = pat.coeffs.iter().zip(&weights).map(|(&c, w)| c as i128 * w).sum::<i128>().abs();
            let small = u64::from(n != 0 && n <= limit);
            let m = if n == 0 { None } else { Some((n, i)) };
            (small, m)
        })
        .reduce(
            || (0, None),
            |a, b| {
                let m = match (a.1, b.1) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, None) => x,
                    (None, y) => y,
                };
                (a.0 + b.0, m)
            },
        );
    let (n, i) = min_pair.ok_or_else(|| Error::invalid("no nonzero value"))?;
    let min = BigRational::new(BigInt::from(n), qd.clone());
    let floor = BigRational::new(BigInt::one(), qd);
    Ok(SmallValueReport {
        p_over_q: x.to_string(),
        d,
        threshold: threshold.to_string(),
        count,
        min_nonzero_f64: crate::exact::to_f64(&min),
        floor_holds: min >= floor,
        min_nonzero: min.to_string(),
        witness: pattern_at(d, i).unwrap().to_string(),
        floor: floor.to_string(),
    })
}

/// `q^{-d}` for `x = p/q`.
pub fn floor_value(x: &BigRational, d: usize) -> BigRational {
    BigRational::new(BigInt::one(), num_traits::pow(x.denom().clone(), d))
}

/// Square-free real roots of `p` in `[a, b]` as intervals of width at most `2^-bits`.
pub fn real_roots_in(p: &IntPolynomial, a: &BigRational, b: &BigRational, bits: u32) -> Vec<RatInterval> {
    if p.degree() == 0 {
        return Vec::new();
    }
    isolate(&p.sturm_sequence(), a, b, bits)
}

/// Exact `P(x)` for a pattern.
pub fn eval_pattern(p: &PdPolynomial, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.big_coeffs().iter().rev() {
        acc = acc * x + BigRational::from_integer(c.clone());
    }
    acc
}
