//! Certified evaluation of `ν̂_λ(t) = ∏_{j≥0} cos(2π λ^j t)`.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebraic::AlgebraicNumber;
use crate::classify::{classify, Subject};
use crate::error::{Error, Result};
use crate::exact::{rat, Interval, RatInterval};

pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierSample {
    pub t: f64,
    pub value: f64,
    /// bound on `|ν̂ - partial product|`
    pub truncation_error: f64,
    /// radius of the enclosure of the partial product
    pub rounding_error: f64,
    pub terms_used: usize,
    pub exact_zero: bool,
}

impl FourierSample {
    pub fn error(&self) -> f64 {
        self.truncation_error + self.rounding_error
    }
}

fn frac(x: &RatInterval) -> RatInterval {
    let k = BigRational::from_integer(x.lo.floor().to_integer());
    RatInterval::new(&x.lo - &k, &x.hi - &k)
}

/// `cos(2π x)` for `x` in the interval, as a floating enclosure.
fn cos_enclosure(x: &RatInterval) -> Interval {
    let iv = x.to_interval();
    let mid = iv.mid();
    let rad = iv.radius() + mid.abs() * f64::EPSILON;
    let c = (TAU * mid).cos();
    let e = TAU * rad + 4.0 * f64::EPSILON;
    Interval::new((c - e).max(-1.0), (c + e).min(1.0))
}

fn is_quarter(x: &RatInterval) -> bool {
    if !x.is_point() {
        return false;
    }
    let d = x.lo.denom();
    d == &BigInt::from(4) && x.lo.numer().is_odd()
}

fn terms_for(lam_hi: f64, t_hi: f64, eps: f64) -> (usize, usize) {
    let mut j0 = 0;
    while TAU * lam_hi.powi(j0 as i32) * t_hi > 1.0 {
        j0 += 1;
    }
    let mut j = j0;
    while tail_bound(lam_hi, t_hi, j) > eps / 2.0 && j < j0 + 4096 {
        j += 1;
    }
    (j0, j)
}

/// Upper bound on `Σ_{j≥J} (2π λ^j t)^2`, using `|ln cos x| ≤ x^2` for `|x| ≤ 1`.
pub fn tail_bound(lam_hi: f64, t_hi: f64, terms: usize) -> f64 {
    let x = TAU * t_hi * lam_hi.powi(terms as i32);
    x * x / (1.0 - lam_hi * lam_hi) * (1.0 + 1e-12)
}

fn precision_for(t_hi: f64, terms: usize) -> u32 {
    128 + t_hi.max(1.0).log2().ceil() as u32 + (terms as f64).log2().ceil() as u32
}

/// Evaluates with exactly `terms` cosine factors; `terms` must put the tail in `|x| ≤ 1`.
pub fn ft_eval_terms(lambda: &AlgebraicNumber, t: &RatInterval, terms: usize) -> Result<FourierSample> {
    let t = if t.lo.is_negative() && t.hi.is_negative() {
        RatInterval::new(-t.hi.clone(), -t.lo.clone())
    } else if t.lo.is_negative() {
        let m = (-t.lo.clone()).max(t.hi.clone());
        RatInterval::new(BigRational::zero(), m)
    } else {
        t.clone()
    };
    let lam = lambda.interval();
    let t_iv = t.to_interval();
    let t_hi = t_iv.hi.next_up();
    let (j0, _) = terms_for(lam.hi, t_hi, 1.0);
    if terms < j0 {
        return Err(Error::invalid(format!("{terms} terms leave a tail factor with |x| > 1 (need {j0})")));
    }
    let bits = precision_for(t_hi, terms);
    let l = lambda.enclosure(bits + 8);
    let mut x = t.clone();
    let mut prod = Interval::point(1.0);
    for j in 0..terms {
        if j > 0 {
            x = x.mul(&l).rounded(bits);
        }
        let f = frac(&x);
        if is_quarter(&f) {
            return Ok(FourierSample {
                t: t_iv.mid(),
                value: 0.0,
                truncation_error: 0.0,
                rounding_error: 0.0,
                terms_used: j + 1,
                exact_zero: true,
            });
        }
        prod = prod * cos_enclosure(&f);
    }
    let tau = tail_bound(lam.hi, t_hi, terms);
    let partial_abs = prod.abs().hi;
    Ok(FourierSample {
        t: t_iv.mid(),
        value: prod.mid(),
        truncation_error: partial_abs * (-(-tau).exp_m1()).min(tau) * (1.0 + 1e-12),
        rounding_error: prod.radius(),
        terms_used: terms,
        exact_zero: false,
    })
}

/// `ν̂_λ(t)` with total error at most `eps`.
pub fn ft_eval_interval(lambda: &AlgebraicNumber, t: &RatInterval, eps: f64) -> Result<FourierSample> {
    if !(eps > 0.0) {
        return Err(Error::invalid("eps must be positive"));
    }
    let lam = lambda.interval();
    if !(lam.lo > 0.0 && lam.hi < 1.0) {
        return Err(Error::invalid("λ must lie in (0, 1)"));
    }
    let t_hi = t.to_interval().abs().hi.next_up();
    let (_, terms) = terms_for(lam.hi, t_hi, eps);
    let s = ft_eval_terms(lambda, t, terms)?;
    if s.error() > eps {
        return Err(Error::Undecided(format!(
            "error {:e} above {:e} at t = {}; the t interval is too wide",
            s.error(),
            eps,
            s.t
        )));
    }
    Ok(s)
}

pub fn ft_eval(lambda: &AlgebraicNumber, t: &BigRational, eps: f64) -> Result<FourierSample> {
    ft_eval_interval(lambda, &RatInterval::point(t.clone()), eps)
}

/// Enclosure of `λ^{-n}`.
fn inverse_power(lambda: &AlgebraicNumber, n: usize) -> Result<RatInterval> {
    let bits = 160 + 2 * n as u32;
    let inv = lambda
        .enclosure(bits)
        .recip()
        .ok_or_else(|| Error::invalid("λ = 0"))?;
    let mut acc = RatInterval::point(rat(1, 1));
    for _ in 0..n {
        acc = acc.mul(&inv).rounded(bits);
    }
    Ok(acc)
}

#[derive(Clone, Debug, Serialize)]
pub struct PisotScan {
    pub samples: Vec<FourierSample>,
    pub running_min: Vec<f64>,
    pub minimum: f64,
    pub argmin: usize,
}

/// `|ν̂_λ(λ^{-n})|` for `n = 0..=n_max` when `1/λ` is a non-integer Pisot number.
pub fn pisot_scan(lambda: &AlgebraicNumber, n_max: usize) -> Result<PisotScan> {
    let report = classify(lambda)?;
    if report.subject != Subject::Inverse || !report.is_pisot {
        return Err(Error::Refused(format!("1/λ is not a Pisot number (λ = {})", lambda.to_f64())));
    }
    if report.degree == 1 {
        return Err(Error::Refused("1/λ is a rational integer; the product has exact zeros".into()));
    }
    let samples: Vec<FourierSample> = (0..=n_max)
        .into_par_iter()
        .map(|n| ft_eval_interval(lambda, &inverse_power(lambda, n)?, DEFAULT_EPS))
        .collect::<Result<_>>()?;
    let mut running_min = Vec::with_capacity(samples.len());
    let (mut minimum, mut argmin) = (f64::INFINITY, 0);
    for (n, s) in samples.iter().enumerate() {
        if s.value.abs() < minimum {
            minimum = s.value.abs();
            argmin = n;
        }
        running_min.push(minimum);
    }
    Ok(PisotScan { samples, running_min, minimum, argmin })
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    pub sigma: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    /// (log2 t, log2 envelope) per dyadic block
    pub envelope: Vec<(f64, f64)>,
    pub heuristic: bool,
}

/// Fits `|ν̂(t)| ~ C t^{-σ}` to the maxima over dyadic blocks of `t`.
pub fn decay_fit_samples(samples: &[(f64, f64)]) -> Result<DecayFit> {
    let mut blocks: Vec<(i64, f64, f64)> = Vec::new();
    for &(t, v) in samples {
        if !(t > 0.0) || !v.is_finite() {
            return Err(Error::invalid("decay grid needs positive t"));
        }
        let k = t.log2().floor() as i64;
        match blocks.iter_mut().find(|b| b.0 == k) {
            Some(b) if v.abs() > b.2 => {
                b.1 = t;
                b.2 = v.abs();
            }
            Some(_) => {}
            None => blocks.push((k, t, v.abs())),
        }
    }
    blocks.sort_by_key(|b| b.0);
    let pts: Vec<(f64, f64)> = blocks
        .iter()
        .filter(|b| b.2 > 0.0)
        .map(|b| (b.1.log2(), b.2.log2()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::invalid("degenerate grid: fewer than two dyadic blocks"));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(DecayFit {
        sigma: -slope,
        intercept,
        residual_rms: (rss / n).sqrt(),
        envelope: pts,
        heuristic: true,
    })
}

pub fn decay_fit(lambda: &AlgebraicNumber, t_grid: &[BigRational]) -> Result<DecayFit> {
    let samples: Vec<(f64, f64)> = t_grid
        .par_iter()
        .map(|t| ft_eval(lambda, t, DEFAULT_EPS).map(|s| (s.t, s.value)))
        .collect::<Result<_>>()?;
    decay_fit_samples(&samples)
}

/// `count` points spaced evenly in `log t` over `[lo, hi]`, as exact dyadics.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<BigRational>> {
    if !(lo > 0.0 && hi > lo) || count < 2 {
        return Err(Error::invalid("log grid needs 0 < lo < hi and at least two points"));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|i| {
            let t = (a + (b - a) * i as f64 / (count - 1) as f64).exp();
            BigRational::from_float(t).expect("finite")
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::IntPolynomial;

    fn half() -> AlgebraicNumber {
        AlgebraicNumber::rational(&rat(1, 2))
    }

    fn sinc(t: f64) -> f64 {
        let x = 2.0 * TAU * t;
        x.sin() / x
    }

    #[test]
    fn closed_forms() {
        let s = ft_eval(&half(), &rat(0, 1), 1e-9).unwrap();
        assert_eq!(s.value, 1.0);
        let s = ft_eval(&half(), &rat(1, 8), 1e-9).unwrap();
        assert!((s.value - 2.0 / std::f64::consts::PI).abs() < 1e-9);
        let s = ft_eval(&half(), &rat(1, 4), 1e-9).unwrap();
        assert!(s.exact_zero && s.value == 0.0);
        for (n, d) in [(1, 3), (1, 1), (5, 2)] {
            let s = ft_eval(&half(), &rat(n, d), 1e-9).unwrap();
            assert!((s.value - sinc(n as f64 / d as f64)).abs() < 1e-8, "{n}/{d}");
        }
    }

    #[test]
    fn even() {
        let g = AlgebraicNumber::in_unit_interval(&IntPolynomial::from_i64(&[-1, 1, 1]).unwrap()).unwrap();
        let a = ft_eval(&g, &rat(7, 3), 1e-9).unwrap();
        let b = ft_eval(&g, &rat(-7, 3), 1e-9).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn golden_scan() {
        let g = AlgebraicNumber::in_unit_interval(&IntPolynomial::from_i64(&[-1, 1, 1]).unwrap()).unwrap();
        let scan = pisot_scan(&g, 6).unwrap();
        assert!((scan.samples[0].value.abs() - 0.022065).abs() < 1e-5, "{}", scan.samples[0].value);
        assert!(pisot_scan(&half(), 4).is_err());
    }

    #[test]
    fn decay_degenerate() {
        let fit = decay_fit_samples(&[(1.0, 1.0), (3.0, 1.0), (9.0, 1.0)]).unwrap();
        assert_eq!(fit.sigma, 0.0);
        assert!(decay_fit_samples(&[(1.0, 1.0), (1.5, 1.0)]).is_err());
    }
}
