//! Averaged entropy at scale `H(X; r) = ∫_0^1 H(⌊X/r + t⌋) dt`.
//!
//! For atoms `x_i` the integrand is piecewise constant in `t`: atom `i` sits in
//! bucket `⌊x_i/r⌋` until `t = 1 - frac(x_i/r)` and in the next bucket after.
//! Sorting those breakpoints and moving one atom at a time gives the exact
//! integral in `O(N log N)`.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::algebraic::AlgebraicNumber;
use crate::atoms::{enumerate_atoms, half, AtomicMeasure, ExponentRange, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::exact::{binary_entropy, plogp, CompensatedSum};

/// Largest truncation order handled by the binned fallback.
pub const BINNED_CAP: usize = 30;
/// Grid used by the fallback: `δ = r · 2^-GRID_BITS`.
pub const GRID_BITS: u32 = 10;
/// Truncation tail target: `λ^k/(1-λ) <= 2^{-d-TAIL_MARGIN}`.
pub const TAIL_MARGIN: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactBreakpoint,
    OracleQuadrature,
    /// positions rounded to a grid finer than the scale, then exact breakpoints
    Binned,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScaleEntropyReport {
    pub scale_r: f64,
    pub entropy_bits: f64,
    pub breakpoint_count: usize,
    pub method: Method,
}

fn check_scale(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("scale {r} must be positive")));
    }
    Ok(())
}

/// Exact-breakpoint evaluation on `(position, mass)` pairs; masses need not be sorted.
pub fn entropy_at_scale_points(points: &[(f64, f64)], r: f64) -> Result<ScaleEntropyReport> {
    check_scale(r)?;
    let mut pts: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.1 > 0.0).collect();
    pts.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let (h, count) = sweep(&pts, r);
    Ok(ScaleEntropyReport { scale_r: r, entropy_bits: h, breakpoint_count: count, method: Method::ExactBreakpoint })
}

/// `pts` sorted by position.
fn sweep(pts: &[(f64, f64)], r: f64) -> (f64, usize) {
    let n = pts.len();
    if n == 0 {
        return (0.0, 0);
    }
    // bucket ids: the sorted distinct values among floor(y) and floor(y) + 1
    let mut floors: Vec<i64> = Vec::with_capacity(n);
    let mut breaks: Vec<(f64, u32)> = Vec::new();
    for (i, &(x, _)) in pts.iter().enumerate() {
        let y = x / r;
        let b = y.floor();
        floors.push(b as i64);
        let f = y - b;
        if f > 0.0 {
            breaks.push((1.0 - f, i as u32));
        }
    }
    let mut ids: Vec<u32> = Vec::with_capacity(n);
    let mut next_id = 0u32;
    let mut last: Option<i64> = None;
    for &b in &floors {
        match last {
            Some(l) if l == b => {}
            Some(l) if l + 1 == b => next_id += 1,
            Some(_) => next_id += 2,
            None => {}
        }
        last = Some(b);
        ids.push(next_id);
    }
    drop(floors);
    let mut mass = vec![0.0f64; next_id as usize + 2];
    for (i, &(_, m)) in pts.iter().enumerate() {
        mass[ids[i] as usize] += m;
    }
    let mut s = CompensatedSum::default();
    for &m in &mass {
        s.add(plogp(m));
    }
    breaks.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let mut area = CompensatedSum::default();
    let mut prev = 0.0;
    for &(tau, i) in &breaks {
        area.add((tau - prev) * s.value());
        prev = tau;
        let a = ids[i as usize] as usize;
        let m = pts[i as usize].1;
        s.add(-plogp(mass[a]) - plogp(mass[a + 1]));
        mass[a] -= m;
        mass[a + 1] += m;
        if mass[a] < 0.0 {
            mass[a] = 0.0;
        }
        s.add(plogp(mass[a]) + plogp(mass[a + 1]));
    }
    area.add((1.0 - prev) * s.value());
    (area.value().max(0.0), breaks.len())
}

pub fn entropy_at_scale(mu: &AtomicMeasure, r: f64) -> Result<ScaleEntropyReport> {
    check_scale(r)?;
    let pts = mu.points();
    let (h, count) = sweep(&pts, r);
    Ok(ScaleEntropyReport { scale_r: r, entropy_bits: h, breakpoint_count: count, method: Method::ExactBreakpoint })
}

/// Midpoint-rule oracle with `nodes` equally spaced values of `t`.
pub fn entropy_at_scale_quadrature(points: &[(f64, f64)], r: f64, nodes: usize) -> Result<ScaleEntropyReport> {
    check_scale(r)?;
    let mut total = CompensatedSum::default();
    let mut buckets: FxHashMap<i64, f64> = FxHashMap::default();
    for k in 0..nodes {
        let t = (k as f64 + 0.5) / nodes as f64;
        buckets.clear();
        for &(x, m) in points {
            *buckets.entry((x / r + t).floor() as i64).or_insert(0.0) += m;
        }
        let h: f64 = buckets.values().map(|&m| plogp(m)).sum::<f64>();
        total.add(h / nodes as f64);
    }
    Ok(ScaleEntropyReport { scale_r: r, entropy_bits: total.value(), breakpoint_count: 0, method: Method::OracleQuadrature })
}

/// `H(X; r1 | r2) = H(X; r1) - H(X; r2)` for `r1 <= r2`.
pub fn conditional_entropy_points(points: &[(f64, f64)], r1: f64, r2: f64) -> Result<f64> {
    if r1 > r2 {
        return Err(Error::invalid(format!("conditional entropy needs r1 <= r2, got {r1} > {r2}")));
    }
    let mut pts: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.1 > 0.0).collect();
    pts.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    Ok(sweep(&pts, r1).0 - sweep(&pts, r2).0)
}

pub fn conditional_entropy(mu: &AtomicMeasure, r1: f64, r2: f64) -> Result<f64> {
    conditional_entropy_points(&mu.points(), r1, r2)
}

/// Exact convolution of two point measures whose pairwise sums are exact in f64.
pub fn convolve_points(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(a.len() * b.len());
    for &(x, m) in a {
        for &(y, w) in b {
            out.push((x + y, m * w));
        }
    }
    out.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(out.len());
    for (x, m) in out {
        match merged.last_mut() {
            Some(last) if last.0 == x => last.1 += m,
            _ => merged.push((x, m)),
        }
    }
    merged
}

/// Smallest `k` with `λ^k/(1-λ) <= 2^{-d-3}`, using an upper bound on `λ`.
pub fn truncation_order(lambda: &AlgebraicNumber, d: u32) -> usize {
    let l = lambda.interval().hi;
    let target = (-(d as f64) - TAIL_MARGIN as f64).exp2() * (1.0 - l);
    let mut k = 1usize;
    let mut pw = l;
    while pw > target {
        pw *= l;
        k += 1;
    }
    k
}

/// Upper bound on `λ^k/(1-λ)`.
pub fn tail_bound(lambda: &AlgebraicNumber, k: usize) -> f64 {
    let l = lambda.interval().hi;
    (l.powi(k as i32) / (1.0 - l)) * (1.0 + 1e-12)
}

/// `h2(q) + q`: moving every atom by at most `q r` changes `H(·; r)` by at most this much.
pub fn displacement_bound(q: f64) -> f64 {
    let q = q.min(0.5);
    binary_entropy(q) + q
}

/// `H(ν_λ; 2^{-d})` from the truncated measure `ν^{(k)}`.
#[derive(Clone, Debug, Serialize)]
pub struct TruncatedScaleEntropy {
    pub d: u32,
    pub entropy_bits: f64,
    /// `|H(ν_λ; 2^-d) - entropy_bits| <= error_bound`
    pub error_bound: f64,
    pub truncation_k: usize,
    pub method: Method,
    pub breakpoint_count: usize,
}

/// Positions of `ν^{(k)}` as the pairwise sums of two exactly enumerated halves.
fn split_points(lambda: &AlgebraicNumber, k: usize) -> Result<(Vec<(f64, f64)>, f64)> {
    let h = k / 2;
    let b = enumerate_atoms(lambda, ExponentRange::with_cap(h, k, DEFAULT_CAP)?, &half())?;
    if h == 0 {
        return Ok((b.points(), b.position_error()));
    }
    let a = enumerate_atoms(lambda, ExponentRange::with_cap(0, h, DEFAULT_CAP)?, &half())?;
    let (pa, pb) = (a.points(), b.points());
    let mut out = Vec::with_capacity(pa.len() * pb.len());
    for &(x, m) in &pa {
        for &(y, w) in &pb {
            out.push((x + y, m * w));
        }
    }
    let err = a.position_error() + b.position_error() + 4.0 * f64::EPSILON * (a.max_abs_position() + b.max_abs_position());
    Ok((out, err))
}

/// Histogram of `ν^{(k)}` on the grid `δ Z`, as points at the left bin edges.
fn binned_points(lambda: &AlgebraicNumber, k: usize, delta: f64) -> Result<Vec<(f64, f64)>> {
    let h = k / 2;
    let a = enumerate_atoms(lambda, ExponentRange::with_cap(0, h, DEFAULT_CAP)?, &half())?;
    let b = enumerate_atoms(lambda, ExponentRange::with_cap(h, k, DEFAULT_CAP)?, &half())?;
    let bound = a.max_abs_position() + b.max_abs_position() + 1.0;
    let lo = (-bound / delta).floor() as i64;
    let bins = ((2.0 * bound / delta).ceil() as usize) + 2;
    if bins > 1 << 28 {
        return Err(Error::CapExceeded { what: "histogram bins", requested: bins as u64, cap: 1 << 28 });
    }
    let mut counts = vec![0u64; bins];
    let (ma, mb) = (a.mass_numerators(), b.mass_numerators());
    let (xa, xb) = (a.positions(), b.positions());
    for i in 0..xa.len() {
        for j in 0..xb.len() {
            let idx = ((xa[i] + xb[j]) / delta).floor() as i64 - lo;
            counts[idx as usize] += ma[i] * mb[j];
        }
    }
    let denom = (a.mass_denominator() as f64) * (b.mass_denominator() as f64);
    Ok(counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| ((i as i64 + lo) as f64 * delta, c as f64 / denom))
        .collect())
}

/// `H(ν_λ; 2^-d)` for each `d` in `ds`, truncating per the tail rule.
pub fn parameter_entropy_at_scales(lambda: &AlgebraicNumber, ds: &[u32]) -> Result<Vec<TruncatedScaleEntropy>> {
    let mut out = Vec::with_capacity(ds.len());
    let mut cache: Option<(usize, Vec<(f64, f64)>, f64)> = None;
    let mut order: Vec<usize> = (0..ds.len()).collect();
    order.sort_by_key(|&i| truncation_order(lambda, ds[i]));
    let mut results: Vec<Option<TruncatedScaleEntropy>> = vec![None; ds.len()];
    for i in order {
        let d = ds[i];
        let k = truncation_order(lambda, d);
        let r = (-(d as f64)).exp2();
        let eps = tail_bound(lambda, k);
        let res = if k <= DEFAULT_CAP {
            if cache.as_ref().is_none_or(|c| c.0 != k) {
                let (mut pts, err) = split_points(lambda, k)?;
                pts.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
                cache = Some((k, pts, err));
            }
            let (_, pts, err) = cache.as_ref().unwrap();
            let (h, count) = sweep(pts, r);
            let q = (eps + err) / r;
            TruncatedScaleEntropy {
                d,
                entropy_bits: h,
                error_bound: displacement_bound(q),
                truncation_k: k,
                method: Method::ExactBreakpoint,
                breakpoint_count: count,
            }
        } else if k <= BINNED_CAP {
            cache = None;
            let delta = r * (-(GRID_BITS as f64)).exp2();
            let mut pts = binned_points(lambda, k, delta)?;
            pts.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            let (h, count) = sweep(&pts, r);
            let q = (eps + delta) / r + 1e-9;
            TruncatedScaleEntropy {
                d,
                entropy_bits: h,
                error_bound: displacement_bound(q),
                truncation_k: k,
                method: Method::Binned,
                breakpoint_count: count,
            }
        } else {
            return Err(Error::CapExceeded { what: "truncation order", requested: k as u64, cap: BINNED_CAP as u64 });
        };
        results[i] = Some(res);
    }
    out.extend(results.into_iter().map(|r| r.unwrap()));
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionEstimate {
    pub depth_n: u32,
    pub window_m: u32,
    /// `H(ν; 2^-n | 2^{-n+m}) / m`
    pub estimate: f64,
    pub error_bound: f64,
    /// `(j, H(ν; 2^-j)/j)` for `j = 1..=n`
    pub raw_curve: Vec<(u32, f64)>,
    pub truncation_k: usize,
}

/// Windowed slope estimate of the entropy dimension.
pub fn entropy_dim_estimate(lambda: &AlgebraicNumber, depth_n: u32, window_m: u32) -> Result<DimensionEstimate> {
    if window_m == 0 || window_m > depth_n {
        return Err(Error::invalid("window must satisfy 1 <= m <= n"));
    }
    let ds: Vec<u32> = (1..=depth_n).collect();
    let curve = parameter_entropy_at_scales(lambda, &ds)?;
    let fine = &curve[(depth_n - 1) as usize];
    let coarse_h = if depth_n == window_m { 0.0 } else { curve[(depth_n - window_m - 1) as usize].entropy_bits };
    let coarse_err = if depth_n == window_m { 0.0 } else { curve[(depth_n - window_m - 1) as usize].error_bound };
    Ok(DimensionEstimate {
        depth_n,
        window_m,
        estimate: (fine.entropy_bits - coarse_h) / window_m as f64,
        error_bound: (fine.error_bound + coarse_err) / window_m as f64,
        raw_curve: curve.iter().map(|c| (c.d, c.entropy_bits / c.d as f64)).collect(),
        truncation_k: fine.truncation_k,
    })
}

/// Windowed slope on an explicit point measure.
pub fn windowed_slope_points(points: &[(f64, f64)], depth_n: u32, window_m: u32) -> Result<f64> {
    if window_m == 0 || window_m > depth_n {
        return Err(Error::invalid("window must satisfy 1 <= m <= n"));
    }
    let fine = (-(depth_n as f64)).exp2();
    let coarse = (-((depth_n - window_m) as f64)).exp2();
    Ok(conditional_entropy_points(points, fine, coarse)? / window_m as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectPoint {
    pub d: u32,
    /// `d - H(ν_λ; 2^-d)`
    pub defect: f64,
    pub error_bound: f64,
    pub truncation_k: usize,
    pub method: Method,
}

/// `d - H(ν_λ; 2^-d)` for `d = 1..=d_max`.
pub fn ac_defect(lambda: &AlgebraicNumber, d_max: u32) -> Result<Vec<DefectPoint>> {
    let ds: Vec<u32> = (1..=d_max).collect();
    Ok(parameter_entropy_at_scales(lambda, &ds)?
        .into_iter()
        .map(|e| DefectPoint {
            d: e.d,
            defect: e.d as f64 - e.entropy_bits,
            error_bound: e.error_bound,
            truncation_k: e.truncation_k,
            method: e.method,
        })
        .collect())
}

/// Least-squares slope of the defect against `d`.
pub fn defect_slope(points: &[DefectPoint]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::invalid("defect slope needs at least two scales"));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.d as f64).sum::<f64>() / n;
    let my = points.iter().map(|p| p.defect).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.d as f64 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.d as f64 - mx) * (p.defect - my)).sum();
    Ok(sxy / sxx)
}

/// `2^-k` with `k = ceil(e log2(1/λ))`, the dyadic at or below `λ^e`.
pub fn lambda_power_scale_exponent(lambda: &AlgebraicNumber, e: usize) -> u32 {
    let iv = lambda.interval();
    let hi = e as f64 * -(iv.lo.log2());
    hi.next_up().ceil() as u32
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaCheck {
    pub d: usize,
    pub b: usize,
    /// the scale `λ^{Bd}` rounded down to `2^-scale_exponent`
    pub scale_exponent: u32,
    pub entropy_bits: f64,
    pub shannon_bits: f64,
    pub saturated: bool,
    /// smallest `B' in 1..=B` whose scale already saturates
    pub smallest_b: Option<usize>,
}

/// Compares `H(ν^{(d)}; λ^{Bd})` with the Shannon entropy of `ν^{(d)}`.
pub fn lemma_check_fine_scale(lambda: &AlgebraicNumber, d: usize, b: usize) -> Result<LemmaCheck> {
    if b == 0 {
        return Err(Error::invalid("B must be positive"));
    }
    let mu = enumerate_atoms(lambda, ExponentRange::first(d)?, &half())?;
    let shannon = crate::atoms::shannon_entropy(&mu);
    let pts = mu.points();
    let tol = 1e-12 * (1.0 + shannon);
    let mut smallest = None;
    let mut last = None;
    for bb in 1..=b {
        let k = lambda_power_scale_exponent(lambda, bb * d);
        if k > 1000 {
            return Err(Error::CapExceeded { what: "scale exponent", requested: k as u64, cap: 1000 });
        }
        let h = sweep(&pts, (-(k as f64)).exp2()).0;
        let sat = h >= shannon - tol;
        if sat && smallest.is_none() {
            smallest = Some(bb);
        }
        last = Some((k, h, sat));
    }
    let (k, h, sat) = last.unwrap();
    Ok(LemmaCheck { d, b, scale_exponent: k, entropy_bits: h, shannon_bits: shannon, saturated: sat, smallest_b: smallest })
}

/// Parses a dyadic rational scale such as `1/8`, `0.25`, `3/16` or `2^-5`.
pub fn parse_dyadic(text: &str) -> Result<f64> {
    let t = text.trim();
    if let Some(e) = t.strip_prefix("2^") {
        let e: i32 = e.parse().map_err(|_| Error::invalid(format!("bad exponent in `{t}`")))?;
        return Ok((e as f64).exp2());
    }
    let q = crate::exact::parse_rational(t)?;
    if q <= BigRational::zero() {
        return Err(Error::invalid(format!("scale `{t}` must be positive")));
    }
    let den = q.denom();
    if (den & (den - num_bigint::BigInt::one())) != num_bigint::BigInt::zero() {
        return Err(Error::invalid(format!("scale `{t}` is not dyadic")));
    }
    let v = crate::exact::to_f64(&q);
    if crate::exact::from_f64(v) != q {
        return Err(Error::invalid(format!("scale `{t}` is not representable exactly")));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::poly::IntPolynomial;

    fn h(points: &[(f64, f64)], r: f64) -> f64 {
        entropy_at_scale_points(points, r).unwrap().entropy_bits
    }

    #[test]
    fn two_point_examples() {
        assert_eq!(h(&[(0.0, 0.5), (0.5, 0.5)], 1.0), 0.5);
        assert_eq!(h(&[(0.0, 0.5), (1.0, 0.5)], 1.0), 1.0);
        assert_eq!(h(&[(0.3, 1.0)], 0.125), 0.0);
        let c = conditional_entropy_points(&[(0.0, 0.5), (0.5, 0.5)], 0.5, 1.0).unwrap();
        assert_eq!(c, 0.5);
        assert!(conditional_entropy_points(&[(0.0, 1.0)], 1.0, 0.5).is_err());
    }

    #[test]
    fn quadrature_agrees_on_grid() {
        let pts = [(0.0, 0.25), (0.1875, 0.25), (0.625, 0.125), (1.5, 0.375)];
        let a = h(&pts, 0.5);
        let b = entropy_at_scale_quadrature(&pts, 0.5, 10_000).unwrap().entropy_bits;
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn golden_monotone_gap() {
        let g = AlgebraicNumber::in_unit_interval(&IntPolynomial::from_i64(&[-1, 1, 1]).unwrap()).unwrap();
        let mu = enumerate_atoms(&g, ExponentRange::first(8).unwrap(), &half()).unwrap();
        let wide = conditional_entropy(&mu, 2f64.powi(-10), 2f64.powi(-5)).unwrap();
        let narrow = conditional_entropy(&mu, 2f64.powi(-9), 2f64.powi(-6)).unwrap();
        assert!(wide >= narrow - 1e-12);
    }

    #[test]
    fn truncation_orders() {
        let third = AlgebraicNumber::rational(&rat(1, 3));
        assert_eq!(truncation_order(&third, 16), 13);
        assert_eq!(truncation_order(&third, 8), 8);
        let half_l = AlgebraicNumber::rational(&rat(1, 2));
        assert_eq!(truncation_order(&half_l, 12), 16);
    }

    #[test]
    fn cantor_values() {
        let third = AlgebraicNumber::rational(&rat(1, 3));
        let v = parameter_entropy_at_scales(&third, &[8, 16]).unwrap();
        assert!((v[0].entropy_bits - 6.848079012092409).abs() < 1e-9);
        assert!((v[1].entropy_bits - 11.89344949422523).abs() < 1e-9);
    }

    #[test]
    fn lemma_examples() {
        let lc = lemma_check_fine_scale(&AlgebraicNumber::rational(&rat(1, 2)), 10, 2).unwrap();
        assert!(lc.saturated);
        assert_eq!(lc.entropy_bits, 10.0);
        let g = AlgebraicNumber::in_unit_interval(&IntPolynomial::from_i64(&[-1, 1, 1]).unwrap()).unwrap();
        let lc = lemma_check_fine_scale(&g, 3, 4).unwrap();
        assert!(lc.saturated);
        assert_eq!(lc.entropy_bits, 2.75);
    }

    #[test]
    fn dyadic_parsing() {
        assert_eq!(parse_dyadic("1/8").unwrap(), 0.125);
        assert_eq!(parse_dyadic("2^-5").unwrap(), 1.0 / 32.0);
        assert_eq!(parse_dyadic("0.75").unwrap(), 0.75);
        assert!(parse_dyadic("1/3").is_err());
        assert!(parse_dyadic("-1/2").is_err());
    }
}
