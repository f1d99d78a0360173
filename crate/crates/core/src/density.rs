//! Grid iteration of `μ ↦ ½ T_{-1} μ + ½ T_1 μ` with `T_j(x) = λx + j`.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebraic::AlgebraicNumber;
use crate::error::{Error, Result};
use crate::exact::rat;
use crate::poly::IntPolynomial;

/// Bits kept in each two-bin split fraction.
pub const SPLIT_BITS: u32 = 20;
pub const MAX_DEPTH: u32 = 16;

/// Masses `m_k / 2^denom_bits` on bins centred at `k 2^-depth`, `k >= origin`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridMeasure {
    depth: u32,
    origin: i64,
    masses: Vec<BigUint>,
    denom_bits: u64,
}

fn ratio_f64(m: &BigUint, e: u64) -> f64 {
    if m.is_zero() {
        return 0.0;
    }
    let b = m.bits();
    let shift = b.saturating_sub(64);
    let top = (m >> shift).to_f64().unwrap_or(0.0);
    // top 2^(shift - e), applied in pieces to stay in range
    let mut v = top;
    let mut exp = shift as i64 - e as i64;
    while exp != 0 {
        let s = exp.clamp(-1000, 1000);
        v *= 2f64.powi(s as i32);
        exp -= s;
    }
    v
}

impl GridMeasure {
    /// Unit mass in the bin containing `0`.
    pub fn point_mass(depth: u32) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::CapExceeded { what: "grid depth", requested: depth as u64, cap: MAX_DEPTH as u64 });
        }
        Ok(GridMeasure { depth, origin: 0, masses: vec![BigUint::one()], denom_bits: 0 })
    }

    /// Grid from dyadic masses summing to one.
    pub fn from_masses(depth: u32, origin: i64, masses: &[BigRational]) -> Result<Self> {
        let den = masses.iter().fold(BigInt::one(), |acc, m| acc.lcm(m.denom()));
        if !(den.clone() & (den.clone() - 1u32)).is_zero() {
            return Err(Error::invalid("grid masses must be dyadic"));
        }
        let e = den.bits() - 1;
        let ms: Vec<BigUint> = masses
            .iter()
            .map(|m| {
                let n = m.numer() * (&den / m.denom());
                n.to_biguint().ok_or_else(|| Error::invalid("negative mass"))
            })
            .collect::<Result<_>>()?;
        let total: BigUint = ms.iter().sum();
        if total != BigUint::one() << e {
            return Err(Error::invalid("masses must sum to 1"));
        }
        Ok(GridMeasure { depth, origin, masses: ms, denom_bits: e })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn bin_width(&self) -> f64 {
        2f64.powi(-(self.depth as i32))
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Bin indices covered, inclusive.
    pub fn index_range(&self) -> (i64, i64) {
        (self.origin, self.origin + self.masses.len() as i64 - 1)
    }

    pub fn mass(&self, k: i64) -> BigRational {
        let i = k - self.origin;
        if i < 0 || i >= self.masses.len() as i64 {
            return BigRational::zero();
        }
        BigRational::new(BigInt::from(self.masses[i as usize].clone()), BigInt::one() << self.denom_bits as usize)
    }

    pub fn mass_f64(&self, k: i64) -> f64 {
        let i = k - self.origin;
        if i < 0 || i >= self.masses.len() as i64 {
            return 0.0;
        }
        ratio_f64(&self.masses[i as usize], self.denom_bits)
    }

    pub fn masses_f64(&self) -> Vec<f64> {
        self.masses.iter().map(|m| ratio_f64(m, self.denom_bits)).collect()
    }

    pub fn total_mass(&self) -> BigRational {
        let s: BigUint = self.masses.iter().sum();
        BigRational::new(BigInt::from(s), BigInt::one() << self.denom_bits as usize)
    }

    pub fn center(&self, k: i64) -> f64 {
        k as f64 * self.bin_width()
    }

    /// Exact equality of bin `k` and bin `-k` for every `k`.
    pub fn is_symmetric(&self) -> bool {
        let (lo, hi) = self.index_range();
        if lo != -hi {
            return false;
        }
        let n = self.masses.len();
        (0..n / 2).all(|i| self.masses[i] == self.masses[n - 1 - i])
    }

    /// `bin_center,mass,density` with a header row.
    pub fn to_csv(&self) -> String {
        let h = self.bin_width();
        let mut out = String::from("bin_center,mass,density\n");
        for (i, m) in self.masses_f64().iter().enumerate() {
            let k = self.origin + i as i64;
            let _ = writeln!(out, "{:.12e},{:.12e},{:.12e}", k as f64 * h, m, m / h);
        }
        out
    }

    fn trimmed(mut self) -> Self {
        let first = self.masses.iter().position(|m| !m.is_zero()).unwrap_or(0);
        let last = self.masses.iter().rposition(|m| !m.is_zero()).unwrap_or(0);
        self.masses.truncate(last + 1);
        self.masses.drain(..first);
        self.origin += first as i64;
        self
    }
}

/// L¹ distance `Σ |a_k - b_k|` between two grids of equal depth.
pub fn l1_distance(a: &GridMeasure, b: &GridMeasure) -> f64 {
    let (alo, ahi) = a.index_range();
    let (blo, bhi) = b.index_range();
    let e = a.denom_bits.max(b.denom_bits);
    let (sa, sb) = ((e - a.denom_bits) as usize, (e - b.denom_bits) as usize);
    let mut total = BigUint::zero();
    for k in alo.min(blo)..=ahi.max(bhi) {
        let x = a.masses.get((k - alo) as usize).filter(|_| k >= alo).map(|m| m << sa).unwrap_or_default();
        let y = b.masses.get((k - blo) as usize).filter(|_| k >= blo).map(|m| m << sb).unwrap_or_default();
        total += if x > y { x - y } else { y - x };
    }
    ratio_f64(&total, e)
}

/// Two-bin split of the contracted bin `k`: mass `(2^W - up)` to `base`, `up` to `base + 1`.
#[derive(Clone, Debug, PartialEq)]
struct Split {
    base: i64,
    up: u64,
}

/// Overlap split of `[λ(k - 1/2), λ(k + 1/2)]` (bin units) against bins `[m - 1/2, m + 1/2)`,
/// with the upper share rounded half-even to `W` bits.
fn split_at(l: &BigRational, k: i64) -> (Split, BigInt) {
    let w = BigRational::from_integer(BigInt::one() << SPLIT_BITS as usize);
    let half = rat(1, 2);
    let kk = BigRational::from_integer(k.into());
    // right end shifted so bin edges fall on integers
    let r = l * (&kk + &half) + &half;
    let m = r.floor();
    let share = ((&r - &m) / l).min(BigRational::one()) * &w;
    let fl = share.floor().to_integer();
    let rem = &share - BigRational::from_integer(fl.clone());
    let up = if rem > half || (rem == half && fl.is_odd()) { fl + 1 } else { fl };
    // half-unit cell of the share, to check that rounding is decided
    let cell = (share * BigRational::from_integer(2.into())).floor().to_integer();
    let base = m.to_integer().to_i64().unwrap() - 1;
    (Split { base, up: up.to_u64().unwrap() }, cell)
}

fn split_for(lambda: &AlgebraicNumber, exact: Option<&BigRational>, k: i64) -> Split {
    if let Some(q) = exact {
        return split_at(q, k).0;
    }
    // the share is monotone in λ for fixed `m`, so agreeing endpoints decide it
    let mut bits = 64 + SPLIT_BITS + 64 - k.unsigned_abs().leading_zeros();
    loop {
        let e = lambda.enclosure(bits);
        let (a, ca) = split_at(&e.lo, k);
        let (b, cb) = split_at(&e.hi, k);
        if a == b && ca == cb {
            return a;
        }
        bits *= 2;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IterationReport {
    pub depth: u32,
    pub iterations: usize,
    /// L¹ distance between successive iterates
    pub residuals: Vec<f64>,
    /// transport bound on the accumulated rebinning displacement
    pub rebin_error: f64,
}

/// Applies the self-similarity map `iterations` times with two-bin linear rebinning.
pub fn iterate_self_similar(
    lambda: &AlgebraicNumber,
    iterations: usize,
    start: &GridMeasure,
) -> Result<(GridMeasure, IterationReport)> {
    if iterations == 0 {
        return Err(Error::invalid("iterations must be at least 1"));
    }
    let zero = BigRational::zero();
    let one = BigRational::one();
    if !lambda.cmp_rational(&zero).is_gt() || !lambda.cmp_rational(&one).is_lt() {
        return Err(Error::invalid("λ must lie in (0, 1)"));
    }
    let depth = start.depth;
    let h = BigRational::new(BigInt::one(), BigInt::one() << depth as usize);
    // contraction moves the grid by (1 - λ) per unit length; below one bin the map is lost in rounding
    if lambda.cmp_rational(&(&one - &h)).is_ge() {
        return Err(Error::invalid(format!(
            "grid too coarse: bin width 2^-{depth} is not below 1 - λ"
        )));
    }
    let exact = lambda.as_rational();
    let shift = 1i64 << depth;
    let hf = start.bin_width();
    let lam = lambda.interval().hi;
    let mut cache: rustc_hash::FxHashMap<i64, Split> = Default::default();
    let mut cur = start.clone();
    let mut residuals = Vec::with_capacity(iterations);
    let mut rebin_error = 0.0f64;
    let wmax = 1u64 << SPLIT_BITS;
    for _ in 0..iterations {
        let (lo, hi) = cur.index_range();
        let splits: Vec<Split> = (lo..=hi)
            .map(|k| cache.entry(k).or_insert_with(|| split_for(lambda, exact.as_ref(), k)).clone())
            .collect();
        let tlo = splits.iter().map(|s| s.base).min().unwrap() - shift;
        let thi = splits.iter().map(|s| s.base).max().unwrap() + 1 + shift;
        let mut next = vec![BigUint::zero(); (thi - tlo + 1) as usize];
        for (i, m) in cur.masses.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let s = &splits[i];
            let down = m * (wmax - s.up);
            let up = m * s.up;
            for j in [-shift, shift] {
                let t = (s.base + j - tlo) as usize;
                next[t] += &down;
                next[t + 1] += &up;
            }
        }
        let nm = GridMeasure { depth, origin: tlo, masses: next, denom_bits: cur.denom_bits + SPLIT_BITS as u64 + 1 }.trimmed();
        residuals.push(l1_distance(&cur, &nm));
        rebin_error = lam * rebin_error + hf * (1.0 + 2f64.powi(-(SPLIT_BITS as i32)));
        cur = nm;
    }
    Ok((cur, IterationReport { depth, iterations, residuals, rebin_error }))
}

#[derive(Clone, Debug, Serialize)]
pub struct HistogramNorms {
    pub sup_density: f64,
    pub l2_density: f64,
    pub entropy_bits: f64,
}

pub fn histogram_norms(g: &GridMeasure) -> HistogramNorms {
    let h = g.bin_width();
    let ms = g.masses_f64();
    let max = ms.iter().copied().fold(0.0, f64::max);
    let sq: f64 = ms.iter().map(|m| m * m).sum();
    let ent: f64 = ms.iter().map(|&m| crate::exact::plogp(m)).sum();
    HistogramNorms { sup_density: max / h, l2_density: (sq / h).sqrt(), entropy_bits: ent }
}

/// Bin masses of the uniform law on `[-a, a]` for the grid with bins `[(k - 1/2)h, (k + 1/2)h)`.
fn uniform_bins(a: f64, depth: u32) -> (i64, Vec<f64>) {
    let h = 2f64.powi(-(depth as i32));
    let kmax = (a / h + 0.5).ceil() as i64;
    let masses = (-kmax..=kmax)
        .map(|k| {
            let (l, r) = ((k as f64 - 0.5) * h, (k as f64 + 0.5) * h);
            ((r.min(a) - l.max(-a)).max(0.0)) / (2.0 * a)
        })
        .collect();
    (-kmax, masses)
}

fn convolve(a: &(i64, Vec<f64>), b: &(i64, Vec<f64>)) -> (i64, Vec<f64>) {
    let mut out = vec![0.0; a.1.len() + b.1.len() - 1];
    for (i, x) in a.1.iter().enumerate() {
        if *x == 0.0 {
            continue;
        }
        for (j, y) in b.1.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    (a.0 + b.0, out)
}

#[derive(Clone, Debug, Serialize)]
pub struct WintnerReport {
    pub k: u32,
    pub depth: u32,
    pub iterations: usize,
    pub l1: f64,
    pub tolerance: f64,
    pub agrees: bool,
}

/// Compares the iterated grid for `λ = 2^{-1/k}` with `ν_{1/2} * μ`, where `μ` is the law of
/// `Σ_{1 <= i < k} λ^i X_i` for independent `X_i` uniform on `[-2, 2]`.
pub fn wintner_decomposition_check(k: u32, depth: u32) -> Result<WintnerReport> {
    if !(1..=3).contains(&k) {
        return Err(Error::invalid("k must be 1, 2 or 3"));
    }
    let mut coeffs = vec![BigInt::from(-1); k as usize + 1];
    coeffs[1..k as usize].iter_mut().for_each(|c| *c = BigInt::zero());
    coeffs[k as usize] = BigInt::from(2);
    let lambda = AlgebraicNumber::in_unit_interval(&IntPolynomial::new(coeffs)?)?;
    let lam = lambda.to_f64();
    // enough iterations for the tail λ^n support to fall below one bin
    let iterations = ((depth as f64 + 4.0) / -lam.log2()).ceil() as usize;
    let (grid, _) = iterate_self_similar(&lambda, iterations, &GridMeasure::point_mass(depth)?)?;
    let mut rhs = uniform_bins(2.0, depth);
    for i in 1..k {
        rhs = convolve(&rhs, &uniform_bins(2.0 * lam.powi(i as i32), depth));
    }
    let (lo, hi) = grid.index_range();
    let (rlo, rhi) = (rhs.0, rhs.0 + rhs.1.len() as i64 - 1);
    let l1: f64 = (lo.min(rlo)..=hi.max(rhi))
        .map(|j| {
            let r = if j >= rlo && j <= rhi { rhs.1[(j - rlo) as usize] } else { 0.0 };
            (grid.mass_f64(j) - r).abs()
        })
        .sum();
    let tolerance = 0.05;
    Ok(WintnerReport { k, depth, iterations, l1, tolerance, agrees: l1 <= tolerance })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> AlgebraicNumber {
        AlgebraicNumber::rational(&rat(1, 2))
    }

    #[test]
    fn one_step() {
        let g = GridMeasure::point_mass(6).unwrap();
        let (g, _) = iterate_self_similar(&half(), 1, &g).unwrap();
        assert_eq!(g.mass(-64), rat(1, 2));
        assert_eq!(g.mass(64), rat(1, 2));
        assert_eq!(g.total_mass(), rat(1, 1));
    }

    #[test]
    fn uniform_limit() {
        let (g, rep) = iterate_self_similar(&half(), 60, &GridMeasure::point_mass(10).unwrap()).unwrap();
        assert_eq!(g.total_mass(), rat(1, 1));
        assert!(g.is_symmetric());
        let n = histogram_norms(&g);
        assert!((n.sup_density - 0.25).abs() < 0.01, "{n:?}");
        assert!((n.l2_density - 0.5).abs() < 0.01, "{n:?}");
        assert!(rep.rebin_error < 3.0 * g.bin_width());
    }

    #[test]
    fn coarse_grid() {
        let g = GridMeasure::point_mass(1).unwrap();
        assert!(iterate_self_similar(&half(), 3, &g).is_err());
    }
}
