//! Finite approximants `ν^I`: distributions of `Σ_{j in I} ±λ^j`.
//!
//! Positions are kept as integer coordinates in the power basis of `Q(λ)`,
//! scaled by a common denominator `D`, so equal sums have equal keys and
//! collisions are exact. Enumeration convolves one sign at a time: the atom
//! list is kept sorted by key, and `K - v`, `K + v` are both sorted, so each
//! step is a linear merge.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::hash::Hash;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use serde::Serialize;
use smallvec::SmallVec;

use crate::algebraic::{AlgebraicNumber, NumberField, CACHED_BITS};
use crate::classify::mahler_measure;
use crate::error::{Error, Result};
use crate::exact::{CompensatedSum, Interval, RatInterval};

/// Largest `hi - lo` accepted for full enumeration.
pub const DEFAULT_CAP: usize = 26;
/// Largest `n` accepted by the counting-only path.
pub const COUNT_CAP: usize = 40;
/// Pair budget for meet-in-the-middle counting.
pub const MITM_PAIR_BUDGET: u64 = 1 << 32;
/// Slack used by the semigroup growth check.
pub const GROWTH_SLACK: f64 = 0.05;

/// Exponents `lo..hi`: the terms `±λ^j` that are included.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ExponentRange {
    pub lo: usize,
    pub hi: usize,
}

impl ExponentRange {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        Self::with_cap(lo, hi, DEFAULT_CAP)
    }

    pub fn first(n: usize) -> Result<Self> {
        Self::new(0, n)
    }

    pub fn with_cap(lo: usize, hi: usize, cap: usize) -> Result<Self> {
        if hi <= lo {
            return Err(Error::invalid(format!("empty exponent range [{lo}, {hi})")));
        }
        if hi - lo > cap {
            return Err(Error::CapExceeded { what: "range length", requested: (hi - lo) as u64, cap: cap as u64 });
        }
        Ok(ExponentRange { lo, hi })
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }
}

pub trait Coord:
    Copy + Ord + Hash + Default + Debug + Send + Sync + Add<Output = Self> + Sub<Output = Self> + 'static
{
    const BITS: u32;
    fn from_i128(v: i128) -> Self;
    fn to_i128(self) -> i128;
}

impl Coord for i64 {
    const BITS: u32 = 64;
    fn from_i128(v: i128) -> Self {
        v as i64
    }
    fn to_i128(self) -> i128 {
        self as i128
    }
}

impl Coord for i128 {
    const BITS: u32 = 128;
    fn from_i128(v: i128) -> Self {
        v
    }
    fn to_i128(self) -> i128 {
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum KeyStore {
    Narrow(Vec<i64>),
    Wide(Vec<i128>),
}

impl KeyStore {
    fn get(&self, i: usize, d: usize) -> SmallVec<[i128; 4]> {
        match self {
            KeyStore::Narrow(v) => v[i * d..(i + 1) * d].iter().map(|&x| x as i128).collect(),
            KeyStore::Wide(v) => v[i * d..(i + 1) * d].iter().copied().collect(),
        }
    }

    fn from_wide(keys: Vec<i128>) -> Self {
        if keys.iter().all(|&k| i64::try_from(k).is_ok()) {
            KeyStore::Narrow(keys.into_iter().map(|k| k as i64).collect())
        } else {
            KeyStore::Wide(keys)
        }
    }
}

/// Sign weights: `+1` with probability `up / denom`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Weights {
    up: u64,
    down: u64,
    denom: u64,
}

impl Weights {
    fn from_bias(bias: &BigRational, n: usize) -> Result<Self> {
        let zero = BigRational::zero();
        if *bias <= zero || *bias >= BigRational::one() {
            return Err(Error::invalid(format!("bias {bias} outside (0, 1)")));
        }
        let up = bias.numer().to_u64().ok_or_else(|| Error::Overflow("bias numerator".into()))?;
        let denom = bias.denom().to_u64().ok_or_else(|| Error::Overflow("bias denominator".into()))?;
        if denom.checked_pow(n as u32).is_none_or(|b| b >= 1 << 63) {
            return Err(Error::Overflow(format!("mass denominator {denom}^{n} exceeds 63 bits")));
        }
        Ok(Weights { up, down: denom - up, denom })
    }
}

/// Power-basis coordinates of `λ^j`, `j in lo..hi`, scaled by `D = lc^{max(0, hi - deg)}`.
pub(crate) struct Basis {
    pub scale: BigInt,
    pub dim: usize,
    pub vectors: Vec<Vec<i128>>,
}

impl Basis {
    pub(crate) fn new(lambda: &AlgebraicNumber, lo: usize, hi: usize) -> Result<Self> {
        let d = lambda.degree();
        let lc = lambda.min_poly().leading().clone();
        let scale = num_traits::pow(lc, hi.saturating_sub(d));
        let field = NumberField::new(lambda.clone());
        let x = field.from_ints(&[0, 1]);
        let mut pw = field.one();
        let mut vectors = Vec::with_capacity(hi - lo);
        let sc = BigRational::from_integer(scale.clone());
        for j in 0..hi {
            if j >= lo {
                let mut v = Vec::with_capacity(d);
                for c in pw.coords() {
                    let s = c * &sc;
                    debug_assert!(s.is_integer());
                    let k = s.to_integer().to_i128().ok_or_else(|| Error::Overflow(format!("coordinate of λ^{j}")))?;
                    v.push(k);
                }
                vectors.push(v);
            }
            pw = field.mul(&pw, &x);
        }
        Ok(Basis { scale, dim: d, vectors })
    }

    /// Bound on any coordinate of any signed sum.
    fn coordinate_bound(&self) -> u128 {
        (0..self.dim)
            .map(|i| self.vectors.iter().map(|v| v[i].unsigned_abs()).sum::<u128>())
            .max()
            .unwrap_or(0)
    }

    fn narrow_ok(&self) -> Result<bool> {
        let b = self.coordinate_bound();
        if b >= 1 << 126 {
            return Err(Error::Overflow("atom coordinates exceed 126 bits".into()));
        }
        Ok(b < 1 << 62)
    }

    /// f64 enclosures of `λ^i / D`.
    pub(crate) fn power_intervals(&self, lambda: &AlgebraicNumber) -> Vec<Interval> {
        let x = lambda.enclosure(CACHED_BITS);
        let inv = BigRational::new(BigInt::one(), self.scale.clone());
        let mut pw = RatInterval::point(inv);
        let mut out = Vec::with_capacity(self.dim);
        for _ in 0..self.dim {
            out.push(pw.to_interval());
            pw = pw.mul(&x).rounded(CACHED_BITS + 64);
        }
        out
    }
}

fn int_interval(k: i128) -> Interval {
    let f = k as f64;
    if k.unsigned_abs() <= 1 << 53 {
        Interval::point(f)
    } else {
        Interval::new(f.next_down(), f.next_up())
    }
}

fn cmp_shifted<T: Coord>(a: &[T], va: &[T], b: &[T], vb: &[T], sub_a: bool) -> Ordering {
    // compares a - va with b + vb (sub_a) coordinatewise
    for t in 0..a.len() {
        let x = if sub_a { a[t] - va[t] } else { a[t] + va[t] };
        let y = b[t] + vb[t];
        match x.cmp(&y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Runs the sign-by-sign convolution; `on_step(k, masses)` sees the measure
/// after `k` terms. Returns keys (flat, sorted lexicographically) and masses.
fn convolve_steps<T: Coord>(
    vectors: &[Vec<T>],
    d: usize,
    w: Weights,
    mut on_step: impl FnMut(usize, &[u64]),
) -> (Vec<T>, Vec<u64>) {
    let mut keys: Vec<T> = vec![T::default(); d];
    let mut masses: Vec<u64> = vec![1];
    for (step, v) in vectors.iter().enumerate() {
        let c = masses.len();
        let mut nk: Vec<T> = Vec::with_capacity(2 * c * d);
        let mut nm: Vec<u64> = Vec::with_capacity(2 * c);
        let (mut i, mut j) = (0, 0);
        while i < c || j < c {
            let ord = if i == c {
                Ordering::Greater
            } else if j == c {
                Ordering::Less
            } else {
                cmp_shifted(&keys[i * d..(i + 1) * d], v, &keys[j * d..(j + 1) * d], v, true)
            };
            match ord {
                Ordering::Less => {
                    nk.extend(keys[i * d..(i + 1) * d].iter().zip(v).map(|(&k, &s)| k - s));
                    nm.push(masses[i] * w.down);
                    i += 1;
                }
                Ordering::Greater => {
                    nk.extend(keys[j * d..(j + 1) * d].iter().zip(v).map(|(&k, &s)| k + s));
                    nm.push(masses[j] * w.up);
                    j += 1;
                }
                Ordering::Equal => {
                    nk.extend(keys[i * d..(i + 1) * d].iter().zip(v).map(|(&k, &s)| k - s));
                    nm.push(masses[i] * w.down + masses[j] * w.up);
                    i += 1;
                    j += 1;
                }
            }
        }
        keys = nk;
        masses = nm;
        on_step(step + 1, &masses);
    }
    (keys, masses)
}

/// Shannon entropy in bits of masses `m_i / denom`.
pub fn entropy_of_counts(masses: &[u64], denom: f64) -> f64 {
    let mut s = CompensatedSum::default();
    for &m in masses {
        if m > 1 {
            let mf = m as f64;
            s.add(mf * mf.log2());
        }
    }
    let h = denom.log2() - s.value() / denom;
    h.max(0.0)
}

/// Finitely supported probability measure with exact positions in `Q(λ)`.
#[derive(Clone, Debug)]
pub struct AtomicMeasure {
    lambda: AlgebraicNumber,
    range: ExponentRange,
    bias: BigRational,
    mass_denominator: u64,
    scale: BigInt,
    dim: usize,
    keys: KeyStore,
    masses: Vec<u64>,
    values: Vec<f64>,
    value_error: f64,
}

impl PartialEq for AtomicMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.scale == other.scale
            && self.lambda == other.lambda
            && self.len() == other.len()
            && (0..self.len()).all(|i| self.key(i) == other.key(i) && self.mass(i) == other.mass(i))
    }
}

pub fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

/// All `2^{hi-lo}` signed sums, with equal sums merged exactly.
pub fn enumerate_atoms(lambda: &AlgebraicNumber, range: ExponentRange, bias: &BigRational) -> Result<AtomicMeasure> {
    check_parameter(lambda)?;
    let w = Weights::from_bias(bias, range.len())?;
    let basis = Basis::new(lambda, range.lo, range.hi)?;
    let d = basis.dim;
    let (keys, masses) = if basis.narrow_ok()? {
        let v: Vec<Vec<i64>> = basis.vectors.iter().map(|v| v.iter().map(|&x| x as i64).collect()).collect();
        let (k, m) = convolve_steps(&v, d, w, |_, _| {});
        (KeyStore::Narrow(k), m)
    } else {
        let (k, m) = convolve_steps(&basis.vectors, d, w, |_, _| {});
        (KeyStore::Wide(k), m)
    };
    Ok(AtomicMeasure::assemble(
        lambda.clone(),
        range,
        bias.clone(),
        w.denom.pow(range.len() as u32),
        basis,
        keys,
        masses,
    ))
}

fn check_parameter(lambda: &AlgebraicNumber) -> Result<()> {
    let zero = BigRational::zero();
    if !lambda.cmp_rational(&zero).is_gt() || !lambda.cmp_rational(&BigRational::one()).is_lt() {
        return Err(Error::invalid(format!("λ = {} is not in (0, 1)", lambda.to_f64())));
    }
    Ok(())
}

impl AtomicMeasure {
    fn assemble(
        lambda: AlgebraicNumber,
        range: ExponentRange,
        bias: BigRational,
        mass_denominator: u64,
        basis: Basis,
        keys: KeyStore,
        masses: Vec<u64>,
    ) -> Self {
        let pows = basis.power_intervals(&lambda);
        let d = basis.dim;
        let n = masses.len();
        let mut values = Vec::with_capacity(n);
        let mut err = 0.0f64;
        let eval = |k: &[i128]| k.iter().zip(&pows).fold(Interval::point(0.0), |acc, (&c, p)| acc + int_interval(c) * *p);
        for i in 0..n {
            let iv = eval(&keys.get(i, d));
            values.push(iv.mid());
            err = err.max(iv.radius());
        }
        let mut mu = AtomicMeasure {
            lambda,
            range,
            bias,
            mass_denominator,
            scale: basis.scale,
            dim: d,
            keys,
            masses,
            values,
            value_error: err,
        };
        mu.sort_by_position();
        mu
    }

    fn sort_by_position(&mut self) {
        let n = self.masses.len();
        let mut idx: Vec<u32> = (0..n as u32).collect();
        let thr = 2.5 * self.value_error + f64::MIN_POSITIVE;
        idx.sort_unstable_by(|&a, &b| {
            let (va, vb) = (self.values[a as usize], self.values[b as usize]);
            if (va - vb).abs() > thr {
                va.total_cmp(&vb)
            } else {
                self.exact_cmp(a as usize, b as usize)
            }
        });
        let d = self.dim;
        self.keys = match &self.keys {
            KeyStore::Narrow(k) => {
                KeyStore::Narrow(idx.iter().flat_map(|&i| k[i as usize * d..(i as usize + 1) * d].iter().copied()).collect())
            }
            KeyStore::Wide(k) => {
                KeyStore::Wide(idx.iter().flat_map(|&i| k[i as usize * d..(i as usize + 1) * d].iter().copied()).collect())
            }
        };
        self.masses = idx.iter().map(|&i| self.masses[i as usize]).collect();
        self.values = idx.iter().map(|&i| self.values[i as usize]).collect();
    }

    fn key_difference(&self, a: usize, b: usize) -> Vec<BigInt> {
        let (ka, kb) = (self.keys.get(a, self.dim), self.keys.get(b, self.dim));
        ka.iter().zip(&kb).map(|(&x, &y)| BigInt::from(x) - BigInt::from(y)).collect()
    }

    fn exact_cmp(&self, a: usize, b: usize) -> Ordering {
        self.lambda.sign_of_int(&self.key_difference(a, b)).cmp(&0)
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn lambda(&self) -> &AlgebraicNumber {
        &self.lambda
    }

    pub fn range(&self) -> ExponentRange {
        self.range
    }

    pub fn bias(&self) -> &BigRational {
        &self.bias
    }

    /// Midpoints of the position enclosures, ascending.
    pub fn positions(&self) -> &[f64] {
        &self.values
    }

    /// Uniform radius of the position enclosures.
    pub fn position_error(&self) -> f64 {
        self.value_error
    }

    pub fn position_interval(&self, i: usize) -> Interval {
        Interval::new(
            (self.values[i] - self.value_error).next_down(),
            (self.values[i] + self.value_error).next_up(),
        )
    }

    /// Position as power-basis coordinates over `Q`.
    pub fn position_coords(&self, i: usize) -> Vec<BigRational> {
        self.keys
            .get(i, self.dim)
            .iter()
            .map(|&k| BigRational::new(BigInt::from(k), self.scale.clone()))
            .collect()
    }

    pub(crate) fn key(&self, i: usize) -> SmallVec<[i128; 4]> {
        self.keys.get(i, self.dim)
    }

    pub fn mass(&self, i: usize) -> BigRational {
        BigRational::new(BigInt::from(self.masses[i]), BigInt::from(self.mass_denominator))
    }

    pub fn mass_numerators(&self) -> &[u64] {
        &self.masses
    }

    pub fn mass_denominator(&self) -> u64 {
        self.mass_denominator
    }

    pub fn mass_f64(&self, i: usize) -> f64 {
        self.masses[i] as f64 / self.mass_denominator as f64
    }

    pub fn total_mass(&self) -> BigRational {
        let s: u128 = self.masses.iter().map(|&m| m as u128).sum();
        BigRational::new(BigInt::from(s), BigInt::from(self.mass_denominator))
    }

    /// `(position, mass)` pairs in f64.
    pub fn points(&self) -> Vec<(f64, f64)> {
        (0..self.len()).map(|i| (self.values[i], self.mass_f64(i))).collect()
    }

    /// `λ^lo / (1 - λ)`: every atom lies within this distance of 0.
    pub fn support_bound(&self) -> f64 {
        let l = self.lambda.to_f64();
        l.powi(self.range.lo as i32) / (1.0 - l)
    }

    pub fn scale_denominator(&self) -> &BigInt {
        &self.scale
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Exact convolution with the measure on an adjacent exponent range.
    pub fn convolve(&self, other: &AtomicMeasure) -> Result<AtomicMeasure> {
        if self.lambda != other.lambda || self.bias != other.bias {
            return Err(Error::invalid("convolution needs the same λ and bias"));
        }
        let (a, b) = if self.range.hi == other.range.lo { (self, other) } else { (other, self) };
        if a.range.hi != b.range.lo {
            return Err(Error::invalid("convolution needs adjacent exponent ranges"));
        }
        let range = ExponentRange { lo: a.range.lo, hi: b.range.hi };
        let basis = Basis::new(&self.lambda, range.lo, range.hi)?;
        let fa = (&basis.scale / &a.scale).to_i128().ok_or_else(|| Error::Overflow("scale".into()))?;
        let fb = (&basis.scale / &b.scale).to_i128().ok_or_else(|| Error::Overflow("scale".into()))?;
        let d = self.dim;
        let mut map: FxHashMap<SmallVec<[i128; 4]>, u64> = FxHashMap::default();
        for i in 0..a.len() {
            let ka: SmallVec<[i128; 4]> = a.key(i).iter().map(|&k| k * fa).collect();
            for j in 0..b.len() {
                let kb = b.key(j);
                let key: SmallVec<[i128; 4]> = (0..d).map(|t| ka[t] + kb[t] * fb).collect();
                *map.entry(key).or_insert(0) += a.masses[i] * b.masses[j];
            }
        }
        let mut entries: Vec<(SmallVec<[i128; 4]>, u64)> = map.into_iter().collect();
        entries.sort_unstable();
        let keys: Vec<i128> = entries.iter().flat_map(|(k, _)| k.iter().copied()).collect();
        let masses: Vec<u64> = entries.iter().map(|&(_, m)| m).collect();
        Ok(AtomicMeasure::assemble(
            self.lambda.clone(),
            range,
            self.bias.clone(),
            a.mass_denominator * b.mass_denominator,
            basis,
            KeyStore::from_wide(keys),
            masses,
        ))
    }

    /// The measure is invariant under `x -> -x`.
    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            let k = self.key(i);
            let m = self.key(n - 1 - i);
            k.iter().zip(&m).all(|(x, y)| *x == -*y) && self.masses[i] == self.masses[n - 1 - i]
        })
    }
}

pub fn shannon_entropy(mu: &AtomicMeasure) -> f64 {
    entropy_of_counts(&mu.masses, mu.mass_denominator as f64)
}

/// `H(ν^{(n)})/n` for `n = 1..=n_max`, each an upper bound on the Garsia entropy.
#[derive(Clone, Debug, Serialize)]
pub struct EntropyBracket {
    pub n: usize,
    pub shannon_bits: f64,
    pub upper_on_h: f64,
    /// `H(ν^{(k)})` for `k = 1..=n`
    pub entropies: Vec<f64>,
    pub atom_counts: Vec<u64>,
    /// `(k, H(ν^{(k)})/k)` for `k = n, n/2, n/4, ...`, ascending in `k`
    pub monotone_chain: Vec<(usize, f64)>,
}

impl EntropyBracket {
    /// Smallest certified upper bound among the computed `H/k`.
    pub fn best_upper(&self) -> f64 {
        self.entropies
            .iter()
            .enumerate()
            .map(|(i, h)| h / (i + 1) as f64)
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn garsia_entropy_bracket(lambda: &AlgebraicNumber, n_max: usize) -> Result<EntropyBracket> {
    garsia_entropy_bracket_biased(lambda, n_max, &half())
}

pub fn garsia_entropy_bracket_biased(lambda: &AlgebraicNumber, n_max: usize, bias: &BigRational) -> Result<EntropyBracket> {
    let range = ExponentRange::first(n_max)?;
    check_parameter(lambda)?;
    let w = Weights::from_bias(bias, n_max)?;
    let basis = Basis::new(lambda, range.lo, range.hi)?;
    let d = basis.dim;
    let mut entropies = Vec::with_capacity(n_max);
    let mut atom_counts = Vec::with_capacity(n_max);
    let mut record = |k: usize, m: &[u64]| {
        entropies.push(entropy_of_counts(m, (w.denom as f64).powi(k as i32)));
        atom_counts.push(m.len() as u64);
    };
    if basis.narrow_ok()? {
        let v: Vec<Vec<i64>> = basis.vectors.iter().map(|v| v.iter().map(|&x| x as i64).collect()).collect();
        convolve_steps(&v, d, w, &mut record);
    } else {
        convolve_steps(&basis.vectors, d, w, &mut record);
    }
    let mut chain = Vec::new();
    let mut k = n_max;
    while k >= 1 {
        chain.push((k, entropies[k - 1] / k as f64));
        k /= 2;
    }
    chain.reverse();
    Ok(EntropyBracket {
        n: n_max,
        shannon_bits: entropies[n_max - 1],
        upper_on_h: entropies[n_max - 1] / n_max as f64,
        entropies,
        atom_counts,
        monotone_chain: chain,
    })
}

/// True iff `ν^{(n)}` has `2^n` atoms.
pub fn is_free(lambda: &AlgebraicNumber, n: usize) -> Result<bool> {
    Ok(count_atoms(lambda, n)? == 1u128 << n)
}

/// Certified minimum distance between adjacent atoms.
#[derive(Clone, Debug, Serialize)]
pub struct MinGap {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    /// index of the left atom of a minimising pair
    pub index: usize,
}

pub fn min_gap(mu: &AtomicMeasure) -> Result<MinGap> {
    let n = mu.len();
    if n < 2 {
        return Err(Error::invalid("min_gap needs at least two atoms"));
    }
    let e = 2.0 * mu.value_error;
    let gaps: Vec<f64> = mu.values.windows(2).map(|w| w[1] - w[0]).collect();
    let best_hi = gaps.iter().map(|g| (g + e) * (1.0 + 1e-15)).fold(f64::INFINITY, f64::min);
    let x = mu.lambda.enclosure(CACHED_BITS);
    let mut best: Option<(RatInterval, usize)> = None;
    for (i, g) in gaps.iter().enumerate() {
        if (g - e) * (1.0 - 1e-15) - f64::MIN_POSITIVE > best_hi {
            continue;
        }
        let diff = mu.key_difference(i + 1, i);
        let mut acc = RatInterval::point(BigRational::zero());
        for c in diff.iter().rev() {
            acc = acc.mul(&x).add(&RatInterval::point(BigRational::from_integer(c.clone())));
        }
        let iv = acc.scale(&BigRational::new(BigInt::one(), mu.scale.clone()));
        best = match best {
            None => Some((iv, i)),
            Some((b, j)) => {
                let lo = if iv.lo < b.lo { iv.lo.clone() } else { b.lo.clone() };
                let (hi, idx) = if iv.hi < b.hi { (iv.hi.clone(), i) } else { (b.hi.clone(), j) };
                Some((RatInterval::new(lo, hi), idx))
            }
        };
    }
    let (iv, index) = best.expect("at least one candidate gap");
    let f = iv.to_interval();
    Ok(MinGap { value: f.mid(), lo: f.lo, hi: f.hi, index })
}

/// Number of distinct atoms of `ν^{(n)}` (no masses, no sorting).
pub fn count_atoms(lambda: &AlgebraicNumber, n: usize) -> Result<u128> {
    check_parameter(lambda)?;
    if n == 0 {
        return Ok(1);
    }
    if n > COUNT_CAP {
        return Err(Error::CapExceeded { what: "n", requested: n as u64, cap: COUNT_CAP as u64 });
    }
    if lambda.degree() == 1 {
        // a rational root of a polynomial with coefficients in {-1, 0, 1} is ±1
        return Ok(1u128 << n);
    }
    if n <= DEFAULT_CAP {
        let w = Weights { up: 1, down: 1, denom: 2 };
        let basis = Basis::new(lambda, 0, n)?;
        let d = basis.dim;
        let count = if basis.narrow_ok()? {
            let v: Vec<Vec<i64>> = basis.vectors.iter().map(|v| v.iter().map(|&x| x as i64).collect()).collect();
            convolve_steps(&v, d, w, |_, _| {}).1.len()
        } else {
            convolve_steps(&basis.vectors, d, w, |_, _| {}).1.len()
        };
        return Ok(count as u128);
    }
    count_atoms_mitm(lambda, n)
}

struct HalfTable {
    keys: Vec<SmallVec<[i128; 4]>>,
    values: Vec<f64>,
    error: f64,
}

fn half_table(lambda: &AlgebraicNumber, basis: &Basis, pows: &[Interval], lo: usize, hi: usize) -> HalfTable {
    let d = basis.dim;
    let w = Weights { up: 1, down: 1, denom: 2 };
    let (keys, _) = convolve_steps(&basis.vectors[lo..hi], d, w, |_, _| {});
    let _ = lambda;
    let mut rows: Vec<(f64, SmallVec<[i128; 4]>)> = Vec::with_capacity(keys.len() / d.max(1));
    let mut error = 0.0f64;
    for k in keys.chunks(d) {
        let iv = k.iter().zip(pows).fold(Interval::point(0.0), |acc, (&c, p)| acc + int_interval(c) * *p);
        error = error.max(iv.radius());
        rows.push((iv.mid(), k.iter().copied().collect()));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    HalfTable {
        values: rows.iter().map(|r| r.0).collect(),
        keys: rows.into_iter().map(|r| r.1).collect(),
        error,
    }
}

/// Meet in the middle: `ν^{(n)} = ν^{[0,h)} * ν^{[h,n)}`. Sums are bucketed by
/// a value computed from their exact key (so equal sums share a bucket) and
/// deduplicated exactly inside each bucket.
fn count_atoms_mitm(lambda: &AlgebraicNumber, n: usize) -> Result<u128> {
    let basis = Basis::new(lambda, 0, n)?;
    let _ = basis.narrow_ok()?;
    let pows = basis.power_intervals(lambda);
    let h = n / 2;
    let a = half_table(lambda, &basis, &pows, 0, h);
    let b = half_table(lambda, &basis, &pows, h, n);
    let pairs = a.values.len() as u64 * b.values.len() as u64;
    if pairs > MITM_PAIR_BUDGET {
        return Err(Error::CapExceeded { what: "meet-in-the-middle pairs", requested: pairs, cap: MITM_PAIR_BUDGET });
    }
    let d = basis.dim;
    let value_of = |k: &[i128]| -> f64 { k.iter().zip(&pows).map(|(&c, p)| c as f64 * p.mid()).sum() };
    let lo = a.values[0] + b.values[0];
    let hi = a.values[a.values.len() - 1] + b.values[b.values.len() - 1];
    let chunks = (pairs >> 18).max(1) as usize;
    let width = (hi - lo) / chunks as f64;
    // slack covers the error of both the pairwise sum and `value_of`
    let tol = 4.0 * (a.error + b.error) + 1e-12 * (hi.abs() + lo.abs() + 1.0);
    let mut total: u128 = 0;
    let mut buf: Vec<SmallVec<[i128; 4]>> = Vec::new();
    for c in 0..chunks {
        let c0 = lo + width * c as f64;
        let c1 = if c + 1 == chunks { f64::INFINITY } else { lo + width * (c + 1) as f64 };
        let c0 = if c == 0 { f64::NEG_INFINITY } else { c0 };
        buf.clear();
        for (ka, &va) in a.keys.iter().zip(&a.values) {
            let from = b.values.partition_point(|&vb| va + vb < c0 - tol);
            let to = b.values.partition_point(|&vb| va + vb < c1 + tol);
            for kb in &b.keys[from..to] {
                let key: SmallVec<[i128; 4]> = (0..d).map(|t| ka[t] + kb[t]).collect();
                let v = value_of(&key);
                if v >= c0 && v < c1 {
                    buf.push(key);
                }
            }
        }
        buf.sort_unstable();
        buf.dedup();
        total += buf.len() as u128;
    }
    Ok(total)
}

/// Growth of the semigroup generated by `x -> λx ± 1`.
#[derive(Clone, Debug, Serialize)]
pub struct SemigroupCount {
    pub n: usize,
    pub count: u128,
    /// `log2(count) / n`
    pub growth: f64,
    pub log2_mahler: f64,
    pub slack: f64,
    pub bound_holds: bool,
}

/// Distinct length-`n` products; a product acts as `x -> λ^n x + Σ ε_j λ^j`,
/// so this is the atom count of `ν^{(n)}`.
pub fn semigroup_count(lambda: &AlgebraicNumber, n: usize) -> Result<SemigroupCount> {
    if n == 0 {
        return Err(Error::invalid("semigroup_count needs n >= 1"));
    }
    let count = count_atoms(lambda, n)?;
    let growth = (count as f64).log2() / n as f64;
    let m = mahler_measure(lambda.min_poly())?;
    let log2_mahler = m.log2_interval().hi;
    Ok(SemigroupCount {
        n,
        count,
        growth,
        log2_mahler: m.value.log2(),
        slack: GROWTH_SLACK,
        bound_holds: growth <= log2_mahler + GROWTH_SLACK,
    })
}

/// `denom(bias)^n`, the common mass denominator of an `n`-step measure.
pub(crate) fn mass_denominator_for(bias: &BigRational, n: usize) -> Result<u64> {
    Ok(Weights::from_bias(bias, n)?.denom.pow(n as u32))
}

pub(crate) fn from_parts(
    lambda: AlgebraicNumber,
    range: ExponentRange,
    bias: BigRational,
    keys: Vec<i128>,
    masses: Vec<u64>,
) -> Result<AtomicMeasure> {
    let w = Weights::from_bias(&bias, range.len())?;
    let basis = Basis::new(&lambda, range.lo, range.hi)?;
    if keys.len() != masses.len() * basis.dim {
        return Err(Error::Codec("key table length mismatch".into()));
    }
    let denom = w.denom.pow(range.len() as u32);
    let mu = AtomicMeasure::assemble(lambda, range, bias, denom, basis, KeyStore::from_wide(keys), masses);
    if mu.total_mass() != BigRational::one() {
        return Err(Error::Codec("masses do not sum to 1".into()));
    }
    Ok(mu)
}

impl AtomicMeasure {
    pub(crate) fn wide_keys(&self) -> Vec<i128> {
        match &self.keys {
            KeyStore::Narrow(k) => k.iter().map(|&x| x as i128).collect(),
            KeyStore::Wide(k) => k.clone(),
        }
    }

    /// Sign of `position(i)` exactly.
    pub fn position_sign(&self, i: usize) -> i32 {
        let k: Vec<BigInt> = self.key(i).iter().map(|&x| BigInt::from(x)).collect();
        self.lambda.sign_of_int(&k)
    }

    pub fn max_abs_position(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs())) + self.value_error
    }

    /// `(numerator, denominator)` of the mass at `i` in lowest terms.
    pub fn mass_fraction(&self, i: usize) -> (BigInt, BigInt) {
        let r = self.mass(i);
        (r.numer().clone(), r.denom().clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::poly::IntPolynomial;

    fn golden() -> AlgebraicNumber {
        AlgebraicNumber::in_unit_interval(&IntPolynomial::from_i64(&[-1, 1, 1]).unwrap()).unwrap()
    }

    #[test]
    fn dyadic_three_terms() {
        let mu = enumerate_atoms(&AlgebraicNumber::rational(&rat(1, 2)), ExponentRange::first(3).unwrap(), &half()).unwrap();
        assert_eq!(mu.positions(), &[-1.75, -1.25, -0.75, -0.25, 0.25, 0.75, 1.25, 1.75]);
        assert!((0..8).all(|i| mu.mass(i) == rat(1, 8)));
        assert_eq!(shannon_entropy(&mu), 3.0);
        assert_eq!(min_gap(&mu).unwrap().value, 0.5);
    }

    #[test]
    fn golden_three_terms() {
        let mu = enumerate_atoms(&golden(), ExponentRange::first(3).unwrap(), &half()).unwrap();
        assert_eq!(mu.len(), 7);
        assert_eq!(mu.mass(3), rat(1, 4));
        assert_eq!(mu.position_sign(3), 0);
        assert_eq!(shannon_entropy(&mu), 2.75);
        let g = min_gap(&mu).unwrap();
        assert!((g.value - 0.4721359549995794).abs() < 1e-12 && g.lo <= g.value && g.value <= g.hi);
        assert!(mu.is_symmetric());
        assert_eq!(mu.total_mass(), BigRational::one());
    }

    #[test]
    fn single_term() {
        let mu = enumerate_atoms(&golden(), ExponentRange::first(1).unwrap(), &half()).unwrap();
        assert_eq!(mu.positions(), &[-1.0, 1.0]);
    }

    #[test]
    fn ranges_are_capped() {
        assert!(ExponentRange::new(0, 27).unwrap_err().is_cap());
        assert!(ExponentRange::new(3, 3).is_err());
        assert!(ExponentRange::new(10, 36).is_ok());
    }

    #[test]
    fn bracket_and_freeness() {
        let b = garsia_entropy_bracket(&golden(), 3).unwrap();
        assert!((b.upper_on_h - 2.75 / 3.0).abs() < 1e-15);
        assert!(!is_free(&golden(), 3).unwrap());
        assert!(is_free(&golden(), 2).unwrap());
        assert!(is_free(&AlgebraicNumber::rational(&rat(1, 2)), 20).unwrap());
        let b = garsia_entropy_bracket(&AlgebraicNumber::rational(&rat(3, 5)), 12).unwrap();
        assert!(b.entropies.iter().enumerate().all(|(i, &h)| h == (i + 1) as f64));
    }

    #[test]
    fn convolution_identity() {
        let l = golden();
        let whole = enumerate_atoms(&l, ExponentRange::first(7).unwrap(), &half()).unwrap();
        for k in 1..7 {
            let a = enumerate_atoms(&l, ExponentRange::new(0, k).unwrap(), &half()).unwrap();
            let b = enumerate_atoms(&l, ExponentRange::new(k, 7).unwrap(), &half()).unwrap();
            assert_eq!(a.convolve(&b).unwrap(), whole);
        }
    }

    #[test]
    fn mitm_agrees_with_enumeration() {
        let l = golden();
        let direct = count_atoms(&l, 18).unwrap();
        assert_eq!(count_atoms_mitm(&l, 18).unwrap(), direct);
        let cubic = AlgebraicNumber::in_unit_interval(&IntPolynomial::from_i64(&[-1, 0, 1, 1]).unwrap()).unwrap();
        assert_eq!(count_atoms_mitm(&cubic, 14).unwrap(), count_atoms(&cubic, 14).unwrap());
    }

    #[test]
    fn semigroup_small() {
        assert_eq!(semigroup_count(&golden(), 3).unwrap().count, 7);
        assert_eq!(semigroup_count(&golden(), 1).unwrap().count, 2);
        assert_eq!(semigroup_count(&AlgebraicNumber::rational(&rat(3, 5)), 12).unwrap().count, 4096);
    }
}
