//! Certified complex root enclosures.
//!
//! Approximations come from an Aberth iteration in f64 and are then refined
//! by Weierstrass (Durand–Kerner) steps in exact dyadic arithmetic. Each round
//! certifies the current approximations `z_i` with the Gerschgorin discs of the
//! matrix `diag(z) - W 1^T` whose characteristic polynomial is `p / lc(p)`:
//! the disc centred at `z_i - W_i` with radius `(n - 1)|W_i|`. A union of `k`
//! discs disjoint from the rest holds exactly `k` roots, so pairwise disjoint
//! discs isolate every root.
//!
//! Real roots are forced onto real centres (their count is known exactly from
//! a Sturm chain) and the rest are kept in exact conjugate pairs, which makes
//! "real" and "non-real" certified once the discs are disjoint.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{from_f64, sqrt_lower, sqrt_upper, to_f64, to_f64_up, Interval};
use crate::poly::IntPolynomial;

/// Default number of exact refinement rounds.
pub const DEFAULT_REFINEMENT_ROUNDS: usize = 64;

const MAX_BITS: u32 = 1 << 14;

/// Disc `|z - center| <= radius` holding exactly one distinct root.
#[derive(Clone, Debug)]
pub struct RootEnclosure {
    pub re: BigRational,
    pub im: BigRational,
    pub radius: BigRational,
    pub multiplicity: usize,
    pub is_real: bool,
}

impl RootEnclosure {
    pub fn center_f64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }

    pub fn radius_f64(&self) -> f64 {
        to_f64_up(&self.radius)
    }

    /// Real interval enclosing a real root.
    pub fn real_interval(&self) -> Interval {
        Interval::from_rationals(&(&self.re - &self.radius), &(&self.re + &self.radius))
    }

    fn center_norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Certified bounds `lo <= |z| <= hi` as rationals.
    pub fn modulus_bounds(&self) -> (BigRational, BigRational) {
        let n2 = self.center_norm_sqr();
        let lo = sqrt_lower(&n2) - &self.radius;
        let lo = if lo.is_negative() { BigRational::zero() } else { lo };
        (lo, sqrt_upper(&n2) + &self.radius)
    }

    pub fn modulus_interval(&self) -> Interval {
        let (lo, hi) = self.modulus_bounds();
        Interval::from_rationals(&lo, &hi)
    }

    /// Disc lies strictly outside the closed unit disc.
    pub fn outside_unit_circle(&self) -> bool {
        let one_r = BigRational::one() + &self.radius;
        self.center_norm_sqr() > &one_r * &one_r
    }

    /// Disc lies strictly inside the open unit disc.
    pub fn inside_unit_circle(&self) -> bool {
        let one_r = BigRational::one() - &self.radius;
        one_r.is_positive() && self.center_norm_sqr() < &one_r * &one_r
    }

    fn disjoint_from(&self, other: &RootEnclosure) -> bool {
        let dr = &self.re - &other.re;
        let di = &self.im - &other.im;
        let rr = &self.radius + &other.radius;
        &dr * &dr + &di * &di > &rr * &rr
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RootSummary {
    pub re: f64,
    pub im: f64,
    pub radius: f64,
    pub multiplicity: usize,
    pub is_real: bool,
}

/// All distinct roots of a polynomial, each in its own disc.
#[derive(Clone, Debug)]
pub struct RootSet {
    pub roots: Vec<RootEnclosure>,
    /// Largest certified radius among the enclosures.
    pub achieved_radius: f64,
}

impl RootSet {
    pub fn real_roots(&self) -> impl Iterator<Item = &RootEnclosure> {
        self.roots.iter().filter(|r| r.is_real)
    }

    pub fn summaries(&self) -> Vec<RootSummary> {
        self.roots
            .iter()
            .map(|r| {
                let c = r.center_f64();
                RootSummary {
                    re: c.re,
                    im: c.im,
                    radius: r.radius_f64(),
                    multiplicity: r.multiplicity,
                    is_real: r.is_real,
                }
            })
            .collect()
    }
}

/// Certified enclosures for every distinct root of `p`, each of radius at most
/// `precision`, using the default refinement budget.
pub fn certified_roots(p: &IntPolynomial, precision: f64) -> Result<RootSet> {
    certified_roots_with_budget(p, precision, DEFAULT_REFINEMENT_ROUNDS)
}

pub fn certified_roots_with_budget(p: &IntPolynomial, precision: f64, rounds: usize) -> Result<RootSet> {
    if !(precision > 0.0) {
        return Err(Error::invalid("root precision must be positive"));
    }
    let mut refiner = RootRefiner::new(p);
    refiner.refine_to(precision, rounds)?;
    Ok(refiner.root_set())
}

/// Incremental refinement state, kept so callers can ask for more precision
/// (for instance until moduli separate from 1).
#[derive(Clone, Debug)]
pub struct RootRefiner {
    factors: Vec<FactorState>,
    rounds_used: usize,
}

#[derive(Clone, Debug)]
struct FactorState {
    poly: IntPolynomial,
    multiplicity: usize,
    /// numerators of the current approximations over `2^bits`
    approx: Vec<Complex<BigInt>>,
    real: Vec<bool>,
    bits: u32,
    discs: Vec<RootEnclosure>,
}

impl RootRefiner {
    pub fn new(p: &IntPolynomial) -> Self {
        let factors = p
            .square_free_decomposition()
            .into_iter()
            .map(|(f, k)| FactorState::new(f, k))
            .collect();
        RootRefiner { factors, rounds_used: 0 }
    }

    pub fn rounds_used(&self) -> usize {
        self.rounds_used
    }

    pub fn enclosures(&self) -> impl Iterator<Item = &RootEnclosure> {
        self.factors.iter().flat_map(|f| f.discs.iter())
    }

    fn max_radius(&self) -> f64 {
        self.enclosures().map(|r| r.radius_f64()).fold(0.0, f64::max)
    }

    fn isolated(&self) -> bool {
        let all: Vec<&RootEnclosure> = self.enclosures().collect();
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                if !all[i].disjoint_from(all[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// One exact refinement round on every factor.
    pub fn step(&mut self) {
        for f in &mut self.factors {
            f.step();
        }
        self.rounds_used += 1;
    }

    /// Refines until all discs are pairwise disjoint with radius `<= precision`.
    pub fn refine_to(&mut self, precision: f64, rounds: usize) -> Result<()> {
        let start = self.rounds_used;
        loop {
            if self.isolated() && self.max_radius() <= precision {
                return Ok(());
            }
            if self.rounds_used - start >= rounds {
                return Err(Error::PrecisionBudget {
                    target: precision,
                    achieved: self.max_radius(),
                    rounds,
                    partial: Box::new(self.root_set()),
                });
            }
            self.step();
        }
    }

    /// Refines until `done` holds on an isolated configuration.
    pub fn refine_while(&mut self, rounds: usize, mut pending: impl FnMut(&RootRefiner) -> bool) -> Result<()> {
        let start = self.rounds_used;
        loop {
            if self.isolated() && !pending(self) {
                return Ok(());
            }
            if self.rounds_used - start >= rounds {
                return Err(Error::Undecided(format!(
                    "root configuration not resolved after {rounds} refinement rounds (radius {:e})",
                    self.max_radius()
                )));
            }
            self.step();
        }
    }

    pub fn root_set(&self) -> RootSet {
        let mut roots: Vec<RootEnclosure> = self.enclosures().cloned().collect();
        roots.sort_by(|a, b| {
            b.is_real
                .cmp(&a.is_real)
                .then_with(|| a.re.cmp(&b.re))
                .then_with(|| a.im.cmp(&b.im))
        });
        RootSet {
            achieved_radius: self.max_radius(),
            roots,
        }
    }
}

impl FactorState {
    fn new(poly: IntPolynomial, multiplicity: usize) -> Self {
        let n = poly.degree();
        let mut st = FactorState {
            poly,
            multiplicity,
            approx: Vec::new(),
            real: Vec::new(),
            bits: 64,
            discs: Vec::new(),
        };
        if n == 1 {
            let root = BigRational::new(-st.poly.coeffs()[0].clone(), st.poly.coeffs()[1].clone());
            st.discs.push(RootEnclosure {
                re: root,
                im: BigRational::zero(),
                radius: BigRational::zero(),
                multiplicity,
                is_real: true,
            });
            return st;
        }
        let (approx, real) = initial_approximations(&st.poly);
        st.approx = approx
            .iter()
            .map(|z| {
                Complex::new(
                    dyadic_numer(&from_f64(z.re), st.bits),
                    dyadic_numer(&from_f64(z.im), st.bits),
                )
            })
            .collect();
        st.real = real;
        st.step();
        st
    }

    fn step(&mut self) {
        if self.poly.degree() == 1 {
            return;
        }
        let n = self.approx.len();
        let b = self.bits;
        let lc = self.poly.leading().clone();
        // P_i = 2^(b n) p(z_i), Q_i = 2^(b (n-1)) prod_{j != i} (z_i - z_j)
        let mut ws: Vec<(Complex<BigInt>, Complex<BigInt>)> = Vec::with_capacity(n);
        for i in 0..n {
            let zi = &self.approx[i];
            let mut acc = Complex::new(self.poly.leading().clone(), BigInt::zero());
            for (k, c) in self.poly.coeffs().iter().enumerate().rev().skip(1) {
                let shift = (b as usize) * (n - k);
                acc = acc * zi + Complex::new(c << shift, BigInt::zero());
            }
            let mut q = Complex::new(BigInt::one(), BigInt::zero());
            for j in 0..n {
                if j != i {
                    q = q * (zi - &self.approx[j]);
                }
            }
            if q.re.is_zero() && q.im.is_zero() {
                // coincident approximations: nudge apart and retry next round
                self.approx[i].re += BigInt::one() << (b as usize / 2);
                q = Complex::new(BigInt::one(), BigInt::zero());
                acc = Complex::new(BigInt::one() << (b as usize * n), BigInt::zero());
            }
            ws.push((acc, q));
        }
        // W_i = P_i / (lc Q_i 2^b) = P_i conj(Q_i) / (lc |Q_i|^2 2^b), kept as integers
        let sign = if lc.is_negative() { -BigInt::one() } else { BigInt::one() };
        let lc_abs = lc.abs();
        let want = ws
            .iter()
            .filter(|(p_i, _)| !(p_i.re.is_zero() && p_i.im.is_zero()))
            .map(|(p_i, q_i)| {
                let lp = p_i.re.bits().max(p_i.im.bits()) as i64;
                let lq = q_i.re.bits().max(q_i.im.bits()) as i64;
                lq + lc_abs.bits() as i64 + b as i64 - lp - 1
            })
            .min()
            .map_or(b, |w| w.max(0) as u32);
        let new_bits = (2 * want + 32).clamp(self.bits, MAX_BITS);
        let grid = new_bits + 16;
        let lift = (new_bits - b) as usize;
        let nf = BigInt::from(n as i64 - 1);
        let mut discs = Vec::with_capacity(n);
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let (p_i, q_i) = &ws[i];
            let q2 = &q_i.re * &q_i.re + &q_i.im * &q_i.im;
            let den = &q2 * &lc_abs << (b as usize);
            let num = p_i * q_i.conj();
            let (wr, wi) = (&num.re * &sign, &num.im * &sign);
            let z = &self.approx[i];
            let nr = round_div(&((&z.re << lift) * &den - (wr << new_bits as usize)), &den);
            let ni = if self.real[i] {
                BigInt::zero()
            } else {
                round_div(&((&z.im << lift) * &den - (wi << new_bits as usize)), &den)
            };
            // |W|^2 2^(2 grid) = |P|^2 2^(2 grid) / (lc^2 |Q|^2 2^(2b))
            let p2 = &p_i.re * &p_i.re + &p_i.im * &p_i.im;
            let w2 = ceil_div(&(p2 << (2 * grid as usize)), &(&q2 * &lc_abs * &lc_abs << (2 * b as usize)));
            let r_num = (w2.sqrt() + 1u32) * &nf + (BigInt::one() << (grid - new_bits) as usize);
            let g = BigInt::one() << grid as usize;
            let center_den = BigInt::one() << new_bits as usize;
            discs.push(RootEnclosure {
                re: BigRational::new(nr.clone(), center_den.clone()),
                im: BigRational::new(ni.clone(), center_den),
                radius: BigRational::new(r_num, g),
                multiplicity: self.multiplicity,
                is_real: self.real[i],
            });
            next.push(Complex::new(nr, ni));
        }
        self.approx = next;
        self.bits = new_bits;
        self.discs = discs;
    }
}

/// `n / d` for `d > 0`, ties away from zero.
fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = n.abs().div_rem(d);
    let q = if (r << 1usize) >= *d { q + 1 } else { q };
    if n.is_negative() {
        -q
    } else {
        q
    }
}

fn ceil_div(n: &BigInt, d: &BigInt) -> BigInt {
    -((-n).div_floor(d))
}

fn dyadic_numer(x: &BigRational, bits: u32) -> BigInt {
    round_numer(x, bits)
}

/// Numerator of `x` rounded to the grid `2^-bits`, ties away from zero.
fn round_numer(x: &BigRational, bits: u32) -> BigInt {
    let scaled = x.numer().abs() << (bits as usize);
    let (q, r) = scaled.div_rem(x.denom());
    let q = if (r << 1usize) >= *x.denom() { q + 1 } else { q };
    if x.is_negative() {
        -q
    } else {
        q
    }
}

/// Aberth iteration in f64 followed by the real/conjugate-pair assignment.
fn initial_approximations(p: &IntPolynomial) -> (Vec<Complex64>, Vec<bool>) {
    let n = p.degree();
    let lc = p.leading().to_f64().unwrap();
    let a: Vec<f64> = p.coeffs().iter().map(|c| c.to_f64().unwrap() / lc).collect();
    let mut z = aberth(&a);
    let real_count = p.count_real_roots();
    z.sort_by(|x, y| x.im.abs().total_cmp(&y.im.abs()));
    let mut out: Vec<Complex64> = Vec::with_capacity(n);
    let mut real = Vec::with_capacity(n);
    for w in &z[..real_count] {
        out.push(Complex64::new(w.re, 0.0));
        real.push(true);
    }
    let mut rest: Vec<Complex64> = z[real_count..].to_vec();
    rest.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let mut used = vec![false; rest.len()];
    for i in 0..rest.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let target = rest[i].conj();
        let mut best: Option<usize> = None;
        for j in 0..rest.len() {
            if used[j] {
                continue;
            }
            let d = (rest[j] - target).norm();
            if best.is_none_or(|b| d < (rest[b] - target).norm()) {
                best = Some(j);
            }
        }
        let Some(j) = best else { break };
        used[j] = true;
        let mut m = (rest[i] + rest[j].conj()) * 0.5;
        if m.im == 0.0 {
            m.im = 1e-3 * (1.0 + m.re.abs());
        }
        let m = Complex64::new(m.re, m.im.abs());
        out.push(m);
        out.push(m.conj());
        real.push(false);
        real.push(false);
    }
    (out, real)
}

fn aberth(a: &[f64]) -> Vec<Complex64> {
    let n = a.len() - 1;
    let bound = (0..n)
        .map(|k| a[k].abs().powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(bound, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (pv, dv) = horner_with_derivative(a, z[k]);
            if pv == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = pv / dv;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let offset = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if offset.is_finite() {
                z[k] -= offset;
                moved = moved.max(offset.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved < 1e-16 {
            break;
        }
    }
    z
}

fn horner_with_derivative(a: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for &c in a.iter().rev() {
        d = d * z + p;
        p = p * z + c;
    }
    (p, d)
}
