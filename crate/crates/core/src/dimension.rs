//! Dimension brackets for `ν_λ`.

use num_rational::BigRational;
use serde::Serialize;

use crate::algebraic::AlgebraicNumber;
use crate::atoms::{garsia_entropy_bracket, EntropyBracket};
use crate::classify::mahler_measure;
use crate::error::{Error, Result};
use crate::exact::Interval;

/// Constant in the lower bound `0.44 min(1, log2 M)`.
pub const BV_CONSTANT: f64 = 0.44;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundSource {
    pub side: &'static str,
    pub tag: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionBracket {
    pub lower: f64,
    pub upper: f64,
    /// best certified upper bound on the Garsia entropy (bits)
    pub h_upper: f64,
    pub log_inv_lambda: f64,
    pub n_used: usize,
    pub sources: Vec<BoundSource>,
}

/// `log2(1/λ)` enclosure.
fn log_inv(lambda: &AlgebraicNumber) -> Interval {
    let iv = lambda.interval();
    // log2 is accurate to within an ulp or two; widen by a few
    let lo = -(iv.hi.log2());
    let hi = -(iv.lo.log2());
    Interval::new(lo - 4.0 * f64::EPSILON * lo.abs(), hi + 4.0 * f64::EPSILON * hi.abs())
}

fn in_unit_interval(lambda: &AlgebraicNumber) -> Result<()> {
    let zero = BigRational::from_integer(0.into());
    let one = BigRational::from_integer(1.into());
    if !lambda.cmp_rational(&zero).is_gt() || !lambda.cmp_rational(&one).is_lt() {
        return Err(Error::invalid(format!("λ = {} is not in (0, 1)", lambda.to_f64())));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactDimension {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

/// `log 2 / log(1/λ)` for `λ < 1/2`.
pub fn dim_below_half(lambda: &AlgebraicNumber) -> Result<ExactDimension> {
    in_unit_interval(lambda)?;
    if !lambda.cmp_rational(&BigRational::new(1.into(), 2.into())).is_lt() {
        return Err(Error::invalid("dim_below_half needs λ < 1/2"));
    }
    let li = log_inv(lambda);
    let (lo, hi) = ((1.0 / li.hi).next_down(), (1.0 / li.lo).next_up());
    Ok(ExactDimension { value: 1.0 / li.mid(), lo, hi })
}

/// Upper bound from `H(ν^{(n)})/n`, lower bound `0.44 min(1, log2 M)`.
pub fn hochman_bracket(lambda: &AlgebraicNumber, n: usize) -> Result<DimensionBracket> {
    in_unit_interval(lambda)?;
    let li = log_inv(lambda);
    let half = BigRational::new(1.into(), 2.into());
    if lambda.cmp_rational(&half).is_lt() {
        let e = dim_below_half(lambda)?;
        return Ok(DimensionBracket {
            lower: e.lo,
            upper: e.hi.min(1.0),
            h_upper: 1.0,
            log_inv_lambda: li.mid(),
            n_used: 0,
            sources: vec![
                BoundSource { side: "lower", tag: "exact-formula".into(), value: e.lo },
                BoundSource { side: "upper", tag: "exact-formula".into(), value: e.hi.min(1.0) },
            ],
        });
    }
    let bracket = garsia_entropy_bracket(lambda, n)?;
    Ok(bracket_from(lambda, &bracket, li)?)
}

fn bracket_from(lambda: &AlgebraicNumber, bracket: &EntropyBracket, li: Interval) -> Result<DimensionBracket> {
    let n = bracket.n;
    let (best_k, h_upper) = bracket
        .entropies
        .iter()
        .enumerate()
        .map(|(i, h)| (i + 1, h / (i + 1) as f64))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let mut sources = Vec::new();
    let upper_raw = (h_upper / li.lo).next_up();
    let mut upper = upper_raw.min(1.0);
    sources.push(BoundSource { side: "upper", tag: format!("entropy-upper({best_k})"), value: upper });
    let m = mahler_measure(lambda.min_poly())?;
    let log_m_lo = m.lo.log2().next_down();
    let lower_raw = (BV_CONSTANT * log_m_lo.min(1.0) / li.hi).next_down();
    let mut lower = lower_raw.clamp(0.0, 1.0);
    sources.push(BoundSource { side: "lower", tag: "bv-lower".into(), value: lower });
    let mut h = h_upper;
    if lambda.as_rational().is_some() {
        // rationals in (0, 1) are never roots of polynomials with coefficients in {-1, 0, 1}
        h = 1.0;
        let half = BigRational::new(1.into(), 2.into());
        if !lambda.cmp_rational(&half).is_lt() {
            lower = 1.0;
            upper = 1.0;
            sources.push(BoundSource { side: "lower", tag: "free-rational".into(), value: 1.0 });
            sources.push(BoundSource { side: "upper", tag: "free-rational".into(), value: 1.0 });
        }
    }
    Ok(DimensionBracket { lower, upper, h_upper: h, log_inv_lambda: li.mid(), n_used: n, sources })
}

#[derive(Clone, Debug, Serialize)]
pub struct BvReport {
    pub n: usize,
    pub h_over_n: f64,
    /// `0.44 min{1, log2 M}`
    pub lower: f64,
    /// `min{1, log2 M}`; not asserted for finite `n`
    pub ceiling: f64,
    pub holds: bool,
    pub gap_to_ceiling: f64,
}

pub fn bv_consistency(lambda: &AlgebraicNumber, n: usize) -> Result<BvReport> {
    in_unit_interval(lambda)?;
    let bracket = garsia_entropy_bracket(lambda, n)?;
    let m = mahler_measure(lambda.min_poly())?;
    let ceiling = m.hi.log2().min(1.0);
    let lower = BV_CONSTANT * m.lo.log2().min(1.0);
    Ok(BvReport {
        n,
        h_over_n: bracket.upper_on_h,
        lower,
        ceiling,
        holds: bracket.upper_on_h >= lower,
        gap_to_ceiling: bracket.upper_on_h - ceiling,
    })
}
