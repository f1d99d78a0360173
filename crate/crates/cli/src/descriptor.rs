//! Parameter descriptors: how a λ in (0, 1) is named on the command line.

use bconv_core::exact::parse_rational;
use bconv_core::{parse_polynomial, AlgebraicNumber, Error, RootSelector};
use clap::Args;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Args, Clone, Debug, Default)]
pub struct LambdaArgs {
    /// λ as an exact rational, `p/q` or a decimal
    #[arg(long = "lambda-rational", value_name = "P/Q", conflicts_with = "poly")]
    pub lambda_rational: Option<String>,
    /// integer polynomial with λ (or 1/λ with --inverse) as a root
    #[arg(long, value_name = "POLY")]
    pub poly: Option<String>,
    /// 0-based index of the root among the real roots, ascending
    #[arg(long = "root-index", value_name = "K", requires = "poly", conflicts_with = "interval")]
    pub root_index: Option<usize>,
    /// isolating interval of the root, `lo,hi`
    #[arg(long, value_name = "LO,HI", requires = "poly")]
    pub interval: Option<String>,
    /// the selected root is ξ > 1 and λ = 1/ξ
    #[arg(long, requires = "poly")]
    pub inverse: bool,
}

impl LambdaArgs {
    pub fn given(&self) -> bool {
        self.lambda_rational.is_some() || self.poly.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    /// the root in (0, 1), or the largest real root with `inverse`
    Default,
    Index(usize),
    Interval(String, String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Descriptor {
    Rational { value: String },
    Algebraic { poly: String, selector: Selector, inverse: bool },
}

fn rational(text: &str) -> Result<BigRational, CliError> {
    parse_rational(text).map_err(CliError::Core)
}

impl Descriptor {
    pub fn from_args(a: &LambdaArgs) -> Result<Self, CliError> {
        match (&a.lambda_rational, &a.poly) {
            (Some(q), None) => Self::rational(q),
            (None, Some(p)) => {
                let selector = match (a.root_index, &a.interval) {
                    (Some(k), _) => Selector::Index(k),
                    (None, Some(iv)) => {
                        let (lo, hi) = iv
                            .split_once(',')
                            .ok_or_else(|| CliError::Usage(format!("--interval `{iv}` is not `lo,hi`")))?;
                        Selector::Interval(rational(lo)?.to_string(), rational(hi)?.to_string())
                    }
                    (None, None) => Selector::Default,
                };
                Self::algebraic(p, selector, a.inverse)
            }
            _ => Err(CliError::Usage("give exactly one of --lambda-rational and --poly".into())),
        }
    }

    pub fn rational(text: &str) -> Result<Self, CliError> {
        Ok(Descriptor::Rational { value: rational(text)?.to_string() })
    }

    pub fn algebraic(poly: &str, selector: Selector, inverse: bool) -> Result<Self, CliError> {
        let p = parse_polynomial(poly).map_err(CliError::Core)?;
        Ok(Descriptor::Algebraic { poly: p.to_string(), selector, inverse })
    }

    pub fn label(&self) -> String {
        match self {
            Descriptor::Rational { value } => value.clone(),
            Descriptor::Algebraic { poly, selector, inverse } => {
                let sel = match selector {
                    Selector::Default if *inverse => "largest real root".to_string(),
                    Selector::Default => "root in (0, 1)".to_string(),
                    Selector::Index(k) => format!("real root {k}"),
                    Selector::Interval(lo, hi) => format!("root in [{lo}, {hi}]"),
                };
                let inv = if *inverse { "1/" } else { "" };
                format!("{inv}{sel} of {poly}")
            }
        }
    }

    /// The parameter, checked to lie in (0, 1).
    pub fn resolve(&self) -> Result<AlgebraicNumber, CliError> {
        let lambda = match self {
            Descriptor::Rational { value } => AlgebraicNumber::rational(&rational(value)?),
            Descriptor::Algebraic { poly, selector, inverse } => {
                let p = parse_polynomial(poly)?;
                let root = match (selector, inverse) {
                    (Selector::Default, false) => AlgebraicNumber::in_unit_interval(&p)?,
                    (Selector::Default, true) => {
                        let n = p.square_free().count_real_roots();
                        if n == 0 {
                            return Err(Error::RootSelection(format!("{p} has no real roots")).into());
                        }
                        AlgebraicNumber::from_root_index(&p, n - 1)?
                    }
                    (Selector::Index(k), _) => AlgebraicNumber::select(&p, &RootSelector::Index(*k))?,
                    (Selector::Interval(lo, hi), _) => {
                        AlgebraicNumber::select(&p, &RootSelector::Interval(rational(lo)?, rational(hi)?))?
                    }
                };
                if *inverse {
                    if !root.cmp_rational(&BigRational::from_integer(1.into())).is_gt() {
                        return Err(CliError::Usage(format!(
                            "--inverse needs a root greater than 1, got {}",
                            root.to_f64()
                        )));
                    }
                    root.reciprocal()?
                } else {
                    root
                }
            }
        };
        let zero = BigRational::from_integer(0.into());
        let one = BigRational::from_integer(1.into());
        if !lambda.cmp_rational(&zero).is_gt() || !lambda.cmp_rational(&one).is_lt() {
            return Err(CliError::Usage(format!("λ = {} is not in (0, 1)", lambda.to_f64())));
        }
        Ok(lambda)
    }
}

/// Grid points `start, start + step, ...` up to `stop` inclusive.
pub fn rational_range(spec: &str) -> Result<Vec<Descriptor>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(CliError::Usage(format!("--range `{spec}` is not `start:stop:step`")));
    };
    let (start, stop, step) = (rational(start)?, rational(stop)?, rational(step)?);
    if step <= BigRational::from_integer(0.into()) {
        return Err(CliError::Usage("--range step must be positive".into()));
    }
    let mut out = Vec::new();
    let mut x = start;
    while x <= stop {
        if out.len() >= crate::sweep::MAX_GRID {
            return Err(CliError::Usage(format!("grid larger than {} points", crate::sweep::MAX_GRID)));
        }
        out.push(Descriptor::Rational { value: x.to_string() });
        x += &step;
    }
    Ok(out)
}
