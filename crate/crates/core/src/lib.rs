//! Exact and certified numerics for Bernoulli convolutions.

pub mod algebraic;
pub mod atoms;
pub mod classify;
pub mod codec;
pub mod density;
pub mod dimension;
pub mod error;
pub mod exact;
pub mod factor;
pub mod fourier;
pub mod poly;
pub mod polyroots;
pub mod roots;
pub mod scale_entropy;

pub use algebraic::{AlgebraicNumber, RootSelector};
pub use atoms::{
    count_atoms, enumerate_atoms, garsia_entropy_bracket, min_gap, semigroup_count, shannon_entropy, AtomicMeasure,
    ExponentRange,
};
pub use classify::{classify, mahler_measure, ClassificationReport};
pub use dimension::{dim_below_half, hochman_bracket, DimensionBracket};
pub use error::{Error, Result};
pub use fourier::{ft_eval, pisot_scan};
pub use poly::{parse_polynomial, IntPolynomial};
pub use roots::{certified_roots, RootEnclosure, RootSet};
