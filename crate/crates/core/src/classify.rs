//! Mahler measure, unit-circle conjugates and the Pisot/Salem/Garsia tests.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebraic::AlgebraicNumber;
use crate::error::{Error, Result};
use crate::exact::{to_f64, Interval, RatInterval};
use crate::factor::Irreducibility;
use crate::poly::IntPolynomial;
use crate::roots::RootRefiner;

/// Relative width targeted for Mahler measure enclosures.
pub const MAHLER_REL_TOL: f64 = 1e-13;
const GEOMETRY_ROUNDS: usize = 96;

/// Certified enclosure `lo <= M <= hi`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MahlerMeasure {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    /// Set when the measure is an integer known exactly.
    pub exact: Option<String>,
}

impl MahlerMeasure {
    pub fn error(&self) -> f64 {
        (self.hi - self.value).max(self.value - self.lo)
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.lo, self.hi)
    }

    pub fn log2_interval(&self) -> Interval {
        Interval::new(self.lo.log2().next_down(), self.hi.log2().next_up())
    }

    fn exact_int(n: &BigInt) -> Self {
        let iv = Interval::from_rational(&BigRational::from_integer(n.clone()));
        MahlerMeasure {
            value: n.to_f64().unwrap_or(f64::INFINITY),
            lo: iv.lo,
            hi: iv.hi,
            exact: Some(n.to_string()),
        }
    }

    pub fn is_exactly(&self, n: i64) -> bool {
        self.exact.as_deref() == Some(n.to_string().as_str())
    }
}

/// Where the roots of a polynomial sit relative to the unit circle.
#[derive(Clone, Debug, Serialize)]
pub struct RootGeometry {
    /// roots counted with multiplicity
    pub inside: usize,
    pub on_circle: usize,
    pub outside: usize,
    pub mahler: MahlerMeasure,
}

/// Number of distinct roots of a square-free `f` on the unit circle.
pub fn unit_circle_count(f: &IntPolynomial) -> usize {
    let rec = f.reciprocal();
    let mut u = f.gcd(&rec).strip_x_factors();
    if u.degree() == 0 {
        return 0;
    }
    let mut count = 0;
    for lin in [[-1i64, 1], [1, 1]] {
        let l = IntPolynomial::from_i64(&lin).unwrap();
        while u.degree() >= 1 {
            match u.div_exact(&l) {
                Some(q) => {
                    count += 1;
                    u = q;
                }
                None => break,
            }
        }
    }
    if u.degree() == 0 {
        return count;
    }
    let h = u
        .trace_polynomial()
        .or_else(|| u.neg().trace_polynomial())
        .expect("gcd of a polynomial and its reciprocal is self-reciprocal");
    let two = BigRational::from_integer(2.into());
    let inner = h.count_roots_in(&-two.clone(), &two);
    count + 2 * inner
}

/// Root geometry and Mahler measure of `p`, certified.
pub fn root_geometry(p: &IntPolynomial) -> Result<RootGeometry> {
    let zeros = p.x_adic_order();
    let q = p.strip_x_factors();
    let lc = q.leading().abs();
    let a0 = q.constant_term().abs();
    let mut inside = zeros;
    let mut on = 0;
    let mut outside = 0;
    let mut m_iv = Interval::from_rational(&BigRational::from_integer(lc.clone()));
    for (f, mult) in q.square_free_decomposition() {
        if f.degree() == 0 {
            continue;
        }
        let c_on = unit_circle_count(&f);
        let mut refiner = RootRefiner::new(&f);
        let undecided = |r: &RootRefiner| {
            r.enclosures().filter(|e| !e.inside_unit_circle() && !e.outside_unit_circle()).count()
        };
        let product = |r: &RootRefiner| {
            r.enclosures()
                .filter(|e| e.outside_unit_circle())
                .fold(Interval::point(1.0), |acc, e| acc * e.modulus_interval())
        };
        refiner.refine_while(GEOMETRY_ROUNDS, |r| {
            if undecided(r) != c_on {
                return true;
            }
            let pr = product(r);
            pr.width() > MAHLER_REL_TOL * pr.lo
        })?;
        let n_in = refiner.enclosures().filter(|e| e.inside_unit_circle()).count();
        let n_out = refiner.enclosures().filter(|e| e.outside_unit_circle()).count();
        inside += n_in * mult;
        outside += n_out * mult;
        on += c_on * mult;
        m_iv = m_iv * product(&refiner).powi(mult as u32);
    }
    let mahler = if outside == 0 {
        MahlerMeasure::exact_int(&lc)
    } else if inside == zeros {
        MahlerMeasure::exact_int(&a0)
    } else {
        MahlerMeasure { value: m_iv.mid(), lo: m_iv.lo, hi: m_iv.hi, exact: None }
    };
    Ok(RootGeometry { inside, on_circle: on, outside, mahler })
}

pub fn mahler_measure(p: &IntPolynomial) -> Result<MahlerMeasure> {
    Ok(root_geometry(p)?.mahler)
}

/// Which number the flags describe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subject {
    /// the number itself, when it is at least 1 in modulus
    Itself,
    /// its reciprocal, for parameters in (-1, 1)
    Inverse,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub value: f64,
    pub subject: Subject,
    pub subject_value: f64,
    pub degree: usize,
    pub mahler_measure: MahlerMeasure,
    pub m_unit_circle: usize,
    pub conjugates_inside: usize,
    pub conjugates_outside: usize,
    pub is_algebraic_integer: bool,
    pub is_pisot: bool,
    pub is_salem: bool,
    pub is_garsia: bool,
    pub irreducibility: Irreducibility,
}

/// Classifies `θ = a` if `|a| >= 1`, otherwise `θ = 1/a`.
pub fn classify(a: &AlgebraicNumber) -> Result<ClassificationReport> {
    let one = BigRational::one();
    let small = a.cmp_rational(&one).is_lt() && a.cmp_rational(&-one.clone()).is_gt();
    let (theta, subject) = if small && !a.as_rational().is_some_and(|q| q.is_zero()) {
        (a.reciprocal()?, Subject::Inverse)
    } else {
        (a.clone(), Subject::Itself)
    };
    let p = theta.min_poly();
    let geo = root_geometry(p)?;
    let n = p.degree();
    let monic = p.is_monic();
    let theta_gt_one = theta.cmp_rational(&one).is_gt();
    // θ itself is outside the unit circle when θ > 1
    let is_pisot = if n == 1 {
        monic && theta_gt_one && theta.cmp_rational(&BigRational::from_integer(2.into())).is_ge()
    } else {
        monic && theta_gt_one && geo.outside == 1 && geo.on_circle == 0
    };
    let reciprocal = {
        let r = p.reciprocal();
        r == *p || r.neg() == *p
    };
    let is_salem = monic && theta_gt_one && n >= 4 && reciprocal && geo.outside == 1 && geo.on_circle == n - 2;
    let is_garsia = monic
        && p.constant_term().abs() == BigInt::from(2)
        && geo.inside == 0
        && geo.on_circle == 0;
    Ok(ClassificationReport {
        value: a.to_f64(),
        subject,
        subject_value: theta.to_f64(),
        degree: n,
        mahler_measure: geo.mahler,
        m_unit_circle: geo.on_circle,
        conjugates_inside: geo.inside,
        conjugates_outside: geo.outside,
        is_algebraic_integer: monic,
        is_pisot,
        is_salem,
        is_garsia,
        irreducibility: theta.irreducibility(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PisotProximity {
    /// `dist(ξ^j, Z)` for `j = 1..=j_max`
    pub distances: Vec<f64>,
    /// Smallest `r` with `dist_j <= r^j` for all `j` in `[5, j_max]`.
    pub decay_ratio: Option<f64>,
}

pub fn pisot_proximity(xi: &AlgebraicNumber, j_max: usize) -> Result<PisotProximity> {
    if !xi.cmp_rational(&BigRational::one()).is_gt() {
        return Err(Error::invalid("pisot_proximity needs a selected root greater than 1"));
    }
    let log_xi = xi.to_f64().log2();
    let bits = (j_max as f64 * log_xi).ceil() as u32 + 96;
    let x = xi.enclosure(bits);
    let mut pw = RatInterval::point(BigRational::one());
    let mut distances = Vec::with_capacity(j_max);
    for _ in 0..j_max {
        pw = pw.mul(&x).rounded(bits + 32);
        let mid = (&pw.lo + &pw.hi) / BigRational::from_integer(2.into());
        let nearest = mid.round();
        let d_lo = (&pw.lo - &nearest).abs();
        let d_hi = (&pw.hi - &nearest).abs();
        let d = if pw.lo <= nearest && nearest <= pw.hi { BigRational::zero() } else { d_lo.max(d_hi) };
        distances.push(to_f64(&d));
    }
    let decay_ratio = (j_max >= 5).then(|| {
        distances[4..]
            .iter()
            .enumerate()
            .map(|(i, &d)| if d == 0.0 { 0.0 } else { d.powf(1.0 / (i + 5) as f64) })
            .fold(0.0, f64::max)
    });
    Ok(PisotProximity { distances, decay_ratio })
}

/// Model lower bound `c d^{-m} M^{-d}` with the constant `c` left symbolic (reported with `c = 1`).
#[derive(Clone, Debug, Serialize)]
pub struct SeparationModel {
    pub d: usize,
    pub m: usize,
    /// `d log2 M`
    pub d_log2_mahler: f64,
    /// `log2` of the model value with `c = 1`
    pub log2_value: f64,
    pub value: f64,
    pub constant: &'static str,
    pub heuristic: bool,
}

pub fn separation_model(a: &AlgebraicNumber, d: usize) -> Result<SeparationModel> {
    if d == 0 {
        return Err(Error::invalid("separation_model needs d >= 1"));
    }
    let report = classify(a)?;
    Ok(separation_model_from(&report, d))
}

pub fn separation_model_from(report: &ClassificationReport, d: usize) -> SeparationModel {
    let m = report.m_unit_circle;
    let dl = d as f64 * report.mahler_measure.value.log2();
    let log2_value = -(m as f64) * (d as f64).log2() - dl;
    SeparationModel {
        d,
        m,
        d_log2_mahler: dl,
        log2_value,
        value: log2_value.exp2(),
        constant: "c",
        heuristic: true,
    }
}
