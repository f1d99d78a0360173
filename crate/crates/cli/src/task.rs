//! One unit of work: a subcommand with fully normalised arguments.

use bconv_core::atoms::{enumerate_atoms, garsia_entropy_bracket_biased, ExponentRange};
use bconv_core::classify::{classify, pisot_proximity, separation_model_from, Subject};
use bconv_core::codec::to_json;
use bconv_core::density::{histogram_norms, iterate_self_similar, GridMeasure};
use bconv_core::dimension::{dim_below_half, hochman_bracket, BV_CONSTANT};
use bconv_core::exact::parse_rational;
use bconv_core::fourier::{decay_fit, ft_eval, log_grid, pisot_scan};
use bconv_core::polyroots::{count_small_values, nearest_root, separation_scan, transversality_audit};
use bconv_core::scale_entropy::{ac_defect, defect_slope, entropy_dim_estimate};
use bconv_core::{mahler_measure, min_gap, semigroup_count, shannon_entropy, AlgebraicNumber};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::descriptor::Descriptor;
use crate::error::CliError;
use crate::format::normalize;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum FourierMode {
    At { t: String },
    Scan { n: usize },
    Decay { lo: f64, hi: f64, count: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum AuditMode {
    Transversality { d: usize },
    Separation { d: usize, a: String, b: String },
    Nearest { d: usize },
    SmallValues { x: String, d: usize, threshold: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum Task {
    Classify { lambda: Descriptor, proximity: usize, separation_d: Option<usize> },
    Atoms { lambda: Descriptor, n: usize, start: usize, bias: String, list: bool },
    Entropy { lambda: Descriptor, n: usize, bias: String },
    ScaleEntropy { lambda: Descriptor, depth: u32, window: u32, defect: Option<u32> },
    Dimension { lambda: Descriptor, n: usize },
    Fourier { lambda: Descriptor, query: FourierMode, eps: f64 },
    RootsAudit { lambda: Option<Descriptor>, query: AuditMode },
    Density { lambda: Descriptor, depth: u32, iterations: Option<usize>, histogram: bool },
}

fn rat(text: &str) -> Result<BigRational, CliError> {
    Ok(parse_rational(text)?)
}

fn head(lambda: &AlgebraicNumber, d: &Descriptor) -> Value {
    let iv = lambda.interval();
    json!({
        "lambda": d.label(),
        "lambda_value": lambda.to_f64(),
        "lambda_error": iv.radius() + (lambda.to_f64() - iv.mid()).abs(),
    })
}

fn extend(mut base: Value, more: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut base, more) {
        a.extend(b);
    }
    base
}

/// Rounding bound on a Shannon entropy summed from exact masses.
fn entropy_error(atoms: usize, h: f64) -> f64 {
    8.0 * f64::EPSILON * atoms as f64 * h.max(1.0)
}

impl Task {
    pub fn op(&self) -> &'static str {
        match self {
            Task::Classify { .. } => "classify",
            Task::Atoms { .. } => "atoms",
            Task::Entropy { .. } => "entropy",
            Task::ScaleEntropy { .. } => "scale-entropy",
            Task::Dimension { .. } => "dimension",
            Task::Fourier { .. } => "fourier",
            Task::RootsAudit { .. } => "roots-audit",
            Task::Density { .. } => "density",
        }
    }

    pub fn lambda(&self) -> Option<&Descriptor> {
        match self {
            Task::Classify { lambda, .. }
            | Task::Atoms { lambda, .. }
            | Task::Entropy { lambda, .. }
            | Task::ScaleEntropy { lambda, .. }
            | Task::Dimension { lambda, .. }
            | Task::Fourier { lambda, .. }
            | Task::Density { lambda, .. } => Some(lambda),
            Task::RootsAudit { lambda, .. } => lambda.as_ref(),
        }
    }

    /// Same task at another parameter.
    pub fn with_lambda(&self, d: Descriptor) -> Result<Task, CliError> {
        let mut t = self.clone();
        match &mut t {
            Task::Classify { lambda, .. }
            | Task::Atoms { lambda, .. }
            | Task::Entropy { lambda, .. }
            | Task::ScaleEntropy { lambda, .. }
            | Task::Dimension { lambda, .. }
            | Task::Fourier { lambda, .. }
            | Task::Density { lambda, .. } => *lambda = d,
            Task::RootsAudit { lambda, query: AuditMode::Nearest { .. } } => *lambda = Some(d),
            Task::RootsAudit { .. } => {
                return Err(CliError::Usage("this roots-audit mode does not take a parameter".into()))
            }
        }
        Ok(t)
    }

    /// Computes the result; the value is already normalised for output.
    pub fn run(&self) -> Result<Value, CliError> {
        Ok(normalize(self.compute()?))
    }

    fn compute(&self) -> Result<Value, CliError> {
        match self {
            Task::Classify { lambda: d, proximity, separation_d } => {
                let l = d.resolve()?;
                let r = classify(&l)?;
                let mut out = extend(
                    head(&l, d),
                    json!({
                        "min_poly": l.summary().min_poly,
                        "subject": r.subject,
                        "subject_value": r.subject_value,
                        "degree": r.degree,
                        "mahler": r.mahler_measure.value,
                        "mahler_lo": r.mahler_measure.lo,
                        "mahler_hi": r.mahler_measure.hi,
                        "mahler_exact": r.mahler_measure.exact,
                        "m_unit_circle": r.m_unit_circle,
                        "conjugates_inside": r.conjugates_inside,
                        "conjugates_outside": r.conjugates_outside,
                        "is_algebraic_integer": r.is_algebraic_integer,
                        "is_pisot": r.is_pisot,
                        "is_salem": r.is_salem,
                        "is_garsia": r.is_garsia,
                        "irreducibility": r.irreducibility,
                    }),
                );
                if r.is_pisot && *proximity > 0 {
                    let xi = if r.subject == Subject::Inverse { l.reciprocal()? } else { l.clone() };
                    out = extend(out, json!({ "pisot_proximity": pisot_proximity(&xi, *proximity)? }));
                }
                if let Some(sd) = separation_d {
                    out = extend(out, json!({ "separation_model": separation_model_from(&r, *sd) }));
                }
                Ok(out)
            }
            Task::Atoms { lambda: d, n, start, bias, list } => {
                let l = d.resolve()?;
                let range = ExponentRange::new(*start, start + n)?;
                let mu = enumerate_atoms(&l, range, &rat(bias)?)?;
                let h = shannon_entropy(&mu);
                let mut out = extend(
                    head(&l, d),
                    json!({
                        "n": n,
                        "start": start,
                        "bias": bias,
                        "atoms": mu.len(),
                        "entropy_bits": h,
                        "entropy_error": entropy_error(mu.len(), h),
                        "position_error": mu.position_error(),
                        "is_symmetric": mu.is_symmetric(),
                        "total_mass": mu.total_mass().to_string(),
                    }),
                );
                if mu.len() > 1 {
                    let g = min_gap(&mu)?;
                    out = extend(out, json!({ "min_gap": g.value, "min_gap_lo": g.lo, "min_gap_hi": g.hi }));
                }
                if *list {
                    out = extend(out, json!({ "measure": to_json(&mu) }));
                }
                Ok(out)
            }
            Task::Entropy { lambda: d, n, bias } => {
                let l = d.resolve()?;
                let b = garsia_entropy_bracket_biased(&l, *n, &rat(bias)?)?;
                let sg = semigroup_count(&l, *n)?;
                let m = mahler_measure(l.min_poly())?;
                let bv_lower = BV_CONSTANT * m.lo.log2().min(1.0);
                let err = entropy_error(*b.atom_counts.last().unwrap_or(&1) as usize, b.shannon_bits);
                Ok(extend(
                    head(&l, d),
                    json!({
                        "n": b.n,
                        "bias": bias,
                        "shannon_bits": b.shannon_bits,
                        "entropy_error": err,
                        "h_upper": b.best_upper(),
                        "upper_on_h": b.upper_on_h,
                        "entropies": b.entropies,
                        "atom_counts": b.atom_counts,
                        "monotone_chain": b.monotone_chain,
                        "semigroup": sg,
                        "bv_lower": bv_lower,
                        "bv_holds": b.upper_on_h >= bv_lower,
                    }),
                ))
            }
            Task::ScaleEntropy { lambda: d, depth, window, defect } => {
                let l = d.resolve()?;
                let e = entropy_dim_estimate(&l, *depth, *window)?;
                let mut out = extend(
                    head(&l, d),
                    json!({
                        "depth": e.depth_n,
                        "window": e.window_m,
                        "estimate": e.estimate,
                        "estimate_error": e.error_bound,
                        "truncation_k": e.truncation_k,
                        "raw_curve": e.raw_curve,
                    }),
                );
                if let Ok(x) = dim_below_half(&l) {
                    out = extend(out, json!({ "exact_dimension": x.value, "exact_dimension_lo": x.lo, "exact_dimension_hi": x.hi }));
                }
                if let Some(dm) = defect {
                    let pts = ac_defect(&l, *dm)?;
                    let slope = if pts.len() >= 2 { Some(defect_slope(&pts)?) } else { None };
                    out = extend(out, json!({ "defect": pts, "defect_slope": slope }));
                }
                Ok(out)
            }
            Task::Dimension { lambda: d, n } => {
                let l = d.resolve()?;
                let b = hochman_bracket(&l, *n)?;
                Ok(extend(
                    head(&l, d),
                    json!({
                        "lower": b.lower,
                        "upper": b.upper,
                        "h_upper": b.h_upper,
                        "log_inv_lambda": b.log_inv_lambda,
                        "n_used": b.n_used,
                        "sources": b.sources,
                    }),
                ))
            }
            Task::Fourier { lambda: d, query, eps } => {
                let l = d.resolve()?;
                let body = match query {
                    FourierMode::At { t } => {
                        let s = ft_eval(&l, &rat(t)?, *eps)?;
                        json!({
                            "t": t,
                            "t_value": s.t,
                            "value": s.value,
                            "error": s.error(),
                            "truncation_error": s.truncation_error,
                            "rounding_error": s.rounding_error,
                            "terms_used": s.terms_used,
                            "exact_zero": s.exact_zero,
                        })
                    }
                    FourierMode::Scan { n } => {
                        let s = pisot_scan(&l, *n)?;
                        let samples: Vec<Value> = s
                            .samples
                            .iter()
                            .enumerate()
                            .map(|(k, x)| json!({ "n": k, "t": x.t, "value": x.value, "error": x.error() }))
                            .collect();
                        let err = s.samples.get(s.argmin).map_or(0.0, |x| x.error());
                        json!({
                            "n_max": n,
                            "minimum": s.minimum,
                            "minimum_error": err,
                            "argmin": s.argmin,
                            "samples": samples,
                            "running_min": s.running_min,
                        })
                    }
                    FourierMode::Decay { lo, hi, count } => {
                        let f = decay_fit(&l, &log_grid(*lo, *hi, *count)?)?;
                        json!({
                            "sigma": f.sigma,
                            "intercept": f.intercept,
                            "residual_rms": f.residual_rms,
                            "heuristic": f.heuristic,
                            "envelope": f.envelope,
                        })
                    }
                };
                Ok(extend(head(&l, d), body))
            }
            Task::RootsAudit { lambda, query } => match query {
                AuditMode::Transversality { d } => Ok(json!(transversality_audit(*d)?)),
                AuditMode::Separation { d, a, b } => Ok(json!(separation_scan(*d, &rat(a)?, &rat(b)?)?)),
                AuditMode::Nearest { d } => {
                    let desc = lambda
                        .as_ref()
                        .ok_or_else(|| CliError::Usage("nearest needs --lambda-rational or --poly".into()))?;
                    let l = desc.resolve()?;
                    Ok(extend(head(&l, desc), json!(nearest_root(&l, *d)?)))
                }
                AuditMode::SmallValues { x, d, threshold } => {
                    Ok(json!(count_small_values(&rat(x)?, *d, &rat(threshold)?)?))
                }
            },
            Task::Density { lambda: d, depth, iterations, histogram } => {
                let l = d.resolve()?;
                let its = iterations.unwrap_or_else(|| ((*depth as f64 + 4.0) / -l.to_f64().log2()).ceil() as usize);
                let (g, rep) = iterate_self_similar(&l, its, &GridMeasure::point_mass(*depth)?)?;
                let norms = histogram_norms(&g);
                let mut out = extend(
                    head(&l, d),
                    json!({
                        "depth": rep.depth,
                        "iterations": rep.iterations,
                        "bin_width": g.bin_width(),
                        "bins": g.len(),
                        "sup_density": norms.sup_density,
                        "l2_density": norms.l2_density,
                        "entropy_bits": norms.entropy_bits,
                        "rebin_error": rep.rebin_error,
                        "last_residual": rep.residuals.last().copied(),
                        "residuals": rep.residuals,
                        "total_mass": g.total_mass().to_string(),
                        "is_symmetric": g.is_symmetric(),
                    }),
                );
                if *histogram {
                    let (a, b) = g.index_range();
                    let centers: Vec<f64> = (a..=b).map(|k| g.center(k)).collect();
                    let masses: Vec<f64> = (a..=b).map(|k| g.mass_f64(k)).collect();
                    out = extend(out, json!({ "histogram": { "bin_center": centers, "mass": masses } }));
                }
                Ok(out)
            }
        }
    }
}
