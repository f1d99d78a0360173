//! Small-degree factorisation over Z, enough to validate minimal polynomials.
//!
//! Degree up to [`EXHAUSTIVE_DEGREE`]: every integer factor `g` of `p` is
//! `lc(g) * prod_{r in S} (x - r)` for a subset `S` of the roots of `p` and a
//! divisor `lc(g)` of `lc(p)`, with `|g_i| <= C(k, i) M(p)`. All such candidates
//! are generated from certified roots, rounded and checked by exact division.
//! Above that degree only rational roots are split off and irreducibility of
//! the remainder is assumed.

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::poly::IntPolynomial;
use crate::roots::certified_roots;

pub const EXHAUSTIVE_DEGREE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Irreducibility {
    Proven,
    Assumed,
}

/// Irreducible factors of the square-free part of `p`, each primitive with
/// positive leading coefficient.
pub fn irreducible_factors(p: &IntPolynomial) -> Result<(Vec<IntPolynomial>, Irreducibility)> {
    let mut status = Irreducibility::Proven;
    let mut out = Vec::new();
    let mut rest = p.square_free();
    if rest.x_adic_order() > 0 {
        out.push(IntPolynomial::from_i64(&[0, 1])?);
        rest = rest.strip_x_factors();
    }
    if rest.degree() == 0 {
        return Ok((out, status));
    }
    let (linear, rest) = split_rational_roots(&rest)?;
    out.extend(linear);
    let Some(rest) = rest else {
        return Ok((out, status));
    };
    if rest.degree() > EXHAUSTIVE_DEGREE {
        out.push(rest);
        status = Irreducibility::Assumed;
        return Ok((out, status));
    }
    let mut stack = vec![rest];
    while let Some(f) = stack.pop() {
        match split_once(&f)? {
            Some((g, h)) => {
                stack.push(g);
                stack.push(h);
            }
            None => out.push(f),
        }
    }
    Ok((out, status))
}

fn normalize(p: IntPolynomial) -> IntPolynomial {
    let p = p.primitive();
    if p.leading().is_negative() {
        p.neg()
    } else {
        p
    }
}

/// Splits off all rational roots; returns the linear factors and the cofactor
/// (if it has positive degree).
fn split_rational_roots(p: &IntPolynomial) -> Result<(Vec<IntPolynomial>, Option<IntPolynomial>)> {
    let mut rest = p.clone();
    let mut linear = Vec::new();
    'outer: loop {
        if rest.degree() == 0 {
            return Ok((linear, None));
        }
        if rest.degree() == 1 {
            linear.push(normalize(rest));
            return Ok((linear, None));
        }
        let nums = divisors(rest.constant_term());
        let dens = divisors(rest.leading());
        let (Some(nums), Some(dens)) = (nums, dens) else {
            // coefficients too large to enumerate; keep the cofactor as is
            return Ok((linear, Some(rest)));
        };
        for q in &dens {
            for a in &nums {
                if a.gcd(q) != BigInt::one() {
                    continue;
                }
                for s in [a.clone(), -a.clone()] {
                    let r = BigRational::new(s, q.clone());
                    if rest.sign_at(&r) == 0 {
                        let lin = normalize(IntPolynomial::linear_for(&r));
                        rest = rest.div_exact(&lin).expect("rational root divides");
                        linear.push(lin);
                        continue 'outer;
                    }
                }
            }
        }
        return Ok((linear, Some(rest)));
    }
}

/// Positive divisors of `n != 0`, or `None` when `|n|` is too large for trial division.
pub(crate) fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n == 0 || n > 1 << 40 {
        return None;
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small.into_iter().map(BigInt::from).collect())
}

fn binomial(n: usize, k: usize) -> u64 {
    let mut r = 1u64;
    for i in 0..k {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

/// One nontrivial factorisation of a square-free `p` of degree <= 8, if any.
fn split_once(p: &IntPolynomial) -> Result<Option<(IntPolynomial, IntPolynomial)>> {
    let n = p.degree();
    if n <= 1 {
        return Ok(None);
    }
    let roots = certified_roots(p, 1e-40)?;
    let centers: Vec<Complex<BigRational>> =
        roots.roots.iter().map(|r| Complex::new(r.re.clone(), r.im.clone())).collect();
    let mahler_upper: f64 = {
        let lc = p.leading().abs().to_f64().unwrap();
        roots
            .roots
            .iter()
            .map(|r| (r.center_f64().norm() + r.radius_f64()).max(1.0))
            .product::<f64>()
            * lc
            * (1.0 + 1e-9)
    };
    let Some(lead_divs) = divisors(p.leading()) else {
        return Ok(None);
    };
    for k in 1..=n / 2 {
        for subset in subsets(n, k) {
            let chosen: Vec<&Complex<BigRational>> = subset.iter().map(|&i| &centers[i]).collect();
            let mut prod = vec![Complex::new(BigRational::one(), BigRational::zero())];
            for z in &chosen {
                let mut next = vec![Complex::new(BigRational::zero(), BigRational::zero()); prod.len() + 1];
                for (i, c) in prod.iter().enumerate() {
                    next[i + 1] = &next[i + 1] + c;
                    next[i] = &next[i] - c * *z;
                }
                prod = next;
            }
            // subsets not closed under conjugation give non-real products
            if prod.iter().any(|c| c.im.abs() > BigRational::new(1.into(), 1000.into())) {
                continue;
            }
            for a in &lead_divs {
                let coeffs: Vec<BigInt> = prod.iter().map(|c| (&c.re * a).round().to_integer()).collect();
                let within = coeffs
                    .iter()
                    .enumerate()
                    .all(|(i, c)| c.to_f64().unwrap().abs() <= binomial(k, i) as f64 * mahler_upper);
                if !within {
                    continue;
                }
                let Ok(g) = IntPolynomial::new(coeffs) else { continue };
                if g.degree() != k {
                    continue;
                }
                if let Some(h) = p.div_exact(&g) {
                    return Ok(Some((normalize(g), normalize(h))));
                }
            }
        }
    }
    Ok(None)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    #[test]
    fn irreducible_inputs_stay_whole() {
        for c in [&[-1, -1, 1][..], &[-2, -1, 0, 1], &[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]] {
            let (f, _) = irreducible_factors(&p(c)).unwrap();
            assert_eq!(f.len(), 1, "{c:?}");
        }
    }

    #[test]
    fn finds_quadratic_factors() {
        // (x^2 + x - 1)(x^2 - 2)(2x^2 + 1)
        let q = p(&[-1, 1, 1]).mul(&p(&[-2, 0, 1])).mul(&p(&[1, 0, 2]));
        let (mut f, st) = irreducible_factors(&q).unwrap();
        assert_eq!(st, Irreducibility::Proven);
        f.sort_by_key(|g| format!("{g}"));
        assert_eq!(f.len(), 3);
        let prod = f.iter().fold(p(&[1]), |acc, g| acc.mul(g));
        assert_eq!(prod.coeffs(), q.coeffs());
    }

    #[test]
    fn rational_roots_split() {
        let q = p(&[-1, 2]).mul(&p(&[3, 1])).mul(&p(&[-1, -1, 1]));
        let (f, _) = irreducible_factors(&q).unwrap();
        assert_eq!(f.iter().filter(|g| g.degree() == 1).count(), 2);
    }

    #[test]
    fn cyclotomic_product() {
        // x^6 - 1 = (x-1)(x+1)(x^2+x+1)(x^2-x+1)
        let (f, _) = irreducible_factors(&p(&[-1, 0, 0, 0, 0, 0, 1])).unwrap();
        assert_eq!(f.len(), 4);
    }

    #[test]
    fn divisor_list() {
        let d = divisors(&BigInt::from(12)).unwrap();
        assert_eq!(d, [1, 2, 3, 4, 6, 12].map(BigInt::from));
    }
}
