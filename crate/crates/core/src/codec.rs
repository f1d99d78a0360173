//! Binary and JSON encodings of [`AtomicMeasure`].
//!
//! Binary layout, little endian:
//!
//! ```text
//! "BCAM" u16 version
//! poly:  u32 count, then count big integers
//! lo, hi, bias: rationals (numerator, denominator as big integers)
//! u32 range.lo, u32 range.hi, u32 dim, u64 atoms
//! atoms * dim i128 keys, atoms u64 mass numerators
//! ```
//!
//! A big integer is a u32 byte length followed by two's-complement bytes.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::algebraic::AlgebraicNumber;
use crate::atoms::{from_parts, AtomicMeasure, ExponentRange};
use crate::error::{Error, Result};
use crate::exact::parse_rational;
use crate::poly::IntPolynomial;

pub const MAGIC: &[u8; 4] = b"BCAM";
pub const VERSION: u16 = 1;

fn put_int(out: &mut Vec<u8>, x: &BigInt) {
    let b = x.to_signed_bytes_le();
    out.extend_from_slice(&(b.len() as u32).to_le_bytes());
    out.extend_from_slice(&b);
}

fn put_rat(out: &mut Vec<u8>, x: &BigRational) {
    put_int(out, x.numer());
    put_int(out, x.denom());
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(Error::Codec("truncated input".into()));
        }
        let (a, b) = self.buf.split_at(n);
        self.buf = b;
        Ok(a)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn i128(&mut self) -> Result<i128> {
        Ok(i128::from_le_bytes(self.take(16)?.try_into().unwrap()))
    }

    fn int(&mut self) -> Result<BigInt> {
        let n = self.u32()? as usize;
        Ok(BigInt::from_signed_bytes_le(self.take(n)?))
    }

    fn rat(&mut self) -> Result<BigRational> {
        let n = self.int()?;
        let d = self.int()?;
        if d.sign() != num_bigint::Sign::Plus {
            return Err(Error::Codec("non-positive denominator".into()));
        }
        Ok(BigRational::new(n, d))
    }
}

pub fn encode(mu: &AtomicMeasure) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    let lam = mu.lambda();
    let coeffs = lam.min_poly().coeffs();
    out.extend_from_slice(&(coeffs.len() as u32).to_le_bytes());
    for c in coeffs {
        put_int(&mut out, c);
    }
    let (lo, hi) = lam.isolating_interval();
    put_rat(&mut out, lo);
    put_rat(&mut out, hi);
    put_rat(&mut out, mu.bias());
    let r = mu.range();
    out.extend_from_slice(&(r.lo as u32).to_le_bytes());
    out.extend_from_slice(&(r.hi as u32).to_le_bytes());
    out.extend_from_slice(&(mu.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(mu.len() as u64).to_le_bytes());
    for k in mu.wide_keys() {
        out.extend_from_slice(&k.to_le_bytes());
    }
    for m in mu.mass_numerators() {
        out.extend_from_slice(&m.to_le_bytes());
    }
    out
}

pub fn decode(buf: &[u8]) -> Result<AtomicMeasure> {
    let mut r = Reader { buf };
    if r.take(4)? != MAGIC {
        return Err(Error::Codec("bad magic".into()));
    }
    let v = r.u16()?;
    if v != VERSION {
        return Err(Error::Codec(format!("unsupported version {v}")));
    }
    let nc = r.u32()? as usize;
    let coeffs = (0..nc).map(|_| r.int()).collect::<Result<Vec<_>>>()?;
    let poly = IntPolynomial::new(coeffs)?;
    let (lo, hi) = (r.rat()?, r.rat()?);
    let bias = r.rat()?;
    let range = ExponentRange::new(r.u32()? as usize, r.u32()? as usize)?;
    let dim = r.u32()? as usize;
    let atoms = r.u64()? as usize;
    let lambda = AlgebraicNumber::new(&poly, lo, hi)?;
    let n_keys = atoms.checked_mul(dim).ok_or_else(|| Error::Codec("size overflow".into()))?;
    if r.buf.len() != n_keys * 16 + atoms * 8 {
        return Err(Error::Codec("table size mismatch".into()));
    }
    let keys = (0..n_keys).map(|_| r.i128()).collect::<Result<Vec<_>>>()?;
    let masses = (0..atoms).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
    from_parts(lambda, range, bias, keys, masses)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomJson {
    pub position: String,
    pub error: String,
    pub mass: String,
    /// exact power-basis key, scaled by the measure's scale denominator
    pub key: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureJson {
    pub version: u16,
    pub min_poly: Vec<String>,
    pub isolating_interval: [String; 2],
    pub range: [usize; 2],
    pub bias: String,
    pub dim: usize,
    pub atoms: Vec<AtomJson>,
}

pub fn to_json(mu: &AtomicMeasure) -> MeasureJson {
    let lam = mu.lambda();
    let (lo, hi) = lam.isolating_interval();
    let err = format!("{:.3e}", mu.position_error());
    let keys = mu.wide_keys();
    let atoms = (0..mu.len())
        .map(|i| AtomJson {
            position: format!("{:.17e}", mu.positions()[i]),
            error: err.clone(),
            mass: mu.mass(i).to_string(),
            key: keys[i * mu.dim()..(i + 1) * mu.dim()].iter().map(|k| k.to_string()).collect(),
        })
        .collect();
    MeasureJson {
        version: VERSION,
        min_poly: lam.min_poly().coeffs().iter().map(|c| c.to_string()).collect(),
        isolating_interval: [lo.to_string(), hi.to_string()],
        range: [mu.range().lo, mu.range().hi],
        bias: mu.bias().to_string(),
        dim: mu.dim(),
        atoms,
    }
}

pub fn from_json(j: &MeasureJson) -> Result<AtomicMeasure> {
    if j.version != VERSION {
        return Err(Error::Codec(format!("unsupported version {}", j.version)));
    }
    let int = |s: &String| s.parse::<BigInt>().map_err(|e| Error::Codec(format!("bad integer `{s}`: {e}")));
    let coeffs = j.min_poly.iter().map(int).collect::<Result<Vec<_>>>()?;
    let lambda = AlgebraicNumber::new(
        &IntPolynomial::new(coeffs)?,
        parse_rational(&j.isolating_interval[0])?,
        parse_rational(&j.isolating_interval[1])?,
    )?;
    let range = ExponentRange::new(j.range[0], j.range[1])?;
    let bias = parse_rational(&j.bias)?;
    let mut keys = Vec::with_capacity(j.atoms.len() * j.dim);
    let mut masses = Vec::with_capacity(j.atoms.len());
    let denom = crate::atoms::mass_denominator_for(&bias, range.len())?;
    for a in &j.atoms {
        if a.key.len() != j.dim {
            return Err(Error::Codec("key length mismatch".into()));
        }
        for k in &a.key {
            keys.push(k.parse::<i128>().map_err(|e| Error::Codec(format!("bad key `{k}`: {e}")))?);
        }
        let m = parse_rational(&a.mass)?;
        let scaled = m * BigRational::from_integer(denom.into());
        if !scaled.is_integer() {
            return Err(Error::Codec(format!("mass {} is not a multiple of 1/{denom}", a.mass)));
        }
        masses.push(
            num_traits::ToPrimitive::to_u64(&scaled.to_integer())
                .ok_or_else(|| Error::Codec("mass out of range".into()))?,
        );
    }
    from_parts(lambda, range, bias, keys, masses)
}
