//! Two-part description of a string under a computable distribution.
//!
//! With `k = 1 + ceil(log2(1/mu(x)))` the half-open interval
//! `(F(x-1), F(x)]` has width at least `2 * 2^-k`, so it contains some
//! `w / 2^k`. The pair `(k, w)` identifies `x` by binary search on `F`.

use crate::bits::BitString;
use crate::dist::{DyadicMass, ExplicitDistribution};
use crate::error::{Error, Result};
use crate::repr::{CdfOracle, Probability};

/// Largest precision accepted from the wire.
pub const MAX_PRECISION: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct CodeWord {
    /// Precision in bits.
    pub k: u32,
    /// Numerator of the dyadic point `w / 2^k` inside `(F(x-1), F(x)]`.
    pub w: u64,
}

fn exact(p: Probability) -> Result<DyadicMass> {
    p.exact()
        .ok_or_else(|| Error::Config("codec requires an exact dyadic CDF".into()))
}

fn cdf_at<C: CdfOracle + ?Sized>(cdf: &C, x: &BitString) -> Result<DyadicMass> {
    exact(cdf.eval(x)?)
}

/// `1 + ceil(log2(2^K / mass)) = 1 + K - floor(log2 mass)`.
fn precision_for(mass: u64, log2_denom: u32) -> u32 {
    1 + log2_denom - mass.ilog2()
}

pub fn encode(d: &ExplicitDistribution, x: &BitString) -> Result<CodeWord> {
    encode_with(&d.cdf(), x)
}

/// Encodes `x` with the smallest valid `w`.
pub fn encode_with<C: CdfOracle + ?Sized>(cdf: &C, x: &BitString) -> Result<CodeWord> {
    if x.len() != cdf.n() {
        return Err(Error::DimensionMismatch(x.len(), cdf.n()));
    }
    let hi = cdf_at(cdf, x)?;
    let lo = match x.predecessor() {
        Some(p) => cdf_at(cdf, &p)?,
        None => DyadicMass::zero(hi.log2_denom()),
    };
    let kd = hi.log2_denom().max(lo.log2_denom());
    let (hi, lo) = (hi.numerator_at(kd), lo.numerator_at(kd));
    let mass = hi
        .checked_sub(lo)
        .ok_or_else(|| Error::NonMonotoneCdf(-((lo - hi) as f64)))?;
    if mass == 0 {
        return Err(Error::ZeroMass(x.to_string()));
    }
    let k = precision_for(mass, kd);
    // smallest w with lo / 2^kd < w / 2^k
    let w = ((lo as u128) << k >> kd) as u64 + 1;
    debug_assert!((w as u128) << kd <= (hi as u128) << k);
    Ok(CodeWord { k, w })
}

pub fn decode(d: &ExplicitDistribution, c: &CodeWord) -> Result<BitString> {
    decode_with(&d.cdf(), c)
}

/// Binary search for the unique `x` with `F(x-1) < w/2^k <= F(x)`, using at
/// most `n + 1` CDF evaluations. Rejects codewords whose precision does not
/// match the mass of the located string.
pub fn decode_with<C: CdfOracle + ?Sized>(cdf: &C, c: &CodeWord) -> Result<BitString> {
    let n = cdf.n();
    if n > 63 {
        return Err(Error::Cap {
            what: "codec n",
            value: n,
            cap: 63,
        });
    }
    if c.k == 0 || c.k > MAX_PRECISION {
        return Err(Error::InvalidCodeword(format!("precision {} not in [1, {MAX_PRECISION}]", c.k)));
    }
    if c.w == 0 || (c.k < 64 && c.w > 1u64 << c.k) {
        return Err(Error::InvalidCodeword(format!("w = {} outside (0, 2^{}]", c.w, c.k)));
    }
    // F(r) >= w / 2^k  <=>  num(F(r)) * 2^k >= w * 2^K
    let reaches = |f: DyadicMass| ((f.numerator() as u128) << c.k) >= ((c.w as u128) << f.log2_denom());

    let (mut lo, mut hi) = (0u64, (1u64 << n) - 1);
    // values at the final `hi` and at `lo - 1`, when the search saw them
    let mut f_hi: Option<DyadicMass> = None;
    let mut f_below: Option<DyadicMass> = None;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let f = cdf_at(cdf, &BitString::from_rank(mid, n)?)?;
        if reaches(f) {
            hi = mid;
            f_hi = Some(f);
        } else {
            lo = mid + 1;
            f_below = Some(f);
        }
    }
    let x = BitString::from_rank(lo, n)?;
    let f_x = match f_hi {
        Some(f) => f,
        None => cdf_at(cdf, &x)?,
    };
    if !reaches(f_x) {
        return Err(Error::InvalidCodeword(format!("w / 2^k = {} / 2^{} exceeds F(1^n)", c.w, c.k)));
    }
    let f_prev = match (x.predecessor(), f_below) {
        (None, _) => DyadicMass::zero(f_x.log2_denom()),
        (Some(_), Some(f)) => f,
        (Some(p), None) => cdf_at(cdf, &p)?,
    };
    let kd = f_x.log2_denom().max(f_prev.log2_denom());
    let mass = f_x.numerator_at(kd) - f_prev.numerator_at(kd);
    if mass == 0 || precision_for(mass, kd) != c.k {
        return Err(Error::InvalidCodeword(format!(
            "precision {} inconsistent with mass {mass}/2^{kd} of {x}",
            c.k
        )));
    }
    Ok(x)
}

impl CodeWord {
    /// `k` as an unsigned LEB128 varint, then `w` in exactly `k` bits,
    /// most significant first, zero-padded to a byte boundary.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let mut k = self.k;
        loop {
            let byte = (k & 0x7f) as u8;
            k >>= 7;
            if k == 0 {
                out.push(byte);
                break;
            }
            out.push(byte | 0x80);
        }
        let nbytes = (self.k as usize).div_ceil(8);
        let padded = (self.w as u128) << (nbytes * 8 - self.k as usize);
        for i in (0..nbytes).rev() {
            out.push((padded >> (8 * i)) as u8);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut k: u64 = 0;
        let mut shift = 0;
        let mut pos = 0;
        loop {
            let byte = *bytes
                .get(pos)
                .ok_or_else(|| Error::InvalidCodeword("truncated precision varint".into()))?;
            pos += 1;
            k |= ((byte & 0x7f) as u64) << shift;
            if byte & 0x80 == 0 {
                break;
            }
            shift += 7;
            if shift > 28 {
                return Err(Error::InvalidCodeword("precision varint too long".into()));
            }
        }
        if k == 0 || k > MAX_PRECISION as u64 {
            return Err(Error::InvalidCodeword(format!("precision {k} not in [1, {MAX_PRECISION}]")));
        }
        let k = k as u32;
        let nbytes = (k as usize).div_ceil(8);
        let body = &bytes[pos..];
        if body.len() != nbytes {
            return Err(Error::InvalidCodeword(format!(
                "expected {nbytes} payload bytes for k = {k}, found {}",
                body.len()
            )));
        }
        let padded = body.iter().fold(0u128, |acc, &b| (acc << 8) | b as u128);
        let pad = nbytes * 8 - k as usize;
        if padded & ((1u128 << pad) - 1) != 0 {
            return Err(Error::InvalidCodeword("non-zero padding bits".into()));
        }
        Ok(CodeWord {
            k,
            w: (padded >> pad) as u64,
        })
    }

    /// Length of the wire form in bits, before byte padding.
    pub fn bit_len(&self) -> usize {
        let varint_bytes = (32 - self.k.leading_zeros()).div_ceil(7).max(1) as usize;
        8 * varint_bytes + self.k as usize
    }
}
