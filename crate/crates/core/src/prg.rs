//! Toy length-increasing generators `G: {0,1}^l -> {0,1}^n` and their exact
//! output distributions.
//!
//! None of these families is cryptographically secure. The linear family is
//! an injective affine map over GF(2) and is broken by parity tests; the ARX
//! and BBS families are small nonlinear stand-ins.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{BitString, MAX_LEN};
use crate::dist::ExplicitDistribution;
use crate::error::{Error, Result};
use crate::info::{entropy, kl};

/// Largest seed length for exhaustive image enumeration.
pub const MAX_EXPLICIT_SEED_LEN: usize = 20;
/// Largest seed length accepted by `expand`.
pub const MAX_SEED_LEN: usize = 63;

/// Rounds of the ARX mixing function.
const ARX_ROUNDS: usize = 6;
/// BBS modulus `p q` with `p = 1019`, `q = 1031`, both `3 mod 4`; exceeds `2^20`.
const BBS_MODULUS: u64 = 1019 * 1031;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrgFamily {
    Linear,
    Arx,
    Bbs,
}

impl std::str::FromStr for PrgFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(PrgFamily::Linear),
            "arx" => Ok(PrgFamily::Arx),
            "bbs" => Ok(PrgFamily::Bbs),
            other => Err(Error::Config(format!("unknown PRG family `{other}` (linear, arx, bbs)"))),
        }
    }
}

impl std::fmt::Display for PrgFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PrgFamily::Linear => "linear",
            PrgFamily::Arx => "arx",
            PrgFamily::Bbs => "bbs",
        })
    }
}

/// Everything needed to rebuild a generator bit for bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrgSpec {
    pub family: PrgFamily,
    pub seed_len: usize,
    pub out_len: usize,
    pub param_seed: u64,
}

impl PrgSpec {
    pub fn new(family: PrgFamily, seed_len: usize, out_len: usize, param_seed: u64) -> Result<Self> {
        let spec = Self {
            family,
            seed_len,
            out_len,
            param_seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seed_len == 0 || self.seed_len > MAX_SEED_LEN {
            return Err(Error::Config(format!(
                "seed_len {} not in [1, {MAX_SEED_LEN}]",
                self.seed_len
            )));
        }
        if self.out_len <= self.seed_len {
            return Err(Error::Config(format!(
                "out_len {} must exceed seed_len {}",
                self.out_len, self.seed_len
            )));
        }
        if self.out_len > MAX_LEN {
            return Err(Error::Cap {
                what: "out_len",
                value: self.out_len,
                cap: MAX_LEN,
            });
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Prg> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.param_seed);
        let params = match self.family {
            PrgFamily::Linear => {
                let (rows, constant) = sample_full_rank(&mut rng, self.seed_len, self.out_len);
                Params::Linear { rows, constant }
            }
            PrgFamily::Arx => Params::Arx { key: rng.random() },
            PrgFamily::Bbs => Params::Bbs {
                offset: rng.random_range(0..BBS_MODULUS),
            },
        };
        Ok(Prg {
            seed_len: self.seed_len,
            out_len: self.out_len,
            params,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: PrgSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Params {
    /// Output bit `i` is `parity(rows[i] & s) ^ constant[i]`.
    Linear { rows: Vec<u64>, constant: Vec<bool> },
    Arx { key: [u32; 4] },
    Bbs { offset: u64 },
}

/// Rank over GF(2) of vectors packed into `u64`.
pub fn gf2_rank(rows: &[u64]) -> usize {
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for &row in rows {
        let mut v = row;
        while v != 0 {
            let lead = 63 - v.leading_zeros() as usize;
            if basis[lead] == 0 {
                basis[lead] = v;
                rank += 1;
                break;
            }
            v ^= basis[lead];
        }
    }
    rank
}

/// Rejection-samples an `n x l` matrix of column rank `l` plus a constant.
fn sample_full_rank(rng: &mut ChaCha8Rng, seed_len: usize, out_len: usize) -> (Vec<u64>, Vec<bool>) {
    let mask = (1u64 << seed_len) - 1;
    loop {
        let rows: Vec<u64> = (0..out_len).map(|_| rng.random::<u64>() & mask).collect();
        let constant: Vec<bool> = (0..out_len).map(|_| rng.random()).collect();
        if gf2_rank(&rows) == seed_len {
            return (rows, constant);
        }
    }
}

fn arx_mix(s: &mut [u32; 4]) {
    s[0] = s[0].wrapping_add(s[1]);
    s[3] = (s[3] ^ s[0]).rotate_left(16);
    s[2] = s[2].wrapping_add(s[3]);
    s[1] = (s[1] ^ s[2]).rotate_left(12);
    s[0] = s[0].wrapping_add(s[1]);
    s[3] = (s[3] ^ s[0]).rotate_left(8);
    s[2] = s[2].wrapping_add(s[3]);
    s[1] = (s[1] ^ s[2]).rotate_left(7);
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A concrete generator built from a [`PrgSpec`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prg {
    seed_len: usize,
    out_len: usize,
    params: Params,
}

impl Prg {
    /// Affine generator with explicit rows (each an `l`-bit mask) and constant.
    pub fn linear(seed_len: usize, rows: Vec<u64>, constant: Vec<bool>) -> Result<Self> {
        let out_len = rows.len();
        PrgSpec::new(PrgFamily::Linear, seed_len, out_len, 0)?;
        if constant.len() != out_len || rows.iter().any(|&r| r >> seed_len != 0) {
            return Err(Error::Config("linear rows/constant do not match seed_len/out_len".into()));
        }
        Ok(Self {
            seed_len,
            out_len,
            params: Params::Linear { rows, constant },
        })
    }

    pub fn seed_len(&self) -> usize {
        self.seed_len
    }

    pub fn out_len(&self) -> usize {
        self.out_len
    }

    /// Output bits for the seed whose big-endian value is `seed`.
    pub fn output_bits(&self, seed: u64) -> Vec<bool> {
        let n = self.out_len;
        match &self.params {
            Params::Linear { rows, constant } => rows
                .iter()
                .zip(constant)
                .map(|(&r, &c)| ((r & seed).count_ones() & 1 == 1) ^ c)
                .collect(),
            Params::Arx { key } => {
                let mut out = Vec::with_capacity(n);
                let mut block = 0u32;
                while out.len() < n {
                    let input = [
                        (seed as u32) ^ key[0],
                        ((seed >> 32) as u32) ^ key[1],
                        key[2],
                        key[3] ^ block,
                    ];
                    let mut s = input;
                    for _ in 0..ARX_ROUNDS {
                        arx_mix(&mut s);
                    }
                    for (w, i) in s.iter().zip(input) {
                        let word = w.wrapping_add(i);
                        for bit in (0..32).rev() {
                            if out.len() < n {
                                out.push((word >> bit) & 1 == 1);
                            }
                        }
                    }
                    block += 1;
                }
                out
            }
            Params::Bbs { offset } => {
                let mut v = (seed + offset) % BBS_MODULUS;
                while v == 0 || gcd(v, BBS_MODULUS) != 1 {
                    v = (v + 1) % BBS_MODULUS;
                }
                let mut x = v * v % BBS_MODULUS;
                (0..n)
                    .map(|_| {
                        x = x * x % BBS_MODULUS;
                        x & 1 == 1
                    })
                    .collect()
            }
        }
    }

    /// Output rank for `n <= 64`.
    pub fn expand_rank(&self, seed: u64) -> u64 {
        debug_assert!(self.out_len <= 64);
        self.output_bits(seed).iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn expand(&self, seed: &BitString) -> Result<BitString> {
        if seed.len() != self.seed_len {
            return Err(Error::Length(format!(
                "seed has {} bits, generator expects {}",
                seed.len(),
                self.seed_len
            )));
        }
        BitString::new(self.output_bits(seed.rank()))
    }

    /// Output on a uniformly random seed.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> BitString {
        let seed = rng.random::<u64>() & ((1u64 << self.seed_len) - 1);
        BitString::new(self.output_bits(seed)).expect("out_len within limits")
    }

    /// `D(x) = |{s : G(s) = x}| / 2^l` by exhaustive seed enumeration,
    /// exact over the denominator `2^l`.
    pub fn image_distribution(&self) -> Result<ExplicitDistribution> {
        if self.seed_len > MAX_EXPLICIT_SEED_LEN {
            return Err(Error::Cap {
                what: "seed_len",
                value: self.seed_len,
                cap: MAX_EXPLICIT_SEED_LEN,
            });
        }
        if self.out_len > crate::dist::MAX_EXPLICIT_LEN {
            return Err(Error::Cap {
                what: "out_len",
                value: self.out_len,
                cap: crate::dist::MAX_EXPLICIT_LEN,
            });
        }
        let outputs: Vec<u32> = (0..1u64 << self.seed_len)
            .into_par_iter()
            .map(|s| self.expand_rank(s) as u32)
            .collect();
        let mut mass = vec![0u64; 1 << self.out_len];
        for r in outputs {
            mass[r as usize] += 1;
        }
        ExplicitDistribution::new(self.out_len, self.seed_len as u32, mass)
    }

    pub fn analyze(&self) -> Result<PrgReport> {
        let d = self.image_distribution()?;
        let u = ExplicitDistribution::uniform(self.out_len, self.out_len as u32)?;
        let image_size = d.support_size();
        Ok(PrgReport {
            injective: image_size == 1usize << self.seed_len,
            image_size,
            entropy_bits: entropy(&d),
            kl_from_uniform_bits: kl(&d, &u)?,
        })
    }
}

pub fn expand(spec: &PrgSpec, seed: &BitString) -> Result<BitString> {
    spec.build()?.expand(seed)
}

pub fn image_distribution(spec: &PrgSpec) -> Result<ExplicitDistribution> {
    spec.build()?.image_distribution()
}

pub fn analyze(spec: &PrgSpec) -> Result<PrgReport> {
    spec.build()?.analyze()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrgReport {
    pub injective: bool,
    pub image_size: usize,
    pub entropy_bits: f64,
    pub kl_from_uniform_bits: f64,
}
