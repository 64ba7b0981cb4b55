//! Exact dyadic probability masses and explicit distributions over `{0,1}^n`.
//!
//! An [`ExplicitDistribution`] stores one integer numerator per string, all
//! over the common denominator `2^K`. Every partial sum fits a `u64` and is
//! exactly representable as an `f64`, which is what lets CDF comparisons and
//! the codec use strict inequalities without rounding ties.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Largest `n` for which the full mass vector is materialized.
pub const MAX_EXPLICIT_LEN: usize = 24;
/// Largest supported `log2` denominator.
pub const MAX_LOG2_DENOM: u32 = 52;
/// Default `log2` denominator for quantized distributions.
pub const DEFAULT_LOG2_DENOM: u32 = 40;

/// `numerator / 2^log2_denom`, a probability in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicMass {
    numerator: u64,
    log2_denom: u32,
}

impl DyadicMass {
    pub fn new(numerator: u64, log2_denom: u32) -> Result<Self> {
        check_log2_denom(log2_denom)?;
        if numerator > 1u64 << log2_denom {
            return Err(Error::Parse {
                field: "numerator",
                message: format!("{numerator} exceeds 2^{log2_denom}"),
            });
        }
        Ok(Self {
            numerator,
            log2_denom,
        })
    }

    pub fn zero(log2_denom: u32) -> Self {
        Self {
            numerator: 0,
            log2_denom,
        }
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn log2_denom(&self) -> u32 {
        self.log2_denom
    }

    /// Exact for every valid value since `K <= 52`.
    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / (1u64 << self.log2_denom) as f64
    }

    /// Difference at a common denominator, `None` if negative.
    pub fn checked_sub(&self, other: &DyadicMass) -> Option<DyadicMass> {
        let k = self.log2_denom.max(other.log2_denom);
        let a = self.numerator << (k - self.log2_denom);
        let b = other.numerator << (k - other.log2_denom);
        a.checked_sub(b).map(|numerator| DyadicMass {
            numerator,
            log2_denom: k,
        })
    }

    /// Numerator rescaled to denominator `2^k` (requires `k >= log2_denom`).
    pub(crate) fn numerator_at(&self, k: u32) -> u64 {
        debug_assert!(k >= self.log2_denom);
        self.numerator << (k - self.log2_denom)
    }
}

fn check_log2_denom(k: u32) -> Result<()> {
    if k == 0 || k > MAX_LOG2_DENOM {
        return Err(Error::Parse {
            field: "log2_denom",
            message: format!("{k} not in [1, {MAX_LOG2_DENOM}]"),
        });
    }
    Ok(())
}

fn check_explicit_len(n: usize) -> Result<()> {
    if n == 0 || n > MAX_EXPLICIT_LEN {
        return Err(Error::Parse {
            field: "n",
            message: format!("{n} not in [1, {MAX_EXPLICIT_LEN}]"),
        });
    }
    Ok(())
}

/// Read access to a probability mass function over `{0,1}^n`, indexed by rank.
pub trait MassFunction {
    fn n(&self) -> usize;

    fn prob(&self, rank: usize) -> f64;

    fn log2_prob(&self, rank: usize) -> f64 {
        self.prob(rank).log2()
    }

    fn size(&self) -> usize {
        1usize << self.n()
    }
}

/// Exact PMF with integer masses over `2^K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct ExplicitDistribution {
    n: usize,
    log2_denom: u32,
    mass: Vec<u64>,
}

#[derive(Deserialize)]
struct RawDistribution {
    n: usize,
    log2_denom: u32,
    mass: Vec<u64>,
}

impl TryFrom<RawDistribution> for ExplicitDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        ExplicitDistribution::new(raw.n, raw.log2_denom, raw.mass)
    }
}

impl ExplicitDistribution {
    pub fn new(n: usize, log2_denom: u32, mass: Vec<u64>) -> Result<Self> {
        check_explicit_len(n)?;
        check_log2_denom(log2_denom)?;
        if mass.len() != 1usize << n {
            return Err(Error::Parse {
                field: "mass",
                message: format!("expected {} entries for n = {n}, found {}", 1usize << n, mass.len()),
            });
        }
        let total: u128 = mass.iter().map(|&m| m as u128).sum();
        let expected = 1u64 << log2_denom;
        if total != expected as u128 {
            return Err(Error::MassSumMismatch {
                expected,
                found: total,
            });
        }
        Ok(Self {
            n,
            log2_denom,
            mass,
        })
    }

    /// Uniform distribution; needs `K >= n`.
    pub fn uniform(n: usize, log2_denom: u32) -> Result<Self> {
        check_explicit_len(n)?;
        if (log2_denom as usize) < n {
            return Err(Error::Config(format!(
                "uniform over n = {n} needs log2_denom >= {n}, got {log2_denom}"
            )));
        }
        Self::new(n, log2_denom, vec![1u64 << (log2_denom as usize - n); 1 << n])
    }

    pub fn point(x: &BitString, log2_denom: u32) -> Result<Self> {
        check_explicit_len(x.len())?;
        check_log2_denom(log2_denom)?;
        let mut mass = vec![0; 1 << x.len()];
        mass[x.rank() as usize] = 1u64 << log2_denom;
        Self::new(x.len(), log2_denom, mass)
    }

    /// Largest-remainder quantization of real masses to denominator `2^K`.
    ///
    /// Masses are first normalized by their sum. Ties between equal remainders
    /// go to the lower rank, so the result is deterministic and sums to
    /// exactly `2^K`; every entry is within one unit of `2^K p[x] / sum(p)`.
    pub fn from_float_masses(p: &[f64], log2_denom: u32) -> Result<Self> {
        check_log2_denom(log2_denom)?;
        if p.len() < 2 || !p.len().is_power_of_two() {
            return Err(Error::Parse {
                field: "mass",
                message: format!("length {} is not 2^n with n >= 1", p.len()),
            });
        }
        let n = p.len().trailing_zeros() as usize;
        check_explicit_len(n)?;
        for (index, &value) in p.iter().enumerate() {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::NegativeProbability { index, value });
            }
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::NotNormalized(total));
        }

        let target = 1u64 << log2_denom;
        let scale = target as f64 / total;
        let mut mass = Vec::with_capacity(p.len());
        let mut remainder = Vec::with_capacity(p.len());
        for &value in p {
            let scaled = value * scale;
            let floor = scaled.floor();
            mass.push(floor as u64);
            remainder.push(scaled - floor);
        }

        let sum: u128 = mass.iter().map(|&m| m as u128).sum();
        let target128 = target as u128;
        if sum < target128 {
            let mut order: Vec<usize> = (0..p.len()).collect();
            order.sort_by(|&a, &b| remainder[b].total_cmp(&remainder[a]).then(a.cmp(&b)));
            let mut deficit = (target128 - sum) as usize;
            'outer: loop {
                for &i in &order {
                    if deficit == 0 {
                        break 'outer;
                    }
                    mass[i] += 1;
                    deficit -= 1;
                }
            }
        } else if sum > target128 {
            // Only reachable through rounding in `value * scale`.
            let mut order: Vec<usize> = (0..p.len()).filter(|&i| mass[i] > 0).collect();
            order.sort_by(|&a, &b| remainder[a].total_cmp(&remainder[b]).then(b.cmp(&a)));
            let mut excess = (sum - target128) as usize;
            while excess > 0 {
                for &i in &order {
                    if excess == 0 {
                        break;
                    }
                    if mass[i] > 0 {
                        mass[i] -= 1;
                        excess -= 1;
                    }
                }
            }
        }
        Self::new(n, log2_denom, mass)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn log2_denom(&self) -> u32 {
        self.log2_denom
    }

    pub fn masses(&self) -> &[u64] {
        &self.mass
    }

    pub fn mass(&self, rank: usize) -> u64 {
        self.mass[rank]
    }

    pub fn dyadic(&self, rank: usize) -> DyadicMass {
        DyadicMass {
            numerator: self.mass[rank],
            log2_denom: self.log2_denom,
        }
    }

    pub fn probs(&self) -> Vec<f64> {
        (0..self.mass.len()).map(|r| self.prob(r)).collect()
    }

    /// Inclusive prefix sums: entry `r` is the numerator of `F(x)` for rank `r`.
    pub fn cumulative(&self) -> Vec<u64> {
        self.mass
            .iter()
            .scan(0u64, |acc, &m| {
                *acc += m;
                Some(*acc)
            })
            .collect()
    }

    pub fn support_size(&self) -> usize {
        self.mass.iter().filter(|&&m| m > 0).count()
    }

    pub fn min_mass(&self) -> u64 {
        self.mass.iter().copied().min().unwrap_or(0)
    }

    /// Same distribution over a finer denominator `2^k`, `k >= K`.
    pub fn rescale(&self, log2_denom: u32) -> Result<Self> {
        check_log2_denom(log2_denom)?;
        if log2_denom < self.log2_denom {
            return Err(Error::Config(format!(
                "cannot rescale from 2^{} down to 2^{log2_denom} exactly",
                self.log2_denom
            )));
        }
        let shift = log2_denom - self.log2_denom;
        Self::new(self.n, log2_denom, self.mass.iter().map(|&m| m << shift).collect())
    }

    /// Canonical document, e.g. `{"n":2,"log2_denom":4,"mass":[4,4,4,4]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("distribution serializes")
    }

    /// Parses and validates a distribution document.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawDistribution = serde_json::from_str(text).map_err(|e| Error::Parse {
            field: "document",
            message: e.to_string(),
        })?;
        raw.try_into()
    }
}

impl MassFunction for ExplicitDistribution {
    fn n(&self) -> usize {
        self.n
    }

    fn prob(&self, rank: usize) -> f64 {
        self.mass[rank] as f64 / (1u64 << self.log2_denom) as f64
    }

    fn log2_prob(&self, rank: usize) -> f64 {
        let m = self.mass[rank];
        if m == 0 {
            f64::NEG_INFINITY
        } else {
            (m as f64).log2() - self.log2_denom as f64
        }
    }
}

/// Real-valued PMF over `{0,1}^n`, used where masses fall below `2^-52`
/// (trained bounded-logit models reach `(1 + 2^B)^-n`).
#[derive(Clone, Debug, PartialEq)]
pub struct FloatPmf {
    n: usize,
    probs: Vec<f64>,
}

impl FloatPmf {
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        check_explicit_len(n)?;
        if probs.len() != 1usize << n {
            return Err(Error::Length(format!(
                "expected {} probabilities for n = {n}, found {}",
                1usize << n,
                probs.len()
            )));
        }
        for (index, &value) in probs.iter().enumerate() {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::NegativeProbability { index, value });
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self { n, probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        check_explicit_len(n)?;
        Ok(Self {
            n,
            probs: vec![(-(n as f64)).exp2(); 1 << n],
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn min_prob(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl From<&ExplicitDistribution> for FloatPmf {
    fn from(d: &ExplicitDistribution) -> Self {
        FloatPmf {
            n: d.n(),
            probs: d.probs(),
        }
    }
}

impl MassFunction for FloatPmf {
    fn n(&self) -> usize {
        self.n
    }

    fn prob(&self, rank: usize) -> f64 {
        self.probs[rank]
    }
}
