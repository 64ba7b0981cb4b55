//! Entropy, divergences, statistical distance and smoothing, in bits.
//!
//! All sums over `2^n` terms use compensated (Neumaier) summation.

use serde::{Serialize, Serializer};

use crate::bits::{BitString, Prefix};
use crate::dist::{ExplicitDistribution, FloatPmf, MassFunction, MAX_LOG2_DENOM};
use crate::error::{Error, Result};
use crate::repr::{NextBitPredictor, SamplerHandle};

/// Failure probability of the reported Monte Carlo intervals.
pub const HOEFFDING_DELTA: f64 = 0.01;

/// Neumaier compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for v in iter {
            s.add(v);
        }
        s
    }
}

fn same_n<A: MassFunction + ?Sized, B: MassFunction + ?Sized>(a: &A, b: &B) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(a.n(), b.n()));
    }
    Ok(())
}

/// `H(mu) = sum mu(x) log2(1/mu(x))` with `0 log 0 = 0`.
pub fn entropy<M: MassFunction + ?Sized>(d: &M) -> f64 {
    let s: CompensatedSum = (0..d.size())
        .filter(|&r| d.prob(r) > 0.0)
        .map(|r| -d.prob(r) * d.log2_prob(r))
        .collect();
    s.value().max(0.0)
}

/// `max_x log2(1/mu(x))`, infinite if some mass is zero.
pub fn max_entropy<M: MassFunction + ?Sized>(d: &M) -> f64 {
    (0..d.size()).map(|r| -d.log2_prob(r)).fold(0.0, f64::max)
}

/// `KL(t || m)` in bits; `+inf` when `t` puts mass where `m` has none.
pub fn kl<T: MassFunction + ?Sized, M: MassFunction + ?Sized>(t: &T, m: &M) -> Result<f64> {
    same_n(t, m)?;
    let mut s = CompensatedSum::default();
    for r in 0..t.size() {
        let tp = t.prob(r);
        if tp == 0.0 {
            continue;
        }
        if m.prob(r) == 0.0 {
            return Ok(f64::INFINITY);
        }
        s.add(tp * (t.log2_prob(r) - m.log2_prob(r)));
    }
    Ok(s.value().max(0.0))
}

/// `E_t[log2(1/m(x))]`.
pub fn cross_entropy<T: MassFunction + ?Sized, M: MassFunction + ?Sized>(t: &T, m: &M) -> Result<f64> {
    same_n(t, m)?;
    let mut s = CompensatedSum::default();
    for r in 0..t.size() {
        let tp = t.prob(r);
        if tp == 0.0 {
            continue;
        }
        if m.prob(r) == 0.0 {
            return Ok(f64::INFINITY);
        }
        s.add(-tp * m.log2_prob(r));
    }
    Ok(s.value())
}

/// `1/2 sum |t(x) - m(x)|`.
pub fn statistical_distance<T: MassFunction + ?Sized, M: MassFunction + ?Sized>(t: &T, m: &M) -> Result<f64> {
    same_n(t, m)?;
    let s: CompensatedSum = (0..t.size()).map(|r| (t.prob(r) - m.prob(r)).abs()).collect();
    Ok((0.5 * s.value()).clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PinskerCheck {
    pub sd: f64,
    pub kl: f64,
    /// `sqrt(kl / 2) - sd`, non-negative by Pinsker's inequality.
    pub slack: f64,
}

pub fn pinsker_check<T: MassFunction + ?Sized, M: MassFunction + ?Sized>(t: &T, m: &M) -> Result<PinskerCheck> {
    let sd = statistical_distance(t, m)?;
    let kl = kl(t, m)?;
    Ok(PinskerCheck {
        sd,
        kl,
        slack: (kl / 2.0).sqrt() - sd,
    })
}

/// `mu'(x) = (1 - 2^-n) mu(x) + 2^-2n`, computed exactly.
///
/// The result lives over `2^(K+n)`: its numerators are
/// `mass * (2^n - 1) + 2^(K-n)`. Requires `n <= K <= 52 - n`.
pub fn smooth(m: &ExplicitDistribution) -> Result<ExplicitDistribution> {
    let n = m.n();
    let k = m.log2_denom();
    if (k as usize) < n || k as usize + n > MAX_LOG2_DENOM as usize {
        return Err(Error::SmoothPrecision {
            n,
            log2_denom: k,
            min: n as u32,
            max: MAX_LOG2_DENOM.saturating_sub(n as u32),
        });
    }
    let scale = (1u64 << n) - 1;
    let floor = 1u64 << (k as usize - n);
    let mass = m.masses().iter().map(|&x| x * scale + floor).collect();
    ExplicitDistribution::new(n, k + n as u32, mass)
}

/// Real-valued form of [`smooth`].
pub fn smooth_pmf<M: MassFunction + ?Sized>(m: &M) -> Result<FloatPmf> {
    let n = m.n();
    let keep = 1.0 - (-(n as f64)).exp2();
    let floor = (-2.0 * n as f64).exp2();
    FloatPmf::new(n, (0..m.size()).map(|r| keep * m.prob(r) + floor).collect())
}

/// `log2(1 / (1 - 2^-n))`, the KL cost of smoothing.
pub fn smoothing_kl_cost(n: usize) -> f64 {
    -(-(-(n as f64)).exp2()).ln_1p() / std::f64::consts::LN_2
}

/// Sample mean with a two-sided Hoeffding interval at level `1 - HOEFFDING_DELTA`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: f64,
}

impl Estimate {
    pub fn contains(&self, value: f64) -> bool {
        (value - self.mean).abs() <= self.half_width
    }

    /// Mean of `values`, each of which must lie in `[lo, hi]`.
    pub fn from_values<I: IntoIterator<Item = f64>>(values: I, lo: f64, hi: f64) -> Result<Estimate> {
        let mut s = CompensatedSum::default();
        let mut count = 0usize;
        for value in values {
            if !(lo..=hi).contains(&value) {
                return Err(Error::OutOfRange { value, lo, hi });
            }
            s.add(value);
            count += 1;
        }
        if count == 0 {
            return Err(Error::Config("expectation estimate needs at least one sample".into()));
        }
        Ok(Estimate {
            mean: s.value() / count as f64,
            half_width: hoeffding_half_width(hi - lo, count),
        })
    }
}

/// `range * sqrt(ln(2 / delta) / (2 m))`.
pub fn hoeffding_half_width(range: f64, m: usize) -> f64 {
    range * ((2.0 / HOEFFDING_DELTA).ln() / (2.0 * m as f64)).sqrt()
}

/// Monte Carlo estimate of `E[g(x)]` over `m` draws from the sampler.
pub fn estimate_expectation<P, G>(
    mut g: G,
    range: (f64, f64),
    sampler: &mut SamplerHandle<P>,
    m: usize,
) -> Result<Estimate>
where
    P: NextBitPredictor,
    G: FnMut(&BitString) -> Result<f64>,
{
    let (lo, hi) = range;
    if !(lo <= hi) {
        return Err(Error::Config(format!("empty range [{lo}, {hi}]")));
    }
    let root = Prefix::empty(sampler.n());
    let mut values = Vec::with_capacity(m);
    for _ in 0..m {
        let x = sampler.sample(&root)?;
        values.push(g(&x)?);
    }
    Estimate::from_values(values, lo, hi)
}

fn finite_or_inf<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// Summary of a distribution `t` measured against a reference `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InfoReport {
    pub entropy_bits: f64,
    #[serde(serialize_with = "finite_or_inf")]
    pub max_entropy_bits: f64,
    #[serde(serialize_with = "finite_or_inf")]
    pub kl_bits: f64,
    pub sd: f64,
    #[serde(serialize_with = "finite_or_inf")]
    pub cross_entropy_bits: f64,
    #[serde(serialize_with = "finite_or_inf")]
    pub pinsker_slack: f64,
}

impl InfoReport {
    pub fn compute<T: MassFunction + ?Sized, M: MassFunction + ?Sized>(t: &T, m: &M) -> Result<Self> {
        let p = pinsker_check(t, m)?;
        Ok(InfoReport {
            entropy_bits: entropy(t),
            max_entropy_bits: max_entropy(t),
            kl_bits: p.kl,
            sd: p.sd,
            cross_entropy_bits: cross_entropy(t, m)?,
            pinsker_slack: p.slack,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}
