//! Desk-scale check of the learning-on-pseudorandom-data argument: train a
//! bounded-logit model on a toy PRG's output, build the distinguisher
//! `f_mu(x) = log2(1/mu(x)) - n`, and verify the identity chain
//!
//! ```text
//! KL(U||mu) = (KL(D||mu) - KL(D||U)) + M (E_U[A] - E_D[A])
//! ```
//!
//! where `A` accepts `x` with probability `(f_mu(x) + n) / M` and
//! `M = n log2(1 + 2^B)` bounds the model's max-entropy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::dist::{ExplicitDistribution, FloatPmf, MassFunction, MAX_EXPLICIT_LEN};
use crate::error::{Error, Result};
use crate::info::{kl, smooth_pmf, statistical_distance, CompensatedSum, Estimate};
use crate::learn::{fit, Family, LogitModel, TrainConfig, TrainingData};
use crate::prg::{Prg, PrgFamily, PrgSpec, MAX_EXPLICIT_SEED_LEN};

/// Slack on `f_mu + n <= M` for rounding in the log-mass sums.
const MAX_ENTROPY_SLACK: f64 = 1e-9;
/// `gap` at or below this counts as the premise holding.
pub const PREMISE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentMode {
    /// Exhaustive enumeration over `{0,1}^n`.
    Exact,
    /// Sampled estimates with Hoeffding intervals.
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub prg: PrgSpec,
    pub family: Family,
    /// Logit bound; overrides `train.B`.
    #[serde(rename = "B")]
    pub bound: f64,
    pub train: TrainConfig,
    pub trials: usize,
    pub mode: ExperimentMode,
    /// Draws per expectation (and training set size) in Monte Carlo mode.
    pub samples: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            prg: PrgSpec {
                family: PrgFamily::Linear,
                seed_len: 8,
                out_len: 16,
                param_seed: 0x5eed,
            },
            family: Family::Markov { order: 3 },
            bound: 8.0,
            train: TrainConfig::default(),
            trials: 1,
            mode: ExperimentMode::Exact,
            samples: 10_000,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.prg.validate()?;
        self.family.validate(self.prg.out_len)?;
        self.train_config().validate()?;
        if self.mode == ExperimentMode::Exact {
            if self.prg.seed_len > MAX_EXPLICIT_SEED_LEN {
                return Err(Error::Cap {
                    what: "exact-mode seed_len",
                    value: self.prg.seed_len,
                    cap: MAX_EXPLICIT_SEED_LEN,
                });
            }
            if self.prg.out_len > MAX_EXPLICIT_LEN {
                return Err(Error::Cap {
                    what: "exact-mode n",
                    value: self.prg.out_len,
                    cap: MAX_EXPLICIT_LEN,
                });
            }
        } else if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            bound: self.bound,
            ..self.train
        }
    }

    /// Configuration for trial `t`: the generator parameters and training
    /// seed are offset by `t`, so trial 0 is the configuration itself.
    pub fn trial(&self, t: usize) -> ExperimentConfig {
        let mut cfg = self.clone();
        cfg.prg.param_seed = self.prg.param_seed.wrapping_add(t as u64);
        cfg.train.rng_seed = self.train.rng_seed.wrapping_add(t as u64);
        cfg
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Outcome of one run. In Monte Carlo mode the quantities that need the
/// exact `D` are absent and `kl_U_mu`, `gap` and `advantage` are estimates.
#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub kl_D_mu: Option<f64>,
    pub kl_D_U: Option<f64>,
    /// `kl_D_mu - kl_D_U`.
    pub gap: f64,
    pub kl_U_mu: f64,
    pub sd_U_mu: Option<f64>,
    pub advantage: f64,
    /// Max-entropy bound `n log2(1 + 2^B)`.
    pub M: f64,
    /// `|kl_U_mu - gap - M (E_U[A] - E_D[A])|`.
    pub identity_residual: Option<f64>,
    /// `|E_D[f_mu] - gap|`.
    pub f_mu_residual: Option<f64>,
    pub premise_holds: bool,
    pub smoothed_kl_U_mu: Option<f64>,
    pub smoothed_sd_U_mu: Option<f64>,
    /// `sd(mu, mu')` after smoothing.
    pub smoothing_sd: Option<f64>,
    pub intervals: Option<MonteCarloIntervals>,
}

/// Hoeffding 99% intervals from a Monte Carlo run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloIntervals {
    /// Estimate of `E_U[f_mu] = KL(U||mu)`.
    pub eu_f: Estimate,
    /// Estimate of `E_D[f_mu] = KL(D||mu) - KL(D||U)`.
    pub ed_f: Estimate,
}

/// `log2(1/mu(x)) - n` from a log-mass; errors on zero mass.
pub fn f_mu_from_log2(log2_mass: f64, n: usize) -> Result<f64> {
    if log2_mass == f64::NEG_INFINITY {
        return Err(Error::FMuZeroMass(format!("log2 mass {log2_mass}")));
    }
    Ok(-log2_mass - n as f64)
}

/// `f_mu(x)` for the string of rank `rank`.
pub fn f_mu<M: MassFunction + ?Sized>(mu: &M, rank: usize) -> Result<f64> {
    let lm = mu.log2_prob(rank);
    if lm == f64::NEG_INFINITY {
        return Err(Error::FMuZeroMass(
            BitString::from_rank(rank as u64, mu.n())
                .map(|x| x.to_string())
                .unwrap_or_else(|_| rank.to_string()),
        ));
    }
    Ok(-lm - mu.n() as f64)
}

/// Exact acceptance statistics of the distinguisher `A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Distinguisher {
    pub eu_f: f64,
    pub ed_f: f64,
    pub eu_a: f64,
    pub ed_a: f64,
    /// `|E_D[A] - E_U[A]|`.
    pub advantage: f64,
    /// `E_U[f_mu] - E_D[f_mu] = M (E_U[A] - E_D[A])`.
    pub signed_diff: f64,
}

/// Exhaustive `E_U`, `E_D` of `f_mu` and of `A` with normalizer `m_bound`.
/// Fails if any `f_mu(x) + n` exceeds `m_bound`.
pub fn distinguisher_advantage<M: MassFunction + ?Sized>(
    mu: &M,
    d: &ExplicitDistribution,
    m_bound: f64,
) -> Result<Distinguisher> {
    let n = mu.n();
    if d.n() != n {
        return Err(Error::DimensionMismatch(d.n(), n));
    }
    if !(m_bound > 0.0) {
        return Err(Error::Config(format!("normalizer M must be positive, got {m_bound}")));
    }
    let u = (-(n as f64)).exp2();
    let (mut eu_f, mut ed_f) = (CompensatedSum::default(), CompensatedSum::default());
    for r in 0..mu.size() {
        let f = f_mu(mu, r)?;
        let code_len = f + n as f64;
        if code_len > m_bound * (1.0 + MAX_ENTROPY_SLACK) {
            return Err(Error::MaxEntropyViolated {
                value: code_len,
                bound: m_bound,
            });
        }
        eu_f.add(u * f);
        let p = d.prob(r);
        if p > 0.0 {
            ed_f.add(p * f);
        }
    }
    let (eu_f, ed_f) = (eu_f.value(), ed_f.value());
    // A(x) = (f + n) / M, so E[A] = (E[f] + n) / M
    let eu_a = (eu_f + n as f64) / m_bound;
    let ed_a = (ed_f + n as f64) / m_bound;
    Ok(Distinguisher {
        eu_f,
        ed_f,
        eu_a,
        ed_a,
        advantage: (ed_a - eu_a).abs().min(1.0),
        signed_diff: m_bound * (eu_a - ed_a),
    })
}

/// Trains the configured family on the generator's output.
pub fn train_model(cfg: &ExperimentConfig, prg: &Prg, d: Option<&ExplicitDistribution>) -> Result<LogitModel> {
    let n = cfg.prg.out_len;
    let init = LogitModel::new(n, cfg.family, cfg.bound)?;
    let train = cfg.train_config();
    if train.steps == 0 {
        return Ok(init);
    }
    let outcome = match d {
        Some(d) => fit(&init, &TrainingData::Exact(d), &train)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(train.rng_seed);
            let samples: Vec<BitString> = (0..cfg.samples).map(|_| prg.sample(&mut rng)).collect();
            fit(&init, &TrainingData::Samples(&samples), &train)?
        }
    };
    Ok(outcome.model)
}

/// Exhaustive quantities for a fixed model against `D`.
pub fn evaluate_exact(model: &LogitModel, d: &ExplicitDistribution) -> Result<ExperimentResult> {
    let n = model.n();
    let mu = model.pmf()?;
    let u = FloatPmf::uniform(n)?;
    let m_bound = model.max_entropy_bound();
    let kl_d_mu = kl(d, &mu)?;
    let kl_d_u = kl(d, &u)?;
    let gap = kl_d_mu - kl_d_u;
    let kl_u_mu = kl(&u, &mu)?;
    let sd_u_mu = statistical_distance(&u, &mu)?;
    let a = distinguisher_advantage(&mu, d, m_bound)?;
    Ok(ExperimentResult {
        kl_D_mu: Some(kl_d_mu),
        kl_D_U: Some(kl_d_u),
        gap,
        kl_U_mu: kl_u_mu,
        sd_U_mu: Some(sd_u_mu),
        advantage: a.advantage,
        M: m_bound,
        identity_residual: Some((kl_u_mu - gap - a.signed_diff).abs()),
        f_mu_residual: Some((a.ed_f - gap).abs()),
        premise_holds: gap <= PREMISE_TOLERANCE,
        smoothed_kl_U_mu: None,
        smoothed_sd_U_mu: None,
        smoothing_sd: None,
        intervals: None,
    })
}

/// Sampled estimates of `E_U[f_mu]` and `E_D[f_mu]` with `m` draws each.
pub fn evaluate_monte_carlo(model: &LogitModel, prg: &Prg, m: usize, seed: u64) -> Result<MonteCarloIntervals> {
    let n = model.n();
    if prg.out_len() != n {
        return Err(Error::DimensionMismatch(prg.out_len(), n));
    }
    let (lo, hi) = (-(n as f64), model.max_entropy_bound() - n as f64);
    let f = |x: &BitString| -> Result<f64> {
        let v = f_mu_from_log2(model.log2_mass(x)?, n)?;
        // rounding can push a saturated string a hair past the bound
        Ok(v.clamp(lo, hi))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eu = Vec::with_capacity(m);
    for _ in 0..m {
        let x = BitString::new((0..n).map(|_| rng.random::<bool>()).collect())?;
        eu.push(f(&x)?);
    }
    let mut ed = Vec::with_capacity(m);
    for _ in 0..m {
        ed.push(f(&prg.sample(&mut rng))?);
    }
    Ok(MonteCarloIntervals {
        eu_f: Estimate::from_values(eu, lo, hi)?,
        ed_f: Estimate::from_values(ed, lo, hi)?,
    })
}

fn monte_carlo_result(model: &LogitModel, intervals: MonteCarloIntervals) -> ExperimentResult {
    let m_bound = model.max_entropy_bound();
    let gap = intervals.ed_f.mean;
    ExperimentResult {
        kl_D_mu: None,
        kl_D_U: None,
        gap,
        kl_U_mu: intervals.eu_f.mean,
        sd_U_mu: None,
        advantage: ((intervals.eu_f.mean - intervals.ed_f.mean) / m_bound).abs().min(1.0),
        M: m_bound,
        identity_residual: None,
        f_mu_residual: None,
        premise_holds: gap <= PREMISE_TOLERANCE,
        smoothed_kl_U_mu: None,
        smoothed_sd_U_mu: None,
        smoothing_sd: None,
        intervals: Some(intervals),
    }
}

/// Build `D`, train `mu`, and measure every quantity of the identity chain.
pub fn run_theorem1(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    Ok(run_with_model(cfg)?.0)
}

fn run_with_model(cfg: &ExperimentConfig) -> Result<(ExperimentResult, LogitModel)> {
    cfg.validate()?;
    let prg = cfg.prg.build()?;
    match cfg.mode {
        ExperimentMode::Exact => {
            let d = prg.image_distribution()?;
            let model = train_model(cfg, &prg, Some(&d))?;
            Ok((evaluate_exact(&model, &d)?, model))
        }
        ExperimentMode::MonteCarlo => {
            let model = train_model(cfg, &prg, None)?;
            // evaluation draws are independent of the training draws
            let intervals = evaluate_monte_carlo(&model, &prg, cfg.samples, cfg.train.rng_seed ^ 0x9e37_79b9_7f4a_7c15)?;
            Ok((monte_carlo_result(&model, intervals), model))
        }
    }
}

/// As [`run_theorem1`], then smooth `mu` and measure `mu'` against `U`.
/// Requires exact mode.
pub fn run_corollary(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    if cfg.mode != ExperimentMode::Exact {
        return Err(Error::Config("corollary run needs exact mode".into()));
    }
    let (mut result, model) = run_with_model(cfg)?;
    let n = model.n();
    let mu = model.pmf()?;
    let smoothed = smooth_pmf(&mu)?;
    let u = FloatPmf::uniform(n)?;
    result.smoothed_kl_U_mu = Some(kl(&u, &smoothed)?);
    result.smoothed_sd_U_mu = Some(statistical_distance(&u, &smoothed)?);
    result.smoothing_sd = Some(statistical_distance(&mu, &smoothed)?);
    Ok(result)
}

/// Runs every trial of `cfg`, in parallel.
pub fn run_trials(cfg: &ExperimentConfig) -> Vec<Result<ExperimentResult>> {
    (0..cfg.trials).into_par_iter().map(|t| run_theorem1(&cfg.trial(t))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    SeedLen,
    Order,
    #[serde(rename = "B")]
    Bound,
    N,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seed_len" => Ok(SweepAxis::SeedLen),
            "order" => Ok(SweepAxis::Order),
            "B" => Ok(SweepAxis::Bound),
            "n" => Ok(SweepAxis::N),
            other => Err(Error::Config(format!("unknown sweep axis `{other}` (seed_len, order, B, n)"))),
        }
    }
}

impl SweepAxis {
    /// `base` with the axis set to `value`.
    pub fn apply(&self, base: &ExperimentConfig, value: f64) -> Result<ExperimentConfig> {
        let mut cfg = base.clone();
        let int = || -> Result<usize> {
            if value >= 0.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(Error::Config(format!("axis value {value} must be a non-negative integer")))
            }
        };
        match self {
            SweepAxis::SeedLen => cfg.prg.seed_len = int()?,
            SweepAxis::N => cfg.prg.out_len = int()?,
            SweepAxis::Bound => cfg.bound = value,
            SweepAxis::Order => cfg.family = Family::Markov { order: int()? },
        }
        Ok(cfg)
    }
}

/// One CSV row; the column order is fixed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    /// Empty for plain trial runs.
    pub axis_value: Option<f64>,
    pub trial: usize,
    #[serde(rename = "kl_D_mu")]
    pub kl_d_mu: Option<f64>,
    #[serde(rename = "kl_D_U")]
    pub kl_d_u: Option<f64>,
    pub gap: Option<f64>,
    #[serde(rename = "kl_U_mu")]
    pub kl_u_mu: Option<f64>,
    #[serde(rename = "sd_U_mu")]
    pub sd_u_mu: Option<f64>,
    pub advantage: Option<f64>,
    #[serde(rename = "M")]
    pub m: Option<f64>,
    pub identity_residual: Option<f64>,
    pub premise_holds: Option<bool>,
    pub error: String,
}

pub const SWEEP_HEADER: &str =
    "axis_value,trial,kl_D_mu,kl_D_U,gap,kl_U_mu,sd_U_mu,advantage,M,identity_residual,premise_holds,error";

impl SweepRow {
    fn new(axis_value: Option<f64>, trial: usize, outcome: Result<ExperimentResult>) -> Self {
        match outcome {
            Ok(r) => SweepRow {
                axis_value,
                trial,
                kl_d_mu: r.kl_D_mu,
                kl_d_u: r.kl_D_U,
                gap: Some(r.gap),
                kl_u_mu: Some(r.kl_U_mu),
                sd_u_mu: r.sd_U_mu,
                advantage: Some(r.advantage),
                m: Some(r.M),
                identity_residual: r.identity_residual,
                premise_holds: Some(r.premise_holds),
                error: String::new(),
            },
            Err(e) => SweepRow {
                axis_value,
                trial,
                kl_d_mu: None,
                kl_d_u: None,
                gap: None,
                kl_u_mu: None,
                sd_u_mu: None,
                advantage: None,
                m: None,
                identity_residual: None,
                premise_holds: None,
                error: e.to_string(),
            },
        }
    }
}

/// One row per `(value, trial)`, sorted; failures land in the error column.
pub fn sweep(base: &ExperimentConfig, axis: SweepAxis, values: &[f64]) -> Vec<SweepRow> {
    let points: Vec<(f64, usize)> = values
        .iter()
        .flat_map(|&v| (0..base.trials).map(move |t| (v, t)))
        .collect();
    let mut rows: Vec<SweepRow> = points
        .into_par_iter()
        .map(|(v, t)| {
            let outcome = axis.apply(base, v).and_then(|cfg| run_theorem1(&cfg.trial(t)));
            SweepRow::new(Some(v), t, outcome)
        })
        .collect();
    rows.sort_by(|a, b| {
        let key = |r: &SweepRow| r.axis_value.unwrap_or(f64::NEG_INFINITY);
        key(a).total_cmp(&key(b)).then(a.trial.cmp(&b.trial))
    });
    rows
}

/// One row per trial of `cfg`, without an axis value.
pub fn trial_rows(cfg: &ExperimentConfig) -> Vec<SweepRow> {
    run_trials(cfg)
        .into_iter()
        .enumerate()
        .map(|(t, outcome)| SweepRow::new(None, t, outcome))
        .collect()
}

pub fn rows_to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(SWEEP_HEADER.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn rows_to_json(rows: &[SweepRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(family: PrgFamily, l: usize, n: usize, model: Family, steps: usize) -> ExperimentConfig {
        ExperimentConfig {
            prg: PrgSpec::new(family, l, n, 0x5eed).unwrap(),
            family: model,
            train: TrainConfig {
                steps,
                ..TrainConfig::default()
            },
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn f_mu_examples() {
        let u = FloatPmf::uniform(4).unwrap();
        assert!((0..16).all(|r| f_mu(&u, r).unwrap() == 0.0));
        assert_eq!(f_mu_from_log2(-8.0, 4).unwrap(), 4.0);
        let d = ExplicitDistribution::point(&"0000".parse().unwrap(), 4).unwrap();
        assert!(matches!(f_mu(&d, 3), Err(Error::FMuZeroMass(_))));
    }

    #[test]
    fn frozen_uniform_model_vanishes() {
        for family in [PrgFamily::Linear, PrgFamily::Arx, PrgFamily::Bbs] {
            let r = run_theorem1(&cfg(family, 6, 12, Family::Markov { order: 2 }, 0)).unwrap();
            assert_eq!(r.gap, 0.0);
            assert_eq!(r.kl_U_mu, 0.0);
            assert_eq!(r.identity_residual, Some(0.0));
            assert_eq!(r.advantage, 0.0);
        }
    }

    #[test]
    fn identity_chain_holds_after_training() {
        let r = run_theorem1(&cfg(PrgFamily::Arx, 6, 10, Family::FullPrefix, 300)).unwrap();
        assert!(r.identity_residual.unwrap() <= 1e-6, "{r:?}");
        assert!(r.f_mu_residual.unwrap() <= 1e-6, "{r:?}");
        assert!(r.premise_holds);
        assert!(r.kl_U_mu <= r.M * r.advantage + 1e-6);
    }

    #[test]
    fn max_entropy_contract_is_enforced() {
        let d = ExplicitDistribution::uniform(3, 3).unwrap();
        let skewed = FloatPmf::new(3, vec![0.93, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01]).unwrap();
        assert!(matches!(
            distinguisher_advantage(&skewed, &d, 3.0),
            Err(Error::MaxEntropyViolated { .. })
        ));
        assert!(distinguisher_advantage(&skewed, &d, 7.0).is_ok());
    }

    #[test]
    fn corollary_on_uniform_model() {
        let r = run_corollary(&cfg(PrgFamily::Linear, 4, 8, Family::Markov { order: 1 }, 0)).unwrap();
        assert_eq!(r.smoothed_kl_U_mu, Some(0.0));
        assert!(r.smoothing_sd.unwrap() <= 1e-15);
    }

    #[test]
    fn empty_sweep_has_header_only() {
        let rows = sweep(&ExperimentConfig::default(), SweepAxis::SeedLen, &[]);
        assert_eq!(rows_to_csv(&rows).unwrap(), format!("{SWEEP_HEADER}\n"));
    }

    #[test]
    fn sweep_records_errors_and_continues() {
        let base = cfg(PrgFamily::Linear, 4, 8, Family::Markov { order: 1 }, 0);
        let rows = sweep(&base, SweepAxis::SeedLen, &[9.0, 4.0]);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].axis_value, Some(4.0));
        assert!(rows[0].error.is_empty());
        assert!(rows[1].error.contains("out_len"));
        let csv = rows_to_csv(&rows).unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(2).unwrap().starts_with("9.0,0,,,"));
    }

    #[test]
    fn config_document_round_trip() {
        let c = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
        let partial = ExperimentConfig::from_json(r#"{"family":"full_prefix","prg":{"family":"arx","seed_len":4,"out_len":8,"param_seed":1}}"#).unwrap();
        assert_eq!(partial.family, Family::FullPrefix);
        assert_eq!(partial.bound, 8.0);
        assert!(ExperimentConfig::from_json(r#"{"famly":"full_prefix"}"#).is_err());
    }

    #[test]
    fn monte_carlo_interval_covers_exact_values() {
        let c = cfg(PrgFamily::Linear, 6, 10, Family::Markov { order: 2 }, 200);
        let prg = c.prg.build().unwrap();
        let d = prg.image_distribution().unwrap();
        let model = train_model(&c, &prg, Some(&d)).unwrap();
        let exact = evaluate_exact(&model, &d).unwrap();
        let mc = evaluate_monte_carlo(&model, &prg, 4000, 3).unwrap();
        assert!(mc.eu_f.contains(exact.kl_U_mu));
        assert!(mc.ed_f.contains(exact.gap));
    }
}
