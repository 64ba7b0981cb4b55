//! Bounded-logit next-bit models trained by projected gradient descent on
//! cross-entropy, and MDL model selection.
//!
//! A model assigns one base-2 logit `theta[c]` to each context cell `c`; the
//! probability that the next bit is 1 is `sigma(theta) = 1 / (1 + 2^-theta)`.
//! Logits are kept in `[-B, B]`, so every string has mass at least
//! `(1 + 2^B)^-n`, i.e. max-entropy at most `n log2(1 + 2^B)`.
//!
//! Cross-entropy only depends on the data through per-cell weights: how much
//! data mass visits cell `c` followed by a 1 (`ones[c]`) or a 0 (`zeros[c]`).
//! With base-2 logits the `ln 2` factors cancel and the gradient is
//! `(ones + zeros) sigma(theta) - ones` per cell.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{BitString, Prefix};
use crate::dist::{ExplicitDistribution, FloatPmf, MassFunction, MAX_EXPLICIT_LEN};
use crate::error::{Error, Result};
use crate::repr::NextBitPredictor;

/// Largest `n` for the full-prefix family.
pub const MAX_FULL_PREFIX_LEN: usize = 16;
/// Largest Markov order.
pub const MAX_ORDER: usize = 20;
/// Consecutive loss increases that abort training.
pub const DIVERGENCE_WINDOW: usize = 50;
/// Default bits per parameter in MDL scores.
pub const DEFAULT_PARAM_BITS: f64 = 16.0;

const LN_2: f64 = std::f64::consts::LN_2;

/// `log2(1 + 2^t)`, accurate for large `|t|`.
pub fn softplus2(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp2().ln_1p() / LN_2
    } else {
        t.exp2().ln_1p() / LN_2
    }
}

/// `1 / (1 + 2^-z)`.
pub fn sigma(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp2())
}

/// Context map from `(position, prefix)` to a logit cell. Serialized by
/// name: `full_prefix` or `markov_<k>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// One cell per prefix.
    FullPrefix,
    /// One cell per position and the last `min(i, order)` bits.
    Markov { order: usize },
}

impl Family {
    pub fn validate(&self, n: usize) -> Result<()> {
        if n == 0 || n > crate::bits::MAX_LEN {
            return Err(Error::Config(format!("model length {n} out of range")));
        }
        match *self {
            Family::FullPrefix if n > MAX_FULL_PREFIX_LEN => Err(Error::Cap {
                what: "full_prefix n",
                value: n,
                cap: MAX_FULL_PREFIX_LEN,
            }),
            Family::Markov { order } if order > MAX_ORDER => Err(Error::Cap {
                what: "markov order",
                value: order,
                cap: MAX_ORDER,
            }),
            _ => Ok(()),
        }
    }

    /// Number of logits for length `n`.
    pub fn num_cells(&self, n: usize) -> usize {
        match *self {
            Family::FullPrefix => (1usize << n) - 1,
            Family::Markov { order } => (0..n).map(|i| 1usize << i.min(order)).sum(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::FullPrefix => f.write_str("full_prefix"),
            Family::Markov { order } => write!(f, "markov_{order}"),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    /// `full_prefix` or `markov_<k>`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "full_prefix" {
            return Ok(Family::FullPrefix);
        }
        s.strip_prefix("markov_")
            .and_then(|k| k.parse().ok())
            .map(|order| Family::Markov { order })
            .ok_or_else(|| Error::Config(format!("unknown model family `{s}` (full_prefix, markov_<k>)")))
    }
}

impl Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        name.parse().map_err(serde::de::Error::custom)
    }
}

/// Bounded-logit conditional-probability model.
#[derive(Clone, Debug, PartialEq)]
pub struct LogitModel {
    n: usize,
    family: Family,
    bound: f64,
    theta: Vec<f64>,
    /// First cell of each position (Markov family).
    offsets: Vec<usize>,
}

impl LogitModel {
    /// All-zero logits, i.e. the uniform distribution.
    pub fn new(n: usize, family: Family, bound: f64) -> Result<Self> {
        family.validate(n)?;
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::Config(format!("logit bound must be positive and finite, got {bound}")));
        }
        let offsets = match family {
            Family::FullPrefix => Vec::new(),
            Family::Markov { order } => (0..n)
                .scan(0usize, |acc, i| {
                    let start = *acc;
                    *acc += 1usize << i.min(order);
                    Some(start)
                })
                .collect(),
        };
        Ok(Self {
            n,
            family,
            bound,
            theta: vec![0.0; family.num_cells(n)],
            offsets,
        })
    }

    pub fn with_theta(n: usize, family: Family, bound: f64, theta: Vec<f64>) -> Result<Self> {
        let mut model = Self::new(n, family, bound)?;
        if theta.len() != model.theta.len() {
            return Err(Error::Config(format!(
                "{family} over n = {n} has {} cells, got {} logits",
                model.theta.len(),
                theta.len()
            )));
        }
        if let Some(t) = theta.iter().find(|t| !(t.abs() <= bound)) {
            return Err(Error::Config(format!("logit {t} outside [-{bound}, {bound}]")));
        }
        model.theta = theta;
        Ok(model)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn num_cells(&self) -> usize {
        self.theta.len()
    }

    /// Clamps every logit into `[-B, B]`.
    fn project(&mut self) {
        let b = self.bound;
        for t in &mut self.theta {
            *t = t.clamp(-b, b);
        }
    }

    fn set_bound(&mut self, bound: f64) -> Result<()> {
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::Config(format!("logit bound must be positive and finite, got {bound}")));
        }
        self.bound = bound;
        self.project();
        Ok(())
    }

    /// Cell at `position` given the big-endian value of the preceding bits
    /// (only the low `min(position, order)` bits matter for Markov models).
    pub fn cell_at(&self, position: usize, context: u64) -> usize {
        match self.family {
            Family::FullPrefix => (1usize << position) - 1 + context as usize,
            Family::Markov { order } => {
                let width = position.min(order);
                self.offsets[position] + (context & ((1u64 << width) - 1)) as usize
            }
        }
    }

    pub fn cell_of(&self, y: &Prefix) -> usize {
        let bits = y.bits();
        let context = match self.family {
            Family::FullPrefix => y.value(),
            Family::Markov { order } => bits[bits.len().saturating_sub(order)..]
                .iter()
                .fold(0u64, |acc, &b| (acc << 1) | b as u64),
        };
        self.cell_at(bits.len(), context)
    }

    /// Calls `visit(cell, bit)` for each position of `bits`.
    fn walk(&self, bits: impl IntoIterator<Item = bool>, mut visit: impl FnMut(usize, bool)) {
        let mask = match self.family {
            Family::FullPrefix => u64::MAX,
            Family::Markov { order } => (1u64 << order) - 1,
        };
        let mut context = 0u64;
        for (i, b) in bits.into_iter().enumerate() {
            visit(self.cell_at(i, context), b);
            context = ((context << 1) | b as u64) & mask;
        }
    }

    /// `Pr[next bit = 1 | y]`, always in `[sigma(-B), sigma(B)]`.
    pub fn predict(&self, y: &Prefix) -> f64 {
        sigma(self.theta[self.cell_of(y)])
    }

    /// `log2 mu(x)` as a sum of `n` log-sigmoid terms.
    pub fn log2_mass(&self, x: &BitString) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(x.len(), self.n));
        }
        let mut total = 0.0;
        self.walk(x.bits().iter().copied(), |c, b| {
            let t = self.theta[c];
            total -= if b { softplus2(-t) } else { softplus2(t) };
        });
        Ok(total)
    }

    /// `log2 mu(x)` for every `x` in rank order (`n <= 24`).
    pub fn log2_mass_table(&self) -> Result<Vec<f64>> {
        if self.n > MAX_EXPLICIT_LEN {
            return Err(Error::Cap {
                what: "explicit n",
                value: self.n,
                cap: MAX_EXPLICIT_LEN,
            });
        }
        let mut level = vec![0.0f64];
        for i in 0..self.n {
            let mut next = Vec::with_capacity(level.len() * 2);
            for (value, &lm) in level.iter().enumerate() {
                let t = self.theta[self.cell_at(i, value as u64)];
                next.push(lm - softplus2(t));
                next.push(lm - softplus2(-t));
            }
            level = next;
        }
        Ok(level)
    }

    /// The model's distribution as real masses (`n <= 24`).
    pub fn masses(&self) -> Result<FloatPmf> {
        if self.max_entropy_bound() > 1000.0 {
            return Err(Error::Config(format!(
                "masses down to 2^-{:.0} underflow f64; use log2_mass_table",
                self.max_entropy_bound()
            )));
        }
        FloatPmf::new(self.n, self.log2_mass_table()?.into_iter().map(f64::exp2).collect())
    }

    /// Exhaustive mass table kept in log space (`n <= 24`).
    pub fn pmf(&self) -> Result<LogMassTable> {
        Ok(LogMassTable {
            n: self.n,
            log2: self.log2_mass_table()?,
        })
    }

    /// `n log2(1 + 2^B)`, the class max-entropy bound `M`.
    pub fn max_entropy_bound(&self) -> f64 {
        max_entropy_bound(self.n, self.bound)
    }

    /// `(1 + 2^B)^-n`.
    pub fn min_mass_bound(&self) -> f64 {
        (-self.max_entropy_bound()).exp2()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ModelDocument::from(self)).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text)?;
        doc.try_into()
    }
}

/// `n log2(1 + 2^B)`.
pub fn max_entropy_bound(n: usize, bound: f64) -> f64 {
    n as f64 * softplus2(bound)
}

/// Masses stored as base-2 logarithms, so tiny masses keep full precision.
#[derive(Clone, Debug, PartialEq)]
pub struct LogMassTable {
    n: usize,
    log2: Vec<f64>,
}

impl LogMassTable {
    pub fn log2_masses(&self) -> &[f64] {
        &self.log2
    }
}

impl MassFunction for LogMassTable {
    fn n(&self) -> usize {
        self.n
    }

    fn prob(&self, rank: usize) -> f64 {
        self.log2[rank].exp2()
    }

    fn log2_prob(&self, rank: usize) -> f64 {
        self.log2[rank]
    }
}

impl NextBitPredictor for LogitModel {
    fn n(&self) -> usize {
        self.n
    }

    fn eval(&self, y: &Prefix) -> Result<f64> {
        if y.ambient_len() != self.n {
            return Err(Error::DimensionMismatch(y.ambient_len(), self.n));
        }
        if y.len() >= self.n {
            return Err(Error::Length(format!("predictor prefix must be shorter than n = {}", self.n)));
        }
        Ok(self.predict(y))
    }
}

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    family: String,
    n: usize,
    k: Option<usize>,
    #[serde(rename = "B")]
    bound: f64,
    theta: Vec<f64>,
}

impl From<&LogitModel> for ModelDocument {
    fn from(m: &LogitModel) -> Self {
        let (family, k) = match m.family {
            Family::FullPrefix => ("full_prefix", None),
            Family::Markov { order } => ("markov", Some(order)),
        };
        ModelDocument {
            family: family.into(),
            n: m.n,
            k,
            bound: m.bound,
            theta: m.theta.clone(),
        }
    }
}

impl TryFrom<ModelDocument> for LogitModel {
    type Error = Error;

    fn try_from(doc: ModelDocument) -> Result<Self> {
        let family = match (doc.family.as_str(), doc.k) {
            ("full_prefix", _) => Family::FullPrefix,
            ("markov", Some(order)) => Family::Markov { order },
            ("markov", None) => {
                return Err(Error::Parse {
                    field: "k",
                    message: "markov model needs an order".into(),
                })
            }
            (other, _) => {
                return Err(Error::Parse {
                    field: "family",
                    message: format!("unknown family `{other}`"),
                })
            }
        };
        LogitModel::with_theta(doc.n, family, doc.bound, doc.theta)
    }
}

/// Data a model is trained or scored on.
#[derive(Clone, Copy, Debug)]
pub enum TrainingData<'a> {
    /// Exact distribution; losses are expectations under it.
    Exact(&'a ExplicitDistribution),
    /// Empirical distribution of a sample set.
    Samples(&'a [BitString]),
}

impl TrainingData<'_> {
    pub fn n(&self) -> Option<usize> {
        match self {
            TrainingData::Exact(d) => Some(d.n()),
            TrainingData::Samples(s) => s.first().map(BitString::len),
        }
    }
}

/// Per-cell data weight followed by a 1 and by a 0.
#[derive(Clone, Debug, PartialEq)]
pub struct CellStats {
    pub ones: Vec<f64>,
    pub zeros: Vec<f64>,
}

impl CellStats {
    fn empty(cells: usize) -> Self {
        Self {
            ones: vec![0.0; cells],
            zeros: vec![0.0; cells],
        }
    }

    fn add(&mut self, model: &LogitModel, bits: impl IntoIterator<Item = bool>, weight: f64) {
        model.walk(bits, |c, b| {
            if b {
                self.ones[c] += weight;
            } else {
                self.zeros[c] += weight;
            }
        });
    }

    pub fn from_data(model: &LogitModel, data: &TrainingData) -> Result<Self> {
        let n = model.n();
        let mut stats = Self::empty(model.num_cells());
        match data {
            TrainingData::Exact(d) => {
                if d.n() != n {
                    return Err(Error::DimensionMismatch(d.n(), n));
                }
                for r in 0..d.size() {
                    let p = d.prob(r);
                    if p > 0.0 {
                        stats.add(model, (0..n).map(|i| (r >> (n - 1 - i)) & 1 == 1), p);
                    }
                }
            }
            TrainingData::Samples(samples) => {
                if samples.is_empty() {
                    return Err(Error::Config("no training samples".into()));
                }
                let w = 1.0 / samples.len() as f64;
                for x in *samples {
                    if x.len() != n {
                        return Err(Error::DimensionMismatch(x.len(), n));
                    }
                    stats.add(model, x.bits().iter().copied(), w);
                }
            }
        }
        Ok(stats)
    }

    fn loss(&self, model: &LogitModel) -> f64 {
        model
            .theta
            .iter()
            .zip(self.ones.iter().zip(&self.zeros))
            .map(|(&t, (&one, &zero))| {
                let mut l = 0.0;
                if one > 0.0 {
                    l += one * softplus2(-t);
                }
                if zero > 0.0 {
                    l += zero * softplus2(t);
                }
                l
            })
            .sum()
    }

    fn gradient(&self, model: &LogitModel) -> Vec<f64> {
        model
            .theta
            .iter()
            .zip(self.ones.iter().zip(&self.zeros))
            .map(|(&t, (&one, &zero))| (one + zero) * sigma(t) - one)
            .collect()
    }
}

/// Cross-entropy `E_data[log2 1/mu_theta(x)]` in bits.
pub fn loss(model: &LogitModel, data: &TrainingData) -> Result<f64> {
    Ok(CellStats::from_data(model, data)?.loss(model))
}

/// Gradient of [`loss`] with respect to every logit.
pub fn gradient(model: &LogitModel, data: &TrainingData) -> Result<Vec<f64>> {
    Ok(CellStats::from_data(model, data)?.gradient(model))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainMode {
    /// Full-data gradient every step.
    Exact,
    /// Minibatches of `batch` draws per step.
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub mode: TrainMode,
    pub learning_rate: f64,
    pub steps: usize,
    pub batch: usize,
    pub rng_seed: u64,
    /// Logit bound `B` enforced by projection after every step.
    #[serde(rename = "B")]
    pub bound: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            mode: TrainMode::Exact,
            learning_rate: 4.0,
            steps: 2000,
            batch: 256,
            rng_seed: 0,
            bound: 8.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning_rate must be positive, got {}", self.learning_rate)));
        }
        if self.mode == TrainMode::Sampled && self.batch == 0 {
            return Err(Error::Config("batch must be positive".into()));
        }
        if !(self.bound > 0.0 && self.bound.is_finite()) {
            return Err(Error::Config(format!("logit bound must be positive, got {}", self.bound)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct FitOutcome {
    pub model: LogitModel,
    /// Loss before the first step followed by the loss after each step.
    pub trace: Vec<f64>,
}

impl FitOutcome {
    /// `step,loss_bits` rows with a header.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("step,loss_bits\n");
        for (step, loss) in self.trace.iter().enumerate() {
            out.push_str(&format!("{step},{loss:?}\n"));
        }
        out
    }
}

/// Loss history that aborts after [`DIVERGENCE_WINDOW`] consecutive rises.
struct LossTrace {
    losses: Vec<f64>,
    rising: usize,
}

impl LossTrace {
    fn with_capacity(cap: usize) -> Self {
        Self {
            losses: Vec::with_capacity(cap),
            rising: 0,
        }
    }

    fn push(&mut self, loss: f64, step: usize) -> Result<()> {
        if let Some(&prev) = self.losses.last() {
            if loss > prev + 1e-12 * prev.abs().max(1.0) {
                self.rising += 1;
            } else {
                self.rising = 0;
            }
        }
        self.losses.push(loss);
        if self.rising >= DIVERGENCE_WINDOW || !loss.is_finite() {
            return Err(Error::Diverged {
                step,
                window: DIVERGENCE_WINDOW,
                trace: self.losses.clone(),
            });
        }
        Ok(())
    }
}

/// Draws ranks from an explicit distribution by inverse CDF.
struct RankSampler {
    cumulative: Vec<u64>,
    log2_denom: u32,
}

impl RankSampler {
    fn new(d: &ExplicitDistribution) -> Self {
        Self {
            cumulative: d.cumulative(),
            log2_denom: d.log2_denom(),
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> usize {
        let u = rng.random::<u64>() >> (64 - self.log2_denom);
        self.cumulative.partition_point(|&c| c <= u)
    }
}

/// Projected gradient descent on cross-entropy; logits are clamped to
/// `[-B, B]` (with `B = cfg.bound`) after every step.
pub fn fit(model: &LogitModel, data: &TrainingData, cfg: &TrainConfig) -> Result<FitOutcome> {
    cfg.validate()?;
    let mut model = model.clone();
    model.set_bound(cfg.bound)?;
    let mut trace = LossTrace::with_capacity(cfg.steps + 1);

    match cfg.mode {
        TrainMode::Exact => {
            let stats = CellStats::from_data(&model, data)?;
            trace.push(stats.loss(&model), 0)?;
            for step in 1..=cfg.steps {
                let g = stats.gradient(&model);
                for (t, g) in model.theta.iter_mut().zip(g) {
                    *t -= cfg.learning_rate * g;
                }
                model.project();
                trace.push(stats.loss(&model), step)?;
            }
        }
        TrainMode::Sampled => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
            let n = model.n();
            let ranks = match data {
                TrainingData::Exact(d) => {
                    if d.n() != n {
                        return Err(Error::DimensionMismatch(d.n(), n));
                    }
                    Some(RankSampler::new(d))
                }
                TrainingData::Samples(s) => {
                    if s.is_empty() {
                        return Err(Error::Config("no training samples".into()));
                    }
                    if let Some(x) = s.iter().find(|x| x.len() != n) {
                        return Err(Error::DimensionMismatch(x.len(), n));
                    }
                    None
                }
            };
            let w = 1.0 / cfg.batch as f64;
            for step in 0..=cfg.steps {
                let mut stats = CellStats::empty(model.num_cells());
                for _ in 0..cfg.batch {
                    match (&ranks, data) {
                        (Some(sampler), _) => {
                            let r = sampler.draw(&mut rng);
                            stats.add(&model, (0..n).map(|i| (r >> (n - 1 - i)) & 1 == 1), w);
                        }
                        (None, TrainingData::Samples(s)) => {
                            let x = &s[rng.random_range(0..s.len())];
                            stats.add(&model, x.bits().iter().copied(), w);
                        }
                        (None, TrainingData::Exact(_)) => unreachable!(),
                    }
                }
                trace.push(stats.loss(&model), step)?;
                if step == cfg.steps {
                    break;
                }
                let g = stats.gradient(&model);
                for (t, g) in model.theta.iter_mut().zip(g) {
                    *t -= cfg.learning_rate * g;
                }
                model.project();
            }
        }
    }
    Ok(FitOutcome {
        model,
        trace: trace.losses,
    })
}

/// Exact minimizer of the clamped cross-entropy over one family: each cell
/// independently takes `clamp(log2(ones / zeros), -B, B)`; unvisited cells
/// stay at 0.
pub fn optimal_model(n: usize, family: Family, bound: f64, data: &TrainingData) -> Result<LogitModel> {
    let mut model = LogitModel::new(n, family, bound)?;
    let stats = CellStats::from_data(&model, data)?;
    for (c, t) in model.theta.iter_mut().enumerate() {
        let (one, zero) = (stats.ones[c], stats.zeros[c]);
        *t = match (one > 0.0, zero > 0.0) {
            (false, false) => 0.0,
            (true, false) => bound,
            (false, true) => -bound,
            (true, true) => (one / zero).log2().clamp(-bound, bound),
        };
    }
    Ok(model)
}

/// One row of an MDL comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MdlScore {
    pub family: String,
    pub parameters: usize,
    pub cross_entropy_bits: f64,
    pub model_bits: f64,
    pub samples: usize,
    /// `cross_entropy_bits + model_bits / samples`.
    pub score: f64,
}

#[derive(Clone, Debug)]
pub struct MdlSelection {
    pub best: LogitModel,
    /// Rows in the order the families were given.
    pub table: Vec<MdlScore>,
}

/// Fits every family on the samples and returns the one minimizing
/// per-sample two-part code length, ties going to fewer parameters.
pub fn mdl_select(
    families: &[Family],
    samples: &[BitString],
    bits_per_param: f64,
    cfg: &TrainConfig,
) -> Result<MdlSelection> {
    if families.is_empty() {
        return Err(Error::Config("mdl_select needs at least one family".into()));
    }
    let n = samples
        .first()
        .map(BitString::len)
        .ok_or_else(|| Error::Config("mdl_select needs at least one sample".into()))?;
    let data = TrainingData::Samples(samples);
    let m = samples.len();
    let mut best: Option<(f64, usize, LogitModel)> = None;
    let mut table = Vec::with_capacity(families.len());
    for &family in families {
        let init = LogitModel::new(n, family, cfg.bound)?;
        let fitted = fit(&init, &data, cfg)?.model;
        let cross_entropy_bits = loss(&fitted, &data)?;
        let parameters = fitted.num_cells();
        let model_bits = parameters as f64 * bits_per_param;
        let score = cross_entropy_bits + model_bits / m as f64;
        table.push(MdlScore {
            family: family.to_string(),
            parameters,
            cross_entropy_bits,
            model_bits,
            samples: m,
            score,
        });
        let better = match &best {
            None => true,
            Some((s, p, _)) => score < *s || (score == *s && parameters < *p),
        };
        if better {
            best = Some((score, parameters, fitted));
        }
    }
    let (_, _, best) = best.expect("at least one family");
    Ok(MdlSelection { best, table })
}
