//! Command-line front end. Exit codes: 0 success, 1 domain error, 2 usage.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bits::{BitString, Prefix};
use crate::codec::{self, CodeWord};
use crate::dist::ExplicitDistribution;
use crate::error::{Error, Result};
use crate::experiment::{self, ExperimentConfig, ExperimentMode, SweepAxis, SweepRow};
use crate::info::{smooth, InfoReport};
use crate::learn::{self, Family, LogitModel, TrainConfig, TrainMode, TrainingData};
use crate::prg::{self, PrgFamily, PrgSpec};
use crate::repr::{self, NextBitPredictor};

#[derive(Debug, Parser)]
#[command(name = "bitdist", version, about = "Computable distributions over fixed-length bit strings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropy, KL, statistical distance and Pinsker slack of a distribution.
    Info(InfoArgs),
    /// Print a distribution as a CDF or predictor table, or a model as a distribution.
    Convert(ConvertArgs),
    /// Mix a distribution with the 2^-2n floor.
    Smooth(SmoothArgs),
    /// Two-part prefix codes.
    #[command(subcommand)]
    Codec(CodecCommand),
    /// Toy pseudorandom generators.
    #[command(subcommand)]
    Prg(PrgCommand),
    /// Fit a bounded-logit model by projected gradient descent.
    Train(TrainArgs),
    /// Distinguisher experiments on trained models.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Same as `experiment sweep`.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write to this file (atomically) instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    #[arg(long)]
    pub dist: PathBuf,
    /// `uniform` or a distribution file.
    #[arg(long, default_value = "uniform")]
    pub against: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConvertTarget {
    /// `x,numerator,log2_denom` rows of F(x).
    Cdf,
    /// `prefix,p_one` rows of the next-bit predictor.
    Predictor,
    /// Distribution document.
    Dist,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    pub dist: Option<PathBuf>,
    /// Model document (only `--to dist`).
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub to: ConvertTarget,
    #[arg(long, default_value_t = crate::dist::DEFAULT_LOG2_DENOM)]
    pub log2_denom: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SmoothArgs {
    #[arg(long)]
    pub dist: PathBuf,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Subcommand)]
pub enum CodecCommand {
    Encode {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        x: String,
    },
    Decode {
        #[arg(long)]
        dist: PathBuf,
        /// Wire form as hex.
        #[arg(long, conflicts_with_all = ["k", "w"], required_unless_present_all = ["k", "w"])]
        hex: Option<String>,
        #[arg(long, requires = "w")]
        k: Option<u32>,
        #[arg(long, requires = "k")]
        w: Option<u64>,
    },
}

#[derive(Debug, Args)]
pub struct PrgArgs {
    /// PRG spec document; the flags below override its fields.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub family: Option<PrgFamily>,
    #[arg(long)]
    pub seed_len: Option<usize>,
    #[arg(long)]
    pub out_len: Option<usize>,
    #[arg(long)]
    pub param_seed: Option<u64>,
}

impl PrgArgs {
    fn resolve(&self) -> Result<PrgSpec> {
        let mut spec = match &self.spec {
            Some(p) => PrgSpec::from_json(&read(p)?)?,
            None => ExperimentConfig::default().prg,
        };
        apply_prg_overrides(&mut spec, self.family, self.seed_len, self.out_len, self.param_seed);
        spec.validate()?;
        Ok(spec)
    }
}

fn apply_prg_overrides(
    spec: &mut PrgSpec,
    family: Option<PrgFamily>,
    seed_len: Option<usize>,
    out_len: Option<usize>,
    param_seed: Option<u64>,
) {
    if let Some(f) = family {
        spec.family = f;
    }
    if let Some(l) = seed_len {
        spec.seed_len = l;
    }
    if let Some(n) = out_len {
        spec.out_len = n;
    }
    if let Some(s) = param_seed {
        spec.param_seed = s;
    }
}

#[derive(Debug, Subcommand)]
pub enum PrgCommand {
    /// Injectivity, image size, entropy and KL from uniform.
    Analyze {
        #[command(flatten)]
        prg: PrgArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Exact output distribution as a distribution document.
    Image {
        #[command(flatten)]
        prg: PrgArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Expand one seed.
    Expand {
        #[command(flatten)]
        prg: PrgArgs,
        #[arg(long)]
        seed: String,
    },
}

fn parse_order(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<i64>() {
        Ok(v) if v < 0 => Err("order must be ≥ 0".into()),
        Ok(v) => Ok(v as usize),
        Err(_) => Err(format!("`{s}` is not an integer")),
    }
}

/// Model family flags shared by `train` and the experiments.
#[derive(Debug, Args)]
pub struct ModelArgs {
    /// `full_prefix`, `markov` (with --order) or `markov_<k>`.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_order)]
    pub order: Option<usize>,
    /// Logit bound B.
    #[arg(long = "bound", visible_alias = "B")]
    pub bound: Option<f64>,
}

impl ModelArgs {
    fn family(&self) -> Result<Option<Family>> {
        match (self.family.as_deref(), self.order) {
            (None, None) => Ok(None),
            (None, Some(order)) | (Some("markov"), Some(order)) => Ok(Some(Family::Markov { order })),
            (Some("markov"), None) => Err(Error::Config("--family markov needs --order".into())),
            (Some(name), order) => {
                let family: Family = name.parse()?;
                if let (Family::Markov { order: k }, Some(o)) = (family, order) {
                    if k != o {
                        return Err(Error::Config(format!("--family {name} conflicts with --order {o}")));
                    }
                }
                Ok(Some(family))
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainFlags {
    #[arg(long, value_enum)]
    pub train_mode: Option<TrainModeArg>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub batch: Option<usize>,
    #[arg(long)]
    pub rng_seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TrainModeArg {
    Exact,
    Sampled,
}

impl TrainFlags {
    fn apply(&self, cfg: &mut TrainConfig) {
        if let Some(m) = self.train_mode {
            cfg.mode = match m {
                TrainModeArg::Exact => TrainMode::Exact,
                TrainModeArg::Sampled => TrainMode::Sampled,
            };
        }
        if let Some(lr) = self.lr {
            cfg.learning_rate = lr;
        }
        if let Some(s) = self.steps {
            cfg.steps = s;
        }
        if let Some(b) = self.batch {
            cfg.batch = b;
        }
        if let Some(s) = self.rng_seed {
            cfg.rng_seed = s;
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Train on an exact distribution.
    #[arg(long, conflicts_with = "samples", required_unless_present = "samples")]
    pub dist: Option<PathBuf>,
    /// Train on samples, one bit string per line.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// TrainConfig document; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub train: TrainFlags,
    /// Write the loss trace CSV here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Run MDL selection over these comma-separated families instead.
    #[arg(long, value_delimiter = ',')]
    pub mdl: Option<Vec<String>>,
    #[arg(long, default_value_t = learn::DEFAULT_PARAM_BITS)]
    pub bits_per_param: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Experiment flags; each mirrors a field of the config document.
#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// ExperimentConfig document; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub prg_family: Option<PrgFamily>,
    #[arg(long)]
    pub seed_len: Option<usize>,
    #[arg(long)]
    pub out_len: Option<usize>,
    #[arg(long)]
    pub param_seed: Option<u64>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub train: TrainFlags,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub output: Output,
}

impl ExperimentArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => serde_json::from_str(&read(p)?)?,
            None => ExperimentConfig::default(),
        };
        apply_prg_overrides(&mut cfg.prg, self.prg_family, self.seed_len, self.out_len, self.param_seed);
        if let Some(f) = self.model.family()? {
            cfg.family = f;
        }
        if let Some(b) = self.model.bound {
            cfg.bound = b;
        }
        self.train.apply(&mut cfg.train);
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(m) = self.mode {
            cfg.mode = match m {
                ModeArg::Exact => ExperimentMode::Exact,
                ModeArg::MonteCarlo => ExperimentMode::MonteCarlo,
            };
        }
        if let Some(s) = self.samples {
            cfg.samples = s;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// One of seed_len, order, B, n.
    #[arg(long)]
    pub axis: SweepAxis,
    /// Comma-separated axis values; may be empty.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub values: String,
    #[command(flatten)]
    pub experiment: ExperimentArgs,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Identity chain and distinguisher advantage, one row per trial.
    Theorem1(ExperimentArgs),
    /// As theorem1 plus smoothing and the Pinsker route (JSON).
    Corollary(ExperimentArgs),
    /// Vary one configuration axis.
    Sweep(SweepArgs),
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn read_dist(path: &Path) -> Result<ExplicitDistribution> {
    ExplicitDistribution::from_json(&read(path)?)
}

/// Writes `text` to `out` via a temporary file and rename, or to stdout.
fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => write_atomic(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn line(s: String) -> String {
    s + "\n"
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn unhex(s: &str) -> Result<Vec<u8>> {
    if s.len() % 2 != 0 {
        return Err(Error::Parse {
            field: "hex",
            message: "odd number of digits".into(),
        });
    }
    (0..s.len())
        .step_by(2)
        .map(|i| {
            u8::from_str_radix(&s[i..i + 2], 16).map_err(|e| Error::Parse {
                field: "hex",
                message: e.to_string(),
            })
        })
        .collect()
}

fn info(args: &InfoArgs) -> Result<()> {
    let d = read_dist(&args.dist)?;
    let against = if args.against == "uniform" {
        ExplicitDistribution::uniform(d.n(), d.log2_denom().max(d.n() as u32))?
    } else {
        read_dist(Path::new(&args.against))?
    };
    emit(&args.output, &line(InfoReport::compute(&d, &against)?.to_json()))
}

fn convert(args: &ConvertArgs) -> Result<()> {
    if let Some(path) = &args.model {
        if !matches!(args.to, ConvertTarget::Dist) {
            return Err(Error::Config("a model converts only with --to dist".into()));
        }
        let model = LogitModel::from_json(&read(path)?)?;
        return emit(&args.output, &line(repr::to_explicit(&model, args.log2_denom)?.to_json()));
    }
    let d = read_dist(args.dist.as_deref().expect("clap requires --dist or --model"))?;
    let n = d.n();
    let text = match args.to {
        ConvertTarget::Dist => line(d.to_json()),
        ConvertTarget::Cdf => {
            let cdf = d.cdf();
            let mut out = String::from("x,numerator,log2_denom\n");
            for r in 0..d.masses().len() as u64 {
                let f = cdf.eval_rank(r);
                out.push_str(&format!(
                    "{},{},{}\n",
                    BitString::from_rank(r, n)?,
                    f.numerator(),
                    f.log2_denom()
                ));
            }
            out
        }
        ConvertTarget::Predictor => {
            let pred = repr::predictor_from_cdf(d.cdf());
            let mut out = String::from("prefix,p_one\n");
            for len in 0..n {
                for v in 0..1u64 << len {
                    let y = Prefix::from_value(v, len, n)?;
                    out.push_str(&format!("{y},{}\n", pred.eval(&y)?));
                }
            }
            out
        }
    };
    emit(&args.output, &text)
}

fn codec_cmd(cmd: &CodecCommand) -> Result<()> {
    match cmd {
        CodecCommand::Encode { dist, x } => {
            let d = read_dist(dist)?;
            let x: BitString = x.parse()?;
            let c = codec::encode(&d, &x)?;
            let doc = serde_json::json!({ "k": c.k, "w": c.w, "hex": hex(&c.to_bytes()) });
            emit(&Output { out: None }, &line(doc.to_string()))
        }
        CodecCommand::Decode { dist, hex: h, k, w } => {
            let d = read_dist(dist)?;
            let c = match (h, k, w) {
                (Some(h), _, _) => CodeWord::from_bytes(&unhex(h)?)?,
                (None, Some(k), Some(w)) => CodeWord { k: *k, w: *w },
                _ => unreachable!("clap enforces --hex or --k/--w"),
            };
            emit(&Output { out: None }, &line(codec::decode(&d, &c)?.to_string()))
        }
    }
}

fn prg_cmd(cmd: &PrgCommand) -> Result<()> {
    match cmd {
        PrgCommand::Analyze { prg: p, output } => {
            let report = prg::analyze(&p.resolve()?)?;
            emit(output, &line(serde_json::to_string(&report)?))
        }
        PrgCommand::Image { prg: p, output } => {
            emit(output, &line(prg::image_distribution(&p.resolve()?)?.to_json()))
        }
        PrgCommand::Expand { prg: p, seed } => {
            let seed: BitString = seed.parse()?;
            emit(&Output { out: None }, &line(prg::expand(&p.resolve()?, &seed)?.to_string()))
        }
    }
}

fn read_samples(path: &Path) -> Result<Vec<BitString>> {
    read(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::parse)
        .collect()
}

fn train(args: &TrainArgs) -> Result<()> {
    let mut cfg: TrainConfig = match &args.config {
        Some(p) => serde_json::from_str(&read(p)?)?,
        None => TrainConfig::default(),
    };
    args.train.apply(&mut cfg);
    if let Some(b) = args.model.bound {
        cfg.bound = b;
    }
    let dist;
    let samples;
    let data = match (&args.dist, &args.samples) {
        (Some(p), _) => {
            dist = read_dist(p)?;
            TrainingData::Exact(&dist)
        }
        (None, Some(p)) => {
            samples = read_samples(p)?;
            TrainingData::Samples(&samples)
        }
        (None, None) => unreachable!("clap requires --dist or --samples"),
    };
    let n = data
        .n()
        .ok_or_else(|| Error::Config("no training samples".into()))?;

    if let Some(names) = &args.mdl {
        let TrainingData::Samples(samples) = data else {
            return Err(Error::Config("--mdl needs --samples".into()));
        };
        let families = names.iter().map(|s| s.parse()).collect::<Result<Vec<Family>>>()?;
        let selection = learn::mdl_select(&families, samples, args.bits_per_param, &cfg)?;
        let doc = serde_json::json!({
            "best": selection.best.family().to_string(),
            "table": selection.table,
        });
        return emit(&args.output, &line(serde_json::to_string(&doc)?));
    }

    let family = args.model.family()?.unwrap_or(Family::Markov { order: 0 });
    let init = LogitModel::new(n, family, cfg.bound)?;
    let outcome = learn::fit(&init, &data, &cfg)?;
    if let Some(path) = &args.trace {
        write_atomic(path, &outcome.trace_csv())?;
    }
    emit(&args.output, &line(outcome.model.to_json()))
}

fn rows_text(rows: &[SweepRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => experiment::rows_to_csv(rows),
        Format::Json => Ok(line(experiment::rows_to_json(rows))),
    }
}

fn experiment_cmd(cmd: &ExperimentCommand) -> Result<()> {
    match cmd {
        ExperimentCommand::Theorem1(args) => {
            let cfg = args.resolve()?;
            cfg.validate()?;
            let rows = experiment::trial_rows(&cfg);
            emit(&args.output, &rows_text(&rows, args.format)?)
        }
        ExperimentCommand::Corollary(args) => {
            let cfg = args.resolve()?;
            cfg.validate()?;
            let results = (0..cfg.trials)
                .map(|t| experiment::run_corollary(&cfg.trial(t)))
                .collect::<Result<Vec<_>>>()?;
            emit(&args.output, &line(serde_json::to_string_pretty(&results)?))
        }
        ExperimentCommand::Sweep(args) => sweep(args),
    }
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let base = args.experiment.resolve()?;
    let values = args
        .values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse::<f64>().map_err(|e| Error::Parse {
                field: "values",
                message: format!("`{v}`: {e}"),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let rows = experiment::sweep(&base, args.axis, &values);
    emit(&args.experiment.output, &rows_text(&rows, args.experiment.format)?)
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Info(a) => info(a),
        Command::Convert(a) => convert(a),
        Command::Smooth(a) => emit(&a.output, &line(smooth(&read_dist(&a.dist)?)?.to_json())),
        Command::Codec(c) => codec_cmd(c),
        Command::Prg(c) => prg_cmd(c),
        Command::Train(a) => train(a),
        Command::Experiment(c) => experiment_cmd(c),
        Command::Sweep(a) => sweep(a),
    }
}

/// Honors `BITDIST_THREADS` for the global rayon pool.
fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("BITDIST_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("BITDIST_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("usage error"));
            return 2;
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return 2;
    }
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("bitdist").chain(args.iter().copied()))
    }

    #[test]
    fn parses_documented_invocations() {
        let cli = parse(&["info", "--dist", "d.json", "--against", "uniform"]).unwrap();
        assert!(matches!(cli.command, Command::Info(ref a) if a.against == "uniform"));
        let cli = parse(&["codec", "encode", "--dist", "d.json", "--x", "101"]).unwrap();
        assert!(matches!(cli.command, Command::Codec(CodecCommand::Encode { ref x, .. }) if x == "101"));
    }

    #[test]
    fn negative_order_is_a_usage_error() {
        let err = parse(&["train", "--dist", "d.json", "--family", "markov", "--order", "-1"]).unwrap_err();
        assert!(err.to_string().lines().next().unwrap().contains("order must be ≥ 0"));
        assert_eq!(run(["bitdist", "train", "--family", "markov", "--order", "-1"]), 2);
    }

    #[test]
    fn unknown_flags_are_rejected() {
        assert!(parse(&["info", "--dist", "d.json", "--colour"]).is_err());
        assert_eq!(run(["bitdist", "smooth", "--dist", "d.json", "--bogus"]), 2);
    }

    #[test]
    fn family_flags() {
        let m = |family: Option<&str>, order: Option<usize>| ModelArgs {
            family: family.map(String::from),
            order,
            bound: None,
        };
        assert_eq!(m(Some("markov"), Some(2)).family().unwrap(), Some(Family::Markov { order: 2 }));
        assert_eq!(m(Some("markov_3"), None).family().unwrap(), Some(Family::Markov { order: 3 }));
        assert_eq!(m(Some("full_prefix"), None).family().unwrap(), Some(Family::FullPrefix));
        assert!(m(Some("markov"), None).family().is_err());
        assert!(m(Some("markov_3"), Some(2)).family().is_err());
    }

    #[test]
    fn hex_round_trip() {
        assert_eq!(hex(&[0x04, 0xb0]), "04b0");
        assert_eq!(unhex("04b0").unwrap(), vec![0x04, 0xb0]);
        assert!(unhex("4b0").is_err());
    }
}
