//! The `roughvol` command line.
//!
//! Subcommands mirror the library pipeline: `rv`, `mfdfa`, `sf`, `spectrum`,
//! `shuffle` and `synth`. Every run writes its CSV outputs plus a
//! `<command>.manifest.json` describing the resolved configuration, input
//! digests, seeds and timestamps into `--output-dir`.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 data error,
//! 3 numerical failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, ErrorKind, Result};
use crate::hurst::Estimator;
use crate::io::{self as csvio, Precision};
use crate::market_data::{parse_ticks, realized_variance, signature_curve, TickFormat};
use crate::mfdfa::{default_s_grid, geometric_s_grid, mfdfa_analyze, uniform_q_grid, MfdfaConfig};
use crate::multifractal::{format_uncertainty, shuffle_ensemble, singularity_spectrum};
use crate::structure_function::{default_delta_grid, sf_hurst, SfConfig};
use crate::synth::SynthSpec;
use crate::volseries::{distribution_summary, increments, log_vol, IncrementSeries, LogVolSeries};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Environment variable capping the worker thread count (0 = automatic).
pub const THREADS_ENV: &str = "ROUGHVOL_THREADS";

#[derive(Debug, Parser, Serialize)]
#[command(name = "roughvol", version, about = "Roughness and multifractality of log-volatility")]
pub struct Cli {
    /// Directory receiving output files.
    #[arg(long, global = true, default_value = ".")]
    pub output_dir: PathBuf,

    /// Seed for random generators and shuffles.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Numeric precision in CSV output: 6 significant digits or full.
    #[arg(long, global = true, default_value = "6", value_parser = parse_precision)]
    #[serde(serialize_with = "serialize_precision")]
    pub precision: Precision,

    #[command(subcommand)]
    pub command: Command,
}

fn parse_precision(s: &str) -> std::result::Result<Precision, String> {
    s.parse()
}

fn serialize_precision<S: serde::Serializer>(p: &Precision, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(match p {
        Precision::Significant6 => "6",
        Precision::Full => "full",
    })
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Daily realized variance from a headerless `timestamp,price,volume` tick file.
    Rv(RvArgs),
    /// MF-DFA of log-volatility increments (from `date,rv` or `index,value` input).
    Mfdfa(MfdfaArgs),
    /// Structure-function estimate of h(q) (from `date,rv` or an `index,value` log-volatility path).
    Sf(SfArgs),
    /// Singularity spectrum, Δh and Δα from a `q,h,stderr,r2` table.
    Spectrum(SpectrumArgs),
    /// MF-DFA of shuffled increments, averaged over replicates.
    Shuffle(ShuffleArgs),
    /// Synthetic series with known scaling exponents.
    Synth(SynthArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct RvArgs {
    pub ticks: PathBuf,
    /// Sampling period in minutes; must divide 1440.
    #[arg(long, default_value_t = 5)]
    pub delta_t: u32,
    /// Days with fewer raw ticks are dropped.
    #[arg(long, default_value_t = 100)]
    pub min_ticks: usize,
    /// Comma-separated sampling periods for a volatility signature table.
    #[arg(long, value_delimiter = ',')]
    pub signature: Option<Vec<u32>>,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct QGridArgs {
    #[arg(long, default_value_t = -25.0, allow_hyphen_values = true)]
    pub q_min: f64,
    #[arg(long, default_value_t = 25.0, allow_hyphen_values = true)]
    pub q_max: f64,
    #[arg(long, default_value_t = 0.5)]
    pub q_step: f64,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct ScaleArgs {
    /// Fit window `lo:hi` in segment lengths.
    #[arg(long, default_value = "80:280", value_parser = parse_range)]
    pub s_fit: (usize, usize),
    #[arg(long, default_value_t = 3)]
    pub poly_order: usize,
    /// Smallest scale; defaults to 16 with fit-window densification.
    #[arg(long)]
    pub s_min: Option<usize>,
    /// Largest scale; defaults to N/4.
    #[arg(long)]
    pub s_max: Option<usize>,
    /// Number of geometric scales when `--s-min` or `--s-max` is given.
    #[arg(long, default_value_t = 20)]
    pub s_count: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct MfdfaArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub q: QGridArgs,
    #[command(flatten)]
    pub scales: ScaleArgs,
    /// Increment lag in retained days (RV input only).
    #[arg(long, default_value_t = 1)]
    pub delta: usize,
    /// Histogram bins for the increment distribution.
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SfArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 8.0)]
    pub q_max: f64,
    #[arg(long, default_value_t = 0.2)]
    pub q_step: f64,
    /// Lag fit window `lo:hi` in days.
    #[arg(long, default_value = "1:40", value_parser = parse_range)]
    pub delta_fit: (usize, usize),
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    pub input: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ShuffleArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub replicates: usize,
    #[command(flatten)]
    pub q: QGridArgs,
    #[command(flatten)]
    pub scales: ScaleArgs,
    #[arg(long, default_value_t = 1)]
    pub delta: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthKind {
    Fbm,
    White,
    Cascade,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    pub kind: SynthKind,
    #[arg(long, default_value_t = 0.5)]
    pub hurst: f64,
    #[arg(long, default_value_t = 65536)]
    pub n: usize,
    #[arg(long, default_value_t = 0.6)]
    pub a: f64,
    #[arg(long, default_value_t = 16)]
    pub levels: u32,
    /// Emit the cumulative path instead of the increments (fbm, white).
    #[arg(long)]
    pub path: bool,
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo: usize = lo.trim().parse().map_err(|_| format!("bad lower bound in {s:?}"))?;
    let hi: usize = hi.trim().parse().map_err(|_| format!("bad upper bound in {s:?}"))?;
    if lo >= hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok((lo, hi))
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::Usage => EXIT_USAGE,
        ErrorKind::Data => EXIT_DATA,
        ErrorKind::Numeric => EXIT_NUMERIC,
    }
}

fn configure_threads() {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return };
    match raw.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(n) => {
            // fails only if a pool already exists, e.g. when run() is called twice in-process
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Err(_) => log::warn!("ignoring {THREADS_ENV}={raw:?}: not a non-negative integer"),
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    std::fs::create_dir_all(&cli.output_dir)?;
    let mut run = RunContext::new(cli);
    match &cli.command {
        Command::Rv(args) => cmd_rv(&mut run, args)?,
        Command::Mfdfa(args) => cmd_mfdfa(&mut run, args)?,
        Command::Sf(args) => cmd_sf(&mut run, args)?,
        Command::Spectrum(args) => cmd_spectrum(&mut run, args)?,
        Command::Shuffle(args) => cmd_shuffle(&mut run, args)?,
        Command::Synth(args) => cmd_synth(&mut run, args)?,
    }
    run.finish()
}

#[derive(Debug, Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

/// Provenance written next to every run's outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: serde_json::Value,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
    seeds: Vec<u64>,
    started_at: String,
    finished_at: String,
}

struct RunContext<'a> {
    cli: &'a Cli,
    manifest: RunManifest,
}

impl<'a> RunContext<'a> {
    fn new(cli: &'a Cli) -> Self {
        let command = match cli.command {
            Command::Rv(_) => "rv",
            Command::Mfdfa(_) => "mfdfa",
            Command::Sf(_) => "sf",
            Command::Spectrum(_) => "spectrum",
            Command::Shuffle(_) => "shuffle",
            Command::Synth(_) => "synth",
        };
        Self {
            cli,
            manifest: RunManifest {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command,
                config: serde_json::to_value(cli).unwrap_or(serde_json::Value::Null),
                inputs: Vec::new(),
                outputs: Vec::new(),
                seeds: Vec::new(),
                started_at: chrono::Utc::now().to_rfc3339(),
                finished_at: String::new(),
            },
        }
    }

    fn precision(&self) -> Precision {
        self.cli.precision
    }

    /// Reads an input file fully, recording its digest.
    fn read_input(&mut self, path: &Path) -> Result<Vec<u8>> {
        let mut bytes = Vec::new();
        File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|source| Error::Open { path: path.to_path_buf(), source })?;
        self.manifest.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(bytes)
    }

    fn write_output<F>(&mut self, name: &str, write: F) -> Result<()>
    where
        F: FnOnce(BufWriter<File>, Precision) -> Result<()>,
    {
        let path = self.cli.output_dir.join(name);
        let file = File::create(&path).map_err(|source| Error::Open { path: path.clone(), source })?;
        write(BufWriter::new(file), self.precision())?;
        self.manifest.outputs.push(name.to_string());
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        self.manifest.finished_at = chrono::Utc::now().to_rfc3339();
        let path = self.cli.output_dir.join(format!("{}.manifest.json", self.manifest.command));
        let file = File::create(&path).map_err(|source| Error::Open { path: path.clone(), source })?;
        serde_json::to_writer_pretty(BufWriter::new(file), &self.manifest)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        Ok(())
    }
}

fn cmd_rv(run: &mut RunContext, args: &RvArgs) -> Result<()> {
    let bytes = run.read_input(&args.ticks)?;
    let ticks = parse_ticks(bytes.as_slice(), TickFormat::BitcoinchartsCsv)?;
    let report = ticks.report();
    if report.malformed_rows + report.non_positive_price_rows + report.out_of_order_rows > 0 {
        eprintln!(
            "parsed {} ticks: {} malformed rows, {} non-positive prices, {} out of order (re-sorted)",
            ticks.len(),
            report.malformed_rows,
            report.non_positive_price_rows,
            report.out_of_order_rows
        );
    }
    let rv = realized_variance(&ticks, args.delta_t, args.min_ticks)?;
    run.write_output("rv.csv", |w, p| csvio::write_rv_csv(w, &rv, p))?;
    println!("rv: {} days at delta_t = {} min", rv.len(), args.delta_t);

    if let Some(list) = &args.signature {
        let rows = signature_curve(&ticks, list, args.min_ticks)?;
        run.write_output("signature.csv", |w, p| csvio::write_signature_csv(w, &rows, p))?;
        println!("signature: {} sampling periods", rows.len());
    }
    Ok(())
}

/// Input to the increment-based commands.
enum SeriesInput {
    Rv(crate::market_data::RVSeries),
    Values(Vec<f64>),
}

fn read_series_input(run: &mut RunContext, path: &Path) -> Result<SeriesInput> {
    let bytes = run.read_input(path)?;
    let header = BufReader::new(bytes.as_slice()).lines().next().transpose()?.unwrap_or_default();
    let header: String = header.chars().filter(|c| !c.is_whitespace()).collect();
    match header.as_str() {
        "date,rv" => Ok(SeriesInput::Rv(csvio::read_rv_csv(bytes.as_slice())?)),
        "index,value" => Ok(SeriesInput::Values(csvio::read_series_csv(bytes.as_slice())?)),
        other => Err(Error::Malformed {
            line: 1,
            message: format!("unrecognised header {other:?}; expected date,rv or index,value"),
        }),
    }
}

fn load_increments(run: &mut RunContext, path: &Path, delta: usize) -> Result<IncrementSeries> {
    match read_series_input(run, path)? {
        SeriesInput::Rv(rv) => {
            let lv = log_vol(&rv)?;
            if lv.dropped_zero_rv > 0 {
                eprintln!("dropped {} days with zero realized variance", lv.dropped_zero_rv);
            }
            increments(&lv, delta)
        }
        SeriesInput::Values(values) => {
            if delta != 1 {
                return Err(Error::invalid("--delta applies to date,rv input only"));
            }
            Ok(IncrementSeries::new(values, 1, path.display().to_string()))
        }
    }
}

fn mfdfa_config(n: usize, q: &QGridArgs, scales: &ScaleArgs) -> Result<MfdfaConfig> {
    let q_grid = uniform_q_grid(q.q_min, q.q_max, q.q_step)?;
    let s_grid = if scales.s_min.is_some() || scales.s_max.is_some() {
        let lo = scales.s_min.unwrap_or(crate::mfdfa::DEFAULT_S_MIN);
        let hi = scales.s_max.unwrap_or(n / 4).max(lo);
        geometric_s_grid(lo, hi, scales.s_count)
    } else {
        default_s_grid(n, scales.s_fit, scales.poly_order)
    };
    let cfg = MfdfaConfig { q_grid, s_grid, fit_range: scales.s_fit, poly_order: scales.poly_order };
    cfg.validate(n)?;
    Ok(cfg)
}

fn cmd_mfdfa(run: &mut RunContext, args: &MfdfaArgs) -> Result<()> {
    let inc = load_increments(run, &args.input, args.delta)?;
    let cfg = mfdfa_config(inc.len(), &args.q, &args.scales)?;
    let analysis = mfdfa_analyze(&inc.values, &cfg)?;

    run.write_output("increments.csv", |w, p| csvio::write_series_csv(w, &inc.values, p))?;
    match distribution_summary(&inc, args.bins) {
        Ok(summary) => {
            run.write_output("distribution.csv", |w, p| csvio::write_distribution_csv(w, &summary, p))?;
            println!("increments: n = {}, kurtosis = {:.3}", inc.len(), summary.kurtosis);
        }
        Err(e) => eprintln!("skipping distribution summary: {e}"),
    }
    run.write_output("fq.csv", |w, p| csvio::write_fluctuation_csv(w, &analysis.table, p))?;
    run.write_output("hurst_mfdfa.csv", |w, p| csvio::write_hurst_csv(w, &analysis.curve, p))?;
    if let Some(h2) = analysis.curve.h_at(2.0) {
        println!("mfdfa: h(2) = {h2:.4}");
    }
    Ok(())
}

fn cmd_sf(run: &mut RunContext, args: &SfArgs) -> Result<()> {
    let lv = match read_series_input(run, &args.input)? {
        SeriesInput::Rv(rv) => log_vol(&rv)?,
        SeriesInput::Values(values) => LogVolSeries::from_values(&values),
    };
    let q_grid = uniform_q_grid(args.q_step, args.q_max, args.q_step)?;
    if !(args.q_max > 0.0) {
        return Err(Error::invalid(format!("--q-max must be positive, got {}", args.q_max)));
    }
    let cfg = SfConfig {
        q_grid,
        delta_grid: default_delta_grid(lv.len(), args.delta_fit),
        fit_range: args.delta_fit,
    };
    let analysis = sf_hurst(&lv, &cfg)?;
    run.write_output("sf.csv", |w, p| csvio::write_sf_table_csv(w, &analysis.table, p))?;
    run.write_output("hurst_sf.csv", |w, p| csvio::write_zeta_csv(w, &analysis.zeta, p))?;
    if let Some(h2) = analysis.curve.h_at(2.0) {
        println!("sf: h(2) = {h2:.4}");
    }
    Ok(())
}

fn cmd_spectrum(run: &mut RunContext, args: &SpectrumArgs) -> Result<()> {
    let bytes = run.read_input(&args.input)?;
    let curve = csvio::read_hurst_csv(bytes.as_slice(), Estimator::Mfdfa, (0, 0))?;
    let spectrum = singularity_spectrum(&curve)?;
    run.write_output("spectrum.csv", |w, p| csvio::write_spectrum_csv(w, &spectrum, p))?;
    run.write_output("spectrum_summary.csv", |w, p| csvio::write_spectrum_summary_csv(w, &spectrum, p))?;
    println!("spectrum: delta_h = {:.4}, delta_alpha = {:.4}", spectrum.delta_h, spectrum.delta_alpha);
    Ok(())
}

/// Orders reported in the human-readable shuffle table, when on the grid.
const TABLE_QS: [f64; 7] = [-1.0, 0.2, 1.0, 1.6, 2.0, 3.0, 4.0];

fn cmd_shuffle(run: &mut RunContext, args: &ShuffleArgs) -> Result<()> {
    if args.replicates < 2 {
        return Err(Error::invalid(format!(
            "--replicates must be at least 2 for a standard deviation, got {}",
            args.replicates
        )));
    }
    let inc = load_increments(run, &args.input, args.delta)?;
    let cfg = mfdfa_config(inc.len(), &args.q, &args.scales)?;
    let seed = run.cli.seed;
    let result = shuffle_ensemble(&inc, &cfg, args.replicates, seed)?;
    run.manifest.seeds = result.seeds.clone();
    run.write_output("shuffle_ensemble.csv", |w, p| csvio::write_ensemble_csv(w, &result, p))?;
    run.write_output("shuffle_summary.csv", |w, p| csvio::write_ensemble_summary_csv(w, &result, p))?;

    println!("shuffled ({} replicates, seeds {}..):", result.n_replicates, seed);
    for q in TABLE_QS {
        if let Some(e) = result.at(q) {
            println!("  h({q}) = {}", format_uncertainty(e.mean_h, e.std_h));
        }
    }
    println!("  delta_h = {}", format_uncertainty(result.delta_h_mean, result.delta_h_std));
    println!("  delta_alpha = {}", format_uncertainty(result.delta_alpha_mean, result.delta_alpha_std));
    Ok(())
}

fn cmd_synth(run: &mut RunContext, args: &SynthArgs) -> Result<()> {
    let seed = run.cli.seed;
    let spec = match args.kind {
        SynthKind::Fbm => SynthSpec::Fbm { hurst: args.hurst, n: args.n, seed },
        SynthKind::White => SynthSpec::GaussianWhite { n: args.n, seed },
        SynthKind::Cascade => SynthSpec::BinomialCascade { a: args.a, levels: args.levels },
    };
    spec.validate()?;
    let mut values = spec.generate()?;
    if args.path {
        if matches!(args.kind, SynthKind::Cascade) {
            return Err(Error::invalid("--path applies to fbm and white only"));
        }
        let mut acc = 0.0;
        for v in &mut values {
            acc += *v;
            *v = acc;
        }
    }
    if !matches!(args.kind, SynthKind::Cascade) {
        run.manifest.seeds = vec![seed];
    }
    run.write_output("synth.csv", |w, p| csvio::write_series_csv(w, &values, p))?;
    println!("synth: {} values", values.len());
    Ok(())
}
