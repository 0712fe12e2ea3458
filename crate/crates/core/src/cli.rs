//! Command-line front end.
//!
//! Exit statuses: 0 success, 1 usage or configuration error, 2 data error,
//! 3 internal error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::eval::forward_trace;
use crate::fn_trainer::FnTrainConfig;
use crate::io::{
    append_metrics, generate_dataset, load_image, load_model, save_image, save_model,
    DatasetManifest, GeneratorConfig, MetricsRecord, Phase, MANIFEST_NAME,
};
use crate::lattice::{Window, WindowVector};
use crate::loss::{mean_loss, SampleSet};
use crate::oracle::global_single_layer;
use crate::window_search::{search_windows_observed, SearchEvent, WinSearchConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

pub const OUT_DIR_ENV: &str = "USDMNN_OUT_DIR";

pub const MODEL_FILE: &str = "model.txt";
pub const METRICS_FILE: &str = "metrics.csv";
pub const SUMMARY_FILE: &str = "summary.txt";

#[derive(Debug, Parser)]
#[command(
    name = "usdmnn",
    version,
    about = "Train and apply sequential W-operator networks on binary images"
)]
pub struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic noisy-digit boundary dataset.
    Generate(GenerateArgs),
    /// Search windows and characteristic functions on a dataset.
    Train(TrainArgs),
    /// Print the mean IoU error of a model on each role of a dataset.
    Eval(EvalArgs),
    /// Apply a model to one image.
    Apply(ApplyArgs),
    /// Exhaustive single-layer search for the global minimum training error.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV, default_value = "runs")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub train: usize,
    #[arg(long, default_value_t = 10)]
    pub validation: usize,
    #[arg(long, default_value_t = 56)]
    pub side: usize,
    /// Per-pixel flip probability of the inputs.
    #[arg(long, default_value_t = 0.05)]
    pub noise: f64,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5,6,7,8,9")]
    pub digits: Vec<u8>,
    #[arg(long, default_value_t = 5)]
    pub min_scale: usize,
    #[arg(long, default_value_t = 6)]
    pub max_scale: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Sampled neighbors and batches as configured.
    Stochastic,
    /// Every neighbor, one batch holding the whole sample.
    Deterministic,
}

/// A neighbor count or `all`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighbors {
    All,
    Count(usize),
}

fn parse_neighbors(s: &str) -> std::result::Result<Neighbors, String> {
    if s == "all" {
        return Ok(Neighbors::All);
    }
    match s.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("expected a positive count or `all`, got {s:?}")),
        Ok(n) => Ok(Neighbors::Count(n)),
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset manifest, or the directory holding it.
    #[arg(long)]
    pub data: PathBuf,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV, default_value = "runs")]
    pub out: PathBuf,
    /// Number of layers.
    #[arg(long, default_value_t = 2)]
    pub layers: usize,
    /// Window frame side, one value for all layers or one per layer.
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub side: Vec<usize>,
    /// Count or `all`; defaults to 10, or `all` in deterministic mode.
    #[arg(long, value_parser = parse_neighbors)]
    pub fn_neighbors: Option<Neighbors>,
    /// Defaults to min(10, training sample size).
    #[arg(long)]
    pub fn_batch: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub fn_epochs: usize,
    /// Count or `all`; defaults to `all`.
    #[arg(long, value_parser = parse_neighbors)]
    pub win_neighbors: Option<Neighbors>,
    /// Defaults to min(10, validation sample size).
    #[arg(long)]
    pub win_batch: Option<usize>,
    #[arg(long, default_value_t = 19)]
    pub win_epochs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Stochastic)]
    pub mode: Mode,
    /// Label for the rows of the metrics log.
    #[arg(long, default_value = "run")]
    pub run_id: String,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Dataset manifest, or the directory holding it.
    #[arg(long)]
    pub data: PathBuf,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    /// Output image; `.png` writes PNG, anything else a packed bitmap.
    #[arg(long)]
    pub output: PathBuf,
    /// Directory receiving the input and every layer output as `stage_<i>`.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Dataset manifest, or the directory holding it.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub side: usize,
    #[arg(long, default_value_t = 4)]
    pub max_points: usize,
}

/// Resolved training settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub init: WindowVector,
    pub search: WinSearchConfig,
    pub out: PathBuf,
    pub run_id: String,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter(_)
        | Error::InvalidWindow(_)
        | Error::InvalidDescriptor(_)
        | Error::InvalidConfig(_)
        | Error::Refused(_) => EXIT_USAGE,
        Error::InvalidPair(_)
        | Error::InvalidSample(_)
        | Error::Format { .. }
        | Error::Io { .. } => EXIT_DATA,
        Error::OutOfBounds { .. } => EXIT_INTERNAL,
    }
}

fn manifest_path(data: &Path) -> PathBuf {
    if data.is_dir() {
        data.join(MANIFEST_NAME)
    } else {
        data.to_path_buf()
    }
}

fn load_dataset(data: &Path) -> Result<(SampleSet, SampleSet)> {
    DatasetManifest::load(manifest_path(data))?.load_samples()
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn resolve_neighbors(
    given: Option<Neighbors>,
    default: Neighbors,
    full: usize,
    mode: Mode,
    what: &str,
) -> Result<usize> {
    let given = match (mode, given) {
        (_, Some(n)) => n,
        (Mode::Stochastic, None) => default,
        (Mode::Deterministic, None) => Neighbors::All,
    };
    match (mode, given) {
        (_, Neighbors::All) => Ok(usize::MAX),
        (Mode::Stochastic, Neighbors::Count(n)) => Ok(n),
        (Mode::Deterministic, Neighbors::Count(n)) if n >= full => Ok(usize::MAX),
        (Mode::Deterministic, Neighbors::Count(n)) => Err(Error::InvalidConfig(format!(
            "deterministic mode needs the full {what} neighborhood ({full}), got {n}"
        ))),
    }
}

fn resolve_batch(given: Option<usize>, samples: usize, mode: Mode, what: &str) -> Result<usize> {
    match (mode, given) {
        (Mode::Stochastic, Some(b)) => Ok(b),
        (Mode::Stochastic, None) => Ok(samples.min(10)),
        (Mode::Deterministic, None) => Ok(samples),
        (Mode::Deterministic, Some(b)) if b == samples => Ok(b),
        (Mode::Deterministic, Some(b)) => Err(Error::InvalidConfig(format!(
            "deterministic mode needs {what} batch size {samples}, got {b}"
        ))),
    }
}

/// Builds the run configuration for samples of the given sizes.
pub fn resolve_train_config(args: &TrainArgs, train_n: usize, val_n: usize) -> Result<RunConfig> {
    if args.layers == 0 {
        return Err(Error::InvalidConfig(
            "at least one layer is required".into(),
        ));
    }
    let sides = match args.side.as_slice() {
        [d] => vec![*d; args.layers],
        s if s.len() == args.layers => s.to_vec(),
        s => {
            return Err(Error::InvalidConfig(format!(
                "{} sides given for {} layers",
                s.len(),
                args.layers
            )))
        }
    };
    let init = WindowVector::new(
        sides
            .iter()
            .map(|&d| Window::cross(d))
            .collect::<Result<Vec<_>>>()?,
    )?;
    // largest possible neighborhoods over windows in these frames
    let full_fn = sides
        .iter()
        .map(|&d| 1usize.checked_shl((d * d) as u32).unwrap_or(usize::MAX))
        .fold(0usize, usize::saturating_add);
    let full_win: usize = sides.iter().map(|&d| d * d).sum();
    let fn_config = FnTrainConfig {
        neighbors: resolve_neighbors(
            args.fn_neighbors,
            Neighbors::Count(10),
            full_fn,
            args.mode,
            "function",
        )?,
        batch_size: resolve_batch(args.fn_batch, train_n, args.mode, "training")?,
        epochs: args.fn_epochs,
        seed: args.seed,
    };
    let search = WinSearchConfig {
        neighbors: resolve_neighbors(
            args.win_neighbors,
            Neighbors::All,
            full_win,
            args.mode,
            "window",
        )?,
        batch_size: resolve_batch(args.win_batch, val_n, args.mode, "validation")?,
        epochs: args.win_epochs,
        seed: args.seed,
        fn_config,
    };
    search.validate(train_n, val_n)?;
    if args.run_id.is_empty() || args.run_id.contains([',', '\n']) {
        return Err(Error::InvalidConfig(format!(
            "bad run id {:?}",
            args.run_id
        )));
    }
    Ok(RunConfig {
        init,
        search,
        out: args.out.clone(),
        run_id: args.run_id.clone(),
    })
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let cfg = GeneratorConfig {
        side: args.side,
        digits: args.digits.clone(),
        train: args.train,
        validation: args.validation,
        noise: args.noise,
        min_scale: args.min_scale,
        max_scale: args.max_scale,
        seed: args.seed,
    };
    cfg.validate()?;
    create_dir(&args.out)?;
    let manifest = generate_dataset(&cfg, &args.out)?;
    println!(
        "wrote {} training and {} validation pairs to {}",
        manifest.train.len(),
        manifest.validation.len(),
        args.out.join(MANIFEST_NAME).display()
    );
    Ok(())
}

/// Deterministic summary of a finished run.
fn format_summary(
    cfg: &RunConfig,
    res: &crate::window_search::WinSearchResult,
    train_loss: f64,
    val_loss: f64,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "layers {}", res.best_windows.len());
    let _ = writeln!(s, "initial_windows {}", cfg.init.key());
    let _ = writeln!(s, "best_windows {}", res.best_windows.key());
    let _ = writeln!(s, "train_loss {train_loss}");
    let _ = writeln!(s, "validation_loss {val_loss}");
    let _ = writeln!(s, "windows_visited {}", res.windows_visited);
    let _ = writeln!(s, "win_epochs_to_min {}", res.epochs_to_min);
    let _ = writeln!(s, "inner_trainings {}", res.cache.trainings);
    let _ = writeln!(s, "inner_epochs {}", res.cache.inner_epochs);
    s
}

pub fn cmd_train(args: &TrainArgs) -> Result<()> {
    let (train, val) = load_dataset(&args.data)?;
    let cfg = resolve_train_config(args, train.len(), val.len())?;
    create_dir(&cfg.out)?;
    let metrics = cfg.out.join(METRICS_FILE);
    if metrics.exists() {
        fs::remove_file(&metrics).map_err(|e| Error::io(&metrics, e))?;
    }

    let start = Instant::now();
    let mut log_err = None;
    let res = search_windows_observed(&cfg.init, &train, &val, &cfg.search, &mut |event| {
        let record = match event {
            SearchEvent::FnEpoch { key, record } => MetricsRecord {
                run_id: format!("{}/{key}", cfg.run_id),
                phase: Phase::Fn,
                epoch: record.epoch,
                batches: record.batches,
                current_loss: record.current_loss,
                best_loss: record.best_loss,
                windows_visited: None,
                elapsed_secs: record.elapsed.as_secs_f64(),
            },
            SearchEvent::WinEpoch(record) => {
                println!(
                    "epoch {:>3}  current {:.4}  best {:.4}  windows {}  {:.1}s",
                    record.epoch,
                    record.current_loss,
                    record.best_loss,
                    record.windows_visited,
                    record.elapsed.as_secs_f64()
                );
                MetricsRecord {
                    run_id: cfg.run_id.clone(),
                    phase: Phase::Win,
                    epoch: record.epoch,
                    batches: record.batches,
                    current_loss: record.current_loss,
                    best_loss: record.best_loss,
                    windows_visited: Some(record.windows_visited),
                    elapsed_secs: record.elapsed.as_secs_f64(),
                }
            }
        };
        if log_err.is_none() {
            log_err = append_metrics(&record, &metrics).err();
        }
    })?;
    if let Some(e) = log_err {
        return Err(e);
    }

    let train_loss = mean_loss(&res.best_params, train.pairs())?;
    let val_loss = mean_loss(&res.best_params, val.pairs())?;
    save_model(&res.best_params, cfg.out.join(MODEL_FILE))?;
    let summary = format_summary(&cfg, &res, train_loss, val_loss);
    let path = cfg.out.join(SUMMARY_FILE);
    fs::write(&path, &summary).map_err(|e| Error::io(&path, e))?;
    print!("{summary}");
    println!("total_time_s {:.1}", start.elapsed().as_secs_f64());
    Ok(())
}

pub fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let params = load_model(&args.model)?;
    let (train, val) = load_dataset(&args.data)?;
    println!("train {}", mean_loss(&params, train.pairs())?);
    println!("validation {}", mean_loss(&params, val.pairs())?);
    Ok(())
}

pub fn cmd_apply(args: &ApplyArgs) -> Result<()> {
    let params = load_model(&args.model)?;
    let input = load_image(&args.input)?;
    let trace = forward_trace(&params, &input);
    save_image(trace.output(), &args.output)?;
    if let Some(dir) = &args.trace {
        create_dir(dir)?;
        let ext = args
            .output
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or("pbm");
        for (i, stage) in trace.stages.iter().enumerate() {
            save_image(stage, dir.join(format!("stage_{i}.{ext}")))?;
        }
    }
    Ok(())
}

pub fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    let (train, _) = load_dataset(&args.data)?;
    let g = global_single_layer(args.side, args.max_points, &train)?;
    println!("min_train_loss {}", g.result.min_loss);
    println!("window {}", g.window.key());
    println!("table {}", g.result.best_tables[0].to_hex());
    println!("optimal_tables {}", g.result.best_tables.len());
    println!("windows_examined {}", g.windows_examined);
    Ok(())
}

fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::Generate(a) => cmd_generate(a),
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Apply(a) => cmd_apply(a),
        Command::Oracle(a) => cmd_oracle(a),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match cli.workers {
        Some(0) => Err(Error::InvalidConfig("workers must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => {
                eprintln!("error: cannot start worker pool: {e}");
                return EXIT_INTERNAL;
            }
        },
        None => dispatch(&cli.command),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
