//! Command-line front end: `texfx <transfer|analyze|batch> [flags]`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::{analyze, AnalysisParams, PartitionMode};
use crate::debug::{dump_source, dump_target};
use crate::error::{ErrorKind, Result, TexfxError};
use crate::image::{load_image, save_png};
use crate::synthesis::{prepare_source, transfer_with, LevelTrace, Mode, SourceContext, SynthesisParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

pub fn exit_code(err: &TexfxError) -> i32 {
    match err.kind() {
        ErrorKind::Usage => EXIT_USAGE,
        ErrorKind::Io => EXIT_IO,
        ErrorKind::Degenerate => EXIT_DEGENERATE,
    }
}

#[derive(Debug, Parser)]
#[command(name = "texfx", version, about = "Transfer text effects from a stylized exemplar")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Stylize one target glyph image.
    Transfer(TransferArgs),
    /// Measure how well location predicts color and scale in an exemplar.
    Analyze(AnalyzeArgs),
    /// Stylize every PNG in a directory with one shared source.
    Batch(BatchArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Repeat for more log output.
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SourceArgs {
    #[arg(long)]
    source_text: PathBuf,
    #[arg(long)]
    source_style: PathBuf,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 0.01)]
    lambda1: f64,
    #[arg(long, default_value_t = 0.005)]
    lambda2: f64,
    #[arg(long, default_value_t = 10.0)]
    lambda3: f64,
    #[arg(long, default_value_t = 0.3)]
    omega: f64,
    #[arg(long, default_value_t = 5)]
    patch_size: usize,
    #[arg(long, default_value_t = 5)]
    scales: usize,
    #[arg(long, default_value_t = 10)]
    pyramid_depth: usize,
    #[arg(long, default_value_t = 32)]
    coarsest: usize,
    #[arg(long, default_value_t = 10)]
    iterations: usize,
    /// baseline or full.
    #[arg(long, default_value = "full")]
    mode: String,
    #[arg(long, default_value_t = crate::geometry::DEFAULT_OUTLIER_FRACTION)]
    outlier_fraction: f64,
    /// Write intermediate statistics next to the output.
    #[arg(long)]
    dump_debug: bool,
}

#[derive(Debug, Args)]
struct TransferArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    target_text: PathBuf,
    /// Output PNG; a JSON sidecar is written beside it.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    synth: SynthArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct BatchArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    target_dir: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    synth: SynthArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// JSON report path (stdout when omitted).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Comma-separated partition modes, in output order.
    #[arg(long, value_delimiter = ',', default_value = "random,grid,angle,ring,distance")]
    modes: Vec<String>,
    #[arg(long, default_value_t = 16)]
    partitions: usize,
    #[command(flatten)]
    common: Common,
}

impl SynthArgs {
    fn params(&self, seed: u64) -> Result<SynthesisParams> {
        let params = SynthesisParams {
            patch_size: self.patch_size,
            scales: self.scales,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            lambda3: self.lambda3,
            omega: self.omega,
            pyramid_depth: self.pyramid_depth,
            coarsest: self.coarsest,
            iterations: self.iterations,
            seed,
            mode: self.mode.parse::<Mode>()?,
            outlier_fraction: self.outlier_fraction,
            ..SynthesisParams::default()
        };
        params.validate()?;
        Ok(params)
    }
}

/// Per-glyph seed: the base seed plus the first 8 bytes (little-endian) of the
/// SHA-256 of the file name.
pub fn derive_seed(base: u64, file_name: &str) -> u64 {
    let digest = Sha256::digest(file_name.as_bytes());
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    base.wrapping_add(u64::from_le_bytes(head))
}

/// `o.png` -> `o.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

/// `o.png` -> `o_debug/`.
pub fn debug_dir(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_debug"))
}

#[derive(Debug, Serialize)]
struct Sidecar<'a> {
    output: String,
    source_text: String,
    source_style: String,
    target_text: String,
    seed: u64,
    params: &'a SynthesisParams,
    pyramid_depth: usize,
    levels: &'a [LevelTrace],
    wall_time_seconds: f64,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| TexfxError::Encode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    fs::write(path, text + "\n").map_err(|source| TexfxError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_source(args: &SourceArgs, params: &SynthesisParams) -> Result<SourceContext> {
    let text = load_image(&args.source_text)?;
    let style = load_image(&args.source_style)?;
    prepare_source(&text, &style, params)
}

/// Synthesizes one target against a prepared source, writing the PNG and its
/// sidecar.
fn transfer_one(
    src: &SourceContext,
    source: &SourceArgs,
    target: &Path,
    out: &Path,
    params: &SynthesisParams,
    dump: bool,
) -> Result<()> {
    let start = Instant::now();
    let t_text = load_image(target)?;
    let result = transfer_with(src, &t_text, params)?;
    save_png(&result.image, out)?;
    let elapsed = start.elapsed().as_secs_f64();
    if dump {
        let dir = debug_dir(out);
        dump_source(&dir, src)?;
        dump_target(&dir, &result)?;
    }
    let sidecar = Sidecar {
        output: out.display().to_string(),
        source_text: source.source_text.display().to_string(),
        source_style: source.source_style.display().to_string(),
        target_text: target.display().to_string(),
        seed: params.seed,
        params,
        pyramid_depth: result.pyramid_depth,
        levels: &result.trace,
        wall_time_seconds: elapsed,
    };
    write_json(&sidecar_path(out), &sidecar)?;
    info!("wrote {} in {elapsed:.2}s", out.display());
    Ok(())
}

fn run_transfer(args: &TransferArgs) -> Result<()> {
    let params = args.synth.params(args.common.seed)?;
    let src = load_source(&args.source, &params)?;
    transfer_one(&src, &args.source, &args.target_text, &args.out, &params, args.synth.dump_debug)
}

#[derive(Debug, Serialize)]
struct ManifestEntry {
    target: String,
    status: &'static str,
    seed: u64,
    output: Option<String>,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct Manifest {
    source_text: String,
    source_style: String,
    base_seed: u64,
    succeeded: usize,
    failed: usize,
    entries: Vec<ManifestEntry>,
}

fn run_batch(args: &BatchArgs) -> Result<i32> {
    let params = args.synth.params(args.common.seed)?;
    let listing = fs::read_dir(&args.target_dir).map_err(|source| TexfxError::Io {
        path: args.target_dir.clone(),
        source,
    })?;
    let mut targets: Vec<PathBuf> = listing
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"))
        })
        .collect();
    targets.sort();
    if targets.is_empty() {
        return Err(TexfxError::InvalidArgument(format!(
            "no PNG files in {}",
            args.target_dir.display()
        )));
    }
    fs::create_dir_all(&args.out).map_err(|source| TexfxError::Io {
        path: args.out.clone(),
        source,
    })?;
    let src = load_source(&args.source, &params)?;
    let outcomes: Vec<(ManifestEntry, Option<TexfxError>)> = targets
        .par_iter()
        .map(|target| {
            let name = target.file_name().unwrap_or_default().to_string_lossy().into_owned();
            let seed = derive_seed(params.seed, &name);
            let out = args.out.join(&name);
            let glyph_params = SynthesisParams {
                seed,
                ..params.clone()
            };
            match transfer_one(&src, &args.source, target, &out, &glyph_params, args.synth.dump_debug) {
                Ok(()) => (
                    ManifestEntry {
                        target: name,
                        status: "ok",
                        seed,
                        output: Some(out.display().to_string()),
                        error: None,
                    },
                    None,
                ),
                Err(e) => {
                    warn!("{name}: {e}");
                    (
                        ManifestEntry {
                            target: name,
                            status: "failed",
                            seed,
                            output: None,
                            error: Some(e.to_string()),
                        },
                        Some(e),
                    )
                }
            }
        })
        .collect();
    let failed = outcomes.iter().filter(|o| o.1.is_some()).count();
    let succeeded = outcomes.len() - failed;
    let first_error = outcomes.iter().find_map(|o| o.1.as_ref()).map(exit_code);
    let manifest = Manifest {
        source_text: args.source.source_text.display().to_string(),
        source_style: args.source.source_style.display().to_string(),
        base_seed: params.seed,
        succeeded,
        failed,
        entries: outcomes.into_iter().map(|o| o.0).collect(),
    };
    write_json(&args.out.join("manifest.json"), &manifest)?;
    info!("batch: {succeeded} succeeded, {failed} failed");
    Ok(if succeeded > 0 {
        EXIT_OK
    } else {
        first_error.unwrap_or(EXIT_DEGENERATE)
    })
}

fn run_analyze(args: &AnalyzeArgs) -> Result<()> {
    let modes = args
        .modes
        .iter()
        .map(|m| m.parse::<PartitionMode>())
        .collect::<Result<Vec<_>>>()?;
    if modes.is_empty() {
        return Err(TexfxError::InvalidArgument("--modes is empty".into()));
    }
    let text = load_image(&args.source.source_text)?;
    let style = load_image(&args.source.source_style)?;
    let params = AnalysisParams {
        partitions: args.partitions,
        seed: args.common.seed,
        ..AnalysisParams::default()
    };
    let name = args
        .source
        .source_style
        .file_name()
        .unwrap_or_default()
        .to_string_lossy()
        .into_owned();
    let report = analyze(&name, &text, &style, &modes, &params)?;
    match &args.report {
        Some(path) => write_json(path, &report),
        None => {
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{text}");
            Ok(())
        }
    }
}

fn setup(common: &Common) {
    let level = match common.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .try_init();
    if let Some(n) = common.threads {
        if rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().is_err() {
            warn!("thread pool already initialized; --threads ignored");
        }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
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
    let result = match &cli.command {
        Command::Transfer(a) => {
            setup(&a.common);
            run_transfer(a).map(|_| EXIT_OK)
        }
        Command::Batch(a) => {
            setup(&a.common);
            run_batch(a)
        }
        Command::Analyze(a) => {
            setup(&a.common);
            run_analyze(a).map(|_| EXIT_OK)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
