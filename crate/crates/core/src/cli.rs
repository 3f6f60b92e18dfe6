//! Command-line front end: `render`, `verify` and `compare`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::compare::{compare, integrator_name, DEFAULT_REFERENCE_SPP};
use crate::error::{Error, Result};
use crate::integrators::{render, Integrator, RenderConfig, WeightMode};
use crate::pathwalk::WrongWeights;
use crate::scene::{builtin_scene, parse_scene, Scene};
use crate::verification::{parse_wrong_weights, run_verify, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_SCENE_ERROR: i32 = 2;
pub const EXIT_NAN: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Caps the rendering worker count.
pub const THREADS_ENV: &str = "MISWEAVE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "misweave", version, about = "Bidirectional path tracing with cross-checked MIS weights")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render a scene to a PPM or PFM image.
    Render(RenderArgs),
    /// Check the weight engines against each other and the oracles.
    Verify(VerifyArgs),
    /// Score pt, lt and bpt against a high-sample bpt reference.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
struct RenderArgs {
    /// Scene file, or one of the built-in names furnace, box, smalllight.
    #[arg(long)]
    scene: String,
    #[arg(long, default_value = "bpt", value_parser = parse_integrator)]
    integrator: Integrator,
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    spp: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output image; `.pfm` writes linear radiance, anything else PPM.
    #[arg(long)]
    out: PathBuf,
    /// Per-pixel statistics CSV; the strategy table goes next to it.
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long, default_value = "prob", value_parser = parse_weight_mode)]
    weight_mode: WeightMode,
    #[arg(long, default_value = "none", value_parser = parse_wrong_weights)]
    wrong_weights: WrongWeights,
    /// Worker count; overrides the environment variable.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value = "box")]
    scene: String,
    /// Random paths per option combination.
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    paths: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `key=value` settings: rr, shading, random_connect (on|off) and
    /// wrong-weights. Unset axes run both ways.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    options: Vec<String>,
    /// Suite report CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-path, per-strategy diagnostic CSV.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long)]
    scene: String,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    spp: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_REFERENCE_SPP as u64, value_parser = clap::value_parser!(u64).range(1..))]
    reference_spp: u64,
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_integrator(s: &str) -> std::result::Result<Integrator, String> {
    s.parse()
}

fn parse_weight_mode(s: &str) -> std::result::Result<WeightMode, String> {
    s.parse()
}

/// Loads a scene file, falling back to the built-in scene of that name.
pub fn load_scene(arg: &str) -> Result<Scene> {
    let path = Path::new(arg);
    if path.is_file() {
        return parse_scene(&std::fs::read_to_string(path)?);
    }
    builtin_scene(arg).ok_or_else(|| Error::InvalidScene(format!("no scene file or built-in scene named '{arg}'")))
}

enum Failure {
    Usage(String),
    Scene(Error),
    Io(PathBuf, std::io::Error),
}

fn threads(flag: Option<usize>) -> std::result::Result<Option<usize>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .map(Some)
            .ok_or_else(|| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> std::result::Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn strategies_path(stats: &Path) -> PathBuf {
    let stem = stats.file_stem().map_or_else(|| "stats".into(), |s| s.to_string_lossy().into_owned());
    stats.with_file_name(format!("{stem}.strategies.csv"))
}

fn cmd_render(a: RenderArgs) -> std::result::Result<i32, Failure> {
    let scene = load_scene(&a.scene).map_err(Failure::Scene)?;
    let mut config = RenderConfig::new(a.integrator, a.spp as usize, a.seed);
    config.weight_mode = a.weight_mode;
    config.verify_mode = a.weight_mode == WeightMode::Both;
    config.wrong_weights = a.wrong_weights;
    config.threads = threads(a.threads)?;
    let (img, stats) = render(&scene, &config).map_err(Failure::Scene)?;
    img.write(&a.out).map_err(|e| Failure::Io(a.out.clone(), e))?;
    if let Some(p) = &a.stats {
        let csv = if config.verify_mode { stats.to_csv_with_deviation() } else { stats.to_csv() };
        write(p, csv)?;
        write(&strategies_path(p), stats.strategies_csv())?;
    }
    eprintln!(
        "{} {}x{} spp={} weighted_paths={} nan={}",
        integrator_name(a.integrator),
        img.width,
        img.height,
        a.spp,
        stats.weighted_paths,
        stats.nan_count
    );
    if config.verify_mode {
        eprintln!("max_engine_deviation={:e}", stats.max_engine_deviation);
    }
    if stats.nan_count > 0 {
        eprintln!("error: {} non-finite contributions were excluded", stats.nan_count);
        return Ok(EXIT_NAN);
    }
    Ok(EXIT_OK)
}

fn cmd_verify(a: VerifyArgs) -> std::result::Result<i32, Failure> {
    let opts = VerifyOptions::parse(&a.options).map_err(Failure::Usage)?;
    let scene = load_scene(&a.scene).map_err(Failure::Scene)?;
    let report = run_verify(&scene, a.paths as usize, a.seed, &opts, a.dump.is_some()).map_err(Failure::Scene)?;
    for s in &report.suites {
        println!(
            "{:<24} cases={:<8} max_rel_err={:<12.3e} tol={:.0e} {}",
            s.name,
            s.n_cases,
            s.max_rel_err,
            s.tolerance,
            if s.pass() { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "paths={} acceptance_rate={:.4} skipped={} rr_affected={} rr_violations={} ({:.2}%) equivalence_breaks={}",
        report.n_paths,
        report.acceptance_rate(),
        report.skipped,
        report.rr_affected,
        report.rr_violations,
        100.0 * report.rr_violation_fraction(),
        report.equivalence_breaks
    );
    if let Some(p) = &a.out {
        write(p, report.to_csv())?;
    }
    if let Some(p) = &a.dump {
        write(p, report.dump_csv())?;
    }
    if report.pass() {
        println!("verify: PASS");
        Ok(EXIT_OK)
    } else {
        println!("verify: FAIL");
        Ok(EXIT_VERIFY_FAILED)
    }
}

fn cmd_compare(a: CompareArgs) -> std::result::Result<i32, Failure> {
    let scene = load_scene(&a.scene).map_err(Failure::Scene)?;
    let report = compare(&scene, a.spp as usize, a.seed, a.reference_spp as usize, threads(a.threads)?).map_err(Failure::Scene)?;
    for r in &report.rows {
        println!("{:<4} mse={:.6e} nan={}", integrator_name(r.integrator), r.mse, r.stats.nan_count);
    }
    write(&a.out, report.to_csv())?;
    let nan: usize = report.rows.iter().map(|r| r.stats.nan_count).sum();
    Ok(if nan > 0 { EXIT_NAN } else { EXIT_OK })
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Render(a) => cmd_render(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Compare(a) => cmd_compare(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Scene(e)) => {
            eprintln!("error: {e}");
            EXIT_SCENE_ERROR
        }
        Err(Failure::Io(p, e)) => {
            eprintln!("error: {}: {e}", p.display());
            EXIT_SCENE_ERROR
        }
    }
}
