//! Command-line front end.
//!
//! Exit codes: 0 success, 1 bad input (I/O, schema, parameters), 2 numerical
//! failure. `verify` also exits 2 when the residual exceeds the tolerance.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::{self, BenchConfig, BenchRow, BenchRun, MatrixFamilySpec, PRESET_NAMES};
use crate::io as coeffs;
use crate::msf::{factorize, AlgoParams, Algorithm, DetMethod, Diagnostics, FmPath, NSchedule};
use crate::wavelet::DeltaSolver;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

/// Environment variable capping the worker pool (0 = all cores).
pub const THREADS_ENV: &str = "SPECFACT_THREADS";

#[derive(Parser, Debug)]
#[command(name = "specfact", version, about = "Matrix spectral factorization of Laurent-polynomial densities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Factorize a density file.
    Factor(FactorArgs),
    /// Compute the residual of a factor against a density.
    Verify(VerifyArgs),
    /// Run a benchmark sweep and write JSON lines.
    Bench(BenchArgs),
    /// Write a built-in fixture density (and its known factor, if any).
    Fixture(FixtureArgs),
    /// Write a random positive definite density.
    Random(RandomArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct TuningArgs {
    /// Constant truncation N at every step.
    #[arg(long = "N", value_name = "N", conflicts_with = "n_schedule")]
    pub n_const: Option<usize>,
    /// Truncation schedule: `prop:F` (N = F·m·n), `step:F` (N = F·m) or `const:N`.
    #[arg(long, value_name = "SPEC")]
    pub n_schedule: Option<String>,
    /// Grid exponent for JLE-2 and Wilson.
    #[arg(long)]
    pub kappa: Option<u32>,
    /// JLE-2 truncation as a fraction of the grid size.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Wilson iterations.
    #[arg(long)]
    pub iters: Option<usize>,
    /// Newton refinements of each scalar factor.
    #[arg(long)]
    pub scalar_iters: Option<usize>,
    /// Grid size for scalar factorizations.
    #[arg(long)]
    pub scalar_grid: Option<usize>,
    /// `fft` or `direct`.
    #[arg(long, value_parser = parse_det_method)]
    pub det_method: Option<DetMethod>,
    /// `determinants` or `power`.
    #[arg(long, value_parser = parse_fm_path)]
    pub fm_path: Option<FmPath>,
    /// `dense` or `displacement`.
    #[arg(long, value_parser = parse_delta_solver)]
    pub delta_solver: Option<DeltaSolver>,
    /// Reject the JLE-3 system below this reciprocal condition estimate.
    #[arg(long)]
    pub delta_rcond_min: Option<f64>,
    /// JLE-2 node solves below this estimate reuse the previous node.
    #[arg(long)]
    pub node_rcond_min: Option<f64>,
    /// JSON file with a full parameter set; flags override its fields.
    #[arg(long, value_name = "PATH")]
    pub params: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FactorArgs {
    /// `jle1`, `jle2`, `jle3` or `wilson`.
    #[arg(long, value_parser = parse_algorithm)]
    pub alg: Algorithm,
    /// Density coefficient file.
    #[arg(long)]
    pub input: PathBuf,
    /// Factor coefficient file to write.
    #[arg(long)]
    pub output: PathBuf,
    /// Diagnostics path; defaults to the output path with a `.diag.json` extension.
    #[arg(long)]
    pub diag: Option<PathBuf>,
    #[command(flatten)]
    pub tuning: TuningArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub density: PathBuf,
    #[arg(long)]
    pub factor: PathBuf,
    /// Largest accepted residual.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// `table1`, `table2`, `table3-desk`, `table4-desk` or `singular`.
    #[arg(long, conflicts_with_all = ["r", "n", "algs", "shift"])]
    pub preset: Option<String>,
    #[arg(long, required_unless_present = "preset")]
    pub r: Option<usize>,
    #[arg(long, required_unless_present = "preset")]
    pub n: Option<usize>,
    /// Number of seeds; seeds 0..SEEDS are used.
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    /// Comma-separated algorithm list.
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm, default_value = "jle1,jle3,wilson")]
    pub algs: Vec<Algorithm>,
    /// Multiple of the identity added to each random density.
    #[arg(long, default_value_t = 0.0)]
    pub shift: f64,
    /// JSON-lines report; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub tuning: TuningArgs,
}

#[derive(Args, Debug)]
pub struct FixtureArgs {
    /// Fixture name.
    pub name: String,
    /// Density output path.
    #[arg(long)]
    pub output: PathBuf,
    /// Known-factor output path.
    #[arg(long)]
    pub factor_output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RandomArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0)]
    pub shift: f64,
    #[arg(long)]
    pub output: PathBuf,
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_json_enum<T: serde::de::DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase())).map_err(|e| e.to_string())
}

fn parse_det_method(s: &str) -> std::result::Result<DetMethod, String> {
    parse_json_enum(s)
}

fn parse_fm_path(s: &str) -> std::result::Result<FmPath, String> {
    parse_json_enum(s)
}

fn parse_delta_solver(s: &str) -> std::result::Result<DeltaSolver, String> {
    parse_json_enum(s)
}

fn parse_schedule(spec: &str) -> Result<NSchedule> {
    let bad = || Error::InvalidParams(format!("bad N schedule `{spec}` (use prop:F, step:F or const:N)"));
    let (kind, value) = spec.split_once(':').ok_or_else(bad)?;
    match kind {
        "prop" => Ok(NSchedule::Proportional { factor: value.parse().map_err(|_| bad())? }),
        "step" => Ok(NSchedule::PerStep { factor: value.parse().map_err(|_| bad())? }),
        "const" => Ok(NSchedule::Constant { n: value.parse().map_err(|_| bad())? }),
        _ => Err(bad()),
    }
}

impl TuningArgs {
    /// `base` with every supplied flag applied.
    pub fn apply(&self, base: AlgoParams) -> Result<AlgoParams> {
        let mut p = match &self.params {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
                serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?
            }
            None => base,
        };
        if let Some(n) = self.n_const {
            p.n_schedule = Some(NSchedule::Constant { n });
        }
        if let Some(s) = &self.n_schedule {
            p.n_schedule = Some(parse_schedule(s)?);
        }
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {$(
                if let Some(v) = self.$flag { p.$field = v; }
            )*};
        }
        set!(kappa => kappa, ratio => ratio, iters => wilson_iters, scalar_iters => scalar_iters,
             scalar_grid => scalar_grid, det_method => det_method, fm_path => fm_path,
             delta_solver => delta_solver, delta_rcond_min => delta_rcond_min,
             node_rcond_min => node_rcond_min);
        p.validate()?;
        Ok(p)
    }

    fn is_empty(&self) -> bool {
        self.n_const.is_none()
            && self.n_schedule.is_none()
            && self.kappa.is_none()
            && self.ratio.is_none()
            && self.iters.is_none()
            && self.scalar_iters.is_none()
            && self.scalar_grid.is_none()
            && self.det_method.is_none()
            && self.fm_path.is_none()
            && self.delta_solver.is_none()
            && self.delta_rcond_min.is_none()
            && self.node_rcond_min.is_none()
            && self.params.is_none()
    }
}

#[derive(Serialize)]
struct DiagnosticsFile<'a> {
    err: f64,
    #[serde(flatten)]
    diagnostics: &'a Diagnostics,
}

pub fn diag_path(output: &Path) -> PathBuf {
    output.with_extension("diag.json")
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INPUT
    }
}

fn report(e: &Error) -> i32 {
    eprintln!("error: {e}");
    exit_code(e)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("diagnostics serialize");
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}

pub fn cmd_factor(args: &FactorArgs) -> i32 {
    let run = || -> Result<f64> {
        let params = args.tuning.apply(AlgoParams::default())?;
        let s = coeffs::load_density(&args.input)?;
        let result = factorize(args.alg, &s, &params)?;
        coeffs::save(&args.output, &result.splus)?;
        let diag = args.diag.clone().unwrap_or_else(|| diag_path(&args.output));
        write_json(&diag, &DiagnosticsFile { err: result.err, diagnostics: &result.diagnostics })?;
        for w in &result.diagnostics.warnings {
            eprintln!("warning: {w}");
        }
        Ok(result.err)
    };
    match run() {
        Ok(err) => {
            println!("err {err:e}");
            EXIT_OK
        }
        Err(e) => report(&e),
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> i32 {
    let run = || -> Result<f64> {
        let s = coeffs::load_density(&args.density)?;
        let f = coeffs::load_factor(&args.factor)?;
        if f.rows() != s.rows() || f.cols() != s.cols() {
            return Err(Error::Schema(format!(
                "factor is {}x{} but density is {}x{}",
                f.rows(),
                f.cols(),
                s.rows(),
                s.cols()
            )));
        }
        Ok(harness::factorization_error(&s, &f))
    };
    match run() {
        Ok(err) => {
            println!("err {err:e}");
            if err <= args.tol {
                EXIT_OK
            } else {
                eprintln!("residual {err:e} exceeds tolerance {:e}", args.tol);
                EXIT_NUMERICAL
            }
        }
        Err(e) => report(&e),
    }
}

fn bench_config(args: &BenchArgs) -> Result<BenchConfig> {
    let mut config = match &args.preset {
        Some(name) => harness::preset(name, args.seeds)?,
        None => {
            let (r, n) = (args.r.unwrap_or(0), args.n.unwrap_or(0));
            MatrixFamilySpec::new(r, n, 0).with_shift(args.shift).validate()?;
            let runs: Vec<BenchRun> =
                args.algs.iter().map(|&alg| BenchRun { alg, params: AlgoParams::default() }).collect();
            BenchConfig { cases: harness::sweep(r, n, args.shift, 0..args.seeds, &runs) }
        }
    };
    if !args.tuning.is_empty() {
        for run in config.cases.iter_mut().flat_map(|c| c.runs.iter_mut()) {
            run.params = args.tuning.apply(run.params.clone())?;
        }
    }
    Ok(config)
}

fn summarize(rows: &[BenchRow]) {
    for row in rows {
        let what = match (&row.fixture, row.seed) {
            (Some(f), _) => f.clone(),
            (None, Some(seed)) => format!("{}x{} seed {seed}", row.r, row.n),
            (None, None) => format!("{}x{}", row.r, row.n),
        };
        match row.err {
            Some(err) => eprintln!("{:<7} {what:<18} err {err:.3e}  {:.2}s", row.alg, row.time_s),
            None => eprintln!("{:<7} {what:<18} {}", row.alg, row.status),
        }
    }
}

pub fn cmd_bench(args: &BenchArgs) -> i32 {
    let run = || -> Result<()> {
        if let Some(name) = &args.preset {
            if !PRESET_NAMES.contains(&name.as_str()) {
                return Err(Error::InvalidParams(format!(
                    "unknown preset `{name}` (expected one of {})",
                    PRESET_NAMES.join(", ")
                )));
            }
        }
        let config = bench_config(args)?;
        let rows = harness::run_bench(&config);
        summarize(&rows);
        let io_err = |path: &Path, e: std::io::Error| Error::Io { path: path.display().to_string(), source: e };
        match &args.output {
            Some(path) => {
                let file = File::create(path).map_err(|e| io_err(path, e))?;
                harness::write_jsonl(&rows, BufWriter::new(file)).map_err(|e| io_err(path, e))
            }
            None => harness::write_jsonl(&rows, std::io::stdout().lock()).map_err(|e| io_err(Path::new("<stdout>"), e)),
        }
    };
    match run() {
        Ok(()) => EXIT_OK,
        Err(e) => report(&e),
    }
}

pub fn cmd_fixture(args: &FixtureArgs) -> i32 {
    let run = || -> Result<()> {
        let f = harness::fixture(&args.name)?;
        coeffs::save(&args.output, &f.density)?;
        if let Some(path) = &args.factor_output {
            match &f.known_factor {
                Some(k) => coeffs::save(path, k)?,
                None => return Err(Error::InvalidParams(format!("fixture `{}` has no known factor", f.name))),
            }
        }
        Ok(())
    };
    match run() {
        Ok(()) => EXIT_OK,
        Err(e) => report(&e),
    }
}

pub fn cmd_random(args: &RandomArgs) -> i32 {
    let spec = MatrixFamilySpec::new(args.r, args.n, args.seed).with_shift(args.shift);
    match harness::random_spd(&spec).and_then(|s| coeffs::save(&args.output, &s)) {
        Ok(()) => EXIT_OK,
        Err(e) => report(&e),
    }
}

/// Sizes the global worker pool from [`THREADS_ENV`].
pub fn init_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParams(format!("{THREADS_ENV}={value} is not a thread count")))?;
    // A pool already built by an earlier call keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cli: &Cli) -> i32 {
    if let Err(e) = init_threads() {
        return report(&e);
    }
    match &cli.command {
        Command::Factor(a) => cmd_factor(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Fixture(a) => cmd_fixture(a),
        Command::Random(a) => cmd_random(a),
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Usage errors exit with 1 so that 2 stays reserved for numerical failures.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_OK
            }
        }
    }
}
