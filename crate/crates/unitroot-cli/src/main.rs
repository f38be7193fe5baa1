//! Command-line driver for exact maximum-likelihood AR(1) unit root tests.
//!
//! Subcommands:
//!
//! * `test`        — run the unit root test on a series file (JSON report)
//! * `mctest`      — Monte-Carlo unit root test with a simulated p-value (JSON)
//! * `cv`          — estimate finite-sample critical values by simulation (CSV)
//! * `fit-surface` — fit a critical-value response surface over 1/n (JSON)
//! * `simlimit`    — simulate the limiting null distribution (CSV quantiles)
//! * `power`       — empirical power study over an (n, rho) grid (CSV)
//! * `diag`        — residual diagnostics for the fitted AR(1) model (JSON)
//!
//! Conventions shared by every subcommand:
//!
//! * stdout carries only the result payload; warnings and errors go to stderr.
//! * Every output embeds the seed, the package version, and an echo of the
//!   resolved configuration; re-running that configuration reproduces the
//!   output byte for byte.
//! * Results never depend on the worker thread count (`--threads` or the
//!   `UNITROOT_THREADS` environment variable), only wall time does.
//! * Exit codes: 0 success, 2 data error (unreadable or unusable input),
//!   3 configuration error (unsupported or inconsistent parameters). Errors
//!   are emitted as one JSON object per failure on stderr.
//! * Significance levels and probabilities accept either a fraction in (0,1)
//!   or a percentage in [1,100): `--levels 1,5,10` and `--levels
//!   0.01,0.05,0.10` mean the same thing.
//! * All tests are left-tailed and the rejection region is closed: reject
//!   when the statistic is less than or equal to the critical value.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use unitroot::{
    adequacy_gate, ar1_residuals, builtin_quantile, center, estimate_quantiles, exact_mle,
    exact_mle_mu, fit_surface, get_power_opts, ljung_box, load_series, mc_test, residual_acf,
    simulate_limit_quantiles, suffstats, suggested_lags, unit_root_stats, ColumnSel,
    InnovationSpec, McResult, PowerCell, PowerOptions, QuantileSurface, Resample, SeedSpec, Series,
    StartMode, StatKind, StatisticCase, TestName,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const DEFAULT_SEED: u64 = 1;

// ---------------------------------------------------------------------------
// Argument definitions
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "unitroot",
    version,
    about = "Exact maximum-likelihood AR(1) unit root tests",
    long_about = "Exact maximum-likelihood AR(1) unit root tests: test statistics, \
                  simulated critical values, response surfaces, limit-law draws, \
                  power studies, and residual diagnostics. Outputs are deterministic \
                  for a fixed --seed and independent of the thread count."
)]
struct Cli {
    /// Master RNG seed; embedded in every output.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Worker thread count (default: UNITROOT_THREADS, else all cores).
    /// Results do not depend on this setting.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test one series for a unit root against critical values.
    Test(TestArgs),
    /// Monte-Carlo unit root test: simulated p-value (k+1)/(M+1).
    Mctest(McArgs),
    /// Estimate finite-sample critical values by simulation (CSV).
    Cv(CvArgs),
    /// Fit a critical-value response surface over powers of 1/n (JSON).
    FitSurface(FitArgs),
    /// Simulate the limiting null distribution and report quantiles (CSV).
    Simlimit(SimArgs),
    /// Empirical power of the tests over an (n, rho) grid (CSV).
    Power(PowerArgs),
    /// Residual diagnostics for the fitted AR(1) model (JSON).
    Diag(DiagArgs),
}

#[derive(Args)]
struct TestArgs {
    /// Input CSV file: one value per row, '#' comments ignored, optional
    /// header auto-detected.
    #[arg(long)]
    input: PathBuf,
    /// Column to read: zero-based index or header name (default: first).
    #[arg(long)]
    column: Option<String>,
    /// Statistic case: "mean" (unknown mean, tau_mu) or "zero" (known zero
    /// mean, tau).
    #[arg(long, default_value = "mean")]
    kind: String,
    /// Significance levels (percent or fraction). Built-in critical values
    /// exist for 1, 5, and 10 only.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 5.0, 10.0])]
    levels: Vec<f64>,
    /// Critical-value surface JSON file (as written by fit-surface).
    /// Required for --kind zero unless --mc is given; overrides --levels.
    #[arg(long)]
    surface: Option<PathBuf>,
    /// Use a Monte-Carlo p-value instead of surface critical values.
    #[arg(long)]
    mc: bool,
    /// Monte-Carlo replication count (with --mc).
    #[arg(long = "M", default_value_t = 999)]
    m: usize,
    /// Resample innovations from the centered fitted residuals (with --mc).
    #[arg(long)]
    bootstrap: bool,
    /// Portmanteau lag count for the diagnostics block
    /// (default: min(10, residual count / 5)).
    #[arg(long)]
    lags: Option<usize>,
}

#[derive(Args)]
struct McArgs {
    /// Input CSV file.
    #[arg(long)]
    input: PathBuf,
    /// Column to read: zero-based index or header name (default: first).
    #[arg(long)]
    column: Option<String>,
    /// Statistic: taumu, tau, deltamu, delta, or df.
    #[arg(long, default_value = "taumu")]
    kind: String,
    /// Replication count M; the p-value is (k+1)/(M+1).
    #[arg(long = "M", default_value_t = 999)]
    m: usize,
    /// Resample innovations from the centered fitted residuals instead of
    /// Gaussian draws.
    #[arg(long)]
    bootstrap: bool,
    /// Levels (percent or fraction) for the reject flags.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 5.0, 10.0])]
    levels: Vec<f64>,
}

#[derive(Args)]
struct CvArgs {
    /// Statistic: taumu, tau, deltamu, delta, or df.
    #[arg(long, default_value = "taumu")]
    kind: String,
    /// Series lengths, comma separated.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Probability levels (percent or fraction).
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 5.0, 10.0])]
    alphas: Vec<f64>,
    /// Replications per repeat.
    #[arg(long = "N", default_value_t = 20_000)]
    reps: usize,
    /// Repeat count (for the quantile variance).
    #[arg(long = "M", default_value_t = 20)]
    repeats: usize,
    /// Null innovation law: normal, stable, garch, student_t, or inline JSON
    /// such as '{"law":"normal","sd":1.0}'.
    #[arg(long, default_value = "normal")]
    law: String,
}

#[derive(Args)]
struct FitArgs {
    /// Statistic: taumu, tau, deltamu, delta, or df.
    #[arg(long, default_value = "taumu")]
    kind: String,
    /// Series lengths entering the fit, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [25usize, 50, 100, 200, 400])]
    lengths: Vec<usize>,
    /// Replications per repeat at each length.
    #[arg(long = "N", default_value_t = 20_000)]
    reps: usize,
    /// Repeat count at each length.
    #[arg(long = "M", default_value_t = 20)]
    repeats: usize,
    /// Probability level (percent or fraction).
    #[arg(long, default_value_t = 5.0)]
    alpha: f64,
    /// Polynomial degree in 1/n: 2 or 3.
    #[arg(long, default_value_t = 2)]
    degree: usize,
    /// Null innovation law (name or inline JSON).
    #[arg(long, default_value = "normal")]
    law: String,
}

#[derive(Args)]
struct SimArgs {
    /// Statistic: taumu, tau, deltamu, or delta.
    #[arg(long, default_value = "taumu")]
    kind: String,
    /// Random-walk steps per draw (discretization of the limit process).
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    /// Independent draws.
    #[arg(long, default_value_t = 20_000)]
    reps: usize,
    /// Probability levels (percent or fraction).
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 5.0, 10.0])]
    alphas: Vec<f64>,
}

#[derive(Args)]
struct PowerArgs {
    /// Grid as "N1,N2,...xR1,R2,..." e.g. "30,70,100x0.85,0.95,1.0".
    #[arg(long)]
    grid: Option<String>,
    /// Series lengths (alternative to --grid; use with --rho-list).
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    /// AR coefficients in (-1, 1] (alternative to --grid; use with --n-list).
    #[arg(long, value_delimiter = ',')]
    rho_list: Option<Vec<f64>>,
    /// Innovation law: normal, stable, garch, student_t, or inline JSON.
    #[arg(long, default_value = "normal")]
    law: String,
    /// Tests to run, comma separated: DF, MLEn, MLEp.
    #[arg(long, value_delimiter = ',', default_values_t = ["DF".to_string(), "MLEn".to_string(), "MLEp".to_string()])]
    tests: Vec<String>,
    /// Significance level (percent or fraction); 1, 5, or 10.
    #[arg(long, default_value_t = 5.0)]
    level: f64,
    /// Replications per grid cell.
    #[arg(long, default_value_t = 10_000)]
    reps: usize,
    /// Replications behind each simulated critical value.
    #[arg(long, default_value_t = 20_000)]
    cv_reps: usize,
    /// Start of alternative paths: "stationary" or "fixed".
    #[arg(long, default_value = "stationary")]
    start: String,
}

#[derive(Args)]
struct DiagArgs {
    /// Input CSV file.
    #[arg(long)]
    input: PathBuf,
    /// Column to read: zero-based index or header name (default: first).
    #[arg(long)]
    column: Option<String>,
    /// Portmanteau lag count (default: min(10, residual count / 5)).
    #[arg(long)]
    lags: Option<usize>,
    /// Adequacy level (percent or fraction) for the portmanteau test.
    #[arg(long, default_value_t = 5.0)]
    level: f64,
    /// Include the residual vector in the report.
    #[arg(long)]
    emit_residuals: bool,
}

// ---------------------------------------------------------------------------
// Errors and exit codes
// ---------------------------------------------------------------------------

/// A failure mapped to an exit code and a machine-readable stderr record.
#[derive(Debug)]
struct CliError {
    exit: u8,
    kind: String,
    message: String,
}

impl CliError {
    /// Configuration problem: exit code 3.
    fn config(kind: &str, message: impl Into<String>) -> Self {
        CliError {
            exit: 3,
            kind: kind.to_string(),
            message: message.into(),
        }
    }

    /// Data problem: exit code 2.
    fn data(kind: &str, message: impl Into<String>) -> Self {
        CliError {
            exit: 2,
            kind: kind.to_string(),
            message: message.into(),
        }
    }
}

impl From<unitroot::Error> for CliError {
    fn from(e: unitroot::Error) -> Self {
        CliError {
            exit: if e.is_data_error() { 2 } else { 3 },
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

fn emit_error(kind: &str, message: &str) {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{body}");
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            emit_error("Usage", &e.render().to_string());
            return ExitCode::from(3);
        }
    };

    let threads = match resolve_threads(cli.threads) {
        Ok(t) => t,
        Err(e) => {
            emit_error(&e.kind, &e.message);
            return ExitCode::from(e.exit);
        }
    };
    if let Some(t) = threads {
        // A second call in the same process would fail; that is harmless here
        // because the pool is configured exactly once, before any work.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }

    match run(cli.command, cli.seed) {
        Ok(payload) => {
            print!("{payload}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            emit_error(&e.kind, &e.message);
            ExitCode::from(e.exit)
        }
    }
}

fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    let value = match flag {
        Some(t) => Some(t),
        None => match std::env::var("UNITROOT_THREADS") {
            Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| {
                CliError::config(
                    "InvalidSpec",
                    format!("UNITROOT_THREADS={v:?} is not a positive integer"),
                )
            })?),
            Err(_) => None,
        },
    };
    match value {
        Some(0) => Err(CliError::config(
            "InvalidSpec",
            "thread count must be at least 1",
        )),
        other => Ok(other),
    }
}

fn run(command: Command, seed: u64) -> Result<String, CliError> {
    match command {
        Command::Test(a) => cmd_test(a, seed),
        Command::Mctest(a) => cmd_mctest(a, seed),
        Command::Cv(a) => cmd_cv(a, seed),
        Command::FitSurface(a) => cmd_fit_surface(a, seed),
        Command::Simlimit(a) => cmd_simlimit(a, seed),
        Command::Power(a) => cmd_power(a, seed),
        Command::Diag(a) => cmd_diag(a, seed),
    }
}

// ---------------------------------------------------------------------------
// Shared parsing helpers
// ---------------------------------------------------------------------------

/// Accepts a probability as a fraction in (0,1) or a percentage in [1,100).
fn parse_level(v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 && v < 1.0 {
        Ok(v)
    } else if v.is_finite() && (1.0..100.0).contains(&v) {
        Ok(v / 100.0)
    } else {
        Err(CliError::config(
            "InvalidSpec",
            format!("level {v} is neither a fraction in (0,1) nor a percentage in [1,100)"),
        ))
    }
}

fn parse_levels(vs: &[f64]) -> Result<Vec<f64>, CliError> {
    vs.iter().map(|v| parse_level(*v)).collect()
}

fn parse_case(s: &str) -> Result<StatisticCase, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "mean" | "mean-corrected" | "mu" => Ok(StatisticCase::MeanCorrected),
        "zero" | "zero-mean" => Ok(StatisticCase::ZeroMean),
        other => Err(CliError::config(
            "InvalidSpec",
            format!("unknown case {other:?}: use \"mean\" or \"zero\""),
        )),
    }
}

fn parse_law(s: &str) -> Result<InnovationSpec, CliError> {
    let t = s.trim();
    let spec = if t.starts_with('{') {
        serde_json::from_str::<InnovationSpec>(t)
            .map_err(|e| CliError::config("InvalidSpec", format!("innovation law JSON: {e}")))?
    } else {
        match t.to_ascii_lowercase().as_str() {
            "normal" | "gaussian" => InnovationSpec::standard_normal(),
            "stable" => InnovationSpec::stable_default(),
            "garch" => InnovationSpec::garch_default(),
            "student_t" | "studentt" | "t" => InnovationSpec::student_t_default(),
            other => {
                return Err(CliError::config(
                    "InvalidSpec",
                    format!(
                        "unknown innovation law {other:?}: use normal, stable, garch, \
                         student_t, or inline JSON"
                    ),
                ))
            }
        }
    };
    spec.validate()?;
    Ok(spec)
}

fn law_name(spec: &InnovationSpec) -> &'static str {
    match spec {
        InnovationSpec::Normal { .. } => "normal",
        InnovationSpec::StudentT { .. } => "student_t",
        InnovationSpec::Stable { .. } => "stable",
        InnovationSpec::Garch { .. } => "garch",
    }
}

fn parse_start(s: &str) -> Result<StartMode, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "stationary" => Ok(StartMode::Stationary),
        "fixed" => Ok(StartMode::Fixed),
        other => Err(CliError::config(
            "InvalidSpec",
            format!("unknown start mode {other:?}: use \"stationary\" or \"fixed\""),
        )),
    }
}

/// Parses "N1,N2,...xR1,R2,..." into length and coefficient lists.
fn parse_grid(s: &str) -> Result<(Vec<usize>, Vec<f64>), CliError> {
    let bad = |msg: String| CliError::config("InvalidSpec", msg);
    let (ns, rs) = s
        .split_once('x')
        .ok_or_else(|| bad(format!("grid {s:?} must look like \"30,70x0.85,1.0\"")))?;
    let n_list = ns
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| bad(format!("grid length {t:?} is not a positive integer")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rho_list = rs
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("grid coefficient {t:?} is not a number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if n_list.is_empty() || rho_list.is_empty() {
        return Err(bad(format!("grid {s:?} has an empty side")));
    }
    Ok((n_list, rho_list))
}

fn load(input: &Path, column: &Option<String>) -> Result<Series, CliError> {
    let sel = column
        .as_deref()
        .map(|c| ColumnSel::from_str(c).expect("infallible"));
    Ok(load_series(input, sel)?)
}

/// Loads a surface file, accepting either a bare surface object or the
/// wrapper written by `fit-surface` (surface under a "surface" key).
fn load_surface(path: &Path) -> Result<QuantileSurface, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::data(
            "FileNotFound",
            format!("surface file {}: {e}", path.display()),
        )
    })?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
        CliError::data(
            "ParseError",
            format!("surface file {}: {e}", path.display()),
        )
    })?;
    let node = value.get("surface").cloned().unwrap_or(value);
    let surface: QuantileSurface = serde_json::from_value(node).map_err(|e| {
        CliError::data(
            "ParseError",
            format!("surface file {}: {e}", path.display()),
        )
    })?;
    surface.validate()?;
    Ok(surface)
}

fn surface_cv(surface: &QuantileSurface, n: usize) -> Result<f64, CliError> {
    if let Some(min) = surface.meta.min_length {
        if n < min {
            return Err(unitroot::Error::LengthOutOfRange { n, min }.into());
        }
    }
    Ok(surface.evaluate(n))
}

/// Closed left-tail rejection region: reject when the statistic is at or
/// below the critical value.
fn reject_rule(stat: f64, cv: f64) -> bool {
    stat <= cv
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

/// Formats a probability as its shortest round-trip decimal.
fn fmt_prob(p: f64) -> String {
    format!("{p}")
}

// ---------------------------------------------------------------------------
// Report shapes
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ErrorBody {
    kind: String,
    message: String,
}

/// Diagnostics block: the fitted-residual portmanteau summary, or the error
/// that prevented it (the unit root test itself still ran).
#[derive(Serialize)]
#[serde(untagged)]
enum DiagBlock {
    Report {
        lags: usize,
        lb_stat: f64,
        lb_df: usize,
        lb_pvalue: f64,
        acf: Vec<f64>,
        adequate: bool,
    },
    Failed {
        error: ErrorBody,
    },
}

/// Builds the diagnostics block for a test report: fit the model for the
/// requested case, then portmanteau-test the residuals.
fn diag_block(
    series: &Series,
    case: StatisticCase,
    lags: usize,
    level: f64,
) -> (DiagBlock, Option<String>) {
    let computed = (|| -> unitroot::Result<(f64, usize, f64, Vec<f64>)> {
        let (rho, mean) = match case {
            StatisticCase::MeanCorrected => {
                let fit = exact_mle_mu(series)?;
                (fit.rho_hat, center(series).mean)
            }
            StatisticCase::ZeroMean => {
                let fit = exact_mle(&suffstats(series.values())?)?;
                (fit.rho_hat, 0.0)
            }
        };
        let residuals = ar1_residuals(series, rho, mean)?;
        let (lb_stat, lb_df, lb_pvalue) = ljung_box(&residuals, lags)?;
        let acf = residual_acf(&residuals, lags)?;
        Ok((lb_stat, lb_df, lb_pvalue, acf))
    })();
    match computed {
        Ok((lb_stat, lb_df, lb_pvalue, acf)) => {
            let adequate = lb_pvalue > level;
            let warning = (!adequate).then(|| {
                format!(
                    "warning: residual autocorrelation detected (portmanteau p = {lb_pvalue:.4} \
                     at {lags} lags); the AR(1) model may be inadequate for this series and \
                     other methods should be considered"
                )
            });
            (
                DiagBlock::Report {
                    lags,
                    lb_stat,
                    lb_df,
                    lb_pvalue,
                    acf,
                    adequate,
                },
                warning,
            )
        }
        Err(e) => (
            DiagBlock::Failed {
                error: ErrorBody {
                    kind: e.kind().to_string(),
                    message: e.to_string(),
                },
            },
            None,
        ),
    }
}

#[derive(Serialize)]
struct CriterionOut {
    level: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    critical_value: Option<f64>,
    reject: bool,
    source: &'static str,
}

#[derive(Serialize)]
struct McBlock {
    p_value: f64,
    k: usize,
    #[serde(rename = "M")]
    m: usize,
    resample: &'static str,
}

impl McBlock {
    fn new(r: &McResult, bootstrap: bool) -> Self {
        McBlock {
            p_value: r.p_value,
            k: r.k,
            m: r.m,
            resample: if bootstrap { "bootstrap" } else { "gaussian" },
        }
    }
}

/// Brackets the p-value between adjacent evaluated levels, using the nesting
/// of the rejection regions: `[lo, hi]` means lo < p <= hi.
fn p_value_range(criteria: &[CriterionOut]) -> Option<[f64; 2]> {
    if criteria.len() < 2 {
        return None;
    }
    let mut pairs: Vec<(f64, bool)> = criteria.iter().map(|c| (c.level, c.reject)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Rejection must be monotone in the level; mixed user-supplied surfaces
    // could break that, in which case no bracket is reported.
    if pairs.windows(2).any(|w| w[0].1 && !w[1].1) {
        return None;
    }
    let hi = pairs.iter().find(|p| p.1).map_or(1.0, |p| p.0);
    let lo = pairs.iter().rev().find(|p| !p.1).map_or(0.0, |p| p.0);
    Some([lo, hi])
}

// ---------------------------------------------------------------------------
// test
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct TestEcho {
    input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<String>,
    kind: &'static str,
    levels: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    surface: Option<String>,
    mc: bool,
    #[serde(rename = "M")]
    m: usize,
    bootstrap: bool,
    lags: usize,
}

#[derive(Serialize)]
struct TestReport {
    command: &'static str,
    version: &'static str,
    seed: u64,
    config: TestEcho,
    n: usize,
    kind: &'static str,
    statistic: &'static str,
    rho_hat: f64,
    delta: f64,
    tau: f64,
    sigma2_hat: f64,
    boundary: bool,
    criteria: Vec<CriterionOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reject_1pct: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reject_5pct: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reject_10pct: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_value_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc: Option<McBlock>,
    diagnostics: DiagBlock,
}

fn cmd_test(a: TestArgs, seed: u64) -> Result<String, CliError> {
    let case = parse_case(&a.kind)?;
    let series = load(&a.input, &a.column)?;
    let n = series.n();
    let outcome = unit_root_stats(&series, case)?;
    let (kind_tag, stat_kind) = match case {
        StatisticCase::MeanCorrected => ("mean", StatKind::TauMu),
        StatisticCase::ZeroMean => ("zero", StatKind::Tau),
    };

    let mut criteria = Vec::new();
    let mut mc_block = None;
    let levels;
    if a.mc {
        levels = parse_levels(&a.levels)?;
        let resample = if a.bootstrap {
            Resample::BootstrapResiduals
        } else {
            Resample::GaussianNull
        };
        let r = mc_test(&series, stat_kind, a.m, SeedSpec::new(seed), resample)?;
        for level in &levels {
            criteria.push(CriterionOut {
                level: *level,
                critical_value: None,
                reject: r.p_value <= *level,
                source: "monte-carlo",
            });
        }
        mc_block = Some(McBlock::new(&r, a.bootstrap));
    } else if let Some(path) = &a.surface {
        let surface = load_surface(path)?;
        if let Some(k) = &surface.meta.kind {
            if k != stat_kind.tag() {
                return Err(CliError::config(
                    "InvalidSpec",
                    format!(
                        "surface file is for statistic {k:?} but this test needs {:?}",
                        stat_kind.tag()
                    ),
                ));
            }
        }
        let cv = surface_cv(&surface, n)?;
        levels = vec![surface.alpha];
        criteria.push(CriterionOut {
            level: surface.alpha,
            critical_value: Some(cv),
            reject: reject_rule(outcome.tau, cv),
            source: "file-surface",
        });
    } else {
        match case {
            StatisticCase::MeanCorrected => {
                levels = parse_levels(&a.levels)?;
                for level in &levels {
                    let cv = builtin_quantile(*level, n)?;
                    criteria.push(CriterionOut {
                        level: *level,
                        critical_value: Some(cv),
                        reject: reject_rule(outcome.tau, cv),
                        source: "published-surface",
                    });
                }
            }
            StatisticCase::ZeroMean => {
                return Err(CliError::config(
                    "InvalidSpec",
                    "no built-in critical-value surface exists for the zero-mean statistic; \
                     supply --surface FILE (e.g. from fit-surface --kind tau) or use --mc",
                ));
            }
        }
    }

    let find = |target: f64| {
        criteria
            .iter()
            .find(|c| (c.level - target).abs() < 1e-9)
            .map(|c| c.reject)
    };
    let reject_1pct = find(0.01);
    let reject_5pct = find(0.05);
    let reject_10pct = find(0.10);
    let p_range = if mc_block.is_none() {
        p_value_range(&criteria)
    } else {
        None
    };

    let lags = a
        .lags
        .unwrap_or_else(|| suggested_lags(n.saturating_sub(1)));
    let (diagnostics, warning) = diag_block(&series, case, lags, 0.05);
    if let Some(w) = warning {
        eprintln!("{w}");
    }

    let report = TestReport {
        command: "test",
        version: VERSION,
        seed,
        config: TestEcho {
            input: a.input.display().to_string(),
            column: a.column,
            kind: kind_tag,
            levels: levels.clone(),
            surface: a.surface.as_ref().map(|p| p.display().to_string()),
            mc: a.mc,
            m: a.m,
            bootstrap: a.bootstrap,
            lags,
        },
        n,
        kind: kind_tag,
        statistic: stat_kind.tag(),
        rho_hat: outcome.rho_hat,
        delta: outcome.delta,
        tau: outcome.tau,
        sigma2_hat: outcome.sigma2_hat,
        boundary: outcome.boundary_flag,
        criteria,
        reject_1pct,
        reject_5pct,
        reject_10pct,
        p_value_range: p_range,
        mc: mc_block,
        diagnostics,
    };
    Ok(to_json(&report))
}

// ---------------------------------------------------------------------------
// mctest
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct McEcho {
    input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<String>,
    kind: String,
    #[serde(rename = "M")]
    m: usize,
    bootstrap: bool,
    levels: Vec<f64>,
}

#[derive(Serialize)]
struct McReport {
    command: &'static str,
    version: &'static str,
    seed: u64,
    config: McEcho,
    n: usize,
    statistic: &'static str,
    observed: f64,
    p_value: f64,
    k: usize,
    #[serde(rename = "M")]
    m: usize,
    resample: &'static str,
    criteria: Vec<CriterionOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reject_1pct: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reject_5pct: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reject_10pct: Option<bool>,
}

fn cmd_mctest(a: McArgs, seed: u64) -> Result<String, CliError> {
    let kind = StatKind::from_str(&a.kind)?;
    let series = load(&a.input, &a.column)?;
    let levels = parse_levels(&a.levels)?;
    let resample = if a.bootstrap {
        Resample::BootstrapResiduals
    } else {
        Resample::GaussianNull
    };
    let r = mc_test(&series, kind, a.m, SeedSpec::new(seed), resample)?;

    let criteria: Vec<CriterionOut> = levels
        .iter()
        .map(|level| CriterionOut {
            level: *level,
            critical_value: None,
            reject: r.p_value <= *level,
            source: "monte-carlo",
        })
        .collect();
    let find = |target: f64| {
        criteria
            .iter()
            .find(|c| (c.level - target).abs() < 1e-9)
            .map(|c| c.reject)
    };

    let report = McReport {
        command: "mctest",
        version: VERSION,
        seed,
        config: McEcho {
            input: a.input.display().to_string(),
            column: a.column,
            kind: a.kind.to_ascii_lowercase(),
            m: a.m,
            bootstrap: a.bootstrap,
            levels: levels.clone(),
        },
        n: series.n(),
        statistic: kind.tag(),
        observed: r.observed,
        p_value: r.p_value,
        k: r.k,
        m: r.m,
        resample: if a.bootstrap { "bootstrap" } else { "gaussian" },
        reject_1pct: find(0.01),
        reject_5pct: find(0.05),
        reject_10pct: find(0.10),
        criteria,
    };
    Ok(to_json(&report))
}

// ---------------------------------------------------------------------------
// cv
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CvEcho {
    command: &'static str,
    version: &'static str,
    seed: u64,
    kind: &'static str,
    n: Vec<usize>,
    alphas: Vec<f64>,
    #[serde(rename = "N")]
    reps: usize,
    #[serde(rename = "M")]
    repeats: usize,
    law: InnovationSpec,
}

fn cmd_cv(a: CvArgs, seed: u64) -> Result<String, CliError> {
    let kind = StatKind::from_str(&a.kind)?;
    let law = parse_law(&a.law)?;
    let alphas = parse_levels(&a.alphas)?;
    let echo = CvEcho {
        command: "cv",
        version: VERSION,
        seed,
        kind: kind.tag(),
        n: a.n.clone(),
        alphas: alphas.clone(),
        reps: a.reps,
        repeats: a.repeats,
        law: law.clone(),
    };

    let mut out = String::new();
    let _ = writeln!(out, "# unitroot v{VERSION}");
    let _ = writeln!(
        out,
        "# config: {}",
        serde_json::to_string(&echo).expect("echo serialization")
    );
    let _ = writeln!(out, "kind,n,alpha,q_mean,q_var,N,M");
    for &n in &a.n {
        let points = estimate_quantiles(
            kind,
            n,
            &alphas,
            a.reps,
            a.repeats,
            &law,
            SeedSpec::new(seed),
        )?;
        for p in points {
            let _ = writeln!(
                out,
                "{},{},{},{:.6},{:.6e},{},{}",
                p.kind.tag(),
                p.n,
                fmt_prob(p.alpha),
                p.q_mean,
                p.q_var,
                p.reps,
                p.repeats
            );
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// fit-surface
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct FitEcho {
    kind: &'static str,
    lengths: Vec<usize>,
    #[serde(rename = "N")]
    reps: usize,
    #[serde(rename = "M")]
    repeats: usize,
    alpha: f64,
    degree: usize,
    law: InnovationSpec,
}

#[derive(Serialize)]
struct FitReport {
    command: &'static str,
    version: &'static str,
    seed: u64,
    config: FitEcho,
    surface: QuantileSurface,
}

fn cmd_fit_surface(a: FitArgs, seed: u64) -> Result<String, CliError> {
    let kind = StatKind::from_str(&a.kind)?;
    let law = parse_law(&a.law)?;
    let alpha = parse_level(a.alpha)?;

    let mut points = Vec::with_capacity(a.lengths.len());
    for &n in &a.lengths {
        points.extend(estimate_quantiles(
            kind,
            n,
            &[alpha],
            a.reps,
            a.repeats,
            &law,
            SeedSpec::new(seed),
        )?);
    }
    let mut surface = fit_surface(&points, a.degree)?;
    surface.meta.seed = Some(seed);

    let report = FitReport {
        command: "fit-surface",
        version: VERSION,
        seed,
        config: FitEcho {
            kind: kind.tag(),
            lengths: a.lengths.clone(),
            reps: a.reps,
            repeats: a.repeats,
            alpha,
            degree: a.degree,
            law,
        },
        surface,
    };
    Ok(to_json(&report))
}

// ---------------------------------------------------------------------------
// simlimit
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SimEcho {
    command: &'static str,
    version: &'static str,
    seed: u64,
    kind: &'static str,
    steps: usize,
    reps: usize,
    alphas: Vec<f64>,
}

fn cmd_simlimit(a: SimArgs, seed: u64) -> Result<String, CliError> {
    let kind = StatKind::from_str(&a.kind)?;
    let alphas = parse_levels(&a.alphas)?;
    let echo = SimEcho {
        command: "simlimit",
        version: VERSION,
        seed,
        kind: kind.tag(),
        steps: a.steps,
        reps: a.reps,
        alphas: alphas.clone(),
    };
    let summary = simulate_limit_quantiles(kind, a.reps, a.steps, &alphas, SeedSpec::new(seed))?;

    let mut out = String::new();
    let _ = writeln!(out, "# unitroot v{VERSION}");
    let _ = writeln!(
        out,
        "# config: {}",
        serde_json::to_string(&echo).expect("echo serialization")
    );
    let _ = writeln!(out, "# clamped: {}", summary.clamped);
    let _ = writeln!(out, "# mean_int_w2: {:.6}", summary.mean_int_w2);
    let _ = writeln!(out, "# mean_w1_sq: {:.6}", summary.mean_w1_sq);
    let _ = writeln!(out, "# mean_a_mu: {:.6}", summary.mean_a_mu);
    let _ = writeln!(out, "kind,alpha,quantile,reps,steps,seed");
    for (alpha, q) in &summary.quantiles {
        let _ = writeln!(
            out,
            "{},{},{:.6},{},{},{}",
            kind.tag(),
            fmt_prob(*alpha),
            q,
            summary.reps,
            summary.steps,
            seed
        );
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// power
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct PowerEcho {
    command: &'static str,
    version: &'static str,
    seed: u64,
    n_list: Vec<usize>,
    rho_list: Vec<f64>,
    law: InnovationSpec,
    tests: Vec<&'static str>,
    level: f64,
    reps: usize,
    cv_reps: usize,
    start: StartMode,
}

fn cmd_power(a: PowerArgs, seed: u64) -> Result<String, CliError> {
    let (n_list, rho_list) = match (&a.grid, &a.n_list, &a.rho_list) {
        (Some(g), None, None) => parse_grid(g)?,
        (None, Some(ns), Some(rs)) => (ns.clone(), rs.clone()),
        (None, None, None) => (vec![30, 70, 100, 200], vec![0.65, 0.85, 0.90, 0.95, 1.0]),
        _ => {
            return Err(CliError::config(
                "InvalidSpec",
                "give either --grid or both --n-list and --rho-list, not a mixture",
            ))
        }
    };
    let tests: Vec<TestName> = a
        .tests
        .iter()
        .map(|s| TestName::from_str(s))
        .collect::<unitroot::Result<_>>()?;
    let level = parse_level(a.level)?;
    let law = parse_law(&a.law)?;
    let start = parse_start(&a.start)?;
    let opts = PowerOptions {
        cv_reps: a.cv_reps,
        start,
    };
    let echo = PowerEcho {
        command: "power",
        version: VERSION,
        seed,
        n_list: n_list.clone(),
        rho_list: rho_list.clone(),
        law: law.clone(),
        tests: tests.iter().map(|t| t.tag()).collect(),
        level,
        reps: a.reps,
        cv_reps: a.cv_reps,
        start,
    };

    let cells = get_power_opts(
        &n_list,
        &rho_list,
        &law,
        &tests,
        level,
        a.reps,
        SeedSpec::new(seed),
        opts,
    )?;

    let mut out = String::new();
    let _ = writeln!(out, "# unitroot v{VERSION}");
    let _ = writeln!(
        out,
        "# config: {}",
        serde_json::to_string(&echo).expect("echo serialization")
    );
    let _ = writeln!(
        out,
        "# power and moe are percentages at level {}",
        fmt_prob(level)
    );
    let _ = writeln!(out, "n,rho,law,DF,MLEn,MLEp,moe");
    let tag = law_name(&law);
    for &n in &n_list {
        for &rho in &rho_list {
            let cell = |t: TestName| -> Option<&PowerCell> {
                cells
                    .iter()
                    .find(|c| c.n == n && c.rho == rho && c.test == t)
            };
            let col = |t: TestName| -> String {
                cell(t).map_or(String::new(), |c| format!("{:.2}", 100.0 * c.power))
            };
            let moe = [TestName::Df, TestName::MleN, TestName::MleP]
                .into_iter()
                .filter_map(|t| cell(t).map(|c| c.moe))
                .fold(0.0f64, f64::max);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:.2}",
                n,
                fmt_prob(rho),
                tag,
                col(TestName::Df),
                col(TestName::MleN),
                col(TestName::MleP),
                100.0 * moe
            );
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// diag
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct DiagEcho {
    input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<String>,
    lags: usize,
    level: f64,
    emit_residuals: bool,
}

#[derive(Serialize)]
struct DiagOut {
    command: &'static str,
    version: &'static str,
    seed: u64,
    config: DiagEcho,
    n: usize,
    rho_hat: f64,
    mean: f64,
    lags: usize,
    lb_stat: f64,
    lb_df: usize,
    lb_pvalue: f64,
    acf: Vec<f64>,
    adequate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    residuals: Option<Vec<f64>>,
}

fn cmd_diag(a: DiagArgs, seed: u64) -> Result<String, CliError> {
    let series = load(&a.input, &a.column)?;
    let n = series.n();
    let level = parse_level(a.level)?;
    let lags = a
        .lags
        .unwrap_or_else(|| suggested_lags(n.saturating_sub(1)));
    let fit = exact_mle_mu(&series)?;
    let mean = center(&series).mean;
    let report = adequacy_gate(&series, lags, level)?;
    if !report.adequate {
        eprintln!(
            "warning: residual autocorrelation detected (portmanteau p = {:.4} at {lags} lags); \
             the AR(1) model may be inadequate for this series and other methods should be \
             considered",
            report.lb_pvalue
        );
    }

    let out = DiagOut {
        command: "diag",
        version: VERSION,
        seed,
        config: DiagEcho {
            input: a.input.display().to_string(),
            column: a.column,
            lags,
            level,
            emit_residuals: a.emit_residuals,
        },
        n,
        rho_hat: fit.rho_hat,
        mean,
        lags,
        lb_stat: report.lb_stat,
        lb_df: report.lb_df,
        lb_pvalue: report.lb_pvalue,
        acf: report.acf,
        adequate: report.adequate,
        residuals: a.emit_residuals.then_some(report.residuals),
    };
    Ok(to_json(&out))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels_accept_percent_and_fraction() {
        assert_eq!(parse_level(5.0).unwrap(), 0.05);
        assert_eq!(parse_level(1.0).unwrap(), 0.01);
        assert_eq!(parse_level(10.0).unwrap(), 0.10);
        assert_eq!(parse_level(0.05).unwrap(), 0.05);
        assert_eq!(parse_level(0.5).unwrap(), 0.5);
        assert!(parse_level(0.0).is_err());
        assert!(parse_level(100.0).is_err());
        assert!(parse_level(-5.0).is_err());
        assert!(parse_level(f64::NAN).is_err());
    }

    #[test]
    fn grid_parses_lengths_and_coefficients() {
        let (ns, rs) = parse_grid("30,70x0.85,0.95,1.0").unwrap();
        assert_eq!(ns, vec![30, 70]);
        assert_eq!(rs, vec![0.85, 0.95, 1.0]);
        assert!(parse_grid("30,70").is_err());
        assert!(parse_grid("x0.9").is_err());
        assert!(parse_grid("30x").is_err());
        assert!(parse_grid("3.5x0.9").is_err());
    }

    #[test]
    fn laws_parse_by_name_and_json() {
        assert_eq!(
            parse_law("normal").unwrap(),
            InnovationSpec::standard_normal()
        );
        assert_eq!(
            parse_law("STABLE").unwrap(),
            InnovationSpec::stable_default()
        );
        assert_eq!(parse_law("garch").unwrap(), InnovationSpec::garch_default());
        let j = parse_law(r#"{"law":"normal","sd":2.0}"#).unwrap();
        assert_eq!(j, InnovationSpec::Normal { sd: 2.0 });
        assert!(parse_law("cauchyish").is_err());
        // invalid parameters are a configuration error
        let err = parse_law(r#"{"law":"normal","sd":-1.0}"#).unwrap_err();
        assert_eq!(err.exit, 3);
    }

    #[test]
    fn law_names_match_variants() {
        assert_eq!(law_name(&InnovationSpec::standard_normal()), "normal");
        assert_eq!(law_name(&InnovationSpec::stable_default()), "stable");
        assert_eq!(law_name(&InnovationSpec::garch_default()), "garch");
        assert_eq!(law_name(&InnovationSpec::student_t_default()), "student_t");
    }

    #[test]
    fn rejection_region_is_closed() {
        // a statistic exactly on the critical value rejects
        assert!(reject_rule(-2.531, -2.531));
        assert!(reject_rule(-2.532, -2.531));
        assert!(!reject_rule(-2.530, -2.531));
    }

    #[test]
    fn p_value_brackets_follow_the_nested_regions() {
        let c = |level: f64, reject: bool| CriterionOut {
            level,
            critical_value: None,
            reject,
            source: "published-surface",
        };
        // reject nowhere: p above the largest level
        let none = [c(0.01, false), c(0.05, false), c(0.10, false)];
        assert_eq!(p_value_range(&none), Some([0.10, 1.0]));
        // reject everywhere: p at or below the smallest level
        let all = [c(0.01, true), c(0.05, true), c(0.10, true)];
        assert_eq!(p_value_range(&all), Some([0.0, 0.01]));
        // reject at 5 and 10 only
        let mid = [c(0.01, false), c(0.05, true), c(0.10, true)];
        assert_eq!(p_value_range(&mid), Some([0.01, 0.05]));
        // a single criterion gives no bracket
        assert_eq!(p_value_range(&[c(0.05, false)]), None);
        // non-monotone (inconsistent surfaces) gives no bracket
        let bad = [c(0.01, true), c(0.05, false)];
        assert_eq!(p_value_range(&bad), None);
    }

    #[test]
    fn thread_resolution_rejects_zero() {
        assert!(resolve_threads(Some(0)).is_err());
        assert_eq!(resolve_threads(Some(4)).unwrap(), Some(4));
    }

    #[test]
    fn case_and_start_parse() {
        assert_eq!(parse_case("mean").unwrap(), StatisticCase::MeanCorrected);
        assert_eq!(parse_case("zero").unwrap(), StatisticCase::ZeroMean);
        assert!(parse_case("median").is_err());
        assert_eq!(parse_start("stationary").unwrap(), StartMode::Stationary);
        assert_eq!(parse_start("fixed").unwrap(), StartMode::Fixed);
        assert!(parse_start("warm").is_err());
    }
}
