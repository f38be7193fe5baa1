//! JSON-in/JSON-out operations behind the browser demo page.
//!
//! Each operation takes one JSON string and returns one JSON string wrapped
//! in the envelope `{"ok":true,"value":{...}}` on success or
//! `{"ok":false,"error":{"kind":"...","message":"..."}}` on failure, so the
//! page never needs to handle exceptions. The functions compile and are
//! tested natively; on wasm32 thin `wasm-bindgen` wrappers re-export them
//! under the same names.
//!
//! Operations:
//! - [`run_test`]: unit root test on pasted values or a freshly simulated
//!   path, with critical values and rejection flags at 1/5/10%.
//! - [`cv_curve`]: the published critical-value response surface evaluated
//!   on a geometric length grid, for plotting.
//! - [`limit_hist`]: histogram and quantiles of limit-law draws.
//!
//! Input sizes are capped so a stray request cannot hang the browser tab.

use serde::{Deserialize, Serialize};
use serde_json::json;

use unitroot::{
    builtin_quantile, builtin_surface, gen_ar1_stationary, gen_random_walk, limit_stat_draw,
    unit_root_stats, wiener_functionals, InnovationSpec, SeedSpec, Series, StatKind, StatisticCase,
};

const DEFAULT_SEED: u64 = 1;
const DEMO_LEVELS: [f64; 3] = [0.01, 0.05, 0.10];
const MAX_VALUES: usize = 200_000;
const MAX_SIM_N: usize = 20_000;
const MAX_HIST_WORK: u64 = 400_000_000; // reps * steps

fn ok_json<T: Serialize>(value: &T) -> String {
    json!({ "ok": true, "value": value }).to_string()
}

fn err_json(kind: &str, message: &str) -> String {
    json!({ "ok": false, "error": { "kind": kind, "message": message } }).to_string()
}

/// Local failure type: either a library error (which knows its kind tag) or
/// a demo-level validation message.
enum Failure {
    Lib(unitroot::Error),
    Input(String),
}

impl From<unitroot::Error> for Failure {
    fn from(e: unitroot::Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure::Input(msg.into())
    }

    fn to_json(&self) -> String {
        match self {
            Failure::Lib(e) => err_json(e.kind(), &e.to_string()),
            Failure::Input(msg) => err_json("InvalidInput", msg),
        }
    }
}

fn dispatch<I, T>(input: &str, op: impl FnOnce(I) -> Result<T, Failure>) -> String
where
    I: for<'de> Deserialize<'de>,
    T: Serialize,
{
    let parsed: I = match serde_json::from_str(input) {
        Ok(v) => v,
        Err(e) => return err_json("ParseError", &format!("bad request JSON: {e}")),
    };
    match op(parsed) {
        Ok(value) => ok_json(&value),
        Err(f) => f.to_json(),
    }
}

// ---------------------------------------------------------------------------
// run_test
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct SimulateSpec {
    n: usize,
    rho: f64,
    /// Innovation law; standard normal when omitted.
    law: Option<InnovationSpec>,
    #[serde(default = "default_seed")]
    seed: u64,
}

#[derive(Deserialize)]
struct TestRequest {
    /// Observed series; exactly one of `values` / `simulate` must be given.
    values: Option<Vec<f64>>,
    simulate: Option<SimulateSpec>,
    /// "mean" (mean-corrected, the default) or "zero" (known zero mean).
    #[serde(default = "default_case")]
    case: String,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_case() -> String {
    "mean".into()
}

#[derive(Serialize)]
struct CriterionOut {
    level: f64,
    critical_value: f64,
    reject: bool,
}

#[derive(Serialize)]
struct TestResponse {
    kind: &'static str,
    n: usize,
    rho_hat: f64,
    delta: f64,
    tau: f64,
    sigma2_hat: f64,
    boundary: bool,
    /// Critical values exist for the mean-corrected statistic only; the
    /// zero-mean case reports statistics with an empty list.
    criteria: Vec<CriterionOut>,
    /// Echo of a simulated path so the page can plot it; absent for
    /// caller-provided values.
    #[serde(skip_serializing_if = "Option::is_none")]
    series: Option<Vec<f64>>,
}

/// Runs the exact-likelihood unit root test on pasted values or on a path
/// simulated from the requested law (stationary start below the unit root,
/// driftless random walk at it).
pub fn run_test(input: &str) -> String {
    dispatch(input, |req: TestRequest| {
        let (case, tau_kind) = match req.case.as_str() {
            "mean" => (StatisticCase::MeanCorrected, StatKind::TauMu),
            "zero" => (StatisticCase::ZeroMean, StatKind::Tau),
            other => {
                return Err(Failure::input(format!(
                    "case must be \"mean\" or \"zero\", got \"{other}\""
                )))
            }
        };
        let (series, echo) = match (req.values, req.simulate) {
            (Some(v), None) => {
                if v.len() > MAX_VALUES {
                    return Err(Failure::input(format!(
                        "at most {MAX_VALUES} values, got {}",
                        v.len()
                    )));
                }
                (Series::new(v)?, None)
            }
            (None, Some(sim)) => {
                if sim.n > MAX_SIM_N {
                    return Err(Failure::input(format!(
                        "simulated length capped at {MAX_SIM_N}, got {}",
                        sim.n
                    )));
                }
                let law = sim.law.unwrap_or_else(InnovationSpec::standard_normal);
                let seed = SeedSpec::new(sim.seed);
                let s = if sim.rho == 1.0 {
                    gen_random_walk(sim.n, &law, seed)?
                } else {
                    gen_ar1_stationary(sim.n, sim.rho, 0.0, &law, seed)?
                };
                let echo = s.values().to_vec();
                (s, Some(echo))
            }
            _ => {
                return Err(Failure::input(
                    "provide exactly one of \"values\" or \"simulate\"",
                ))
            }
        };
        let out = unit_root_stats(&series, case)?;
        let criteria = match case {
            StatisticCase::MeanCorrected => DEMO_LEVELS
                .iter()
                .map(|&level| {
                    let cv = builtin_quantile(level, out.n)?;
                    Ok(CriterionOut {
                        level,
                        critical_value: cv,
                        reject: out.tau <= cv,
                    })
                })
                .collect::<Result<Vec<_>, unitroot::Error>>()?,
            StatisticCase::ZeroMean => Vec::new(),
        };
        Ok(TestResponse {
            kind: tau_kind.tag(),
            n: out.n,
            rho_hat: out.rho_hat,
            delta: out.delta,
            tau: out.tau,
            sigma2_hat: out.sigma2_hat,
            boundary: out.boundary_flag,
            criteria,
            series: echo,
        })
    })
}

// ---------------------------------------------------------------------------
// cv_curve
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct CurveRequest {
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default = "default_n_min")]
    n_min: usize,
    #[serde(default = "default_n_max")]
    n_max: usize,
    #[serde(default = "default_points")]
    points: usize,
}

fn default_alpha() -> f64 {
    0.05
}
fn default_n_min() -> usize {
    25
}
fn default_n_max() -> usize {
    500
}
fn default_points() -> usize {
    80
}

#[derive(Serialize)]
struct CurveResponse {
    alpha: f64,
    /// Surface coefficients in powers of 1/n.
    theta: [f64; 4],
    /// (n, critical value) pairs on a geometric grid.
    points: Vec<(usize, f64)>,
}

/// Evaluates the published critical-value surface on a geometric grid of
/// series lengths.
pub fn cv_curve(input: &str) -> String {
    dispatch(input, |req: CurveRequest| {
        if req.n_min >= req.n_max || req.n_max > 1_000_000 {
            return Err(Failure::input(format!(
                "need n_min < n_max <= 1000000, got {} and {}",
                req.n_min, req.n_max
            )));
        }
        if !(2..=2000).contains(&req.points) {
            return Err(Failure::input(format!(
                "points must lie in [2, 2000], got {}",
                req.points
            )));
        }
        let surface = builtin_surface(req.alpha)?;
        let ratio = req.n_max as f64 / req.n_min as f64;
        let mut points = Vec::with_capacity(req.points);
        let mut last = 0usize;
        for i in 0..req.points {
            let frac = i as f64 / (req.points - 1) as f64;
            let n = (req.n_min as f64 * ratio.powf(frac)).round() as usize;
            if n == last {
                continue;
            }
            last = n;
            points.push((n, builtin_quantile(req.alpha, n)?));
        }
        Ok(CurveResponse {
            alpha: surface.alpha,
            theta: surface.theta,
            points,
        })
    })
}

// ---------------------------------------------------------------------------
// limit_hist
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct HistRequest {
    #[serde(default = "default_kind")]
    kind: String,
    #[serde(default = "default_reps")]
    reps: usize,
    #[serde(default = "default_steps")]
    steps: usize,
    #[serde(default = "default_bins")]
    bins: usize,
    #[serde(default = "default_alphas")]
    alphas: Vec<f64>,
    #[serde(default = "default_seed")]
    seed: u64,
}

fn default_kind() -> String {
    "taumu".into()
}
fn default_reps() -> usize {
    20_000
}
fn default_steps() -> usize {
    2_000
}
fn default_bins() -> usize {
    60
}
fn default_alphas() -> Vec<f64> {
    DEMO_LEVELS.to_vec()
}

#[derive(Serialize)]
struct HistResponse {
    kind: String,
    reps: usize,
    steps: usize,
    clamped: usize,
    /// Histogram support: central 99.8% of the draws; outliers are counted
    /// into the edge bins so the counts always sum to `reps`.
    lo: f64,
    hi: f64,
    counts: Vec<u32>,
    quantiles: Vec<(f64, f64)>,
    mean_int_w2: f64,
    mean_a_mu: f64,
}

/// Draws from the limit law of one statistic and bins the draws for a
/// histogram, with empirical quantiles at the requested levels.
pub fn limit_hist(input: &str) -> String {
    dispatch(input, |req: HistRequest| {
        let kind: StatKind = req
            .kind
            .parse()
            .map_err(|_| Failure::input(format!("unknown statistic \"{}\"", req.kind)))?;
        if !(1000..=200_000).contains(&req.reps) {
            return Err(Failure::input(format!(
                "reps must lie in [1000, 200000], got {}",
                req.reps
            )));
        }
        if !(100..=20_000).contains(&req.steps) {
            return Err(Failure::input(format!(
                "steps must lie in [100, 20000], got {}",
                req.steps
            )));
        }
        if req.reps as u64 * req.steps as u64 > MAX_HIST_WORK {
            return Err(Failure::input(format!(
                "reps * steps capped at {MAX_HIST_WORK} for the browser"
            )));
        }
        if !(10..=200).contains(&req.bins) {
            return Err(Failure::input(format!(
                "bins must lie in [10, 200], got {}",
                req.bins
            )));
        }
        if req.alphas.is_empty() || req.alphas.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
            return Err(Failure::input(
                "alphas must be a nonempty list of probabilities in (0,1)",
            ));
        }

        let base = SeedSpec::new(req.seed);
        let mut draws = Vec::with_capacity(req.reps);
        let mut clamped = 0usize;
        let mut sum_int_w2 = 0.0f64;
        let mut sum_a_mu = 0.0f64;
        for i in 0..req.reps {
            let f = wiener_functionals(req.steps, base.child(0, i as u64))?;
            sum_int_w2 += f.int_w2;
            sum_a_mu += f.a_mu;
            let (v, was_clamped) = limit_stat_draw(kind, &f)?;
            clamped += usize::from(was_clamped);
            draws.push(v);
        }
        draws.sort_by(f64::total_cmp);

        let at = |p: f64| -> f64 {
            let h = p * (draws.len() - 1) as f64;
            let lo = h.floor() as usize;
            let frac = h - lo as f64;
            if lo + 1 < draws.len() {
                draws[lo] * (1.0 - frac) + draws[lo + 1] * frac
            } else {
                draws[lo]
            }
        };
        let quantiles: Vec<(f64, f64)> = req.alphas.iter().map(|&p| (p, at(p))).collect();

        let (lo, hi) = (at(0.001), at(0.999));
        let width = (hi - lo).max(f64::MIN_POSITIVE);
        let mut counts = vec![0u32; req.bins];
        for &v in &draws {
            let idx = (((v - lo) / width) * req.bins as f64).floor() as i64;
            counts[idx.clamp(0, req.bins as i64 - 1) as usize] += 1;
        }

        Ok(HistResponse {
            kind: kind.tag().to_string(),
            reps: req.reps,
            steps: req.steps,
            clamped,
            lo,
            hi,
            counts,
            quantiles,
            mean_int_w2: sum_int_w2 / req.reps as f64,
            mean_a_mu: sum_a_mu / req.reps as f64,
        })
    })
}

// ---------------------------------------------------------------------------
// wasm exports
// ---------------------------------------------------------------------------

#[cfg(target_arch = "wasm32")]
mod wasm {
    use wasm_bindgen::prelude::wasm_bindgen;

    #[wasm_bindgen]
    pub fn run_test(input: &str) -> String {
        crate::run_test(input)
    }

    #[wasm_bindgen]
    pub fn cv_curve(input: &str) -> String {
        crate::cv_curve(input)
    }

    #[wasm_bindgen]
    pub fn limit_hist(input: &str) -> String {
        crate::limit_hist(input)
    }
}
