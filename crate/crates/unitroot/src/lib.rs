//! Exact maximum-likelihood unit root tests for AR(1) time series.
//!
//! The centerpiece is the closed-form exact MLE of the AR(1) coefficient
//! (the score equation is a cubic, solved trigonometrically — no iteration),
//! and the unit root tests built on it: the normalized statistic n(ρ̂−1) and
//! the pivotal statistic, each in a zero-mean and a mean-corrected variant.
//! Around the estimator sit the pieces a practitioner needs:
//!
//! - [`series`]: ingestion, centering, and the sufficient statistics.
//! - [`mle`]: the score cubic and the closed-form estimator.
//! - [`stats`]: the test statistics and the least-squares baseline.
//! - [`innovations`]: deterministic innovation laws (normal, Student-t,
//!   stable, GARCH) and path generators on splittable RNG streams.
//! - [`limitsim`]: the Brownian-functional limit laws, simulated by long
//!   discretized random walks.
//! - [`critval`]: finite-sample critical values — Monte-Carlo quantiles,
//!   weighted response-surface fits in powers of 1/n, the published
//!   mean-corrected pivotal surface as a built-in, and Monte-Carlo /
//!   bootstrap p-values.
//! - [`power`]: the size/power comparison harness.
//! - [`diagnostics`]: AR(1) residual adequacy checks gating the test.
//!
//! Every simulation entry point takes a [`innovations::SeedSpec`] and derives
//! one RNG stream per replication, so results are bit-identical for a fixed
//! master seed regardless of thread count.

pub mod critval;
pub mod diagnostics;
pub mod error;
pub mod innovations;
pub mod limitsim;
pub mod mle;
pub mod power;
pub mod series;
pub mod special;
pub mod stats;

mod par;
mod quantile;
mod tags;

pub use crate::critval::{
    builtin_quantile, builtin_surface, estimate_quantiles, fit_surface, mc_test, McResult,
    QuantilePoint, QuantileSurface, Resample, SurfaceMeta,
};
pub use crate::diagnostics::{
    adequacy_gate, ar1_residuals, ljung_box, residual_acf, suggested_lags, DiagReport,
};
pub use crate::error::{Error, Result};
pub use crate::innovations::{
    gen_ar1, gen_ar1_stationary, gen_random_walk, generate, InnovationSpec, SeedSpec,
};
pub use crate::limitsim::{
    lemma_functionals, limit_stat_draw, simulate_limit_quantiles, wiener_functionals,
    LemmaFunctionals, LimitSummary, WienerFunctionals,
};
pub use crate::mle::{exact_mle, exact_mle_mu, loglik, score_cubic, MleResult};
pub use crate::power::{get_power, get_power_opts, PowerCell, PowerOptions, StartMode, TestName};
pub use crate::series::{
    center, load_series, suffstats, CenteredSeries, ColumnSel, Series, SuffStats,
};
pub use crate::stats::{
    df_stat, sigma2_mean_corrected, sigma2_zero_mean, stat_value, unit_root_stats, StatKind,
    StatisticCase, TestOutcome,
};
