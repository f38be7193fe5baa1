//! The unit root test statistics: normalized (delta) and pivotal (tau)
//! statistics for the zero-mean and mean-corrected cases, the residual
//! variance estimators behind them, and the least-squares Dickey-Fuller
//! baseline statistic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mle::{exact_mle, MleResult};
use crate::series::{center, neumaier_sum, suffstats, Series};

/// Which mean treatment a statistic uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticCase {
    ZeroMean,
    MeanCorrected,
}

/// A single test statistic, for simulation and Monte-Carlo drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatKind {
    /// n (rho_hat - 1), zero-mean.
    Delta,
    /// Pivotal statistic, zero-mean.
    Tau,
    /// n (rho_hat_mu - 1), mean-corrected.
    DeltaMu,
    /// Pivotal statistic, mean-corrected.
    TauMu,
    /// Least-squares Dickey-Fuller t-type statistic (intercept included).
    Df,
}

impl StatKind {
    /// Shortest series length on which the statistic is defined.
    pub fn min_len(&self) -> usize {
        match self {
            StatKind::Delta | StatKind::Tau => 3,
            StatKind::DeltaMu | StatKind::TauMu | StatKind::Df => 4,
        }
    }

    /// Lower-case tag used in CSV outputs and CLI flags.
    pub fn tag(&self) -> &'static str {
        match self {
            StatKind::Delta => "delta",
            StatKind::Tau => "tau",
            StatKind::DeltaMu => "deltamu",
            StatKind::TauMu => "taumu",
            StatKind::Df => "df",
        }
    }
}

impl std::str::FromStr for StatKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "delta" => Ok(StatKind::Delta),
            "tau" => Ok(StatKind::Tau),
            "deltamu" | "delta_mu" => Ok(StatKind::DeltaMu),
            "taumu" | "tau_mu" => Ok(StatKind::TauMu),
            "df" => Ok(StatKind::Df),
            other => Err(Error::InvalidSpec(format!(
                "unknown statistic kind {other:?}"
            ))),
        }
    }
}

/// Full outcome of the exact-MLE unit root statistics on one series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub rho_hat: f64,
    /// Normalized statistic n (rho_hat - 1).
    pub delta: f64,
    /// Pivotal statistic (rho_hat - 1) scaled by its estimated standard error.
    pub tau: f64,
    /// Residual variance estimate behind tau.
    pub sigma2_hat: f64,
    pub kind: StatisticCase,
    pub n: usize,
    /// Propagated from the estimator: the root came from the fallback rule.
    pub boundary_flag: bool,
}

/// Residual variance for the zero-mean case:
/// sigma2 = (n-2)^-1 sum_{t=2..n} (z_t - rho z_{t-1})^2.
pub fn sigma2_zero_mean(s: &Series, rho: f64) -> Result<f64> {
    residual_variance(s.values(), rho, 2)
}

/// Residual variance for the mean-corrected case:
/// sigma2 = (n-3)^-1 sum_{t=2..n} ((z_t - zbar) - rho (z_{t-1} - zbar))^2.
pub fn sigma2_mean_corrected(s: &Series, rho: f64) -> Result<f64> {
    if s.n() < 4 {
        return Err(Error::SeriesTooShort { n: s.n(), min: 4 });
    }
    let centered = center(s);
    residual_variance(centered.values(), rho, 3)
}

fn residual_variance(values: &[f64], rho: f64, df_loss: usize) -> Result<f64> {
    let n = values.len();
    if n < df_loss + 1 {
        return Err(Error::SeriesTooShort {
            n,
            min: df_loss + 1,
        });
    }
    let ss = neumaier_sum(values.windows(2).map(|w| {
        let e = w[1] - rho * w[0];
        e * e
    }));
    Ok(ss / (n - df_loss) as f64)
}

/// Computes the normalized and pivotal statistics for the requested case.
///
/// Both statistics share one rho_hat. When the estimator lands exactly on
/// rho_hat = 1 (boundary fallback), the factor rho_hat - 1 vanishes and both
/// statistics are 0. The pivotal statistic is undefined only when the
/// residual variance is exactly zero with rho_hat != 1.
pub fn unit_root_stats(s: &Series, kind: StatisticCase) -> Result<TestOutcome> {
    let n = s.n();
    let (mle, sigma2_hat, scale_sum): (MleResult, f64, f64) = match kind {
        StatisticCase::ZeroMean => {
            let st = suffstats(s.values())?;
            let mle = exact_mle(&st)?;
            let sig2 = sigma2_zero_mean(s, mle.rho_hat)?;
            let scale = neumaier_sum(s.values()[..n - 1].iter().map(|z| z * z));
            (mle, sig2, scale)
        }
        StatisticCase::MeanCorrected => {
            if n < 4 {
                return Err(Error::SeriesTooShort { n, min: 4 });
            }
            let centered = center(s);
            let st = suffstats(centered.values())?;
            let mle = exact_mle(&st)?;
            let sig2 = residual_variance(centered.values(), mle.rho_hat, 3)?;
            let scale = neumaier_sum(centered.values()[..n - 1].iter().map(|z| z * z));
            (mle, sig2, scale)
        }
    };

    let diff = mle.rho_hat - 1.0;
    let (delta, tau) = if diff == 0.0 {
        (0.0, 0.0)
    } else if sigma2_hat == 0.0 {
        return Err(Error::TauUndefined);
    } else {
        (n as f64 * diff, scale_sum.sqrt() * diff / sigma2_hat.sqrt())
    };

    Ok(TestOutcome {
        rho_hat: mle.rho_hat,
        delta,
        tau,
        sigma2_hat,
        kind,
        n,
        boundary_flag: mle.boundary_flag,
    })
}

/// OLS fit of z_t on (1, z_{t-1}) for t = 2..n, shared by the t-type
/// statistic and the bootstrap resampler.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OlsAr1Fit {
    pub(crate) intercept: f64,
    pub(crate) slope: f64,
    pub(crate) sxx: f64,
    pub(crate) rss: f64,
}

pub(crate) fn ols_ar1(s: &Series) -> Result<OlsAr1Fit> {
    let v = s.values();
    let n = v.len();
    if n < 4 {
        return Err(Error::SeriesTooShort { n, min: 4 });
    }
    let m = (n - 1) as f64;
    let x = &v[..n - 1];
    let y = &v[1..];
    let xbar = neumaier_sum(x.iter().copied()) / m;
    let ybar = neumaier_sum(y.iter().copied()) / m;
    let sxx = neumaier_sum(x.iter().map(|xi| (xi - xbar) * (xi - xbar)));
    if sxx <= 0.0 {
        return Err(Error::SingularRegression);
    }
    let sxy = neumaier_sum(x.iter().zip(y).map(|(xi, yi)| (xi - xbar) * (yi - ybar)));
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let rss = neumaier_sum(x.iter().zip(y).map(|(xi, yi)| {
        let e = yi - intercept - slope * xi;
        e * e
    }));
    Ok(OlsAr1Fit {
        intercept,
        slope,
        sxx,
        rss,
    })
}

/// Dickey-Fuller t-type statistic: OLS of z_t on (1, z_{t-1}) for t = 2..n,
/// returning (rho_ls - 1) / se(rho_ls).
///
/// A perfectly fitted regression (zero residual sum of squares) returns 0 by
/// the zero-residual rule so that simulation loops stay total; a constant
/// lagged regressor is a genuine singularity and errors.
pub fn df_stat(s: &Series) -> Result<f64> {
    let fit = ols_ar1(s)?;
    if fit.rss <= 0.0 {
        return Ok(0.0);
    }
    let m = (s.n() - 1) as f64;
    let sigma2 = fit.rss / (m - 2.0);
    let se = (sigma2 / fit.sxx).sqrt();
    Ok((fit.slope - 1.0) / se)
}

/// Evaluates one statistic on a series (simulation/Monte-Carlo entry point).
pub fn stat_value(s: &Series, kind: StatKind) -> Result<f64> {
    match kind {
        StatKind::Delta => Ok(unit_root_stats(s, StatisticCase::ZeroMean)?.delta),
        StatKind::Tau => Ok(unit_root_stats(s, StatisticCase::ZeroMean)?.tau),
        StatKind::DeltaMu => Ok(unit_root_stats(s, StatisticCase::MeanCorrected)?.delta),
        StatKind::TauMu => Ok(unit_root_stats(s, StatisticCase::MeanCorrected)?.tau),
        StatKind::Df => df_stat(s),
    }
}
