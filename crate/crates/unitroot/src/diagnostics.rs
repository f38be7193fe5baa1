//! Pre-test adequacy checks: residuals of the fitted AR(1), their sample
//! autocorrelations, and a portmanteau (Ljung-Box) test gating the unit root
//! test. Significant residual autocorrelation means the one-lag model is
//! inadequate and the unit root conclusion untrustworthy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mle::exact_mle_mu;
use crate::series::{center, neumaier_sum, Series};
use crate::special::chi_sq_sf;

/// Outcome of the adequacy check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagReport {
    /// Fitted-model residuals e_t, t = 2..n.
    pub residuals: Vec<f64>,
    /// Sample autocorrelations of the residuals at lags 1..=L.
    pub acf: Vec<f64>,
    pub lb_stat: f64,
    /// Chi-square degrees of freedom: lags - 1 (one AR parameter fitted).
    pub lb_df: usize,
    pub lb_pvalue: f64,
    /// True when the portmanteau test does not reject at the given level.
    pub adequate: bool,
}

/// Residuals of an AR(1) fit with the given coefficient and level:
/// e_t = (z_t - mean) - rho (z_{t-1} - mean), t = 2..n.
pub fn ar1_residuals(s: &Series, rho: f64, mean: f64) -> Result<Vec<f64>> {
    if s.n() < 3 {
        return Err(Error::SeriesTooShort { n: s.n(), min: 3 });
    }
    Ok(s.values()
        .windows(2)
        .map(|w| (w[1] - mean) - rho * (w[0] - mean))
        .collect())
}

/// Default portmanteau lag count for a residual sample of size m:
/// min(10, floor(m/5)).
pub fn suggested_lags(m: usize) -> usize {
    (m / 5).min(10)
}

/// Ljung-Box portmanteau statistic on a residual sequence:
/// Q = m(m+2) sum_{k=1..L} r_k^2/(m-k), referred to chi-square with L-1
/// degrees of freedom (one AR parameter was fitted).
///
/// Requires at least 2 lags (otherwise the reference distribution has no
/// degrees of freedom) and m > lags + 1 residuals.
pub fn ljung_box(e: &[f64], lags: usize) -> Result<(f64, usize, f64)> {
    let m = e.len();
    if lags < 2 || m <= lags + 1 {
        return Err(Error::TooFewLags { lags, m });
    }
    let acf = residual_acf(e, lags)?;
    let mf = m as f64;
    let q = mf
        * (mf + 2.0)
        * neumaier_sum(
            acf.iter()
                .enumerate()
                .map(|(i, r)| r * r / (mf - (i + 1) as f64)),
        );
    let df = lags - 1;
    let p = chi_sq_sf(q, df);
    Ok((q, df, p))
}

/// Sample autocorrelations r_1..r_L of a sequence, computed on deviations
/// from the sample mean with the variance-normalized (biased) estimator, so
/// |r_k| <= 1 always.
pub fn residual_acf(e: &[f64], lags: usize) -> Result<Vec<f64>> {
    let m = e.len();
    let mean = neumaier_sum(e.iter().copied()) / m as f64;
    let dev: Vec<f64> = e.iter().map(|x| x - mean).collect();
    let denom = neumaier_sum(dev.iter().map(|d| d * d));
    if denom <= 0.0 {
        return Err(Error::DegenerateResiduals);
    }
    Ok((1..=lags)
        .map(|k| neumaier_sum(dev[k..].iter().zip(&dev).map(|(a, b)| a * b)) / denom)
        .collect())
}

/// Full adequacy check for one observed series: fits the mean-corrected
/// exact MLE, extracts the residuals, and runs the portmanteau test. The
/// model is adequate when the test does not reject (lb_pvalue > level).
pub fn adequacy_gate(s: &Series, lags: usize, level: f64) -> Result<DiagReport> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidSpec(format!(
            "adequacy level {level} outside (0,1)"
        )));
    }
    let fit = exact_mle_mu(s)?;
    let mean = center(s).mean;
    let residuals = ar1_residuals(s, fit.rho_hat, mean)?;
    let (lb_stat, lb_df, lb_pvalue) = ljung_box(&residuals, lags)?;
    let acf = residual_acf(&residuals, lags)?;
    Ok(DiagReport {
        residuals,
        acf,
        lb_stat,
        lb_df,
        lb_pvalue,
        adequate: lb_pvalue > level,
    })
}
