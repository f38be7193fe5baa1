//! Exact maximum-likelihood estimation of the AR(1) coefficient.
//!
//! The score equation of the exact (stationary, Gaussian) likelihood is a
//! cubic in rho; the estimator is its real root inside the unit interval,
//! computed in closed form via the trigonometric root formula. No iterative
//! optimization is involved.

use crate::error::{Error, Result};
use crate::series::{center, suffstats, Series, SuffStats};

/// Result of the closed-form estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleResult {
    /// The estimated AR(1) coefficient.
    pub rho_hat: f64,
    /// True when no real root lay strictly inside the unit interval and the
    /// fallback rule (real root of smallest magnitude) was applied.
    pub boundary_flag: bool,
    /// Value of the score cubic at `rho_hat` (a residual; ~0 up to rounding).
    pub cubic_residual: f64,
}

/// Left-hand side of the score equation:
/// ((n-1)/n) c rho^3 - ((n-2)/n) b rho^2 - (c + a/n) rho + b.
pub fn score_cubic(st: &SuffStats, rho: f64) -> f64 {
    let n = st.n as f64;
    ((n - 1.0) / n) * st.c * rho.powi(3)
        - ((n - 2.0) / n) * st.b * rho.powi(2)
        - (st.c + st.a / n) * rho
        + st.b
}

/// Tolerance inside which a root is considered interior to the unit interval.
const INTERIOR_TOL: f64 = 1e-12;
/// Tolerance allowed on the arccos argument before declaring failure.
const ARG_TOL: f64 = 1e-9;
/// Roots this close to +-1 are snapped onto the boundary exactly, so that
/// downstream statistics see rho_hat == 1 (and produce exact zeros) instead
/// of trigonometric rounding noise. A genuinely interior root this close to
/// the boundary is statistically indistinguishable from it.
const SNAP_TOL: f64 = 1e-9;

/// Exact MLE of rho from sufficient statistics (zero-mean case).
///
/// The score cubic is normalized to monic form rho^3 + d2 rho^2 + d1 rho + d0
/// with
///   d2 = -((n-2)/(n-1)) (b/c),
///   d1 = -(n/(n-1)) (1 + a/(n c)),
///   d0 =  (n/(n-1)) (b/c),
/// and solved by the trigonometric formula. Because d1 < 0 whenever c > 0,
/// the quantity Q = (d2^2 - 3 d1)/9 is strictly positive and the three-real-
/// root branch applies; the arccos argument is clamped to [-1, 1] to absorb
/// rounding (it stays within 1e-9 of the interval on valid inputs).
///
/// Root selection: among real roots strictly inside the unit interval, the
/// one with the highest profile log-likelihood is returned. If none is
/// interior, the real root of smallest magnitude is returned with
/// `boundary_flag` set, keeping downstream statistics finite while
/// signalling the degeneracy.
pub fn exact_mle(st: &SuffStats) -> Result<MleResult> {
    if st.n < 3 {
        return Err(Error::SeriesTooShort { n: st.n, min: 3 });
    }
    if st.c <= 0.0 {
        return Err(Error::DegenerateSeries);
    }
    let n = st.n as f64;
    let ratio = st.b / st.c;
    let d2 = -((n - 2.0) / (n - 1.0)) * ratio;
    let d1 = -(n / (n - 1.0)) * (1.0 + st.a / (n * st.c));
    let d0 = (n / (n - 1.0)) * ratio;

    let q = (d2 * d2 - 3.0 * d1) / 9.0;
    let r = (9.0 * d2 * d1 - 27.0 * d0 - 2.0 * d2 * d2 * d2) / 54.0;
    debug_assert!(q > 0.0, "Q > 0 is guaranteed by d1 < 0");
    let arg = r / q.powi(3).sqrt();
    if !arg.is_finite() || arg.abs() > 1.0 + ARG_TOL {
        return Err(Error::NumericalFailure(format!(
            "arccos argument {arg} outside [-1, 1]; no real-root triple identified"
        )));
    }
    let theta = arg.clamp(-1.0, 1.0).acos();
    let scale = 2.0 * q.sqrt();
    let mut roots = [
        scale * (theta / 3.0).cos() - d2 / 3.0,
        scale * (theta / 3.0 + 2.0 * std::f64::consts::FRAC_PI_3 * 2.0).cos() - d2 / 3.0,
        scale * (theta / 3.0 + 2.0 * std::f64::consts::FRAC_PI_3).cos() - d2 / 3.0,
    ];
    for root in &mut roots {
        // One Newton step on the monic cubic squeezes the trigonometric
        // rounding out of the root (quadratic convergence from ~1e-8 off).
        let f = ((*root + d2) * *root + d1) * *root + d0;
        let fp = (3.0 * *root + 2.0 * d2) * *root + d1;
        if fp.abs() > f64::MIN_POSITIVE {
            let step = f / fp;
            if step.abs() < 1e-3 {
                *root -= step;
            }
        }
        if (*root - 1.0).abs() < SNAP_TOL {
            *root = 1.0;
        } else if (*root + 1.0).abs() < SNAP_TOL {
            *root = -1.0;
        }
    }

    let interior: Vec<f64> = roots
        .iter()
        .copied()
        .filter(|r| r.abs() < 1.0 - INTERIOR_TOL)
        .collect();
    let (rho_hat, boundary_flag) = match interior.len() {
        0 => {
            // fallback: smallest-magnitude real root, flagged
            let r = roots
                .iter()
                .copied()
                .min_by(|x, y| x.abs().total_cmp(&y.abs()))
                .unwrap();
            (r, true)
        }
        1 => (interior[0], false),
        _ => {
            // The root is unique in theory; defend against ties from rounding
            // by taking the interior root with the highest profile likelihood.
            let best = interior
                .iter()
                .copied()
                .max_by(|x, y| profile_loglik_term(st, *x).total_cmp(&profile_loglik_term(st, *y)))
                .unwrap();
            (best, false)
        }
    };

    Ok(MleResult {
        rho_hat,
        boundary_flag,
        cubic_residual: score_cubic(st, rho_hat),
    })
}

/// The rho-dependent part of the profiled log-likelihood (sigma^2 maximized
/// out): (1/2) log(1 - rho^2) - (n/2) log((a - 2 rho b + rho^2 c)/n).
fn profile_loglik_term(st: &SuffStats, rho: f64) -> f64 {
    let n = st.n as f64;
    let quad = (st.a - 2.0 * rho * st.b + rho * rho * st.c).max(f64::MIN_POSITIVE);
    0.5 * (1.0 - rho * rho).max(f64::MIN_POSITIVE).ln() - 0.5 * n * (quad / n).ln()
}

/// Exact MLE of rho with the sample mean removed first.
pub fn exact_mle_mu(s: &Series) -> Result<MleResult> {
    if s.n() < 4 {
        return Err(Error::SeriesTooShort { n: s.n(), min: 4 });
    }
    let centered = center(s);
    exact_mle(&suffstats(centered.values())?)
}

/// Exact log-likelihood of the stationary AR(1) model at (rho, sigma2):
/// -(n/2) log(2 pi) - (n/2) log sigma2 + (1/2) log(1 - rho^2)
/// - (a - 2 rho b + rho^2 c) / (2 sigma2).
pub fn loglik(s: &Series, rho: f64, sigma2: f64) -> Result<f64> {
    if !(rho.is_finite() && rho.abs() < 1.0) {
        return Err(Error::DomainError(format!(
            "log-likelihood requires |rho| < 1, got {rho}"
        )));
    }
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::DomainError(format!(
            "log-likelihood requires sigma2 > 0, got {sigma2}"
        )));
    }
    let st = suffstats(s.values())?;
    let n = st.n as f64;
    let quad = st.a - 2.0 * rho * st.b + rho * rho * st.c;
    Ok(
        -0.5 * n * (2.0 * std::f64::consts::PI).ln() - 0.5 * n * sigma2.ln()
            + 0.5 * (1.0 - rho * rho).ln()
            - quad / (2.0 * sigma2),
    )
}
