//! Simulation of the asymptotic (Brownian-functional) null distributions of
//! the unit root statistics, plus the finite-sample functionals whose joint
//! convergence underlies them.
//!
//! A standard Wiener path is discretized by a length-N standard-normal random
//! walk (the invariance-principle construction): W(t) is approximated by
//! z_{[Nt]}/sqrt(N), integrals become left-endpoint Riemann sums. Each limit
//! draw maps the path functionals through the closed-form limit expression
//! for the requested statistic.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::innovations::SeedSpec;
use crate::par::map_indexed;
use crate::quantile::{quantile_sorted, sort_f64};
use crate::series::{suffstats, NeumaierAcc, Series};
use crate::stats::StatKind;
use crate::tags;

/// Path functionals of one simulated Wiener path, together with the derived
/// quantities entering the limit laws for the zero-mean case (a, b, c) and
/// the mean-corrected case (a_mu, b_mu, c_mu).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WienerFunctionals {
    /// Left Riemann sum for the path integral of W.
    pub int_w: f64,
    /// Left Riemann sum for the path integral of W^2.
    pub int_w2: f64,
    /// Terminal value W(1).
    pub w1: f64,
    /// Zero-mean case: a = int W^2.
    pub a: f64,
    /// Zero-mean case: b = W(1)^2 / a.
    pub b: f64,
    /// Zero-mean case: c = (W(1)^2 - 1) / (2a).
    pub c: f64,
    /// Mean-corrected case: a_mu = int W^2 - (int W)^2.
    pub a_mu: f64,
    /// Mean-corrected case: b_mu = ((int W)^2 + (W(1) - int W)^2) / a_mu.
    pub b_mu: f64,
    /// Mean-corrected case: c_mu = (1/2 (W(1)^2 - 1) - W(1) int W + (int W)^2) / a_mu.
    pub c_mu: f64,
}

/// The normalized finite-sample functionals that converge jointly to
/// (a_mu-type, b_mu-type, c_mu-type) limits: c/(sigma^2 n^2), n(H-1), n(G-1)
/// with G = b/c and H = a/c from the sufficient statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaFunctionals {
    pub c_norm: f64,
    pub h_stat: f64,
    pub g_stat: f64,
}

/// Minimum number of walk steps accepted for a discretized path.
pub const MIN_STEPS: usize = 100;

/// Default number of walk steps for asymptotic draws. Experience with the
/// convergence checks shows coarser paths visibly bias the far tail.
pub const DEFAULT_STEPS: usize = 10_000;

/// Simulates one Wiener path by an N-step standard normal random walk and
/// returns its functionals.
///
/// int_W = N^{-3/2} sum z_t, int_W2 = N^{-2} sum z_t^2, W1 = z_N / sqrt(N),
/// with sums over t = 1..N (left-endpoint Riemann convention).
pub fn wiener_functionals(steps: usize, seed: SeedSpec) -> Result<WienerFunctionals> {
    let mut rng = seed.rng();
    wiener_functionals_from_rng(steps, &mut rng)
}

pub(crate) fn wiener_functionals_from_rng<R: Rng>(
    steps: usize,
    rng: &mut R,
) -> Result<WienerFunctionals> {
    if steps < MIN_STEPS {
        return Err(Error::DomainError(format!(
            "steps must be at least {MIN_STEPS}, got {steps}"
        )));
    }
    let n = steps as f64;
    let mut z = 0.0f64;
    let mut sum_z = NeumaierAcc::default();
    let mut sum_z2 = NeumaierAcc::default();
    for _ in 0..steps {
        let e: f64 = StandardNormal.sample(rng);
        z += e;
        sum_z.add(z);
        sum_z2.add(z * z);
    }
    let int_w = sum_z.value() / (n * n.sqrt());
    let int_w2 = sum_z2.value() / (n * n);
    let w1 = z / n.sqrt();
    assemble(int_w, int_w2, w1)
}

fn assemble(int_w: f64, int_w2: f64, w1: f64) -> Result<WienerFunctionals> {
    let a = int_w2;
    let a_mu = int_w2 - int_w * int_w;
    // NaN must fail this check, so not(> 0) rather than <= 0
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(a > 0.0) || !(a_mu > 0.0) {
        // Zero (or negative, through rounding) path variance cannot occur for
        // a working generator; treat it as a fault rather than clamping.
        return Err(Error::DegenerateFunctional);
    }
    let w1_sq = w1 * w1;
    let b = w1_sq / a;
    let c = 0.5 * (w1_sq - 1.0) / a;
    let b_mu = (int_w * int_w + (w1 - int_w) * (w1 - int_w)) / a_mu;
    let c_mu = (0.5 * (w1_sq - 1.0) - w1 * int_w + int_w * int_w) / a_mu;
    Ok(WienerFunctionals {
        int_w,
        int_w2,
        w1,
        a,
        b,
        c,
        a_mu,
        b_mu,
        c_mu,
    })
}

/// Maps path functionals through the limit law of one statistic.
///
/// Delta-type laws are 1/2 (C - sqrt(C^2 - 4C + 2B)); tau-type laws carry the
/// extra sqrt(A) factor: (sqrt(A)/2)(C - sqrt(C^2 - 4C + 2B)); mean-corrected
/// kinds use the mu-subscripted functionals. The radicand is nonnegative up
/// to discretization noise; a negative value is clamped to 0 and flagged in
/// the returned bool so callers can report the count.
pub fn limit_stat_draw(kind: StatKind, f: &WienerFunctionals) -> Result<(f64, bool)> {
    let (a, b, c) = match kind {
        StatKind::Delta | StatKind::Tau => (f.a, f.b, f.c),
        StatKind::DeltaMu | StatKind::TauMu => (f.a_mu, f.b_mu, f.c_mu),
        StatKind::Df => {
            return Err(Error::InvalidSpec(
                "no closed-form limit draw for the least-squares baseline".into(),
            ))
        }
    };
    let radicand = c * c - 4.0 * c + 2.0 * b;
    let clamped = radicand < 0.0;
    let bracket = c - radicand.max(0.0).sqrt();
    let value = match kind {
        StatKind::Delta | StatKind::DeltaMu => 0.5 * bracket,
        StatKind::Tau | StatKind::TauMu => 0.5 * a.sqrt() * bracket,
        StatKind::Df => unreachable!(),
    };
    Ok((value, clamped))
}

/// Computes the normalized sufficient-statistic functionals of a (already
/// mean-corrected, if appropriate) series with known innovation variance.
pub fn lemma_functionals(s: &Series, sigma2: f64) -> Result<LemmaFunctionals> {
    // NaN must fail this check, so not(> 0) rather than <= 0
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::DomainError(format!(
            "innovation variance must be positive and finite, got {sigma2}"
        )));
    }
    let n = s.n();
    if n < 4 {
        return Err(Error::SeriesTooShort { n, min: 4 });
    }
    let st = suffstats(s.values())?;
    if st.c <= 0.0 {
        return Err(Error::DegenerateSeries);
    }
    let nf = n as f64;
    Ok(LemmaFunctionals {
        c_norm: st.c / (sigma2 * nf * nf),
        h_stat: nf * (st.a - st.c) / st.c,
        g_stat: nf * (st.b - st.c) / st.c,
    })
}

/// Summary of a batch of limit draws: empirical quantiles plus the mean path
/// diagnostics used by the calibration checks, and the count of clamped
/// (negative-radicand) draws, which is reported rather than hidden.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSummary {
    pub kind: StatKind,
    pub reps: usize,
    pub steps: usize,
    /// (probability level, empirical quantile) pairs, in input order.
    pub quantiles: Vec<(f64, f64)>,
    /// Number of draws whose radicand was clamped at zero.
    pub clamped: usize,
    pub mean_int_w2: f64,
    pub mean_w1_sq: f64,
    pub mean_a_mu: f64,
}

/// Simulates `reps` independent limit draws (each on its own derived RNG
/// stream, so results are identical for any thread count) and summarizes
/// them. Probabilities outside (0,1) or an empty list are rejected.
pub fn simulate_limit_quantiles(
    kind: StatKind,
    reps: usize,
    steps: usize,
    alphas: &[f64],
    seed: SeedSpec,
) -> Result<LimitSummary> {
    if reps == 0 {
        return Err(Error::InvalidSpec("reps must be positive".into()));
    }
    if alphas.is_empty() {
        return Err(Error::InvalidSpec("no probability levels given".into()));
    }
    if let Some(bad) = alphas.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
        return Err(Error::InvalidSpec(format!(
            "probability level {bad} outside (0,1)"
        )));
    }
    if steps < MIN_STEPS {
        return Err(Error::DomainError(format!(
            "steps must be at least {MIN_STEPS}, got {steps}"
        )));
    }
    if matches!(kind, StatKind::Df) {
        return Err(Error::InvalidSpec(
            "no closed-form limit draw for the least-squares baseline".into(),
        ));
    }

    struct Draw {
        value: f64,
        clamped: bool,
        int_w2: f64,
        w1_sq: f64,
        a_mu: f64,
    }

    let draws: Vec<Result<Draw>> = map_indexed(reps, |i| {
        let mut rng = seed.child(tags::LIMIT_DRAW, i as u64).rng();
        let f = wiener_functionals_from_rng(steps, &mut rng)?;
        let (value, clamped) = limit_stat_draw(kind, &f)?;
        Ok(Draw {
            value,
            clamped,
            int_w2: f.int_w2,
            w1_sq: f.w1 * f.w1,
            a_mu: f.a_mu,
        })
    });

    let mut values = Vec::with_capacity(reps);
    let mut clamped = 0usize;
    let mut sum_int_w2 = NeumaierAcc::default();
    let mut sum_w1_sq = NeumaierAcc::default();
    let mut sum_a_mu = NeumaierAcc::default();
    for d in draws {
        let d = d?;
        values.push(d.value);
        clamped += d.clamped as usize;
        sum_int_w2.add(d.int_w2);
        sum_w1_sq.add(d.w1_sq);
        sum_a_mu.add(d.a_mu);
    }
    sort_f64(&mut values);
    let quantiles = alphas
        .iter()
        .map(|&p| (p, quantile_sorted(&values, p)))
        .collect();
    let nf = reps as f64;
    Ok(LimitSummary {
        kind,
        reps,
        steps,
        quantiles,
        clamped,
        mean_int_w2: sum_int_w2.value() / nf,
        mean_w1_sq: sum_w1_sq.value() / nf,
        mean_a_mu: sum_a_mu.value() / nf,
    })
}
