//! Internal empirical-quantile helper: order-statistic linear interpolation
//! (the continuous, "type 7" convention), shared by the quantile estimator,
//! the limit-law simulator, and the power harness.

/// Sorts a sample in place using a total order on f64 (NaN sorts last; the
/// callers never produce NaN, but the order must still be total).
pub(crate) fn sort_f64(v: &mut [f64]) {
    v.sort_unstable_by(|a, b| a.total_cmp(b));
}

/// Quantile of an already sorted sample at probability `p` in [0,1]:
/// h = (len-1)·p, linear interpolation between the two bracketing order
/// statistics.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    assert!((0.0..=1.0).contains(&p), "probability out of [0,1]");
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = h - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}
