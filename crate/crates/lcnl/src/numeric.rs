//! Shared numerical kernels: max-shifted log-sum-exp and the fixed-order
//! pairwise reduction used for all observation sums.

/// Log of the sum of exponentials, shifted by the maximum so the result is
/// finite for any finite inputs (no overflow up to |x| ~ 1e308).
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    debug_assert!(!xs.is_empty());
    if xs.len() == 1 {
        return xs[0];
    }
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let sum: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + sum.ln()
}

/// Two-argument log-sum-exp; cheaper than the slice form in hot loops.
#[inline]
pub fn log_sum_exp2(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if !hi.is_finite() {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Exponentiate `logs` shifted by their max and normalize so the output sums
/// to one exactly at working precision. Writes in place.
pub fn softmax_from_logs(logs: &mut [f64]) {
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for x in logs.iter_mut() {
        *x = (*x - m).exp();
        sum += *x;
    }
    for x in logs.iter_mut() {
        *x /= sum;
    }
}

/// Deterministic pairwise-tree sum.
///
/// Reduction order (declared): split the slice at the midpoint, reduce each
/// half recursively, add left + right; runs of up to 32 elements are summed
/// left to right. The order depends only on the slice length, so the same
/// buffer reduces to the same bits no matter how many threads filled it.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
