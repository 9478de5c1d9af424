//! Binomial confidence intervals for error counts.

use statrs::distribution::{Beta, ContinuousCDF};

/// Error counts from which the normal approximation is used.
pub const NORMAL_APPROX_MIN_ERRORS: u64 = 20;
const Z_95: f64 = 1.959_963_984_540_054;

/// Half-width of a 95% confidence interval for `errors / trials`.
///
/// Uses the normal approximation once at least 20 errors are observed and the
/// exact Clopper–Pearson interval below that. Returns 0 when `trials == 0`.
pub fn binomial_half_width(errors: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    if errors >= NORMAL_APPROX_MIN_ERRORS && trials - errors >= NORMAL_APPROX_MIN_ERRORS {
        return Z_95 * (p * (1.0 - p) / n).sqrt();
    }
    let (lo, hi) = clopper_pearson(errors, trials, 0.05);
    (hi - lo) / 2.0
}

/// Exact two-sided `1 − alpha` interval for a binomial proportion.
pub fn clopper_pearson(errors: u64, trials: u64, alpha: f64) -> (f64, f64) {
    let x = errors as f64;
    let n = trials as f64;
    let lo = if errors == 0 {
        0.0
    } else {
        Beta::new(x, n - x + 1.0)
            .map(|b| b.inverse_cdf(alpha / 2.0))
            .unwrap_or(0.0)
    };
    let hi = if errors == trials {
        1.0
    } else {
        Beta::new(x + 1.0, n - x)
            .map(|b| b.inverse_cdf(1.0 - alpha / 2.0))
            .unwrap_or(1.0)
    };
    (lo, hi)
}
