use crate::error::{Error, Result};

pub(crate) fn check_d(d: f64) -> Result<()> {
    if !(d.abs() < 0.5) {
        return Err(Error::Parameter(format!("fractional parameter d = {d} outside (-0.5, 0.5)")));
    }
    Ok(())
}

/// Coefficients of `(1 - B)^d` for lags `0..=k`, without range checks.
pub(crate) fn binomial_weights(d: f64, k: usize) -> Vec<f64> {
    let mut pi = Vec::with_capacity(k + 1);
    pi.push(1.0);
    for j in 1..=k {
        let prev = pi[j - 1];
        pi.push(prev * (j as f64 - 1.0 - d) / j as f64);
    }
    pi
}

/// `pi_0..=pi_k` of the expansion `(1 - B)^d = sum_k pi_k B^k`, via
/// `pi_k = pi_{k-1} (k - 1 - d) / k`.
pub fn frac_diff_coeffs(d: f64, k: usize) -> Result<Vec<f64>> {
    check_d(d)?;
    if k == 0 {
        return Err(Error::Parameter("truncation K must be >= 1".into()));
    }
    Ok(binomial_weights(d, k))
}

/// `Y_t = sum_{k=0..min(t, K)} pi_k X_{t-k}`.
pub(crate) fn apply_filter(series: &[f64], pi: &[f64]) -> Vec<f64> {
    (0..series.len())
        .map(|t| {
            pi.iter()
                .take(t + 1)
                .enumerate()
                .map(|(k, p)| p * series[t - k])
                .sum()
        })
        .collect()
}

/// Solves `Y_t = sum_{k=0..min(t, K)} pi_k X_{t-k}` for `X` (with `pi_0 = 1`).
pub(crate) fn invert_filter(series: &[f64], pi: &[f64]) -> Vec<f64> {
    let mut x: Vec<f64> = Vec::with_capacity(series.len());
    for (t, &y) in series.iter().enumerate() {
        let lagged: f64 = pi
            .iter()
            .enumerate()
            .skip(1)
            .take(t)
            .map(|(k, p)| p * x[t - k])
            .sum();
        x.push(y - lagged);
    }
    x
}

/// Truncated fractional difference `(1 - B)^d X`, conditioned on the
/// series start (no values before `t = 0`).
pub fn frac_difference(series: &[f64], d: f64, k: usize) -> Result<Vec<f64>> {
    let pi = frac_diff_coeffs(d, k)?;
    if series.len() <= k {
        log::warn!("series of length {} is not longer than truncation K = {k}", series.len());
    }
    Ok(apply_filter(series, &pi))
}

/// Inverse of [`frac_difference`] with the same `d` and `K`.
///
/// For `t <= K` this equals applying the `(1 - B)^-d` expansion; beyond
/// that it solves the truncated difference recursion exactly, so
/// `frac_integrate(frac_difference(x)) == x` at every point up to rounding.
pub fn frac_integrate(series: &[f64], d: f64, k: usize) -> Result<Vec<f64>> {
    let pi = frac_diff_coeffs(d, k)?;
    Ok(invert_filter(series, &pi))
}
