use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_GPH_LENGTH: usize = 32;
const D_CLAMP: f64 = 0.49;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DEstimate {
    pub d: f64,
    /// Unclamped regression estimate.
    pub raw: f64,
    pub clamped: bool,
    pub frequencies: usize,
}

/// Periodogram `|sum_t x_t e^{-i w t}|^2 / (2 pi n)` of a demeaned series at
/// the Fourier frequencies `2 pi j / n`, `j = 1..=m`.
pub fn periodogram(series: &[f64], m: usize) -> Vec<f64> {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    (1..=m)
        .map(|j| {
            let w = 2.0 * PI * j as f64 / n as f64;
            let (mut re, mut im) = (0.0, 0.0);
            for (t, &x) in series.iter().enumerate() {
                let (s, c) = (w * t as f64).sin_cos();
                re += (x - mean) * c;
                im -= (x - mean) * s;
            }
            (re * re + im * im) / (2.0 * PI * n as f64)
        })
        .collect()
}

/// Geweke / Porter-Hudak log-periodogram estimate of `d` over the lowest
/// `floor(sqrt(n))` Fourier frequencies, clamped into (-0.49, 0.49).
pub fn estimate_d(series: &[f64]) -> Result<DEstimate> {
    let n = series.len();
    if n < MIN_GPH_LENGTH {
        return Err(Error::SeriesTooShort {
            required: MIN_GPH_LENGTH,
            actual: n,
        });
    }
    let m = (n as f64).sqrt().floor() as usize;
    let pgram = periodogram(series, m);
    let scale = series.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if pgram.iter().any(|&p| !(p > 1e-28 * scale * scale) || !p.is_finite()) {
        return Err(Error::Degenerate("zero periodogram ordinate (constant series?)".into()));
    }
    let xs: Vec<f64> = (1..=m)
        .map(|j| {
            let w = 2.0 * PI * j as f64 / n as f64;
            (4.0 * (w / 2.0).sin().powi(2)).ln()
        })
        .collect();
    let ys: Vec<f64> = pgram.iter().map(|p| p.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m as f64;
    let my = ys.iter().sum::<f64>() / m as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let raw = -sxy / sxx;
    let d = raw.clamp(-D_CLAMP, D_CLAMP);
    Ok(DEstimate {
        d,
        raw,
        clamped: d != raw,
        frequencies: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_short_series() {
        assert!(matches!(estimate_d(&[3.0; 64]), Err(Error::Degenerate(_))));
        assert!(matches!(estimate_d(&[1.0; 10]), Err(Error::SeriesTooShort { .. })));
    }

    #[test]
    fn periodogram_of_pure_cosine() {
        let n = 64;
        let x: Vec<f64> = (0..n).map(|t| (2.0 * PI * 3.0 * t as f64 / n as f64).cos()).collect();
        let p = periodogram(&x, 5);
        // all power sits at j = 3: |n/2|^2 / (2 pi n)
        assert!((p[2] - (n as f64 / 2.0).powi(2) / (2.0 * PI * n as f64)).abs() < 1e-9);
        assert!(p[0] < 1e-20 && p[4] < 1e-20);
    }
}
