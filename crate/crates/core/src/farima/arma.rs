use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::nelder_mead;

pub const MAX_ARMA_ORDER: usize = 5;

/// ARMA(p, q) parameters with `phi(B) = 1 - sum phi_i B^i` and
/// `theta(B) = 1 + sum theta_j B^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmaFit {
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub sigma2: f64,
    /// Conditional sum of squares at the optimum.
    pub css: f64,
    /// Number of residuals entering `css`.
    pub n_used: usize,
}

impl ArmaFit {
    /// Corrected AIC on the conditional likelihood.
    pub fn aicc(&self) -> f64 {
        let n = self.n_used as f64;
        let k = (self.phi.len() + self.theta.len() + 1) as f64;
        let penalty = if n - k - 1.0 > 0.0 {
            2.0 * k * (k + 1.0) / (n - k - 1.0)
        } else {
            f64::INFINITY
        };
        n * self.sigma2.ln() + 2.0 * k + penalty
    }
}

/// Step-down (Schur-Cohn) test: true iff `1 - sum a_k z^k` has every root
/// strictly outside the unit circle.
pub fn roots_outside_unit_circle(a: &[f64]) -> bool {
    let mut a: Vec<f64> = a.to_vec();
    while a.last() == Some(&0.0) {
        a.pop();
    }
    while let Some(&kappa) = a.last() {
        if !(kappa.abs() < 1.0) {
            return false;
        }
        let k = a.len();
        let denom = 1.0 - kappa * kappa;
        let next: Vec<f64> = (0..k - 1)
            .map(|j| (a[j] + kappa * a[k - 2 - j]) / denom)
            .collect();
        a = next;
    }
    true
}

pub fn is_stationary(phi: &[f64]) -> bool {
    roots_outside_unit_circle(phi)
}

pub fn is_invertible(theta: &[f64]) -> bool {
    let neg: Vec<f64> = theta.iter().map(|t| -t).collect();
    roots_outside_unit_circle(&neg)
}

/// Conditional residuals `e_t = y_t - sum phi_i y_{t-i} - sum theta_j e_{t-j}`
/// for `t >= p`, with pre-sample residuals set to zero.
pub fn css_residuals(y: &[f64], phi: &[f64], theta: &[f64]) -> Vec<f64> {
    let p = phi.len();
    let mut e = vec![0.0; y.len()];
    for t in p..y.len() {
        let ar: f64 = phi.iter().enumerate().map(|(i, f)| f * y[t - 1 - i]).sum();
        let ma: f64 = theta
            .iter()
            .enumerate()
            .filter(|(j, _)| t > *j)
            .map(|(j, th)| th * e[t - 1 - j])
            .sum();
        e[t] = y[t] - ar - ma;
    }
    e.drain(..p.min(e.len()));
    e
}

fn css(y: &[f64], phi: &[f64], theta: &[f64]) -> f64 {
    css_residuals(y, phi, theta).iter().map(|e| e * e).sum()
}

/// Sample autocovariances `gamma_0..=gamma_max_lag` (biased, divisor n).
pub fn autocovariances(y: &[f64], max_lag: usize) -> Vec<f64> {
    let n = y.len();
    let mean = y.iter().sum::<f64>() / n as f64;
    (0..=max_lag)
        .map(|h| {
            (h..n)
                .map(|t| (y[t] - mean) * (y[t - h] - mean))
                .sum::<f64>()
                / n as f64
        })
        .collect()
}

/// Yule-Walker AR(p) coefficients by Levinson-Durbin; always stationary.
pub fn yule_walker(y: &[f64], p: usize) -> Vec<f64> {
    if p == 0 {
        return Vec::new();
    }
    let g = autocovariances(y, p);
    if !(g[0] > 0.0) {
        return vec![0.0; p];
    }
    let mut phi: Vec<f64> = Vec::new();
    let mut v = g[0];
    for k in 1..=p {
        let acc: f64 = phi.iter().enumerate().map(|(j, f)| f * g[k - 1 - j]).sum();
        let kappa = (g[k] - acc) / v;
        let mut next: Vec<f64> = phi
            .iter()
            .enumerate()
            .map(|(j, f)| f - kappa * phi[k - 2 - j])
            .collect();
        next.push(kappa);
        phi = next;
        v *= 1.0 - kappa * kappa;
    }
    phi
}

/// Moment estimate of an MA(1) coefficient from the lag-one autocorrelation.
fn ma1_moment(y: &[f64]) -> f64 {
    let g = autocovariances(y, 1);
    if !(g[0] > 0.0) {
        return 0.0;
    }
    let r = (g[1] / g[0]).clamp(-0.49, 0.49);
    if r.abs() < 1e-12 {
        0.0
    } else {
        (1.0 - (1.0 - 4.0 * r * r).sqrt()) / (2.0 * r)
    }
}

/// Conditional-sum-of-squares ARMA(p, q) fit of a zero-mean series.
///
/// Nelder-Mead runs from several method-of-moments starts (Yule-Walker AR
/// part, MA(1) moment estimate); points outside the stationary and
/// invertible region score `+inf`.
pub fn fit_arma(y: &[f64], p: usize, q: usize) -> Result<ArmaFit> {
    if p > MAX_ARMA_ORDER || q > MAX_ARMA_ORDER {
        return Err(Error::Parameter(format!(
            "ARMA order ({p}, {q}) exceeds {MAX_ARMA_ORDER}"
        )));
    }
    let required = 10 * (p + q + 1);
    if y.len() < required {
        return Err(Error::SeriesTooShort {
            required,
            actual: y.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("non-finite value in series".into()));
    }

    let objective = |params: &[f64]| {
        let (phi, theta) = params.split_at(p);
        if !is_stationary(phi) || !is_invertible(theta) {
            return f64::INFINITY;
        }
        css(y, phi, theta)
    };

    let phi_yw = yule_walker(y, p);
    let theta_mom = ma1_moment(y);
    let mut starts: Vec<Vec<f64>> = Vec::new();
    let with_ma = |phi: &[f64], first: f64| {
        let mut s = phi.to_vec();
        s.extend((0..q).map(|j| if j == 0 { first } else { 0.0 }));
        s
    };
    starts.push(with_ma(&phi_yw, 0.0));
    if q > 0 {
        starts.push(with_ma(&phi_yw, theta_mom));
        starts.push(with_ma(&vec![0.0; p], theta_mom));
    }
    if p > 0 {
        starts.push(with_ma(&vec![0.0; p], 0.0));
    }

    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in starts {
        if !objective(&start).is_finite() {
            continue;
        }
        let m = nelder_mead(objective, &start, 0.1, 3000, 1e-12)?;
        let m = nelder_mead(objective, &m.point, 0.02, 3000, 1e-14)?;
        if best.as_ref().map_or(true, |(_, v)| m.value < *v) {
            best = Some((m.point, m.value));
        }
    }
    let (params, value) = best
        .filter(|(_, v)| v.is_finite())
        .ok_or_else(|| Error::Degenerate("no stationary, invertible ARMA optimum found".into()))?;
    let (phi, theta) = params.split_at(p);
    let n_used = y.len() - p;
    let sigma2 = value / n_used as f64;
    if !(sigma2 > 0.0) {
        return Err(Error::Degenerate("zero residual variance".into()));
    }
    Ok(ArmaFit {
        phi: phi.to_vec(),
        theta: theta.to_vec(),
        sigma2,
        css: value,
        n_used,
    })
}

/// Fits every order in `{0..=max_p} x {0..=max_q}` and keeps the lowest AICc.
/// Orders that fail to fit are skipped.
pub fn select_order(y: &[f64], max_p: usize, max_q: usize) -> Result<ArmaFit> {
    let mut best: Option<ArmaFit> = None;
    let mut last_err = None;
    for p in 0..=max_p {
        for q in 0..=max_q {
            match fit_arma(y, p, q) {
                Ok(fit) => {
                    if best.as_ref().map_or(true, |b| fit.aicc() < b.aicc()) {
                        best = Some(fit);
                    }
                }
                Err(e) => last_err = Some(e),
            }
        }
    }
    best.ok_or_else(|| last_err.unwrap_or_else(|| Error::Degenerate("no ARMA order fitted".into())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationarity_region() {
        assert!(is_stationary(&[]));
        assert!(is_stationary(&[0.9]));
        assert!(!is_stationary(&[1.0]));
        assert!(!is_stationary(&[-1.2]));
        // AR(2) triangle: phi2 + phi1 < 1, phi2 - phi1 < 1, |phi2| < 1
        assert!(is_stationary(&[0.5, 0.3]));
        assert!(!is_stationary(&[0.5, 0.6]));
        assert!(!is_stationary(&[0.2, -1.0]));
        assert!(is_stationary(&[0.5, 0.0]));
        assert!(is_invertible(&[0.5]));
        assert!(!is_invertible(&[-1.5]));
    }

    #[test]
    fn residuals_recover_innovations() {
        let z = [0.5, -1.0, 0.25, 2.0, -0.75, 1.0];
        // y_t = 0.5 y_{t-1} + z_t + 0.4 z_{t-1}, y_0 = z_0 with pre-sample zeros
        let mut y = vec![z[0]];
        for t in 1..z.len() {
            y.push(0.5 * y[t - 1] + z[t] + 0.4 * z[t - 1]);
        }
        let e = css_residuals(&y, &[0.5], &[0.4]);
        // conditioning starts at t = 1, where e_0 is taken as zero
        assert_eq!(e.len(), z.len() - 1);
        let pure_ma = css_residuals(&y, &[], &[]);
        assert_eq!(pure_ma, y);
    }

    #[test]
    fn yule_walker_ar1() {
        let y: Vec<f64> = (0..200).map(|t| 0.8f64.powi(t % 7)).collect();
        let phi = yule_walker(&y, 2);
        assert!(is_stationary(&phi));
    }

    #[test]
    fn order_and_length_checks() {
        let y = vec![0.1; 100];
        assert!(matches!(fit_arma(&y, 6, 0), Err(Error::Parameter(_))));
        assert!(matches!(fit_arma(&y[..20], 1, 1), Err(Error::SeriesTooShort { .. })));
    }

    #[test]
    fn white_noise_variance() {
        let y: Vec<f64> = (0..50).map(|t| if t % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let fit = fit_arma(&y, 0, 0).unwrap();
        assert_eq!(fit.n_used, 50);
        assert!((fit.sigma2 - 1.0).abs() < 1e-15);
    }
}
