//! FARIMA(p, d, q): fractional differencing, estimation, simulation and
//! forecasting.
//!
//! The model is `phi(B) (1 - B)^d X_t = theta(B) Z_t` with `|d| < 0.5`. The
//! infinite expansion of `(1 - B)^d` is truncated at `K` lags.

mod arma;
mod fracdiff;
mod gph;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use arma::{
    autocovariances, css_residuals, fit_arma, is_invertible, is_stationary, select_order, yule_walker, ArmaFit,
    MAX_ARMA_ORDER,
};
pub use fracdiff::{frac_diff_coeffs, frac_difference, frac_integrate};
pub use gph::{estimate_d, periodogram, DEstimate, MIN_GPH_LENGTH};

pub const DEFAULT_TRUNCATION: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarimaModel {
    pub p: usize,
    pub q: usize,
    pub d: f64,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub sigma2: f64,
    #[serde(rename = "K")]
    pub truncation: usize,
    /// Mean removed before fitting and restored on forecasts.
    pub mean: f64,
}

impl FarimaModel {
    /// Validates `|d| < 0.5`, `sigma2 >= 0`, stationarity and invertibility.
    /// A zero variance is accepted so that deterministic simulations can be
    /// described.
    pub fn new(phi: Vec<f64>, d: f64, theta: Vec<f64>, sigma2: f64, truncation: usize, mean: f64) -> Result<Self> {
        let m = FarimaModel {
            p: phi.len(),
            q: theta.len(),
            d,
            phi,
            theta,
            sigma2,
            truncation,
            mean,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        fracdiff::check_d(self.d)?;
        if self.p != self.phi.len() || self.q != self.theta.len() {
            return Err(Error::Parameter("order does not match coefficient count".into()));
        }
        if !(self.sigma2 >= 0.0) || !self.sigma2.is_finite() {
            return Err(Error::Parameter(format!("sigma2 = {} must be >= 0", self.sigma2)));
        }
        if self.truncation == 0 {
            return Err(Error::Parameter("truncation K must be >= 1".into()));
        }
        if !is_stationary(&self.phi) {
            return Err(Error::Parameter(format!("AR polynomial {:?} is not stationary", self.phi)));
        }
        if !is_invertible(&self.theta) {
            return Err(Error::Parameter(format!("MA polynomial {:?} is not invertible", self.theta)));
        }
        if !self.mean.is_finite() {
            return Err(Error::Parameter("non-finite mean".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: FarimaModel = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }
}

/// ARMA order used by [`fit_farima`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArmaOrder {
    /// Lowest AICc over `{0..=max_p} x {0..=max_q}`.
    Auto { max_p: usize, max_q: usize },
    Fixed { p: usize, q: usize },
}

impl Default for ArmaOrder {
    fn default() -> Self {
        ArmaOrder::Auto { max_p: 2, max_q: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarimaFit {
    pub model: FarimaModel,
    pub d_estimate: DEstimate,
}

/// Two-stage fit: GPH estimate of `d` on the centered series, truncated
/// fractional differencing, then a CSS ARMA fit of the differenced series.
pub fn fit_farima(series: &[f64], order: ArmaOrder, truncation: usize) -> Result<FarimaFit> {
    if series.len() < MIN_GPH_LENGTH {
        return Err(Error::SeriesTooShort {
            required: MIN_GPH_LENGTH,
            actual: series.len(),
        });
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::Degenerate("non-finite value in series".into()));
    }
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let centered: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let d_estimate = estimate_d(&centered)?;
    let diffed = frac_difference(&centered, d_estimate.d, truncation)?;
    let arma = match order {
        ArmaOrder::Fixed { p, q } => fit_arma(&diffed, p, q)?,
        ArmaOrder::Auto { max_p, max_q } => select_order(&diffed, max_p, max_q)?,
    };
    let model = FarimaModel::new(arma.phi, d_estimate.d, arma.theta, arma.sigma2, truncation, mean)?;
    Ok(FarimaFit { model, d_estimate })
}

/// `h`-step forecasts after the end of `series`.
///
/// ARMA forecasts are formed on the fractionally differenced scale (future
/// innovations zero) and mapped back by solving the truncated difference
/// recursion, so appending the forecasts to the series and differencing
/// reproduces the ARMA forecasts.
pub fn forecast(model: &FarimaModel, series: &[f64], h: usize) -> Result<Vec<f64>> {
    model.validate()?;
    if h == 0 {
        return Err(Error::Parameter("forecast horizon must be >= 1".into()));
    }
    if series.is_empty() {
        return Err(Error::SeriesTooShort { required: 1, actual: 0 });
    }
    let pi = fracdiff::binomial_weights(model.d, model.truncation);
    let mut x: Vec<f64> = series.iter().map(|v| v - model.mean).collect();
    let mut y = fracdiff::apply_filter(&x, &pi);
    let n = y.len();
    let (p, q) = (model.p, model.q);

    // in-sample residuals on the full index (zero before t = p)
    let mut e = vec![0.0; n];
    let tail = css_residuals(&y, &model.phi, &model.theta);
    e[n - tail.len()..].copy_from_slice(&tail);

    let mut out = Vec::with_capacity(h);
    for step in 0..h {
        let t = n + step;
        let ar: f64 = (0..p)
            .filter(|i| t > *i)
            .map(|i| model.phi[i] * y[t - 1 - i])
            .sum();
        let ma: f64 = (0..q)
            .filter(|j| t > *j && t - 1 - j < n)
            .map(|j| model.theta[j] * e[t - 1 - j])
            .sum();
        let y_hat = ar + ma;
        y.push(y_hat);
        let lagged: f64 = pi
            .iter()
            .enumerate()
            .skip(1)
            .take(t)
            .map(|(k, c)| c * x[t - k])
            .sum();
        let x_hat = y_hat - lagged;
        x.push(x_hat);
        out.push(x_hat + model.mean);
    }
    Ok(out)
}

/// Burn-in discarded by [`simulate_farima`].
pub const SIMULATION_BURN_IN: usize = 1000;

/// Gaussian FARIMA sample path of length `n`, deterministic per seed.
///
/// Innovations drive the ARMA recursion, and the result is fractionally
/// integrated with the `(1 - B)^-d` expansion over the whole generated
/// history (burn-in included) rather than the model's truncation.
pub fn simulate_farima(model: &FarimaModel, n: usize, seed: u64) -> Result<Vec<f64>> {
    model.validate()?;
    if n == 0 {
        return Err(Error::Parameter("simulation length must be >= 1".into()));
    }
    let total = n + SIMULATION_BURN_IN;
    if model.sigma2 == 0.0 {
        return Ok(vec![model.mean; n]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, model.sigma2.sqrt()).expect("positive sd");
    let z: Vec<f64> = (0..total).map(|_| normal.sample(&mut rng)).collect();

    let mut u = vec![0.0; total];
    for t in 0..total {
        let ar: f64 = model
            .phi
            .iter()
            .enumerate()
            .filter(|(i, _)| t > *i)
            .map(|(i, f)| f * u[t - 1 - i])
            .sum();
        let ma: f64 = model
            .theta
            .iter()
            .enumerate()
            .filter(|(j, _)| t > *j)
            .map(|(j, th)| th * z[t - 1 - j])
            .sum();
        u[t] = ar + z[t] + ma;
    }

    let psi = fracdiff::binomial_weights(-model.d, total - 1);
    let x = fracdiff::apply_filter(&u, &psi);
    Ok(x[SIMULATION_BURN_IN..].iter().map(|v| v + model.mean).collect())
}

/// Sample autocorrelation at `lag`.
pub fn sample_acf(series: &[f64], lag: usize) -> f64 {
    let g = autocovariances(series, lag);
    g[lag] / g[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(phi: Vec<f64>, d: f64, theta: Vec<f64>) -> FarimaModel {
        FarimaModel::new(phi, d, theta, 1.0, DEFAULT_TRUNCATION, 0.0).unwrap()
    }

    #[test]
    fn model_validation() {
        assert!(FarimaModel::new(vec![1.2], 0.0, vec![], 1.0, 100, 0.0).is_err());
        assert!(FarimaModel::new(vec![], 0.0, vec![-1.0], 1.0, 100, 0.0).is_err());
        assert!(FarimaModel::new(vec![], 0.5, vec![], 1.0, 100, 0.0).is_err());
        assert!(FarimaModel::new(vec![], 0.1, vec![], -1.0, 100, 0.0).is_err());
        assert!(FarimaModel::new(vec![], 0.1, vec![], 1.0, 0, 0.0).is_err());
    }

    #[test]
    fn model_json_fields() {
        let m = FarimaModel::new(vec![0.5], 0.2, vec![0.1], 2.0, 100, 3.5).unwrap();
        let v: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        for key in ["p", "q", "d", "phi", "theta", "sigma2", "K", "mean"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(FarimaModel::from_json(&m.to_json()).unwrap(), m);
        assert!(FarimaModel::from_json(r#"{"p":1,"q":0,"d":0.0,"phi":[1.5],"theta":[],"sigma2":1,"K":100,"mean":0}"#).is_err());
    }

    #[test]
    fn white_noise_forecast_is_mean() {
        let m = FarimaModel::new(vec![], 0.0, vec![], 1.0, 100, 4.25).unwrap();
        assert_eq!(forecast(&m, &[1.0, 7.0, 3.0], 3).unwrap(), vec![4.25; 3]);
    }

    #[test]
    fn ar1_one_step() {
        let m = model(vec![0.5], 0.0, vec![]);
        assert_eq!(forecast(&m, &[0.3, -1.0, 2.0], 1).unwrap(), vec![1.0]);
        let with_mean = FarimaModel::new(vec![0.6], 0.0, vec![], 1.0, 100, 1.5).unwrap();
        let f = forecast(&with_mean, &[0.0, 4.0], 2).unwrap();
        assert_eq!(f[0], 0.6 * (4.0 - 1.5) + 1.5);
        assert_eq!(f[1], 0.6 * (0.6 * (4.0 - 1.5)) + 1.5);
    }

    #[test]
    fn forecast_errors() {
        let m = model(vec![], 0.0, vec![]);
        assert!(forecast(&m, &[1.0], 0).is_err());
        assert!(forecast(&m, &[], 1).is_err());
    }

    #[test]
    fn simulation_basics() {
        let zero = FarimaModel::new(vec![0.3], 0.2, vec![], 0.0, 100, 0.0).unwrap();
        assert_eq!(simulate_farima(&zero, 50, 1).unwrap(), vec![0.0; 50]);
        let m = model(vec![0.2], 0.3, vec![0.1]);
        assert_eq!(simulate_farima(&m, 200, 9).unwrap(), simulate_farima(&m, 200, 9).unwrap());
        assert_ne!(simulate_farima(&m, 200, 9).unwrap(), simulate_farima(&m, 200, 10).unwrap());
        assert!(simulate_farima(&m, 0, 1).is_err());
    }

    #[test]
    fn short_series_rejected() {
        assert!(matches!(
            fit_farima(&[1.0; 5], ArmaOrder::default(), 100),
            Err(Error::SeriesTooShort { .. })
        ));
        let constant = vec![2.0; 64];
        assert!(fit_farima(&constant, ArmaOrder::default(), 100).is_err());
    }
}
