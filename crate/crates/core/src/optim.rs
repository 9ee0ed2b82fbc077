//! Derivative-free minimization shared by the ARMA and Student-t fits.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;

use crate::error::{Error, Result};

struct Objective<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Objective<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let v = (self.0)(p);
        // Nelder-Mead handles +inf as "reject this vertex".
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: u64,
}

/// Nelder-Mead from `start` with an axis-aligned initial simplex of edge `step`.
pub fn nelder_mead<F>(f: F, start: &[f64], step: f64, max_iters: u64, sd_tolerance: f64) -> Result<Minimum>
where
    F: Fn(&[f64]) -> f64,
{
    if start.is_empty() {
        let value = f(start);
        return Ok(Minimum {
            point: Vec::new(),
            value,
            iterations: 0,
        });
    }
    let mut simplex = vec![start.to_vec()];
    for i in 0..start.len() {
        let mut p = start.to_vec();
        p[i] += if p[i].abs() > 1.0 { step * p[i].abs() } else { step };
        simplex.push(p);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(sd_tolerance)
        .map_err(|e| Error::Parameter(e.to_string()))?;
    let res = Executor::new(Objective(f), solver)
        .configure(|s| s.max_iters(max_iters))
        .timer(false)
        .run()
        .map_err(|e| Error::Degenerate(format!("optimizer failed: {e}")))?;
    let state = res.state();
    let point = state
        .get_best_param()
        .cloned()
        .ok_or_else(|| Error::Degenerate("optimizer produced no parameters".into()))?;
    Ok(Minimum {
        point,
        value: state.get_best_cost(),
        iterations: state.get_iter(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |p: &[f64]| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2);
        let m = nelder_mead(f, &[-1.2, 1.0], 0.5, 5000, 1e-14).unwrap();
        assert!((m.point[0] - 1.0).abs() < 1e-4, "{m:?}");
        assert!((m.point[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn infinite_region_is_avoided() {
        let f = |p: &[f64]| if p[0] < 0.0 { f64::INFINITY } else { (p[0] - 2.0).powi(2) };
        let m = nelder_mead(f, &[0.5], 0.5, 1000, 1e-12).unwrap();
        assert!((m.point[0] - 2.0).abs() < 1e-5);
    }

    #[test]
    fn zero_dimensional() {
        let m = nelder_mead(|_| 3.0, &[], 0.1, 10, 1e-8).unwrap();
        assert_eq!(m.value, 3.0);
    }
}
