use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::median;
use crate::error::{Error, Result};
use crate::optim::nelder_mead;

pub const MIN_T_SAMPLE: usize = 8;
const NU_MIN: f64 = 0.5;
const NU_MAX: f64 = 200.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudentTFit {
    pub degrees_of_freedom: f64,
    pub location: f64,
    pub scale: f64,
    pub log_likelihood: f64,
}

pub fn student_t_log_likelihood(sample: &[f64], nu: f64, loc: f64, scale: f64) -> f64 {
    let n = sample.len() as f64;
    let norm = ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0) - 0.5 * (nu * std::f64::consts::PI).ln() - scale.ln();
    let tail: f64 = sample
        .iter()
        .map(|&x| {
            let z = (x - loc) / scale;
            (z * z / nu).ln_1p()
        })
        .sum();
    n * norm - 0.5 * (nu + 1.0) * tail
}

fn nu_from(u: f64) -> f64 {
    NU_MIN + (NU_MAX - NU_MIN) / (1.0 + (-u).exp())
}

fn u_from(nu: f64) -> f64 {
    let p = (nu - NU_MIN) / (NU_MAX - NU_MIN);
    (p / (1.0 - p)).ln()
}

/// Maximum-likelihood location-scale Student-t fit.
///
/// Optimizes over (squashed nu, location, log scale) with Nelder-Mead from
/// several starting degrees of freedom and keeps the best likelihood; nu is
/// confined to `[0.5, 200]`.
pub fn fit_student_t(sample: &[f64]) -> Result<StudentTFit> {
    if sample.len() < MIN_T_SAMPLE {
        return Err(Error::SeriesTooShort {
            required: MIN_T_SAMPLE,
            actual: sample.len(),
        });
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::Degenerate("non-finite value in sample".into()));
    }
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let var = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    if !(var > 0.0) {
        return Err(Error::Degenerate("zero-variance sample".into()));
    }
    let loc0 = median(sample)?;
    let deviations: Vec<f64> = sample.iter().map(|x| (x - loc0).abs()).collect();
    let mad = 1.4826 * median(&deviations)?;
    let scale0 = if mad > 0.0 { mad } else { var.sqrt() };

    let nll = |p: &[f64]| {
        let scale = p[2].exp();
        if !scale.is_finite() || scale <= 0.0 {
            return f64::INFINITY;
        }
        -student_t_log_likelihood(sample, nu_from(p[0]), p[1], scale)
    };

    let mut best: Option<(Vec<f64>, f64)> = None;
    for nu0 in [2.0, 8.0, 50.0] {
        let start = [u_from(nu0), loc0, scale0.ln()];
        let m = nelder_mead(nll, &start, 0.3, 4000, 1e-12)?;
        // polish from the optimum with a fresh simplex
        let m = nelder_mead(nll, &m.point, 0.05, 4000, 1e-13)?;
        if best.as_ref().map_or(true, |(_, v)| m.value < *v) {
            best = Some((m.point, m.value));
        }
    }
    let (p, value) = best.expect("at least one start");
    if !value.is_finite() {
        return Err(Error::Degenerate("Student-t likelihood is not finite".into()));
    }
    Ok(StudentTFit {
        degrees_of_freedom: nu_from(p[0]),
        location: p[1],
        scale: p[2].exp(),
        log_likelihood: -value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal, StudentT};

    #[test]
    fn log_likelihood_matches_statrs_density() {
        use statrs::distribution::{Continuous, StudentsT};
        let d = StudentsT::new(0.7, 2.5, 4.5).unwrap();
        let xs = [-3.0, 0.1, 0.7, 9.0];
        let expected: f64 = xs.iter().map(|&x| d.ln_pdf(x)).sum();
        assert!((student_t_log_likelihood(&xs, 4.5, 0.7, 2.5) - expected).abs() < 1e-10);
    }

    #[test]
    fn recovers_heavy_tails() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = StudentT::new(3.0).unwrap();
        let xs: Vec<f64> = (0..5000).map(|_| t.sample(&mut rng)).collect();
        let fit = fit_student_t(&xs).unwrap();
        assert!((2.0..=5.0).contains(&fit.degrees_of_freedom), "{fit:?}");
        // symmetric sample: location within 5 scale / sqrt(n)
        assert!(fit.location.abs() <= 5.0 * fit.scale / (5000f64).sqrt(), "{fit:?}");
    }

    #[test]
    fn gaussian_sample_has_light_tails() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let nd = Normal::new(0.0, 1.0).unwrap();
        let xs: Vec<f64> = (0..5000).map(|_| nd.sample(&mut rng)).collect();
        let fit = fit_student_t(&xs).unwrap();
        assert!(fit.degrees_of_freedom >= 20.0, "{fit:?}");
        assert!((fit.scale - 1.0).abs() < 0.1);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(fit_student_t(&[1.0; 20]), Err(Error::Degenerate(_))));
        assert!(matches!(fit_student_t(&[1.0, 2.0, 3.0]), Err(Error::SeriesTooShort { .. })));
    }
}
