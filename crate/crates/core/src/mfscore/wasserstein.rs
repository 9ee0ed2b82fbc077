use crate::error::{Error, Result};

fn sorted(sample: &[f64]) -> Vec<f64> {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Wasserstein-1 distance between two empirical distributions with uniform
/// weights: the exact integral of `|F_a^-1(q) - F_b^-1(q)|` over `[0, 1]`.
///
/// Both quantile functions are step functions with jumps at `i / n` and
/// `j / m`; the integral is summed piecewise over the merged breakpoints,
/// compared in integer arithmetic so coinciding jumps are handled exactly.
pub fn wasserstein1(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample("wasserstein1 needs two non-empty samples".into()));
    }
    let (a, b) = (sorted(a), sorted(b));
    let (n, m) = (a.len() as u128, b.len() as u128);
    let (mut i, mut j) = (0usize, 0usize);
    // current position q = prev / (n * m)
    let mut prev: u128 = 0;
    let mut total = 0.0;
    while i < a.len() && j < b.len() {
        let next_a = (i as u128 + 1) * m;
        let next_b = (j as u128 + 1) * n;
        let next = next_a.min(next_b);
        total += (next - prev) as f64 * (a[i] - b[j]).abs();
        prev = next;
        if next_a == next {
            i += 1;
        }
        if next_b == next {
            j += 1;
        }
    }
    Ok(total / (n * m) as f64)
}

/// Pairwise W1 matrix over labelled samples. Symmetric with a zero diagonal.
pub fn distance_matrix<L: std::fmt::Display>(samples: &[(L, Vec<f64>)]) -> Result<Vec<Vec<f64>>> {
    let k = samples.len();
    let mut m = vec![vec![0.0; k]; k];
    for s in 0..k {
        for t in (s + 1)..k {
            let d = wasserstein1(&samples[s].1, &samples[t].1).map_err(|e| {
                Error::EmptySample(format!("{} vs {}: {e}", samples[s].0, samples[t].0))
            })?;
            m[s][t] = d;
            m[t][s] = d;
        }
    }
    Ok(m)
}
