//! Browser demo over the core library. Every operation takes plain numbers
//! and returns a JSON string, so the page needs no bindings beyond
//! `wasm-bindgen`'s generated glue.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use mfcast_core::election::vote_share_from_forecasts;
use mfcast_core::farima::{fit_farima, forecast, frac_diff_coeffs, simulate_farima, ArmaOrder, FarimaModel};
use mfcast_core::netgraph::{pagerank, spectral_radius, top_k_by_centrality, InteractionGraph, PageRankParams};
use mfcast_core::PartyId;

#[derive(Serialize)]
pub struct FarimaRun {
    pub series: Vec<f64>,
    pub forecasts: Vec<f64>,
    pub true_d: f64,
    pub fitted_d: f64,
    pub fitted_phi: Vec<f64>,
    pub fitted_theta: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Simulates FARIMA(1, d, 0) with AR coefficient `phi`, refits it with
/// automatic order selection and forecasts `horizon` steps.
pub fn farima_run(d: f64, phi: f64, n: usize, horizon: usize, seed: u64) -> mfcast_core::Result<FarimaRun> {
    let ar = if phi == 0.0 { vec![] } else { vec![phi] };
    let model = FarimaModel::new(ar, d, vec![], 1.0, 100, 0.0)?;
    let series = simulate_farima(&model, n, seed)?;
    let fit = fit_farima(&series, ArmaOrder::default(), 100)?;
    let forecasts = forecast(&fit.model, &series, horizon)?;
    Ok(FarimaRun {
        weights: frac_diff_coeffs(d, 30)?,
        series,
        forecasts,
        true_d: d,
        fitted_d: fit.model.d,
        fitted_phi: fit.model.phi,
        fitted_theta: fit.model.theta,
    })
}

#[derive(Serialize)]
pub struct PageRankRun {
    pub vertices: usize,
    pub edges: Vec<(u64, u64)>,
    pub scores: Vec<f64>,
    pub top: Vec<u64>,
    pub spectral_radius: f64,
    pub iterations: usize,
}

/// PageRank on a seeded random directed graph with edge probability `p`.
pub fn pagerank_run(n: usize, p: f64, alpha: f64, seed: u64) -> mfcast_core::Result<PageRankRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = p.clamp(0.0, 1.0);
    let mut edges = Vec::new();
    for u in 1..=n as u64 {
        for v in 1..=n as u64 {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let graph = InteractionGraph::from_edges(1..=n as u64, edges.iter().copied());
    let params = PageRankParams {
        alpha,
        ..Default::default()
    };
    let scores = pagerank(&graph, &params)?;
    Ok(PageRankRun {
        vertices: n,
        top: top_k_by_centrality(&scores.values, 5),
        scores: scores.values.values().copied().collect(),
        spectral_radius: spectral_radius(&graph),
        iterations: scores.iterations_used,
        edges,
    })
}

#[derive(Serialize)]
pub struct ShareRun {
    pub democratic: f64,
    pub republican: f64,
}

pub fn share_run(f_dem: f64, f_rep: f64) -> mfcast_core::Result<ShareRun> {
    let (d, r) = (PartyId::from("Democratic"), PartyId::from("Republican"));
    let s = vote_share_from_forecasts(&d, f_dem, &r, f_rep)?;
    Ok(ShareRun {
        democratic: s.get(&d).unwrap_or_default(),
        republican: s.get(&r).unwrap_or_default(),
    })
}

fn to_js<T: Serialize>(r: mfcast_core::Result<T>) -> Result<String, JsError> {
    match r {
        Ok(v) => serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string())),
        Err(e) => Err(JsError::new(&e.to_string())),
    }
}

#[wasm_bindgen]
pub fn farima_demo(d: f64, phi: f64, n: usize, horizon: usize, seed: u64) -> Result<String, JsError> {
    to_js(farima_run(d, phi, n, horizon, seed))
}

#[wasm_bindgen]
pub fn pagerank_demo(n: usize, p: f64, alpha: f64, seed: u64) -> Result<String, JsError> {
    to_js(pagerank_run(n, p, alpha, seed))
}

#[wasm_bindgen]
pub fn vote_share_demo(f_dem: f64, f_rep: f64) -> Result<String, JsError> {
    to_js(share_run(f_dem, f_rep))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn farima_round() {
        let r = farima_run(0.3, 0.0, 256, 5, 1).unwrap();
        assert_eq!(r.series.len(), 256);
        assert_eq!(r.forecasts.len(), 5);
        assert!(r.fitted_d.abs() < 0.5);
        assert_eq!(r.weights[0], 1.0);
        assert!(farima_run(0.7, 0.0, 256, 5, 1).is_err());
    }

    #[test]
    fn pagerank_round() {
        let r = pagerank_run(30, 0.2, 0.85, 3).unwrap();
        assert_eq!(r.scores.len(), 30);
        assert!(r.spectral_radius <= 1.0 + 1e-9);
        assert_eq!(r.top.len(), 5);
        assert!(pagerank_run(30, 0.2, 1.5, 3).is_err());
    }

    #[test]
    fn shares() {
        let s = share_run(0.004256, -0.010304).unwrap();
        assert!((s.democratic - 50.728).abs() < 1e-9);
        assert!((s.democratic + s.republican - 100.0).abs() < 1e-12);
    }
}
