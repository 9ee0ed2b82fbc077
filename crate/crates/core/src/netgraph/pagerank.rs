use std::collections::BTreeMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use super::InteractionGraph;
use crate::error::{Error, Result};
use crate::ingest::UserId;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PageRankParams {
    pub alpha: f64,
    /// Uniform personalization constant; `None` means `(1 - alpha) / n`.
    pub beta: Option<f64>,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Largest accepted `alpha` when the transition matrix has spectral radius 0.
    pub alpha_cap: f64,
}

impl Default for PageRankParams {
    fn default() -> Self {
        PageRankParams {
            alpha: 0.85,
            beta: None,
            tolerance: 1e-10,
            max_iterations: 10_000,
            alpha_cap: 1.0,
        }
    }
}

impl PageRankParams {
    fn beta_for(&self, n: usize) -> f64 {
        self.beta.unwrap_or((1.0 - self.alpha) / n as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralityScores {
    pub values: BTreeMap<UserId, f64>,
    pub iterations_used: usize,
    /// Max-norm fixed-point residual of the returned vector.
    pub residual: f64,
    pub spectral_radius: f64,
}

impl CentralityScores {
    pub fn get(&self, id: UserId) -> Option<f64> {
        self.values.get(&id).copied()
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["user_id", "pagerank"])?;
        for (id, x) in &self.values {
            wr.write_record([id.to_string(), format!("{x:.17e}")])?;
        }
        wr.flush().map_err(|e| Error::io("<centrality csv>", e))?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(r: R) -> Result<BTreeMap<UserId, f64>> {
        let mut rd = csv::Reader::from_reader(r);
        let mut out = BTreeMap::new();
        for row in rd.deserialize::<(UserId, f64)>() {
            let (id, x) = row?;
            out.insert(id, x);
        }
        Ok(out)
    }
}

/// One step of `x -> alpha * x P + beta` where `P = D^-1 A` (row-normalized
/// by out-strength). Dangling vertices propagate nothing.
fn propagate(graph: &InteractionGraph, x: &[f64], alpha: f64, beta: f64, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = beta);
    for (k, &xk) in x.iter().enumerate() {
        let succ = graph.successors(k);
        if succ.is_empty() || xk == 0.0 {
            continue;
        }
        let ws = graph.out_weights(k);
        let strength: f64 = ws.iter().sum();
        let scale = alpha * xk / strength;
        for (&i, &w) in succ.iter().zip(ws) {
            out[i] += scale * w;
        }
    }
}

/// PageRank fixed point of `x = alpha x D^-1 A + beta` by power iteration.
///
/// Iteration stops once the max-norm fixed-point residual of the current
/// iterate is within `params.tolerance`; that iterate is returned.
pub fn pagerank(graph: &InteractionGraph, params: &PageRankParams) -> Result<CentralityScores> {
    if graph.is_empty() {
        return Err(Error::Parameter("pagerank on an empty graph".into()));
    }
    if !(params.tolerance > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be > 0, got {}", params.tolerance)));
    }
    let n = graph.len();
    let beta = params.beta_for(n);
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Parameter(format!("beta must be > 0, got {beta}")));
    }
    let rho = spectral_radius(graph);
    let alpha = params.alpha;
    // alpha = 0 is the degenerate constant solution x = beta.
    let valid = if rho > 0.0 {
        alpha >= 0.0 && alpha * rho < 1.0
    } else {
        alpha >= 0.0 && alpha <= params.alpha_cap
    };
    if !valid || !alpha.is_finite() {
        return Err(Error::Parameter(format!(
            "damping factor {alpha} outside (0, 1/rho) for spectral radius {rho}"
        )));
    }

    let mut x = vec![beta; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iter in 0..=params.max_iterations {
        propagate(graph, &x, alpha, beta, &mut next);
        residual = x
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if residual <= params.tolerance {
            let values = graph.ids().iter().copied().zip(x).collect();
            return Ok(CentralityScores {
                values,
                iterations_used: iter,
                residual,
                spectral_radius: rho,
            });
        }
        std::mem::swap(&mut x, &mut next);
    }
    Err(Error::NonConvergence {
        iterations: params.max_iterations,
        residual,
    })
}

const RADIUS_TOL: f64 = 1e-13;
const RADIUS_MAX_ITER: usize = 200_000;

/// Spectral radius of the transition matrix `D^-1 A`.
///
/// The matrix is nonnegative, so its spectral radius is the largest over
/// strongly connected components. Single-vertex components contribute 0
/// (no self-loops). Each larger component is irreducible; power iteration
/// runs on `(M + I) / 2`, which is primitive, and stops when the
/// Collatz-Wielandt lower and upper bounds meet.
pub fn spectral_radius(graph: &InteractionGraph) -> f64 {
    let n = graph.len();
    if n == 0 || graph.edge_count() == 0 {
        return 0.0;
    }
    let mut dg: DiGraph<(), ()> = DiGraph::with_capacity(n, graph.edge_count());
    let nodes: Vec<_> = (0..n).map(|_| dg.add_node(())).collect();
    for u in 0..n {
        for &v in graph.successors(u) {
            dg.add_edge(nodes[u], nodes[v], ());
        }
    }

    let mut comp_of = vec![usize::MAX; n];
    let mut rho: f64 = 0.0;
    for (ci, comp) in tarjan_scc(&dg).into_iter().enumerate() {
        if comp.len() < 2 {
            continue;
        }
        for node in &comp {
            comp_of[node.index()] = ci;
        }
        let members: Vec<usize> = comp.iter().map(|v| v.index()).collect();
        rho = rho.max(component_radius(graph, &members, &comp_of, ci));
        if rho >= 1.0 - RADIUS_TOL {
            // row sums are at most one, so nothing can exceed this
            return 1.0;
        }
    }
    rho
}

fn component_radius(graph: &InteractionGraph, members: &[usize], comp_of: &[usize], ci: usize) -> f64 {
    let local: std::collections::HashMap<usize, usize> =
        members.iter().enumerate().map(|(l, &g)| (g, l)).collect();
    // Row-normalized transitions restricted to the component.
    let rows: Vec<Vec<(usize, f64)>> = members
        .iter()
        .map(|&u| {
            let ws = graph.out_weights(u);
            let strength: f64 = ws.iter().sum();
            graph
                .successors(u)
                .iter()
                .zip(ws)
                .filter(|(v, _)| comp_of[**v] == ci)
                .map(|(v, w)| (local[v], w / strength))
                .collect()
        })
        .collect();

    let m = members.len();
    let mut v = vec![1.0; m];
    let mut next = vec![0.0; m];
    let mut estimate = 0.0;
    for _ in 0..RADIUS_MAX_ITER {
        for (i, row) in rows.iter().enumerate() {
            next[i] = 0.5 * (v[i] + row.iter().map(|&(j, p)| p * v[j]).sum::<f64>());
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..m {
            let ratio = next[i] / v[i];
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        estimate = 0.5 * (lo + hi);
        if hi - lo <= RADIUS_TOL {
            break;
        }
        let norm = next.iter().cloned().fold(0.0, f64::max);
        v.iter_mut().zip(&next).for_each(|(a, b)| *a = b / norm);
    }
    (2.0 * estimate - 1.0).max(0.0)
}

/// The `k` highest-scoring vertices, ties broken by ascending user ID.
pub fn top_k_by_centrality(scores: &BTreeMap<UserId, f64>, k: usize) -> Vec<UserId> {
    let mut ranked: Vec<(UserId, f64)> = scores.iter().map(|(&id, &x)| (id, x)).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.into_iter().take(k).map(|(id, _)| id).collect()
}
