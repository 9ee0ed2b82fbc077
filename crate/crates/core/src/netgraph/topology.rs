use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::InteractionGraph;
use crate::ingest::UserId;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathLengthStats {
    pub mean: f64,
    /// Number of ordered reachable pairs `(i, j)`, `i != j`.
    pub pairs: u64,
}

fn bfs_distances(graph: &InteractionGraph, source: usize, dist: &mut [usize], queue: &mut VecDeque<usize>) {
    dist.iter_mut().for_each(|d| *d = usize::MAX);
    dist[source] = 0;
    queue.clear();
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        for &v in graph.successors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
}

/// Mean directed shortest-path length over ordered reachable pairs.
/// `None` when no vertex reaches another.
pub fn average_path_length(graph: &InteractionGraph) -> Option<PathLengthStats> {
    let n = graph.len();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    let mut total: u128 = 0;
    let mut pairs: u64 = 0;
    for s in 0..n {
        if graph.successors(s).is_empty() {
            continue;
        }
        bfs_distances(graph, s, &mut dist, &mut queue);
        for (t, &d) in dist.iter().enumerate() {
            if t != s && d != usize::MAX {
                total += d as u128;
                pairs += 1;
            }
        }
    }
    (pairs > 0).then(|| PathLengthStats {
        mean: total as f64 / pairs as f64,
        pairs,
    })
}

/// `3 * triangles / connected triplets` on the undirected projection; 0
/// when there are no triplets.
pub fn global_clustering(graph: &InteractionGraph) -> f64 {
    let nb = graph.undirected_neighbors();
    let triplets: u64 = nb
        .iter()
        .map(|l| {
            let d = l.len() as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum();
    if triplets == 0 {
        return 0.0;
    }
    let mut triangles: u64 = 0;
    for (u, lu) in nb.iter().enumerate() {
        for &v in lu.iter().filter(|&&v| v > u) {
            // count common neighbours w > v by merging the sorted lists
            let lv = &nb[v];
            let (mut i, mut j) = (0, 0);
            while i < lu.len() && j < lv.len() {
                match lu[i].cmp(&lv[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        if lu[i] > v {
                            triangles += 1;
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    3.0 * triangles as f64 / triplets as f64
}

/// Directed vertex betweenness over ordered pairs (Brandes accumulation).
pub fn vertex_betweenness(graph: &InteractionGraph) -> BTreeMap<UserId, f64> {
    let n = graph.len();
    let mut bc = vec![0.0f64; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();

    for s in 0..n {
        if graph.successors(s).is_empty() {
            continue;
        }
        for v in 0..n {
            sigma[v] = 0.0;
            dist[v] = usize::MAX;
            delta[v] = 0.0;
            preds[v].clear();
        }
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in graph.successors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[u] + 1 {
                    sigma[w] += sigma[u];
                    preds[w].push(u);
                }
            }
        }
        while let Some(w) = order.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    graph.ids().iter().copied().zip(bc).collect()
}
