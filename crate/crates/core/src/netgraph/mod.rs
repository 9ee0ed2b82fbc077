//! Directed user-interaction network built from direct-message tuples.

mod pagerank;
mod topology;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::ingest::{TweetRecord, UserId};

pub use pagerank::{pagerank, spectral_radius, top_k_by_centrality, CentralityScores, PageRankParams};
pub use topology::{average_path_length, global_clustering, vertex_betweenness, PathLengthStats};

/// Directed, loop-free graph over user IDs. Vertices are stored in
/// ascending ID order; `out[i]` lists the distinct successors of vertex `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionGraph {
    ids: Vec<UserId>,
    index: HashMap<UserId, usize>,
    out: Vec<Vec<usize>>,
    /// Transition weights parallel to `out`; all ones for the unweighted graph.
    weights: Vec<Vec<f64>>,
}

impl InteractionGraph {
    /// Builds a graph from a vertex set and directed edges. Self-loops are
    /// dropped and parallel edges collapse (their weights add up).
    pub fn from_weighted_edges(
        vertices: impl IntoIterator<Item = UserId>,
        edges: impl IntoIterator<Item = (UserId, UserId, f64)>,
    ) -> Self {
        let mut vset: BTreeSet<UserId> = vertices.into_iter().collect();
        let mut emap: BTreeMap<(UserId, UserId), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            vset.insert(u);
            vset.insert(v);
            if u != v {
                *emap.entry((u, v)).or_insert(0.0) += w;
            }
        }
        let ids: Vec<UserId> = vset.into_iter().collect();
        let index: HashMap<UserId, usize> = ids.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let mut out = vec![Vec::new(); ids.len()];
        let mut weights = vec![Vec::new(); ids.len()];
        // BTreeMap order keeps each successor list sorted.
        for ((u, v), w) in emap {
            out[index[&u]].push(index[&v]);
            weights[index[&u]].push(w);
        }
        InteractionGraph {
            ids,
            index,
            out,
            weights,
        }
    }

    pub fn from_edges(
        vertices: impl IntoIterator<Item = UserId>,
        edges: impl IntoIterator<Item = (UserId, UserId)>,
    ) -> Self {
        let mut g = Self::from_weighted_edges(vertices, edges.into_iter().map(|(u, v)| (u, v, 1.0)));
        g.weights.iter_mut().for_each(|ws| ws.iter_mut().for_each(|w| *w = 1.0));
        g
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn ids(&self) -> &[UserId] {
        &self.ids
    }

    pub fn index_of(&self, id: UserId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.out[i]
    }

    pub(crate) fn out_weights(&self, i: usize) -> &[f64] {
        &self.weights[i]
    }

    pub fn out_degree(&self, id: UserId) -> Option<usize> {
        self.index_of(id).map(|i| self.out[i].len())
    }

    pub fn has_edge(&self, from: UserId, to: UserId) -> bool {
        match (self.index_of(from), self.index_of(to)) {
            (Some(u), Some(v)) => self.out[u].binary_search(&v).is_ok(),
            _ => false,
        }
    }

    /// Edges as `(from, to)` ID pairs in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (UserId, UserId)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(move |(u, succ)| succ.iter().map(move |&v| (self.ids[u], self.ids[v])))
    }

    /// Adjacency lists of the undirected projection, sorted and deduplicated.
    pub fn undirected_neighbors(&self) -> Vec<Vec<usize>> {
        let mut nb: Vec<Vec<usize>> = vec![Vec::new(); self.len()];
        for (u, succ) in self.out.iter().enumerate() {
            for &v in succ {
                nb[u].push(v);
                nb[v].push(u);
            }
        }
        for list in &mut nb {
            list.sort_unstable();
            list.dedup();
        }
        nb
    }

    /// Writes `from<TAB>to` lines. Isolated vertices are not represented.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(w, "{u}\t{v}")?;
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Self> {
        let mut edges = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<edge list>", e))?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let parse = |s: &str| {
                s.trim().parse::<UserId>().map_err(|e| Error::Parse {
                    context: "edge list".into(),
                    line: idx + 1,
                    message: format!("bad user id {s:?}: {e}"),
                })
            };
            let (a, b) = t.split_once('\t').ok_or_else(|| Error::Parse {
                context: "edge list".into(),
                line: idx + 1,
                message: "expected from<TAB>to".into(),
            })?;
            edges.push((parse(a)?, parse(b)?));
        }
        Ok(Self::from_edges(std::iter::empty(), edges))
    }
}

/// Unweighted interaction graph: every sender is a vertex, and each distinct
/// (sender, addressed receiver) pair becomes one edge.
pub fn build_graph<'a>(records: impl IntoIterator<Item = &'a TweetRecord>) -> InteractionGraph {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for r in records {
        vertices.push(r.from_user_id);
        if let Some(to) = r.target() {
            edges.push((r.from_user_id, to));
        }
    }
    InteractionGraph::from_edges(vertices, edges)
}

/// Retweet-weighted variant: edge weight is the summed retweet count of the
/// interactions it collapses, with zero counts taken as one.
pub fn build_weighted_graph<'a>(records: impl IntoIterator<Item = &'a TweetRecord>) -> InteractionGraph {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for r in records {
        vertices.push(r.from_user_id);
        if let Some(to) = r.target() {
            edges.push((r.from_user_id, to, r.retweet_count.max(1) as f64));
        }
    }
    InteractionGraph::from_weighted_edges(vertices, edges)
}
