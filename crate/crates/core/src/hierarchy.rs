//! Multilevel graph hierarchies built by repeated cluster contraction.

use std::collections::HashSet;
use std::fmt;

use crate::clustering::{Clustering, ClusteringMethod};
use crate::error::{MlsvmError, Result};
use crate::graph::WeightedGraph;
use crate::matrix::Matrix;
use crate::seed;

/// A level shrinking by less than this fraction stops coarsening.
pub const MIN_SHRINK: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub graph: WeightedGraph,
    /// Parent-level node id → node id on this level. `None` on level 0.
    pub fine_to_coarse: Option<Vec<usize>>,
}

/// Contract each cluster into one node. Coarse features are size-weighted
/// means, coarse sizes are sums, and two coarse nodes are adjacent iff some
/// fine edge crosses between their clusters. Coarse weights are recomputed
/// from the coarse features.
pub fn contract(g: &WeightedGraph, c: &Clustering) -> Result<Level> {
    if c.assignment.len() != g.n() {
        return Err(MlsvmError::DimensionMismatch {
            expected: g.n(),
            found: c.assignment.len(),
        });
    }
    if !c.is_compact() {
        return Err(MlsvmError::NonCompactClustering(format!(
            "{} clusters declared",
            c.num_clusters
        )));
    }
    let k = c.num_clusters;
    let d = g.node_features().cols();
    let mut sizes = vec![0usize; k];
    let mut sums = vec![0.0f64; k * d];
    for (v, &cid) in c.assignment.iter().enumerate() {
        let s = g.node_sizes()[v];
        sizes[cid] += s;
        let acc = &mut sums[cid * d..(cid + 1) * d];
        for (a, x) in acc.iter_mut().zip(g.node_features().row(v)) {
            *a += s as f64 * x;
        }
    }
    for (cid, &s) in sizes.iter().enumerate() {
        for a in &mut sums[cid * d..(cid + 1) * d] {
            *a /= s as f64;
        }
    }
    let features = Matrix::from_vec(k, d, sums)?;

    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut edges = Vec::new();
    for (u, v, _) in g.edges() {
        let (a, b) = (c.assignment[u], c.assignment[v]);
        if a != b {
            let key = (a.min(b), a.max(b));
            if seen.insert(key) {
                edges.push(key);
            }
        }
    }
    let graph = WeightedGraph::from_edges(features, sizes, edges)?;
    Ok(Level {
        graph,
        fine_to_coarse: Some(c.assignment.clone()),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hierarchy {
    /// Level 0 is the input graph; the last level is the coarsest.
    pub levels: Vec<Level>,
    pub stop_threshold: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSummary {
    pub level: usize,
    pub nodes: usize,
    pub edges: usize,
    /// Nodes on this level divided by nodes on the finer level (1 for level 0).
    pub shrink: f64,
}

/// Cluster and contract until fewer than `stop` nodes remain or a round
/// shrinks the graph by less than [`MIN_SHRINK`].
pub fn build_hierarchy(
    g0: WeightedGraph,
    method: &ClusteringMethod,
    stop: usize,
    seed: u64,
) -> Hierarchy {
    let mut levels = vec![Level {
        graph: g0,
        fine_to_coarse: None,
    }];
    loop {
        let g = &levels[levels.len() - 1].graph;
        let n = g.n();
        if n < stop || n <= 1 {
            break;
        }
        let clustering = method.run(g, seed::derive(seed, &format!("level/{}", levels.len())));
        if (clustering.num_clusters as f64) > (1.0 - MIN_SHRINK) * n as f64 {
            log::debug!(
                "coarsening stalled at {n} nodes ({} clusters)",
                clustering.num_clusters
            );
            break;
        }
        let level = contract(g, &clustering).expect("clustering of this graph is compact");
        levels.push(level);
    }
    Hierarchy {
        levels,
        stop_threshold: stop,
    }
}

impl Hierarchy {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn coarsest(&self) -> &WeightedGraph {
        &self.levels[self.levels.len() - 1].graph
    }

    pub fn graph(&self, level: usize) -> &WeightedGraph {
        &self.levels[level].graph
    }

    pub fn summary(&self) -> Vec<LevelSummary> {
        let mut prev: Option<usize> = None;
        self.levels
            .iter()
            .enumerate()
            .map(|(level, l)| {
                let nodes = l.graph.n();
                let shrink = prev.map_or(1.0, |p| nodes as f64 / p as f64);
                prev = Some(nodes);
                LevelSummary {
                    level,
                    nodes,
                    edges: l.graph.edge_count(),
                    shrink,
                }
            })
            .collect()
    }

    /// All nodes on `level - 1` that contract into one of `coarse_ids`,
    /// in increasing id order.
    pub fn uncontract(&self, level: usize, coarse_ids: &[usize]) -> Result<Vec<usize>> {
        if level == 0 || level >= self.levels.len() {
            return Err(MlsvmError::InvalidLevel {
                level,
                levels: self.levels.len(),
            });
        }
        let nodes = self.levels[level].graph.n();
        let mut wanted = vec![false; nodes];
        for &id in coarse_ids {
            if id >= nodes {
                return Err(MlsvmError::InvalidNode { id, nodes });
            }
            wanted[id] = true;
        }
        let map = self.levels[level]
            .fine_to_coarse
            .as_ref()
            .expect("levels above 0 carry a map");
        Ok((0..map.len()).filter(|&v| wanted[map[v]]).collect())
    }
}

pub fn uncontract_sv(h: &Hierarchy, level: usize, coarse_sv_ids: &[usize]) -> Result<Vec<usize>> {
    h.uncontract(level, coarse_sv_ids)
}

/// Printable table of per-level sizes.
pub struct SummaryTable<'a>(pub &'a [LevelSummary]);

impl fmt::Display for SummaryTable<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>5} {:>9} {:>10} {:>8}",
            "level", "nodes", "edges", "shrink"
        )?;
        for s in self.0 {
            writeln!(
                f,
                "{:>5} {:>9} {:>10} {:>8.4}",
                s.level, s.nodes, s.edges, s.shrink
            )?;
        }
        Ok(())
    }
}
