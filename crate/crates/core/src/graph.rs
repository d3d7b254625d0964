//! Undirected weighted graph with a feature vector and a size per node.

use std::io::Write;

use crate::error::{MlsvmError, Result};
use crate::matrix::{squared_distance, Matrix};

/// Distances below this are floored before inversion.
pub const MIN_DISTANCE: f64 = 1e-12;

/// `1 / max(‖a − b‖, MIN_DISTANCE)`.
#[inline]
pub fn inverse_distance(a: &[f64], b: &[f64]) -> f64 {
    1.0 / squared_distance(a, b).sqrt().max(MIN_DISTANCE)
}

/// Adjacency in compressed-row form. Every undirected edge is stored in both
/// directions with the same weight; neighbor lists are sorted by id.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    node_features: Matrix,
    node_sizes: Vec<usize>,
}

impl WeightedGraph {
    /// Build from undirected edges `(u, v)`; duplicates and both orientations
    /// are merged. Weights are `1 / dist` of the endpoint features.
    pub fn from_edges(
        node_features: Matrix,
        node_sizes: Vec<usize>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<WeightedGraph> {
        let n = node_features.rows();
        if node_sizes.len() != n {
            return Err(MlsvmError::DimensionMismatch {
                expected: n,
                found: node_sizes.len(),
            });
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(MlsvmError::InvalidNode {
                    id: u.max(v),
                    nodes: n,
                });
            }
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            for &v in list.iter() {
                targets.push(v);
                weights.push(inverse_distance(node_features.row(u), node_features.row(v)));
            }
            offsets.push(targets.len());
        }
        Ok(WeightedGraph {
            offsets,
            targets,
            weights,
            node_features,
            node_sizes,
        })
    }

    /// Build from undirected edges with explicit positive weights. Later
    /// duplicates of an edge overwrite earlier ones.
    pub fn from_weighted_edges(
        node_features: Matrix,
        node_sizes: Vec<usize>,
        edges: &[(usize, usize, f64)],
    ) -> Result<WeightedGraph> {
        let n = node_features.rows();
        if node_sizes.len() != n {
            return Err(MlsvmError::DimensionMismatch {
                expected: n,
                found: node_sizes.len(),
            });
        }
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(MlsvmError::InvalidNode {
                    id: u.max(v),
                    nodes: n,
                });
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(MlsvmError::InvalidConfig(format!(
                    "edge ({u},{v}) weight {w} is not positive"
                )));
            }
            if u != v {
                adj[u].push((v, w));
                adj[v].push((u, w));
            }
        }
        let mut offsets = vec![0];
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        for list in adj.iter_mut() {
            list.sort_by_key(|&(v, _)| v);
            let mut i = 0;
            while i < list.len() {
                let mut j = i;
                while j + 1 < list.len() && list[j + 1].0 == list[i].0 {
                    j += 1;
                }
                targets.push(list[j].0);
                weights.push(list[j].1);
                i = j + 1;
            }
            offsets.push(targets.len());
        }
        Ok(WeightedGraph {
            offsets,
            targets,
            weights,
            node_features,
            node_sizes,
        })
    }

    pub fn edgeless(node_features: Matrix) -> WeightedGraph {
        let n = node_features.rows();
        WeightedGraph {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
            weights: Vec::new(),
            node_features,
            node_sizes: vec![1; n],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.node_sizes.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[u]..self.offsets[u + 1];
        self.targets[r.clone()]
            .iter()
            .copied()
            .zip(self.weights[r].iter().copied())
    }

    #[inline]
    pub fn neighbor_ids(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn node_features(&self) -> &Matrix {
        &self.node_features
    }

    pub fn node_sizes(&self) -> &[usize] {
        &self.node_sizes
    }

    pub fn total_size(&self) -> usize {
        self.node_sizes.iter().sum()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let ids = self.neighbor_ids(u);
        ids.binary_search(&v)
            .ok()
            .map(|pos| self.weights[self.offsets[u] + pos])
    }

    /// Undirected edges as `(u, v, w)` with `u < v`, ordered by `(u, v)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }

    /// Check symmetry, absence of self-loops and parallel edges, and
    /// positive weights.
    pub fn validate(&self) -> std::result::Result<(), String> {
        for u in 0..self.n() {
            let ids = self.neighbor_ids(u);
            if ids.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("node {u}: unsorted or parallel edges"));
            }
            for (v, w) in self.neighbors(u) {
                if v == u {
                    return Err(format!("self-loop at {u}"));
                }
                if w.is_nan() || w <= 0.0 || w.is_infinite() {
                    return Err(format!("edge ({u},{v}) has weight {w}"));
                }
                if self.weight(v, u) != Some(w) {
                    return Err(format!("edge ({u},{v}) not mirrored"));
                }
            }
        }
        Ok(())
    }

    /// Debug dump: one line `u v weight` per edge with `u < v`.
    pub fn write_edges<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (u, v, weight) in self.edges() {
            writeln!(w, "{u} {v} {weight:.16e}")?;
        }
        Ok(())
    }

    /// Connected component id per node (ids in first-occurrence order).
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n()];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.n() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &v in self.neighbor_ids(u) {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }
}
