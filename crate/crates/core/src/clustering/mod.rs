//! Node clusterings of a [`WeightedGraph`] that drive contraction.

mod label_propagation;
mod low_diameter;

pub use label_propagation::{label_propagation, label_propagation_traced, LpConfig, LpTrace};
pub use low_diameter::{exponential_shifts, low_diameter, low_diameter_with_shifts, LdConfig};

use std::collections::HashMap;
use std::io::Write;

use crate::graph::WeightedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    LabelPropagation,
    LowDiameter,
}

/// Clustering algorithm plus its parameters, without a seed; callers supply
/// the seed per invocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClusteringMethod {
    LabelPropagation { rounds: usize },
    LowDiameter { beta: f64 },
}

impl Default for ClusteringMethod {
    fn default() -> Self {
        ClusteringMethod::LabelPropagation { rounds: 10 }
    }
}

impl ClusteringMethod {
    pub fn low_diameter() -> Self {
        ClusteringMethod::LowDiameter { beta: 0.4 }
    }

    pub fn run(&self, g: &WeightedGraph, seed: u64) -> Clustering {
        match *self {
            ClusteringMethod::LabelPropagation { rounds } => {
                label_propagation(g, &LpConfig { rounds, seed })
            }
            ClusteringMethod::LowDiameter { beta } => low_diameter(g, &LdConfig { beta, seed }),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match *self {
            ClusteringMethod::LabelPropagation { rounds: 0 } => {
                Err("label propagation needs at least one round".into())
            }
            ClusteringMethod::LowDiameter { beta } if !(beta > 0.0 && beta.is_finite()) => {
                Err(format!("beta must be positive, got {beta}"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    pub assignment: Vec<usize>,
    pub num_clusters: usize,
    pub method: Method,
}

impl Clustering {
    pub fn singletons(n: usize, method: Method) -> Clustering {
        Clustering {
            assignment: (0..n).collect(),
            num_clusters: n,
            method,
        }
    }

    /// Relabel ids to `0..num_clusters` in first-occurrence order.
    pub fn compact(&self) -> Clustering {
        let mut map: HashMap<usize, usize> = HashMap::new();
        let assignment = self
            .assignment
            .iter()
            .map(|&c| {
                let next = map.len();
                *map.entry(c).or_insert(next)
            })
            .collect();
        Clustering {
            assignment,
            num_clusters: map.len(),
            method: self.method,
        }
    }

    /// Ids are exactly `0..num_clusters`, each used.
    pub fn is_compact(&self) -> bool {
        let mut used = vec![false; self.num_clusters];
        for &c in &self.assignment {
            match used.get_mut(c) {
                Some(u) => *u = true,
                None => return false,
            }
        }
        used.into_iter().all(|u| u)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.num_clusters];
        for &c in &self.assignment {
            s[c] += 1;
        }
        s
    }

    /// Debug dump: one line `node cluster` per node.
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (v, c) in self.assignment.iter().enumerate() {
            writeln!(w, "{v} {c}")?;
        }
        Ok(())
    }
}

pub fn compact(c: &Clustering) -> Clustering {
    c.compact()
}
