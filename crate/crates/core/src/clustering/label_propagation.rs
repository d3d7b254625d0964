use rand::Rng as _;

use super::{Clustering, Method};
use crate::graph::WeightedGraph;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpConfig {
    /// Maximum number of rounds.
    pub rounds: usize,
    pub seed: u64,
}

impl Default for LpConfig {
    fn default() -> Self {
        LpConfig {
            rounds: 10,
            seed: 0,
        }
    }
}

/// Per-move record: connection weight of the node to the cluster it left
/// and to the cluster it ended in, measured at move time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LpTrace {
    pub moves_per_round: Vec<usize>,
    pub decisions: Vec<(usize, f64, f64)>,
}

pub fn label_propagation(g: &WeightedGraph, cfg: &LpConfig) -> Clustering {
    run(g, cfg, None)
}

pub fn label_propagation_traced(g: &WeightedGraph, cfg: &LpConfig) -> (Clustering, LpTrace) {
    let mut trace = LpTrace::default();
    let c = run(g, cfg, Some(&mut trace));
    (c, trace)
}

fn run(g: &WeightedGraph, cfg: &LpConfig, mut trace: Option<&mut LpTrace>) -> Clustering {
    let n = g.n();
    let mut rng = seed::rng(cfg.seed);
    let mut cluster: Vec<usize> = (0..n).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (g.degree(v), v));

    // Scratch: accumulated weight per cluster id, with a list of touched ids.
    let mut strength = vec![0.0f64; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut best: Vec<usize> = Vec::new();

    for _ in 0..cfg.rounds.max(1) {
        let mut moves = 0;
        for &v in &order {
            if g.degree(v) == 0 {
                continue;
            }
            for (u, w) in g.neighbors(v) {
                let c = cluster[u];
                if strength[c] == 0.0 {
                    touched.push(c);
                }
                strength[c] += w;
            }
            let current = cluster[v];
            let max = touched
                .iter()
                .map(|&c| strength[c])
                .fold(f64::NEG_INFINITY, f64::max);
            let stay_weight = strength[current];
            if stay_weight < max {
                best.clear();
                best.extend(touched.iter().copied().filter(|&c| strength[c] == max));
                best.sort_unstable();
                let target = if best.len() == 1 {
                    best[0]
                } else {
                    best[rng.random_range(0..best.len())]
                };
                cluster[v] = target;
                moves += 1;
                if let Some(t) = trace.as_deref_mut() {
                    t.decisions.push((v, stay_weight, max));
                }
            }
            for &c in &touched {
                strength[c] = 0.0;
            }
            touched.clear();
        }
        if let Some(t) = trace.as_deref_mut() {
            t.moves_per_round.push(moves);
        }
        if moves == 0 {
            break;
        }
    }

    Clustering {
        assignment: cluster,
        num_clusters: n,
        method: Method::LabelPropagation,
    }
    .compact()
}
