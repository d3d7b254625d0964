//! Low-diameter decomposition by exponentially shifted breadth-first search.
//!
//! Every node draws a shift `δ ~ Exp(β)`. Iteration `t` first extends every
//! running search by one hop, then starts new searches from unvisited nodes
//! with `δ ∈ [t, t + 1)`. A node reached by several searches in the same
//! iteration joins the center whose shift has the smaller fractional part
//! (then the smaller center id). Edge weights are ignored.

use rand::Rng as _;

use super::{Clustering, Method};
use crate::graph::WeightedGraph;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdConfig {
    pub beta: f64,
    pub seed: u64,
}

impl Default for LdConfig {
    fn default() -> Self {
        LdConfig { beta: 0.4, seed: 0 }
    }
}

/// `n` draws of `-ln(U) / β` with `U ∈ (0, 1]`.
pub fn exponential_shifts(n: usize, beta: f64, seed: u64) -> Vec<f64> {
    let mut rng = seed::rng(seed);
    (0..n)
        .map(|_| {
            let u = 1.0 - rng.random::<f64>();
            -u.ln() / beta
        })
        .collect()
}

pub fn low_diameter(g: &WeightedGraph, cfg: &LdConfig) -> Clustering {
    let shifts = exponential_shifts(g.n(), cfg.beta, cfg.seed);
    low_diameter_with_shifts(g, &shifts)
}

/// Decomposition for given shift values (one per node, non-negative).
pub fn low_diameter_with_shifts(g: &WeightedGraph, shifts: &[f64]) -> Clustering {
    let n = g.n();
    assert_eq!(shifts.len(), n, "one shift per node");
    const UNVISITED: usize = usize::MAX;

    let frac = |c: usize| shifts[c] - shifts[c].floor();
    let mut center = vec![UNVISITED; n];
    let mut start_order: Vec<usize> = (0..n).collect();
    start_order.sort_by(|&a, &b| shifts[a].total_cmp(&shifts[b]).then(a.cmp(&b)));

    let mut next_start = 0;
    let mut visited = 0;
    let mut frontier: Vec<usize> = Vec::new();
    let mut claimed: Vec<usize> = Vec::new();
    let mut claim_round = vec![usize::MAX; n];
    let mut round = 0usize;
    let mut t = 0.0f64;

    while visited < n {
        // Arrivals: extend each running search by one hop.
        claimed.clear();
        for &u in &frontier {
            let cu = center[u];
            for &w in g.neighbor_ids(u) {
                if center[w] == UNVISITED {
                    center[w] = cu;
                    claim_round[w] = round;
                    claimed.push(w);
                } else if claim_round[w] == round {
                    let cw = center[w];
                    if (frac(cu), cu) < (frac(cw), cw) {
                        center[w] = cu;
                    }
                }
            }
        }
        round += 1;
        visited += claimed.len();
        std::mem::swap(&mut frontier, &mut claimed);

        // Starts: unvisited nodes whose shift falls in [t, t + 1).
        while next_start < n && shifts[start_order[next_start]] < t + 1.0 {
            let v = start_order[next_start];
            next_start += 1;
            if center[v] == UNVISITED {
                center[v] = v;
                frontier.push(v);
                visited += 1;
            }
        }

        if frontier.is_empty() && visited < n {
            // Nothing running: skip ahead to the next start window.
            match start_order[next_start..].first() {
                Some(&v) => t = shifts[v].floor(),
                None => break,
            }
        } else {
            t += 1.0;
        }
    }

    Clustering {
        assignment: center,
        num_clusters: n,
        method: Method::LowDiameter,
    }
    .compact()
}
