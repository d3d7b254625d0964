#![allow(dead_code)]

use std::collections::VecDeque;

use mlsvm::graph::WeightedGraph;
use mlsvm::knn::{build_knn_graph, KnnConfig};
use mlsvm::matrix::Matrix;
use mlsvm::seed;
use mlsvm::svm::rbf_kernel;
use rand::Rng;
use rand_distr::StandardNormal;

/// A random dual problem: points, ±1 labels (both present), C and γ.
pub struct DualProblem {
    pub points: Matrix,
    pub labels: Vec<i8>,
    pub c: f64,
    pub gamma: f64,
}

pub fn random_problem(seed: u64, max_n: usize) -> DualProblem {
    let mut rng = seed::rng(seed);
    let n = rng.random_range(2..=max_n);
    let d = rng.random_range(1..=5);
    let mut points = Matrix::zeros(n, d);
    for i in 0..n {
        for v in points.row_mut(i) {
            *v = rng.sample(StandardNormal);
        }
    }
    let mut labels: Vec<i8> = (0..n)
        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
        .collect();
    labels[0] = 1;
    labels[1] = -1;
    DualProblem {
        points,
        labels,
        c: rng.random_range(-3.0..8.0f64).exp2(),
        gamma: rng.random_range(-4.0..2.0f64).exp2(),
    }
}

pub fn q_matrix(points: &Matrix, labels: &[i8], gamma: f64) -> Vec<Vec<f64>> {
    let n = points.rows();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    f64::from(labels[i] * labels[j])
                        * rbf_kernel(points.row(i), points.row(j), gamma).unwrap()
                })
                .collect()
        })
        .collect()
}

/// `eᵀα − ½αᵀQα`.
pub fn dual_objective(q: &[Vec<f64>], alpha: &[f64]) -> f64 {
    let quad: f64 = (0..alpha.len())
        .map(|i| alpha[i] * (0..alpha.len()).map(|j| q[i][j] * alpha[j]).sum::<f64>())
        .sum();
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Euclidean projection onto `{0 ≤ α ≤ C, yᵀα = 0}`: `α = clip(v + λy)` with
/// `λ` found by bisection on the monotone map `λ ↦ yᵀα(λ)`.
pub fn project(v: &[f64], y: &[i8], c: f64) -> Vec<f64> {
    let at = |lambda: f64| -> Vec<f64> {
        v.iter()
            .zip(y)
            .map(|(vi, &yi)| (vi + lambda * f64::from(yi)).clamp(0.0, c))
            .collect()
    };
    let h = |a: &[f64]| {
        a.iter()
            .zip(y)
            .map(|(ai, &yi)| ai * f64::from(yi))
            .sum::<f64>()
    };
    let bound = v.iter().fold(0.0f64, |m, x| m.max(x.abs())) + c + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if h(&at(mid)) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// Accelerated projected gradient ascent on the dual with adaptive restart.
pub fn qp_oracle(q: &[Vec<f64>], y: &[i8], c: f64, iterations: usize) -> Vec<f64> {
    let n = y.len();
    // Power iteration for the largest eigenvalue of Q.
    let mut v = vec![1.0; n];
    let mut lmax = 1.0;
    for _ in 0..200 {
        let w: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| q[i][j] * v[j]).sum())
            .collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        lmax = norm / v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v = w.iter().map(|x| x / norm).collect();
    }
    let step = 1.0 / (1.05 * lmax.max(1e-12));
    let grad = |a: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| 1.0 - (0..n).map(|j| q[i][j] * a[j]).sum::<f64>())
            .collect()
    };
    let mut x = project(&vec![0.0; n], y, c);
    let mut z = x.clone();
    let mut t = 1.0f64;
    let mut best = dual_objective(q, &x);
    for _ in 0..iterations {
        let g = grad(&z);
        let moved: Vec<f64> = z.iter().zip(&g).map(|(zi, gi)| zi + step * gi).collect();
        let next = project(&moved, y, c);
        let value = dual_objective(q, &next);
        if value < best {
            // Restart momentum from the last accepted point.
            t = 1.0;
            z = x.clone();
            continue;
        }
        best = value;
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = next
            .iter()
            .zip(&x)
            .map(|(a, b)| a + (t - 1.0) / t_next * (a - b))
            .collect();
        x = next;
        t = t_next;
    }
    x
}

/// `n` Gaussian points in `d` dimensions.
pub fn gaussian_points(n: usize, d: usize, seed: u64) -> Matrix {
    let mut rng = seed::rng(seed);
    let mut m = Matrix::zeros(n, d);
    for i in 0..n {
        for v in m.row_mut(i) {
            *v = rng.sample(StandardNormal);
        }
    }
    m
}

pub fn knn_fixture(n: usize, d: usize, k: usize, seed: u64) -> WeightedGraph {
    build_knn_graph(&gaussian_points(n, d, seed), &KnnConfig::with_k(k)).unwrap()
}

/// Hop distances from `source` inside the subgraph induced by `inside`.
pub fn induced_bfs(g: &WeightedGraph, source: usize, inside: &[bool]) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &v in g.neighbor_ids(u) {
            if inside[v] && dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Per cluster: `None` if the induced subgraph is disconnected, otherwise an
/// upper bound on its hop diameter (twice an eccentricity, or the exact
/// diameter when that bound exceeds `limit`).
pub fn cluster_diameters(
    g: &WeightedGraph,
    assignment: &[usize],
    limit: usize,
) -> Vec<Option<usize>> {
    let k = assignment.iter().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (v, &c) in assignment.iter().enumerate() {
        members[c].push(v);
    }
    let mut inside = vec![false; g.n()];
    members
        .iter()
        .map(|m| {
            for &v in m {
                inside[v] = true;
            }
            let ecc = |s: usize| -> Option<usize> {
                let d = induced_bfs(g, s, &inside);
                m.iter()
                    .map(|&v| d[v])
                    .try_fold(0, |acc, x| x.map(|x| acc.max(x)))
            };
            let out = ecc(m[0]).map(|e| {
                if 2 * e <= limit {
                    2 * e
                } else {
                    m.iter().map(|&s| ecc(s).unwrap()).max().unwrap()
                }
            });
            for &v in m {
                inside[v] = false;
            }
            out
        })
        .collect()
}

/// Connected-component id per node.
pub fn components(g: &WeightedGraph) -> Vec<usize> {
    g.components()
}

/// Two unit-weight triangles `{0,1,2}` and `{3,4,5}` bridged by `2–3` with
/// weight 0.01.
pub fn bridged_triangles() -> WeightedGraph {
    let features = Matrix::zeros(6, 1);
    let mut edges = vec![(2, 3, 0.01)];
    for t in [0, 3] {
        edges.extend([(t, t + 1, 1.0), (t + 1, t + 2, 1.0), (t, t + 2, 1.0)]);
    }
    WeightedGraph::from_weighted_edges(features, vec![1; 6], &edges).unwrap()
}

/// Connection weight from `v` to every cluster id.
pub fn cluster_strengths(g: &WeightedGraph, assignment: &[usize], v: usize) -> Vec<f64> {
    let k = assignment.iter().max().map_or(0, |m| m + 1);
    let mut s = vec![0.0; k];
    for (u, w) in g.neighbors(v) {
        s[assignment[u]] += w;
    }
    s
}

/// Fraction of low-diameter runs on 1000-node k-NN fixtures whose largest
/// cluster hop diameter is at most `⌈4 ln n / β⌉`, plus whether every
/// cluster in every run was connected.
pub fn ld_diameter_bound_rate(runs: u64, beta: f64) -> (f64, bool) {
    use mlsvm::clustering::{low_diameter, LdConfig};
    const N: usize = 1000;
    const FIXTURES: u64 = 20;
    let limit = (4.0 * (N as f64).ln() / beta).ceil() as usize;
    let graphs: Vec<WeightedGraph> = (0..FIXTURES.min(runs))
        .map(|f| knn_fixture(N, 3, 10, 1000 + f))
        .collect();
    let mut within = 0u64;
    let mut connected = true;
    for r in 0..runs {
        let g = &graphs[(r % graphs.len() as u64) as usize];
        let c = low_diameter(g, &LdConfig { beta, seed: r });
        let diam = cluster_diameters(g, &c.assignment, limit);
        connected &= diam.iter().all(Option::is_some);
        if diam.iter().flatten().all(|&d| d <= limit) {
            within += 1;
        }
    }
    (within as f64 / runs as f64, connected)
}

/// Largest deviation over levels of total mass from the class size and of
/// the size-weighted mean feature from the level-0 mean.
pub fn conservation_error(h: &mlsvm::hierarchy::Hierarchy) -> (usize, f64) {
    let base = weighted_mean(h.graph(0));
    let total = h.graph(0).total_size();
    let mut mass_err = 0usize;
    let mut com_err = 0.0f64;
    for l in 0..h.depth() {
        let g = h.graph(l);
        mass_err = mass_err.max(g.total_size().abs_diff(total));
        for (a, b) in weighted_mean(g).iter().zip(&base) {
            com_err = com_err.max((a - b).abs());
        }
    }
    (mass_err, com_err)
}

pub fn weighted_mean(g: &WeightedGraph) -> Vec<f64> {
    let d = g.node_features().cols();
    let mut acc = vec![0.0; d];
    for v in 0..g.n() {
        let s = g.node_sizes()[v] as f64;
        for (a, x) in acc.iter_mut().zip(g.node_features().row(v)) {
            *a += s * x;
        }
    }
    let total = g.total_size() as f64;
    acc.iter_mut().for_each(|a| *a /= total);
    acc
}

/// Contracting the singleton clustering reproduces features, sizes, and
/// every edge with the same weight.
pub fn singleton_contraction_preserves(g: &WeightedGraph) -> bool {
    use mlsvm::clustering::{Clustering, Method};
    let level =
        mlsvm::hierarchy::contract(g, &Clustering::singletons(g.n(), Method::LabelPropagation))
            .unwrap();
    let h = &level.graph;
    h.node_features() == g.node_features()
        && h.node_sizes() == g.node_sizes()
        && h.edges().collect::<Vec<_>>() == g.edges().collect::<Vec<_>>()
}

/// Ten unit Gaussian blobs of 200 points in 10-D, centers 20 apart on a line.
pub fn ten_blobs() -> Matrix {
    let mut m = gaussian_points(2000, 10, 77);
    for i in 0..2000 {
        m.row_mut(i)[0] += 20.0 * (i / 200) as f64;
    }
    m
}
