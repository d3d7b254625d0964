//! Exact k-nearest-neighbor graphs.
//!
//! Neighbors are found with a kd-tree for low-dimensional data and by brute
//! force above [`KnnConfig::brute_force_above_dim`]. Both paths rank candidates
//! by `(squared distance, index)` so they return identical lists.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::Result;
use crate::graph::WeightedGraph;
use crate::matrix::{squared_distance, Matrix};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnnBackend {
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnConfig {
    pub k: usize,
    /// Dimensions above this skip the kd-tree.
    pub brute_force_above_dim: usize,
    pub backend: KnnBackend,
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig {
            k: 10,
            brute_force_above_dim: 30,
            backend: KnnBackend::Exact,
        }
    }
}

impl KnnConfig {
    pub fn with_k(k: usize) -> Self {
        KnnConfig {
            k,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    dist2: f64,
    idx: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist2
            .total_cmp(&other.dist2)
            .then(self.idx.cmp(&other.idx))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const LEAF_SIZE: usize = 16;

enum KdNode {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Points are stored permuted into tree order so that every leaf is a
/// contiguous block.
struct KdTree {
    dim: usize,
    data: Vec<f64>,
    /// Tree position → original row index.
    order: Vec<usize>,
    nodes: Vec<KdNode>,
}

impl KdTree {
    fn build(points: &Matrix) -> Self {
        let mut order: Vec<usize> = (0..points.rows()).collect();
        let mut nodes = Vec::new();
        if points.rows() > 0 {
            build_node(points, &mut order, 0, points.rows(), &mut nodes);
        }
        let data = order
            .iter()
            .flat_map(|&i| points.row(i).iter().copied())
            .collect();
        KdTree {
            dim: points.cols(),
            data,
            order,
            nodes,
        }
    }

    fn row(&self, pos: usize) -> &[f64] {
        &self.data[pos * self.dim..(pos + 1) * self.dim]
    }

    /// Neighbors of the point stored at tree position `pos`.
    fn query(&self, pos: usize, k: usize) -> Vec<usize> {
        let mut heap = BinaryHeap::with_capacity(k + 1);
        if !self.nodes.is_empty() && k > 0 {
            let mut offsets = vec![0.0; self.dim];
            self.search(0, pos, k, 0.0, &mut offsets, &mut heap);
        }
        sorted_ids(heap)
    }

    /// `rd` is the squared distance from the query to the cell of `node`,
    /// with per-dimension components kept in `offsets`.
    fn search(
        &self,
        node: usize,
        pos: usize,
        k: usize,
        rd: f64,
        offsets: &mut [f64],
        heap: &mut BinaryHeap<Candidate>,
    ) {
        let q = self.row(pos);
        match self.nodes[node] {
            KdNode::Leaf { start, end } => {
                for p in start..end {
                    if p != pos {
                        offer(
                            heap,
                            k,
                            Candidate {
                                dist2: squared_distance(q, self.row(p)),
                                idx: self.order[p],
                            },
                        );
                    }
                }
            }
            KdNode::Split {
                dim,
                value,
                left,
                right,
            } => {
                let diff = q[dim] - value;
                let (near, far) = if diff < 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.search(near, pos, k, rd, offsets, heap);
                let old = offsets[dim];
                let far_rd = rd - old * old + diff * diff;
                if heap.len() < k || heap.peek().is_some_and(|top| far_rd <= top.dist2) {
                    offsets[dim] = diff;
                    self.search(far, pos, k, far_rd, offsets, heap);
                    offsets[dim] = old;
                }
            }
        }
    }
}

fn build_node(
    points: &Matrix,
    order: &mut [usize],
    start: usize,
    end: usize,
    nodes: &mut Vec<KdNode>,
) -> usize {
    let id = nodes.len();
    nodes.push(KdNode::Leaf { start, end });
    if end - start <= LEAF_SIZE {
        return id;
    }
    let (mut best_dim, mut best_spread) = (0, -1.0);
    for dim in 0..points.cols() {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &i in &order[start..end] {
            let v = points.row(i)[dim];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi - lo > best_spread {
            best_spread = hi - lo;
            best_dim = dim;
        }
    }
    if best_spread <= 0.0 {
        return id;
    }
    let mid = start + (end - start) / 2;
    order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
        points.row(a)[best_dim].total_cmp(&points.row(b)[best_dim])
    });
    let value = points.row(order[mid])[best_dim];
    let left = build_node(points, order, start, mid, nodes);
    let right = build_node(points, order, mid, end, nodes);
    nodes[id] = KdNode::Split {
        dim: best_dim,
        value,
        left,
        right,
    };
    id
}

fn offer(heap: &mut BinaryHeap<Candidate>, k: usize, c: Candidate) {
    if heap.len() < k {
        heap.push(c);
    } else if heap.peek().is_some_and(|top| c < *top) {
        heap.pop();
        heap.push(c);
    }
}

fn sorted_ids(heap: BinaryHeap<Candidate>) -> Vec<usize> {
    heap.into_sorted_vec().into_iter().map(|c| c.idx).collect()
}

fn brute_force_query(points: &Matrix, q_idx: usize, k: usize) -> Vec<usize> {
    let q = points.row(q_idx);
    let mut heap = BinaryHeap::with_capacity(k + 1);
    for i in 0..points.rows() {
        if i != q_idx {
            offer(
                &mut heap,
                k,
                Candidate {
                    dist2: squared_distance(q, points.row(i)),
                    idx: i,
                },
            );
        }
    }
    sorted_ids(heap)
}

/// Directed k-NN lists, nearest first, ties broken by lower index. `k` is
/// clamped to `n - 1`.
pub fn knn_lists(points: &Matrix, cfg: &KnnConfig) -> Vec<Vec<usize>> {
    let n = points.rows();
    let k = effective_k(n, cfg.k);
    if points.cols() > cfg.brute_force_above_dim {
        par::map_range(n, |i| brute_force_query(points, i, k))
    } else {
        let tree = KdTree::build(points);
        let by_pos = par::map_range(n, |pos| tree.query(pos, k));
        let mut lists = vec![Vec::new(); n];
        for (pos, list) in by_pos.into_iter().enumerate() {
            lists[tree.order[pos]] = list;
        }
        lists
    }
}

/// Reference implementation: full sort of all distances per point.
pub fn knn_lists_brute_force(points: &Matrix, k: usize) -> Vec<Vec<usize>> {
    let n = points.rows();
    let k = effective_k(n, k);
    (0..n).map(|i| brute_force_query(points, i, k)).collect()
}

fn effective_k(n: usize, k: usize) -> usize {
    let max = n.saturating_sub(1);
    if k > max {
        if n > 1 {
            log::warn!("k = {k} exceeds n - 1 = {max}; clamping");
        }
        max
    } else {
        k
    }
}

/// Undirected k-NN graph: an edge wherever either endpoint lists the other,
/// weighted by inverse Euclidean distance. All node sizes are 1.
pub fn build_knn_graph(points: &Matrix, cfg: &KnnConfig) -> Result<WeightedGraph> {
    let n = points.rows();
    if n <= 1 || cfg.k == 0 {
        return Ok(WeightedGraph::edgeless(points.clone()));
    }
    let lists = knn_lists(points, cfg);
    let edges = lists
        .iter()
        .enumerate()
        .flat_map(|(u, l)| l.iter().map(move |&v| (u, v)));
    WeightedGraph::from_edges(points.clone(), vec![1; n], edges)
}
