use std::rc::Rc;

use crate::matrix::{squared_distance, Matrix};
use crate::par;

/// Rows shorter than this are computed on the calling thread.
const PARALLEL_ROW_MIN: usize = 2048;

/// Least-recently-used cache of RBF kernel rows `K[i, ·]`.
///
/// A row is computed only at the indices of the active set passed in; the
/// other entries are left at zero. Callers may shrink the active set freely
/// but must call [`KernelCache::invalidate`] before growing it.
pub(crate) struct KernelCache<'a> {
    points: &'a Matrix,
    gamma: f64,
    rows: Vec<Option<Rc<[f64]>>>,
    last_used: Vec<u64>,
    clock: u64,
    capacity: usize,
    cached: usize,
    pub(crate) misses: u64,
}

impl<'a> KernelCache<'a> {
    pub(crate) fn new(points: &'a Matrix, gamma: f64, budget_bytes: usize) -> Self {
        let n = points.rows();
        let row_bytes = (n * std::mem::size_of::<f64>()).max(1);
        let capacity = (budget_bytes / row_bytes).clamp(2, n.max(2));
        KernelCache {
            points,
            gamma,
            rows: vec![None; n],
            last_used: vec![0; n],
            clock: 0,
            capacity,
            cached: 0,
            misses: 0,
        }
    }

    pub(crate) fn row(&mut self, i: usize, active: &[usize]) -> Rc<[f64]> {
        self.clock += 1;
        self.last_used[i] = self.clock;
        if let Some(r) = &self.rows[i] {
            return Rc::clone(r);
        }
        self.misses += 1;
        if self.cached >= self.capacity {
            self.evict(i);
        }
        let row = self.compute(i, active);
        self.rows[i] = Some(Rc::clone(&row));
        self.cached += 1;
        row
    }

    pub(crate) fn invalidate(&mut self) {
        self.rows.iter_mut().for_each(|r| *r = None);
        self.cached = 0;
    }

    fn evict(&mut self, keep: usize) {
        let victim = (0..self.rows.len())
            .filter(|&t| t != keep && self.rows[t].is_some())
            .min_by_key(|&t| self.last_used[t]);
        if let Some(v) = victim {
            self.rows[v] = None;
            self.cached -= 1;
        }
    }

    fn compute(&self, i: usize, active: &[usize]) -> Rc<[f64]> {
        let xi = self.points.row(i);
        let (points, gamma) = (self.points, self.gamma);
        let k = |t: usize| (-gamma * squared_distance(xi, points.row(t))).exp();
        let mut out = vec![0.0; points.rows()];
        if active.len() >= PARALLEL_ROW_MIN {
            let vals = par::map_slice(active, |&t| k(t));
            for (&t, v) in active.iter().zip(vals) {
                out[t] = v;
            }
        } else {
            for &t in active {
                out[t] = k(t);
            }
        }
        out.into()
    }
}
