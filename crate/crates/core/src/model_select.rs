//! Parameter search over `(C, γ)`, validation, and classification metrics.

use std::fmt;

use crate::dataset::{draw_covering, sample_size, DataSet};
use crate::error::{MlsvmError, Result};
use crate::svm::SvmModel;

/// Models whose G-means differ by at most this are considered equally good.
pub const GMEAN_TOLERANCE: f64 = 0.01;

/// Fraction of the training data used for validation.
pub const VALIDATION_FRACTION: f64 = 0.1;

/// Confusion counts with `+1` as the positive (minority) class.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub tp: usize,
    pub fn_: usize,
    pub tn: usize,
    pub fp: usize,
    pub sn: f64,
    pub sp: f64,
    pub gmean: f64,
    pub accuracy: f64,
}

impl Metrics {
    pub fn from_counts(tp: usize, fn_: usize, tn: usize, fp: usize) -> Metrics {
        let rate = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let sn = rate(tp, tp + fn_);
        let sp = rate(tn, tn + fp);
        Metrics {
            tp,
            fn_,
            tn,
            fp,
            sn,
            sp,
            gmean: (sn * sp).sqrt(),
            accuracy: rate(tp + tn, tp + fn_ + tn + fp),
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fn_ + self.tn + self.fp
    }
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SN {:.4}  SP {:.4}  G-mean {:.4}  acc {:.4}  (tp {} fn {} tn {} fp {})",
            self.sn, self.sp, self.gmean, self.accuracy, self.tp, self.fn_, self.tn, self.fp
        )
    }
}

pub fn compute_metrics(predictions: &[i8], truth: &[i8]) -> Result<Metrics> {
    if predictions.len() != truth.len() {
        return Err(MlsvmError::DimensionMismatch {
            expected: truth.len(),
            found: predictions.len(),
        });
    }
    if truth.is_empty() {
        return Err(MlsvmError::EmptyData);
    }
    let (mut tp, mut fn_, mut tn, mut fp) = (0, 0, 0, 0);
    for (&p, &t) in predictions.iter().zip(truth) {
        match (t > 0, p > 0) {
            (true, true) => tp += 1,
            (true, false) => fn_ += 1,
            (false, false) => tn += 1,
            (false, true) => fp += 1,
        }
    }
    Ok(Metrics::from_counts(tp, fn_, tn, fp))
}

/// Search ranges in log₂ space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamGrid {
    pub log2_c: (f64, f64),
    pub log2_gamma: (f64, f64),
}

impl Default for ParamGrid {
    fn default() -> Self {
        ParamGrid {
            log2_c: (-5.0, 15.0),
            log2_gamma: (-15.0, 3.0),
        }
    }
}

/// First-sweep design in the unit square: the 3×3 factorial at
/// `{1/6, 1/2, 5/6}²`.
pub const FIRST_SWEEP_DESIGN: [(f64, f64); 9] = [
    (1.0 / 6.0, 1.0 / 6.0),
    (1.0 / 6.0, 0.5),
    (1.0 / 6.0, 5.0 / 6.0),
    (0.5, 1.0 / 6.0),
    (0.5, 0.5),
    (0.5, 5.0 / 6.0),
    (5.0 / 6.0, 1.0 / 6.0),
    (5.0 / 6.0, 0.5),
    (5.0 / 6.0, 5.0 / 6.0),
];

impl ParamGrid {
    pub fn validate(&self) -> Result<()> {
        for (lo, hi) in [self.log2_c, self.log2_gamma] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(MlsvmError::InvalidConfig(format!(
                    "bad log2 range [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    fn scale(range: (f64, f64), u: f64) -> f64 {
        range.0 + u * (range.1 - range.0)
    }

    /// Nine `(log₂C, log₂γ)` points spread over the configured ranges.
    pub fn first_sweep(&self) -> Vec<(f64, f64)> {
        FIRST_SWEEP_DESIGN
            .iter()
            .map(|&(u, v)| (Self::scale(self.log2_c, u), Self::scale(self.log2_gamma, v)))
            .collect()
    }

    /// Four points around `center` forming a 2×2 factorial with offsets of
    /// one eighth of each range (half the quarter-range window). A level that
    /// would leave the global range is folded to the inner side of the center
    /// instead, so no point coincides with the center.
    pub fn second_sweep(&self, center: (f64, f64)) -> Vec<(f64, f64)> {
        let levels = |range: (f64, f64), c: f64| -> [f64; 2] {
            let o = (range.1 - range.0) / 8.0;
            let c = c.clamp(range.0, range.1);
            if c - o < range.0 {
                [c + o / 2.0, c + o]
            } else if c + o > range.1 {
                [c - o, c - o / 2.0]
            } else {
                [c - o, c + o]
            }
        };
        let cs = levels(self.log2_c, center.0);
        let gs = levels(self.log2_gamma, center.1);
        let mut out = Vec::with_capacity(4);
        for &c in &cs {
            for &g in &gs {
                out.push((c, g));
            }
        }
        out
    }

    pub fn contains(&self, p: (f64, f64)) -> bool {
        let within = |r: (f64, f64), v: f64| v >= r.0 - 1e-12 && v <= r.1 + 1e-12;
        within(self.log2_c, p.0) && within(self.log2_gamma, p.1)
    }
}

pub fn ud_first_sweep(grid: &ParamGrid) -> Vec<(f64, f64)> {
    grid.first_sweep()
}

pub fn ud_second_sweep(grid: &ParamGrid, center: (f64, f64)) -> Vec<(f64, f64)> {
    grid.second_sweep(center)
}

#[derive(Debug, Clone)]
pub struct EvaluatedModel {
    pub model: SvmModel,
    pub metrics: Metrics,
    pub num_svs: usize,
    /// Hierarchy level the model was trained on (0 = original data).
    pub level: usize,
}

impl EvaluatedModel {
    pub fn new(model: SvmModel, metrics: Metrics, level: usize) -> Self {
        EvaluatedModel {
            num_svs: model.num_svs(),
            model,
            metrics,
            level,
        }
    }

    /// Machine-readable line `sn sp gmean acc n_sv level`.
    pub fn report_line(&self) -> String {
        format!(
            "{:.6} {:.6} {:.6} {:.6} {} {}",
            self.metrics.sn,
            self.metrics.sp,
            self.metrics.gmean,
            self.metrics.accuracy,
            self.num_svs,
            self.level
        )
    }
}

/// Index of the preferred candidate: among those within
/// [`GMEAN_TOLERANCE`] of the best G-mean, the one with the fewest support
/// vectors, earliest on ties.
pub fn select_index(candidates: &[EvaluatedModel]) -> Result<usize> {
    let best = candidates
        .iter()
        .map(|c| c.metrics.gmean)
        .fold(f64::NEG_INFINITY, f64::max);
    if candidates.is_empty() {
        return Err(MlsvmError::InvalidConfig("no candidate models".into()));
    }
    let threshold = best - GMEAN_TOLERANCE - 1e-12;
    candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.metrics.gmean >= threshold)
        .min_by_key(|&(i, c)| (c.num_svs, i))
        .map(|(i, _)| i)
        .ok_or_else(|| MlsvmError::InvalidConfig("no candidate models".into()))
}

pub fn select_model(candidates: &[EvaluatedModel]) -> Result<EvaluatedModel> {
    Ok(candidates[select_index(candidates)?].clone())
}

/// `⌈0.1·n⌉` training indices drawn uniformly without replacement, covering
/// both classes when the data does (growing by one if needed).
pub fn make_validation_set(training: &DataSet, seed: u64) -> Result<Vec<usize>> {
    if training.is_empty() {
        return Err(MlsvmError::EmptyData);
    }
    let size = sample_size(training.len(), VALIDATION_FRACTION);
    let mut idx = draw_covering(training.labels(), size, true, seed);
    idx.sort_unstable();
    Ok(idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::LabelNames;
    use crate::matrix::Matrix;
    use crate::svm::ModelParams;
    use approx::assert_abs_diff_eq;

    #[test]
    fn metrics_formula() {
        let mut pred = Vec::new();
        let mut truth = Vec::new();
        for (t, p, count) in [(1, 1, 9), (1, -1, 1), (-1, -1, 8), (-1, 1, 2)] {
            for _ in 0..count {
                truth.push(t);
                pred.push(p);
            }
        }
        let m = compute_metrics(&pred, &truth).unwrap();
        assert_eq!((m.tp, m.fn_, m.tn, m.fp), (9, 1, 8, 2));
        assert_abs_diff_eq!(m.sn, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(m.sp, 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(m.gmean, 0.72f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(m.gmean, 0.84853, epsilon = 1e-5);

        let perfect = compute_metrics(&truth, &truth).unwrap();
        assert_eq!((perfect.sn, perfect.sp, perfect.gmean), (1.0, 1.0, 1.0));

        let all_neg = compute_metrics(&vec![-1; truth.len()], &truth).unwrap();
        assert_eq!((all_neg.sn, all_neg.gmean), (0.0, 0.0));
        assert!(compute_metrics(&[1], &[1, 1]).is_err());
        assert!(compute_metrics(&[], &[]).is_err());
    }

    #[test]
    fn no_positives_means_zero_sensitivity() {
        let m = compute_metrics(&[-1, -1], &[-1, -1]).unwrap();
        assert_eq!((m.sn, m.sp, m.gmean), (0.0, 1.0, 0.0));
    }

    #[test]
    fn first_sweep_in_range_and_spread() {
        let g = ParamGrid::default();
        let pts = ud_first_sweep(&g);
        assert_eq!(pts.len(), 9);
        assert!(pts.iter().all(|&p| g.contains(p)));
        let mut min = f64::INFINITY;
        for (a, p) in FIRST_SWEEP_DESIGN.iter().enumerate() {
            for q in &FIRST_SWEEP_DESIGN[a + 1..] {
                min = min.min(((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt());
            }
        }
        // Frozen: 1/3 for the {1/6, 1/2, 5/6} lattice.
        assert_abs_diff_eq!(min, 1.0 / 3.0, epsilon = 1e-12);
        assert!(min > 0.2);
    }

    #[test]
    fn degenerate_range_collapses() {
        let g = ParamGrid {
            log2_c: (2.0, 2.0),
            log2_gamma: (-15.0, 3.0),
        };
        assert!(ud_first_sweep(&g).iter().all(|p| p.0 == 2.0));
    }

    #[test]
    fn second_sweep_geometry() {
        let g = ParamGrid::default();
        let center = (5.0, -6.0);
        let pts = ud_second_sweep(&g, center);
        assert_eq!(pts.len(), 4);
        assert_eq!(pts, ud_second_sweep(&g, center));
        for &p in &pts {
            assert!((p.0 - center.0).abs() <= 20.0 / 4.0);
            assert!((p.1 - center.1).abs() <= 18.0 / 4.0);
            assert_ne!(p, center);
        }
        for corner in [(-5.0, -15.0), (15.0, 3.0), (-5.0, 3.0), (15.0, -15.0)] {
            let pts = ud_second_sweep(&g, corner);
            assert!(pts.iter().all(|&p| g.contains(p) && p != corner));
            let mut dedup = pts.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), 4);
        }
    }

    fn candidate(gmean: f64, svs: usize) -> EvaluatedModel {
        let model = crate::svm::SvmModel {
            support_vectors: Matrix::zeros(svs, 1),
            alphas_signed: vec![1.0; svs],
            bias: 0.0,
            params: ModelParams::new(1.0, 1.0).unwrap(),
            training_size: svs,
            converged: true,
            label_names: LabelNames::default(),
        };
        let m = Metrics {
            gmean,
            ..Metrics::default()
        };
        EvaluatedModel::new(model, m, 0)
    }

    #[test]
    fn selection_rules() {
        assert_eq!(
            select_index(&[candidate(0.90, 5), candidate(0.95, 5)]).unwrap(),
            1
        );
        assert_eq!(
            select_index(&[candidate(0.900, 50), candidate(0.905, 500)]).unwrap(),
            0
        );
        assert_eq!(
            select_index(&[candidate(0.9, 7), candidate(0.9, 7)]).unwrap(),
            0
        );
        assert!(select_model(&[]).is_err());
    }

    #[test]
    fn validation_set_sizes() {
        let labels: Vec<i8> = (0..1000).map(|i| if i < 100 { 1 } else { -1 }).collect();
        let d = DataSet::new(Matrix::zeros(1000, 1), labels, LabelNames::default()).unwrap();
        let v = make_validation_set(&d, 4).unwrap();
        assert_eq!(v.len(), 100);
        assert_eq!(v, make_validation_set(&d, 4).unwrap());

        let tiny = DataSet::new(
            Matrix::zeros(5, 1),
            vec![1, 1, 1, 1, -1],
            LabelNames::default(),
        )
        .unwrap();
        for seed in 0..50 {
            let v = make_validation_set(&tiny, seed).unwrap();
            assert!(v.len() == 1 || v.len() == 2);
            let labels: Vec<i8> = v.iter().map(|&i| tiny.labels()[i]).collect();
            assert!(labels.contains(&1) && labels.contains(&-1), "seed {seed}");
        }
    }
}
