//! Canonical dense labeled data and the preprocessing around it: label
//! orientation, standardization, fold splitting and subsampling.

mod table;

pub use table::{
    canonical_label, one_hot_encode, parse, parse_csv, parse_sparse, Cell, Column, ColumnKind,
    CsvOptions, Format, LabelColumn, OneHotSchema, RawTable,
};

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{MlsvmError, Result};
use crate::matrix::Matrix;
use crate::seed;

/// Columns whose standard deviation falls below this are centered only.
pub const CONSTANT_COLUMN_STD: f64 = 1e-12;

/// Original spelling of the two classes. `positive` is the minority class
/// and carries label `+1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelNames {
    pub positive: String,
    pub negative: String,
}

impl LabelNames {
    pub fn name(&self, label: i8) -> &str {
        if label > 0 {
            &self.positive
        } else {
            &self.negative
        }
    }

    pub fn label_of(&self, name: &str) -> Option<i8> {
        let c = canonical_label(name);
        if c == self.positive {
            Some(1)
        } else if c == self.negative {
            Some(-1)
        } else {
            None
        }
    }
}

impl Default for LabelNames {
    fn default() -> Self {
        LabelNames {
            positive: "1".into(),
            negative: "-1".into(),
        }
    }
}

/// Per-column mean and population standard deviation of a training set.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingStats {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl ScalingStats {
    pub fn fit(features: &Matrix) -> Result<ScalingStats> {
        let n = features.rows();
        if n == 0 {
            return Err(MlsvmError::EmptyData);
        }
        let d = features.cols();
        let mut means = vec![0.0; d];
        for row in features.iter_rows() {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n as f64);
        let mut vars = vec![0.0; d];
        for row in features.iter_rows() {
            for ((s, v), m) in vars.iter_mut().zip(row).zip(&means) {
                let c = v - m;
                *s += c * c;
            }
        }
        let stds = vars.into_iter().map(|s| (s / n as f64).sqrt()).collect();
        Ok(ScalingStats { means, stds })
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    fn divisor(std: f64) -> f64 {
        if std < CONSTANT_COLUMN_STD {
            1.0
        } else {
            std
        }
    }

    pub fn apply(&self, features: &Matrix) -> Result<Matrix> {
        if features.cols() != self.dim() {
            return Err(MlsvmError::DimensionMismatch {
                expected: self.dim(),
                found: features.cols(),
            });
        }
        let mut out = features.clone();
        for i in 0..out.rows() {
            for ((v, m), s) in out.row_mut(i).iter_mut().zip(&self.means).zip(&self.stds) {
                *v = (*v - m) / Self::divisor(*s);
            }
        }
        Ok(out)
    }

    /// Two lines: means, then standard deviations, 17 significant digits.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for row in [&self.means, &self.stds] {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(r: R) -> Result<ScalingStats> {
        let mut rows = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let vals = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>().map_err(|_| MlsvmError::Parse {
                        line: i + 1,
                        message: format!("bad number `{t}`"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(vals);
        }
        if rows.len() != 2 {
            return Err(MlsvmError::Structural {
                line: rows.len(),
                message: "scaling file needs exactly two rows".into(),
            });
        }
        let stds = rows.pop().unwrap_or_default();
        let means = rows.pop().unwrap_or_default();
        if means.len() != stds.len() {
            return Err(MlsvmError::Structural {
                line: 2,
                message: "means and stds differ in length".into(),
            });
        }
        Ok(ScalingStats { means, stds })
    }
}

/// Dense features with `±1` labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    features: Matrix,
    labels: Vec<i8>,
    n_pos: usize,
    label_names: LabelNames,
    scaling: Option<ScalingStats>,
}

impl DataSet {
    pub fn new(features: Matrix, labels: Vec<i8>, label_names: LabelNames) -> Result<DataSet> {
        if features.rows() != labels.len() {
            return Err(MlsvmError::DimensionMismatch {
                expected: features.rows(),
                found: labels.len(),
            });
        }
        if let Some(bad) = labels.iter().find(|&&l| l != 1 && l != -1) {
            return Err(MlsvmError::InvalidConfig(format!("label {bad} is not ±1")));
        }
        let n_pos = labels.iter().filter(|&&l| l > 0).count();
        Ok(DataSet {
            features,
            labels,
            n_pos,
            label_names,
            scaling: None,
        })
    }

    /// Build from an encoded table. The less frequent label becomes `+1`
    /// (first-seen label on a tie).
    pub fn from_table(table: &RawTable) -> Result<DataSet> {
        let lc = table
            .label_column
            .ok_or_else(|| MlsvmError::InvalidConfig("table has no label column".into()))?;
        let mut names: Vec<(String, usize)> = Vec::new();
        let mut raw_labels = Vec::with_capacity(table.rows.len());
        for row in &table.rows {
            let name = match &row[lc] {
                Cell::Text(s) => s.clone(),
                Cell::Num(v) => format!("{v}"),
            };
            match names.iter_mut().find(|(n, _)| *n == name) {
                Some((_, count)) => *count += 1,
                None => names.push((name.clone(), 1)),
            }
            raw_labels.push(name);
        }
        if names.len() != 2 {
            return Err(MlsvmError::ClassCount(names.len()));
        }
        let (pos, neg) = if names[1].1 < names[0].1 {
            (1, 0)
        } else {
            (0, 1)
        };
        let label_names = LabelNames {
            positive: names[pos].0.clone(),
            negative: names[neg].0.clone(),
        };
        let labels = raw_labels
            .iter()
            .map(|n| if *n == label_names.positive { 1 } else { -1 })
            .collect();
        DataSet::new(feature_matrix(table)?, labels, label_names)
    }

    /// Build from an encoded table using an existing label mapping.
    pub fn from_table_with_names(table: &RawTable, names: &LabelNames) -> Result<DataSet> {
        let lc = table
            .label_column
            .ok_or_else(|| MlsvmError::InvalidConfig("table has no label column".into()))?;
        let labels = table
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let name = match &row[lc] {
                    Cell::Text(s) => s.clone(),
                    Cell::Num(v) => format!("{v}"),
                };
                names.label_of(&name).ok_or_else(|| MlsvmError::Parse {
                    line: i + 1,
                    message: format!("unknown label `{name}`"),
                })
            })
            .collect::<Result<Vec<i8>>>()?;
        DataSet::new(feature_matrix(table)?, labels, names.clone())
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn n_pos(&self) -> usize {
        self.n_pos
    }

    pub fn n_neg(&self) -> usize {
        self.labels.len() - self.n_pos
    }

    pub fn has_both_classes(&self) -> bool {
        self.n_pos > 0 && self.n_neg() > 0
    }

    pub fn label_names(&self) -> &LabelNames {
        &self.label_names
    }

    /// Statistics this set was standardized with, if any.
    pub fn scaling(&self) -> Option<&ScalingStats> {
        self.scaling.as_ref()
    }

    /// Indices of rows carrying `label`.
    pub fn class_indices(&self, label: i8) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.labels[i] == label)
            .collect()
    }

    /// Rows `indices` in that order. Label orientation is inherited.
    pub fn subset(&self, indices: &[usize]) -> DataSet {
        let labels: Vec<i8> = indices.iter().map(|&i| self.labels[i]).collect();
        let n_pos = labels.iter().filter(|&&l| l > 0).count();
        DataSet {
            features: self.features.select_rows(indices),
            labels,
            n_pos,
            label_names: self.label_names.clone(),
            scaling: self.scaling.clone(),
        }
    }

    pub fn with_scaling(&self, stats: &ScalingStats) -> Result<DataSet> {
        Ok(DataSet {
            features: stats.apply(&self.features)?,
            labels: self.labels.clone(),
            n_pos: self.n_pos,
            label_names: self.label_names.clone(),
            scaling: Some(stats.clone()),
        })
    }

    /// Sparse text with original label names. The last column is always
    /// written so the dimension survives a reparse.
    pub fn write_sparse_text<W: Write>(&self, mut w: W) -> Result<()> {
        let d = self.dim();
        for (row, &label) in self.features.iter_rows().zip(&self.labels) {
            write!(w, "{}", self.label_names.name(label))?;
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 || j + 1 == d {
                    write!(w, " {}:{}", j + 1, v)?;
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Numeric feature columns of an encoded table, label column dropped.
pub fn feature_matrix(table: &RawTable) -> Result<Matrix> {
    let feature_cols: Vec<usize> = (0..table.columns.len())
        .filter(|&j| Some(j) != table.label_column)
        .collect();
    let mut data = Vec::with_capacity(table.rows.len() * feature_cols.len());
    for (i, row) in table.rows.iter().enumerate() {
        for &j in &feature_cols {
            data.push(row[j].as_num().ok_or_else(|| MlsvmError::Parse {
                line: i + 1,
                message: format!("column `{}` is not numeric", table.columns[j].name),
            })?);
        }
    }
    Matrix::from_vec(table.rows.len(), feature_cols.len(), data)
}

/// Standardize `train` and transform `others` with the training statistics.
pub fn standardize(train: &DataSet, others: &[DataSet]) -> Result<(DataSet, Vec<DataSet>)> {
    let stats = ScalingStats::fit(train.features())?;
    let train = train.with_scaling(&stats)?;
    let others = others
        .iter()
        .map(|o| o.with_scaling(&stats))
        .collect::<Result<Vec<_>>>()?;
    Ok((train, others))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub assignment: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Shuffle, then deal indices round-robin into `k` folds.
pub fn split_folds(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(MlsvmError::InvalidConfig(format!("fold count {k} < 2")));
    }
    if k > n {
        return Err(MlsvmError::InvalidConfig(format!(
            "fold count {k} exceeds data size {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(seed));
    let mut assignment = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        assignment[i] = pos % k;
    }
    Ok(FoldPlan {
        k,
        assignment,
        seed,
    })
}

/// `⌈fraction·n⌉`, tolerant of representation error in `fraction`.
pub fn sample_size(n: usize, fraction: f64) -> usize {
    ((fraction * n as f64 - 1e-9).ceil() as usize).clamp(1, n.max(1))
}

/// Draw `size` of the `labels` indices uniformly without replacement. When
/// the source holds both classes and `size >= 2`, a class missing from the
/// draw is injected by replacing a uniformly chosen drawn index with a
/// uniformly chosen index of the missing class. When `size == 1` and
/// `grow_to_cover` is set the missing class is appended instead.
pub fn draw_covering(labels: &[i8], size: usize, grow_to_cover: bool, seed: u64) -> Vec<usize> {
    let n = labels.len();
    let mut rng = seed::rng(seed);
    let mut picked = rand::seq::index::sample(&mut rng, n, size.min(n)).into_vec();
    for class in [1i8, -1] {
        if picked.iter().any(|&i| labels[i] == class) {
            continue;
        }
        let pool: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
        if pool.is_empty() || picked.is_empty() {
            continue;
        }
        let donor = pool[rng.random_range(0..pool.len())];
        if picked.len() >= 2 {
            let slot = rng.random_range(0..picked.len());
            picked[slot] = donor;
        } else if grow_to_cover {
            picked.push(donor);
        }
    }
    picked
}

/// Uniform random subsample of `⌈p·n⌉` rows (see [`draw_covering`]).
pub fn sample_indices(data: &DataSet, p: f64, seed: u64) -> Result<Vec<usize>> {
    if data.is_empty() {
        return Err(MlsvmError::EmptyData);
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(MlsvmError::InvalidConfig(format!(
            "sample fraction {p} outside (0, 1]"
        )));
    }
    Ok(draw_covering(
        data.labels(),
        sample_size(data.len(), p),
        false,
        seed,
    ))
}

pub fn sample(data: &DataSet, p: f64, seed: u64) -> Result<DataSet> {
    Ok(data.subset(&sample_indices(data, p, seed)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn toy(features: Vec<Vec<f64>>, labels: Vec<i8>) -> DataSet {
        DataSet::new(
            Matrix::from_rows(&features).unwrap(),
            labels,
            LabelNames::default(),
        )
        .unwrap()
    }

    #[test]
    fn minority_becomes_positive() {
        let t = parse_csv("a,1\nb,2\nb,3\n".as_bytes(), &CsvOptions::default()).unwrap();
        let d = DataSet::from_table(&t).unwrap();
        assert_eq!(d.label_names().positive, "a");
        assert_eq!(d.labels(), &[1, -1, -1]);
        assert_eq!((d.n_pos(), d.n_neg()), (1, 2));
    }

    #[test]
    fn three_labels_rejected() {
        let t = parse_csv("a,1\nb,2\nc,3\n".as_bytes(), &CsvOptions::default()).unwrap();
        assert!(matches!(
            DataSet::from_table(&t),
            Err(MlsvmError::ClassCount(3))
        ));
    }

    #[test]
    fn standardize_hand_computed() {
        let train = toy(
            vec![vec![2.0, 5.0], vec![4.0, 5.0], vec![6.0, 5.0]],
            vec![1, -1, -1],
        );
        let test = toy(vec![vec![4.0, 5.0]], vec![1]);
        let (tr, others) = standardize(&train, &[test]).unwrap();
        let s = (8.0f64 / 3.0).sqrt();
        assert_abs_diff_eq!(s, 1.63299, epsilon = 1e-5);
        assert_abs_diff_eq!(tr.features().row(0)[0], -2.0 / s, epsilon = 1e-15);
        assert_abs_diff_eq!(tr.features().row(0)[0], -1.224744871391589, epsilon = 1e-12);
        assert_eq!(tr.features().row(1)[0], 0.0);
        assert_abs_diff_eq!(tr.features().row(2)[0], 2.0 / s, epsilon = 1e-15);
        for i in 0..3 {
            assert_eq!(tr.features().row(i)[1], 0.0);
        }
        assert_eq!(tr.scaling().unwrap().stds[1], 0.0);
        assert_eq!(others[0].features().row(0), &[0.0, 0.0]);
    }

    #[test]
    fn standardize_dimension_mismatch() {
        let train = toy(vec![vec![1.0, 2.0]], vec![1]);
        let other = toy(vec![vec![1.0]], vec![1]);
        assert!(matches!(
            standardize(&train, &[other]),
            Err(MlsvmError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn scaling_file_round_trip_is_exact() {
        let stats = ScalingStats {
            means: vec![0.1, -1.0 / 3.0, 1e-300],
            stds: vec![std::f64::consts::PI, 0.0, 12345.678],
        };
        let mut buf = Vec::new();
        stats.write(&mut buf).unwrap();
        assert_eq!(String::from_utf8_lossy(&buf).lines().count(), 2);
        let back = ScalingStats::read(buf.as_slice()).unwrap();
        assert_eq!(back, stats);
    }

    #[test]
    fn folds_balanced_and_deterministic() {
        let p = split_folds(10, 5, 1).unwrap();
        assert_eq!(p.fold_sizes(), vec![2; 5]);
        let p = split_folds(11, 5, 1).unwrap();
        let mut sizes = p.fold_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 2, 2, 3]);
        assert_eq!(split_folds(11, 5, 1).unwrap(), p);
        assert!(split_folds(3, 5, 1).is_err());
        assert!(split_folds(3, 1, 1).is_err());
    }

    #[test]
    fn sample_sizes() {
        let labels: Vec<i8> = (0..1000).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        let d = toy(vec![vec![0.0]; 1000], labels);
        assert_eq!(sample(&d, 0.05, 3).unwrap().len(), 50);
        let mut full = sample_indices(&d, 1.0, 3).unwrap();
        full.sort_unstable();
        assert_eq!(full, (0..1000).collect::<Vec<_>>());
        assert!(sample(&d, 0.0, 3).is_err());
        assert!(sample(&d, 1.5, 3).is_err());
    }

    #[test]
    fn sample_injects_minority_for_every_seed() {
        let mut labels = vec![-1i8; 1000];
        labels[617] = 1;
        let d = toy(vec![vec![0.0]; 1000], labels);
        for seed in 0..200 {
            let s = sample(&d, 0.01, seed).unwrap();
            assert_eq!(s.len(), 10);
            assert_eq!(s.n_pos(), 1, "seed {seed}");
        }
    }

    #[test]
    fn sparse_write_keeps_dimension() {
        let d = toy(vec![vec![1.5, 0.0, 0.0], vec![0.0, 0.0, 0.0]], vec![1, -1]);
        let mut buf = Vec::new();
        d.write_sparse_text(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "1 1:1.5 3:0\n-1 3:0\n"
        );
        let back = DataSet::from_table(&parse_sparse(buf.as_slice()).unwrap()).unwrap();
        assert_eq!(back.features(), d.features());
    }
}
