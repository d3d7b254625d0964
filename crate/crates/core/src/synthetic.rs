//! Synthetic benchmark generators.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::dataset::{DataSet, LabelNames};
use crate::error::{MlsvmError, Result};
use crate::matrix::Matrix;
use crate::seed;

/// Two unit-covariance Gaussians in 20 dimensions at `±(2/√20)·1`, 3700
/// points each.
pub fn twonorm(seed: u64) -> DataSet {
    twonorm_sized(3700, 3700, 20, seed)
}

pub fn twonorm_sized(n_pos: usize, n_neg: usize, dim: usize, seed: u64) -> DataSet {
    let a = 2.0 / (dim as f64).sqrt();
    generate(n_pos, n_neg, dim, seed, |rng, label, out| {
        let mean = if label > 0 { a } else { -a };
        for v in out.iter_mut() {
            *v = mean + rng.sample::<f64, _>(StandardNormal);
        }
    })
}

/// Class `+1` is `N(0, 4I)`, class `−1` is `N((2/√20)·1, I)`; 20 dimensions,
/// 3700 points each.
pub fn ringnorm(seed: u64) -> DataSet {
    ringnorm_sized(3700, 3700, 20, seed)
}

pub fn ringnorm_sized(n_pos: usize, n_neg: usize, dim: usize, seed: u64) -> DataSet {
    let a = 2.0 / (dim as f64).sqrt();
    generate(n_pos, n_neg, dim, seed, |rng, label, out| {
        for v in out.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v = if label > 0 { 2.0 * z } else { a + z };
        }
    })
}

/// Two isotropic Gaussian blobs with standard deviation `spread`, centered at
/// `±(separation/2)·e₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Blobs {
    pub n_pos: usize,
    pub n_neg: usize,
    pub dim: usize,
    pub separation: f64,
    pub spread: f64,
}

impl Blobs {
    pub fn generate(&self, seed: u64) -> DataSet {
        let half = self.separation / 2.0;
        let spread = self.spread;
        generate(self.n_pos, self.n_neg, self.dim, seed, |rng, label, out| {
            for v in out.iter_mut() {
                *v = spread * rng.sample::<f64, _>(StandardNormal);
            }
            out[0] += if label > 0 { half } else { -half };
        })
    }
}

fn generate<F>(n_pos: usize, n_neg: usize, dim: usize, seed: u64, mut draw: F) -> DataSet
where
    F: FnMut(&mut seed::Rng, i8, &mut [f64]),
{
    let mut rng = seed::derived_rng(seed, "synthetic");
    let mut labels: Vec<i8> = std::iter::repeat_n(1, n_pos)
        .chain(std::iter::repeat_n(-1, n_neg))
        .collect();
    labels.shuffle(&mut rng);
    let mut features = Matrix::zeros(labels.len(), dim);
    for (i, &l) in labels.iter().enumerate() {
        draw(&mut rng, l, features.row_mut(i));
    }
    let names = LabelNames {
        positive: "1".into(),
        negative: "-1".into(),
    };
    DataSet::new(features, labels, names).expect("labels are ±1 and sized to the features")
}

/// Headerless CSV with the label name in the first column.
pub fn write_csv<W: Write>(data: &DataSet, mut w: W) -> Result<()> {
    if data.dim() == 0 {
        return Err(MlsvmError::InvalidConfig(
            "cannot write zero-width data".into(),
        ));
    }
    for (row, &l) in data.features().iter_rows().zip(data.labels()) {
        write!(w, "{}", data.label_names().name(l))?;
        for v in row {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}
