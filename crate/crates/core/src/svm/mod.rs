//! Binary C-SVM with an RBF kernel.

mod cache;
mod solver;

pub use solver::{max_kkt_violation, train, train_points, Fit, SolverConfig};

use std::io::{BufRead, Write};

use crate::dataset::LabelNames;
use crate::error::{MlsvmError, Result};
use crate::matrix::{squared_distance, Matrix};
use crate::par;

/// `exp(−γ‖x − y‖²)`.
pub fn rbf_kernel(x: &[f64], y: &[f64], gamma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(MlsvmError::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok((-gamma * squared_distance(x, y)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub c: f64,
    pub gamma: f64,
}

impl ModelParams {
    pub fn new(c: f64, gamma: f64) -> Result<Self> {
        let p = ModelParams { c, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn from_log2(log2_c: f64, log2_gamma: f64) -> Self {
        ModelParams {
            c: log2_c.exp2(),
            gamma: log2_gamma.exp2(),
        }
    }

    pub fn log2(&self) -> (f64, f64) {
        (self.c.log2(), self.gamma.log2())
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if ok(self.c) && ok(self.gamma) {
            Ok(())
        } else {
            Err(MlsvmError::InvalidConfig(format!(
                "C = {} and gamma = {} must be positive and finite",
                self.c, self.gamma
            )))
        }
    }
}

/// Dual-form model: `f(x) = Σ alphas_signed[i]·K(svᵢ, x) + bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub support_vectors: Matrix,
    pub alphas_signed: Vec<f64>,
    pub bias: f64,
    pub params: ModelParams,
    pub training_size: usize,
    pub converged: bool,
    pub label_names: LabelNames,
}

impl SvmModel {
    pub fn num_svs(&self) -> usize {
        self.alphas_signed.len()
    }

    pub fn dim(&self) -> usize {
        self.support_vectors.cols()
    }

    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(MlsvmError::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(self.decision_unchecked(x))
    }

    fn decision_unchecked(&self, x: &[f64]) -> f64 {
        let g = self.params.gamma;
        self.support_vectors
            .iter_rows()
            .zip(&self.alphas_signed)
            .map(|(sv, a)| a * (-g * squared_distance(sv, x)).exp())
            .sum::<f64>()
            + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> Result<i8> {
        Ok(sign(self.decision_value(x)?))
    }

    /// Labels for every row of `points`.
    pub fn predict_all(&self, points: &Matrix) -> Result<Vec<i8>> {
        if points.cols() != self.dim() {
            return Err(MlsvmError::DimensionMismatch {
                expected: self.dim(),
                found: points.cols(),
            });
        }
        Ok(par::map_range(points.rows(), |i| {
            sign(self.decision_unchecked(points.row(i)))
        }))
    }

    /// Text format: a `key value` header followed by one line per support
    /// vector `alpha_signed v1 ... vd`, all reals with 17 significant digits.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "mlsvm-model 1")?;
        writeln!(w, "dim {}", self.dim())?;
        writeln!(w, "support_vectors {}", self.num_svs())?;
        writeln!(w, "c {:.16e}", self.params.c)?;
        writeln!(w, "gamma {:.16e}", self.params.gamma)?;
        writeln!(w, "bias {:.16e}", self.bias)?;
        writeln!(w, "training_size {}", self.training_size)?;
        writeln!(w, "converged {}", self.converged)?;
        writeln!(w, "positive_label {}", self.label_names.positive)?;
        writeln!(w, "negative_label {}", self.label_names.negative)?;
        for (sv, a) in self.support_vectors.iter_rows().zip(&self.alphas_signed) {
            write!(w, "{a:.16e}")?;
            for v in sv {
                write!(w, " {v:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(r: R) -> Result<SvmModel> {
        let bad = |m: String| MlsvmError::ModelFormat(m);
        let mut lines = r.lines();
        let mut next = |what: &str| -> Result<String> {
            lines
                .next()
                .transpose()?
                .ok_or_else(|| bad(format!("unexpected end of file, expected {what}")))
        };
        let magic = next("header")?;
        if magic.trim() != "mlsvm-model 1" {
            return Err(bad(format!("unrecognised header `{magic}`")));
        }
        let mut field = |key: &str| -> Result<String> {
            let line = next(key)?;
            match line.split_once(' ') {
                Some((k, v)) if k == key => Ok(v.to_string()),
                _ => Err(bad(format!("expected `{key}`, found `{line}`"))),
            }
        };
        let num = |s: String, key: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|_| bad(format!("bad value for {key}: `{s}`")))
        };
        let int = |s: String, key: &str| -> Result<usize> {
            s.trim()
                .parse()
                .map_err(|_| bad(format!("bad value for {key}: `{s}`")))
        };
        let dim = int(field("dim")?, "dim")?;
        let m = int(field("support_vectors")?, "support_vectors")?;
        let c = num(field("c")?, "c")?;
        let gamma = num(field("gamma")?, "gamma")?;
        let bias = num(field("bias")?, "bias")?;
        let training_size = int(field("training_size")?, "training_size")?;
        let converged = field("converged")?.trim() == "true";
        let positive = field("positive_label")?;
        let negative = field("negative_label")?;
        let params = ModelParams::new(c, gamma)?;

        let mut alphas = Vec::with_capacity(m);
        let mut data = Vec::with_capacity(m * dim);
        for k in 0..m {
            let line = next(&format!("support vector {k}"))?;
            let vals = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| bad(format!("bad number `{t}`")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if vals.len() != dim + 1 {
                return Err(bad(format!(
                    "support vector {k} has {} values, expected {}",
                    vals.len(),
                    dim + 1
                )));
            }
            alphas.push(vals[0]);
            data.extend_from_slice(&vals[1..]);
        }
        Ok(SvmModel {
            support_vectors: Matrix::from_vec(m, dim, data)?,
            alphas_signed: alphas,
            bias,
            params,
            training_size,
            converged,
            label_names: LabelNames { positive, negative },
        })
    }
}

/// Sign with `sign(0) = +1`.
#[inline]
pub fn sign(v: f64) -> i8 {
    if v >= 0.0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kernel_values() {
        assert_eq!(rbf_kernel(&[1.0, 2.0], &[1.0, 2.0], 3.0).unwrap(), 1.0);
        let half = rbf_kernel(&[0.0], &[std::f64::consts::LN_2.sqrt()], 1.0).unwrap();
        assert_abs_diff_eq!(half, 0.5, epsilon = 1e-15);
        assert!(rbf_kernel(&[0.0], &[1.0], 1e-12).unwrap() > 1.0 - 1e-9);
        assert!(rbf_kernel(&[0.0], &[1.0, 2.0], 1.0).is_err());
    }

    #[test]
    fn sign_ties_go_positive() {
        assert_eq!(sign(0.7), 1);
        assert_eq!(sign(-0.7), -1);
        assert_eq!(sign(0.0), 1);
        assert_eq!(sign(-0.0), 1);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, f64::INFINITY).is_err());
        let p = ModelParams::from_log2(3.0, -2.0);
        assert_eq!((p.c, p.gamma), (8.0, 0.25));
        assert_eq!(p.log2(), (3.0, -2.0));
    }

    fn toy_model() -> SvmModel {
        SvmModel {
            support_vectors: Matrix::from_rows(&[vec![0.1, 1.0 / 3.0], vec![-2.0, 1e-300]])
                .unwrap(),
            alphas_signed: vec![0.7, -0.7],
            bias: std::f64::consts::E,
            params: ModelParams::new(10.0, 0.123456789).unwrap(),
            training_size: 17,
            converged: true,
            label_names: LabelNames {
                positive: "sick person".into(),
                negative: "healthy".into(),
            },
        }
    }

    #[test]
    fn model_file_round_trip_is_bit_exact() {
        let m = toy_model();
        let mut buf = Vec::new();
        m.write(&mut buf).unwrap();
        let back = SvmModel::read(buf.as_slice()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn truncated_model_file_is_rejected() {
        let mut buf = Vec::new();
        toy_model().write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        for cut in 0..lines.len() {
            let partial = lines[..cut].join("\n");
            assert!(SvmModel::read(partial.as_bytes()).is_err(), "cut {cut}");
        }
    }

    #[test]
    fn decision_dimension_checked() {
        assert!(toy_model().decision_value(&[1.0]).is_err());
        assert!(toy_model().predict_all(&Matrix::zeros(2, 3)).is_err());
    }
}
