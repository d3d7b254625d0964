//! SMO solver for the soft-margin C-SVM dual
//!
//! ```text
//! min_α  ½ αᵀQα − eᵀα   s.t.  0 ≤ αᵢ ≤ C,  yᵀα = 0,   Qᵢⱼ = yᵢyⱼK(xᵢ, xⱼ)
//! ```
//!
//! Working pairs are chosen by the maximal-violating-pair rule with
//! second-order selection of the partner index, with optional shrinking of
//! the active set.

use super::cache::KernelCache;
use super::{ModelParams, SvmModel};
use crate::dataset::{DataSet, LabelNames};
use crate::error::{MlsvmError, Result};
use crate::matrix::{squared_distance, Matrix};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop once the maximal KKT violation `m(α) − M(α)` drops below this.
    pub kkt_tolerance: f64,
    /// Maximum number of pair updates.
    pub max_iterations: usize,
    pub kernel_cache_bytes: usize,
    /// Temporarily drop bounded variables that are unlikely to move.
    pub shrinking: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            kkt_tolerance: 1e-3,
            max_iterations: 10_000_000,
            kernel_cache_bytes: 256 << 20,
            shrinking: true,
        }
    }
}

/// Solver output: the model plus the full dual solution.
#[derive(Debug, Clone)]
pub struct Fit {
    pub model: SvmModel,
    /// Training-row index of each support vector, aligned with the model.
    pub sv_indices: Vec<usize>,
    /// Dual variables for every training row.
    pub alpha: Vec<f64>,
    /// `eᵀα − ½ αᵀQα` at the returned point.
    pub dual_objective: f64,
    pub iterations: usize,
    /// Decision values `f(xᵢ)` on the training rows.
    pub training_decisions: Vec<f64>,
}

pub fn train(data: &DataSet, params: ModelParams, cfg: &SolverConfig) -> Result<Fit> {
    let mut fit = train_points(data.features(), data.labels(), params, cfg)?;
    fit.model.label_names = data.label_names().clone();
    Ok(fit)
}

pub fn train_points(
    points: &Matrix,
    labels: &[i8],
    params: ModelParams,
    cfg: &SolverConfig,
) -> Result<Fit> {
    params.validate()?;
    if cfg.kkt_tolerance.is_nan() || cfg.kkt_tolerance <= 0.0 {
        return Err(MlsvmError::InvalidConfig(format!(
            "KKT tolerance {} must be positive",
            cfg.kkt_tolerance
        )));
    }
    let n = points.rows();
    if labels.len() != n {
        return Err(MlsvmError::DimensionMismatch {
            expected: n,
            found: labels.len(),
        });
    }
    if n == 0 {
        return Err(MlsvmError::EmptyData);
    }
    if !(labels.iter().any(|&l| l > 0) && labels.iter().any(|&l| l < 0)) {
        return Err(MlsvmError::SingleClass);
    }

    let y: Vec<f64> = labels
        .iter()
        .map(|&l| if l > 0 { 1.0 } else { -1.0 })
        .collect();
    let c = params.c;
    let mut cache = KernelCache::new(points, params.gamma, cfg.kernel_cache_bytes);
    // RBF diagonal.
    let kd = 1.0;

    let mut alpha = vec![0.0f64; n];
    let mut grad = vec![-1.0f64; n];
    let mut active: Vec<usize> = (0..n).collect();
    let shrink_every = n.min(1000);
    let mut countdown = shrink_every;
    let mut unshrunk = false;
    let mut iterations = 0usize;
    let mut converged = false;

    while iterations < cfg.max_iterations {
        if cfg.shrinking {
            countdown -= 1;
            if countdown == 0 {
                countdown = shrink_every;
                let (up, low) = violations(&active, &alpha, &grad, &y, c);
                if !unshrunk && up + low <= 10.0 * cfg.kkt_tolerance {
                    unshrunk = true;
                    reconstruct_gradient(points, params.gamma, &y, &alpha, &mut grad, &active);
                    active = (0..n).collect();
                    cache.invalidate();
                }
                active.retain(|&t| !removable(t, up, low, &alpha, &grad, &y, c));
            }
        }

        let mut pair = select_pair(&active, &alpha, &grad, &y, c, cfg.kkt_tolerance, &mut cache);
        if pair.is_none() && active.len() < n {
            reconstruct_gradient(points, params.gamma, &y, &alpha, &mut grad, &active);
            active = (0..n).collect();
            cache.invalidate();
            pair = select_pair(&active, &alpha, &grad, &y, c, cfg.kkt_tolerance, &mut cache);
            countdown = 1;
        }
        let Some((i, j)) = pair else {
            converged = true;
            break;
        };
        iterations += 1;
        let k_i = cache.row(i, &active);
        let k_j = cache.row(j, &active);

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let q_ij = y[i] * y[j] * k_i[j];
        if y[i] != y[j] {
            let quad = (kd + kd + 2.0 * q_ij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (kd + kd - 2.0 * q_ij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let di = (alpha[i] - old_i) * y[i];
        let dj = (alpha[j] - old_j) * y[j];
        for &t in &active {
            grad[t] += y[t] * (k_i[t] * di + k_j[t] * dj);
        }
    }
    if active.len() < n {
        reconstruct_gradient(points, params.gamma, &y, &alpha, &mut grad, &active);
    }

    if !converged {
        log::warn!(
            "solver stopped after {iterations} iterations without reaching tolerance {}",
            cfg.kkt_tolerance
        );
    }

    log::trace!(
        "solver: n {n}, C {c:.4e}, gamma {:.4e}: {iterations} iterations, {} kernel rows computed",
        params.gamma,
        cache.misses
    );
    let rho = compute_rho(&alpha, &grad, &y, c);
    let bias = -rho;
    let dual_objective = 0.5
        * alpha
            .iter()
            .zip(&grad)
            .map(|(a, g)| a * (1.0 - g))
            .sum::<f64>();
    // Decision values from the gradient: f(xₜ) = yₜ(∇ₜ + 1) + b.
    let training_decisions: Vec<f64> = (0..n).map(|t| y[t] * (grad[t] + 1.0) + bias).collect();

    let sv_indices: Vec<usize> = (0..n).filter(|&t| alpha[t] > 0.0).collect();
    let support_vectors = points.select_rows(&sv_indices);
    let alphas_signed = sv_indices.iter().map(|&t| alpha[t] * y[t]).collect();

    Ok(Fit {
        model: SvmModel {
            support_vectors,
            alphas_signed,
            bias,
            params,
            training_size: n,
            converged,
            label_names: LabelNames::default(),
        },
        sv_indices,
        alpha,
        dual_objective,
        iterations,
        training_decisions,
    })
}

/// Largest violations `max_{I_up} −yᵢ∇ᵢ` and `max_{I_low} yᵢ∇ᵢ` over `active`.
fn violations(active: &[usize], alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> (f64, f64) {
    let (mut up, mut low) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &t in active {
        if y[t] > 0.0 {
            if alpha[t] < c {
                up = up.max(-grad[t]);
            }
            if alpha[t] > 0.0 {
                low = low.max(grad[t]);
            }
        } else {
            if alpha[t] < c {
                low = low.max(-grad[t]);
            }
            if alpha[t] > 0.0 {
                up = up.max(grad[t]);
            }
        }
    }
    (up, low)
}

/// A bounded variable whose gradient points firmly into its bound.
fn removable(t: usize, up: f64, low: f64, alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> bool {
    if alpha[t] >= c {
        if y[t] > 0.0 {
            -grad[t] > up
        } else {
            -grad[t] > low
        }
    } else if alpha[t] <= 0.0 {
        if y[t] > 0.0 {
            grad[t] > low
        } else {
            grad[t] > up
        }
    } else {
        false
    }
}

/// Maximal violating pair with second-order choice of `j`, or `None` once
/// the violation drops below `eps`.
fn select_pair(
    active: &[usize],
    alpha: &[f64],
    grad: &[f64],
    y: &[f64],
    c: f64,
    eps: f64,
    cache: &mut KernelCache<'_>,
) -> Option<(usize, usize)> {
    let kd = 1.0;
    let mut gmax = f64::NEG_INFINITY;
    let mut i_sel = None;
    for &t in active {
        if y[t] > 0.0 {
            if alpha[t] < c && -grad[t] > gmax {
                gmax = -grad[t];
                i_sel = Some(t);
            }
        } else if alpha[t] > 0.0 && grad[t] > gmax {
            gmax = grad[t];
            i_sel = Some(t);
        }
    }
    let i = i_sel?;
    let k_i = cache.row(i, active);

    let mut gmax2 = f64::NEG_INFINITY;
    let mut best_obj = f64::INFINITY;
    let mut j_sel = None;
    for &t in active {
        let (in_low, g) = if y[t] > 0.0 {
            (alpha[t] > 0.0, grad[t])
        } else {
            (alpha[t] < c, -grad[t])
        };
        if !in_low {
            continue;
        }
        gmax2 = gmax2.max(g);
        let b = gmax + g;
        if b > 0.0 {
            let a = kd + kd - 2.0 * k_i[t];
            let a = if a > 0.0 { a } else { TAU };
            let obj = -(b * b) / a;
            if obj < best_obj {
                best_obj = obj;
                j_sel = Some(t);
            }
        }
    }
    if gmax + gmax2 < eps {
        return None;
    }
    j_sel.map(|j| (i, j))
}

/// Recompute `∇ᵢ = yᵢ Σⱼ αⱼyⱼK(xᵢ, xⱼ) − 1` for every index outside `active`.
fn reconstruct_gradient(
    points: &Matrix,
    gamma: f64,
    y: &[f64],
    alpha: &[f64],
    grad: &mut [f64],
    active: &[usize],
) {
    let mut inactive = vec![true; alpha.len()];
    for &t in active {
        inactive[t] = false;
    }
    let stale: Vec<usize> = (0..alpha.len()).filter(|&t| inactive[t]).collect();
    let svs: Vec<usize> = (0..alpha.len()).filter(|&t| alpha[t] > 0.0).collect();
    let fresh = crate::par::map_slice(&stale, |&t| {
        let xt = points.row(t);
        let s: f64 = svs
            .iter()
            .map(|&j| alpha[j] * y[j] * (-gamma * squared_distance(xt, points.row(j))).exp())
            .sum();
        y[t] * s - 1.0
    });
    for (&t, g) in stale.iter().zip(fresh) {
        grad[t] = g;
    }
}

/// Offset `ρ` (decision = Σ αᵢyᵢK − ρ): the mean of `yᵢ∇ᵢ` over free
/// variables, or the midpoint of the feasible interval when none is free.
fn compute_rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut sum_free = 0.0;
    let mut n_free = 0usize;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    }
}

/// Largest KKT residual over the training rows, measured on `yᵢ f(xᵢ)`.
pub fn max_kkt_violation(alpha: &[f64], decisions: &[f64], labels: &[i8], c: f64) -> f64 {
    let mut worst = 0.0f64;
    for t in 0..alpha.len() {
        let margin = f64::from(labels[t]) * decisions[t];
        let v = if alpha[t] <= 0.0 {
            1.0 - margin
        } else if alpha[t] >= c {
            margin - 1.0
        } else {
            (margin - 1.0).abs()
        };
        worst = worst.max(v);
    }
    worst
}
