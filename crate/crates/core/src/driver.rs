//! End-to-end multilevel training, prediction, and cross-validation.

use std::time::{Duration, Instant};

use crate::clustering::ClusteringMethod;
use crate::dataset::{self, split_folds, standardize, DataSet};
use crate::error::{MlsvmError, Result};
use crate::hierarchy::{build_hierarchy, Hierarchy, LevelSummary};
use crate::knn::{build_knn_graph, KnnConfig};
use crate::matrix::Matrix;
use crate::model_select::{
    compute_metrics, make_validation_set, select_index, ud_first_sweep, ud_second_sweep,
    EvaluatedModel, Metrics, ParamGrid,
};
use crate::par;
use crate::seed;
use crate::svm::{train_points, Fit, ModelParams, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Train on the coarsest level, then refine level by level.
    Quality,
    /// Stop after training on the coarsest level.
    Fast,
}

impl std::str::FromStr for Mode {
    type Err = MlsvmError;

    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "quality" => Ok(Mode::Quality),
            "fast" => Ok(Mode::Fast),
            other => Err(MlsvmError::InvalidConfig(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub mode: Mode,
    pub clustering: ClusteringMethod,
    pub k_neighbors: usize,
    /// Coarsening stops once a level has fewer nodes than this.
    pub coarsest_threshold: usize,
    /// Refinement levels with more training points than this reuse the
    /// inherited parameters without a sweep.
    pub ms_skip_threshold: usize,
    pub sample_fraction: Option<f64>,
    /// Train with these parameters everywhere and skip model selection.
    pub fixed_params: Option<ModelParams>,
    pub seed: u64,
    pub solver: SolverConfig,
    pub grid: ParamGrid,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            mode: Mode::Quality,
            clustering: ClusteringMethod::default(),
            k_neighbors: 10,
            coarsest_threshold: 500,
            ms_skip_threshold: 10_000,
            sample_fraction: None,
            fixed_params: None,
            seed: 0,
            solver: SolverConfig::default(),
            grid: ParamGrid::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(MlsvmError::InvalidConfig(m));
        if self.k_neighbors == 0 {
            return bad("k_neighbors must be positive".into());
        }
        if self.coarsest_threshold == 0 || self.ms_skip_threshold == 0 {
            return bad("thresholds must be positive".into());
        }
        if let Some(p) = self.sample_fraction {
            if !(p > 0.0 && p <= 1.0) {
                return bad(format!("sample fraction {p} outside (0, 1]"));
            }
        }
        if let Some(p) = self.fixed_params {
            p.validate()?;
        }
        self.clustering
            .validate()
            .map_err(MlsvmError::InvalidConfig)?;
        self.grid.validate()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimes {
    pub sampling: Duration,
    /// k-NN graphs and hierarchies for both classes.
    pub coarsening: Duration,
    pub initial_training: Duration,
    pub refinement: Duration,
    pub total: Duration,
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub best: EvaluatedModel,
    /// One entry per trained level; the first is the coarsest.
    pub per_level: Vec<EvaluatedModel>,
    /// Training-set size behind each entry of `per_level`.
    pub training_sizes: Vec<usize>,
    pub positive_hierarchy: Vec<LevelSummary>,
    pub negative_hierarchy: Vec<LevelSummary>,
    pub wall_times: PhaseTimes,
    /// Rows of the input data used for validation.
    pub validation_indices: Vec<usize>,
    /// Refinement steps in which only one class was uncontracted.
    pub alignment_steps: usize,
}

/// Training points tagged with their class and hierarchy node.
struct LevelProblem {
    points: Matrix,
    labels: Vec<i8>,
    /// Hierarchy node id of each point; positives first.
    nodes: Vec<usize>,
    n_pos: usize,
}

impl LevelProblem {
    fn new(
        pos: &Hierarchy,
        pos_level: usize,
        pos_nodes: Vec<usize>,
        neg: &Hierarchy,
        neg_level: usize,
        neg_nodes: Vec<usize>,
    ) -> Self {
        let pf = pos.graph(pos_level).node_features();
        let nf = neg.graph(neg_level).node_features();
        let mut points = Matrix::zeros(0, pf.cols());
        for &v in &pos_nodes {
            points
                .push_row(pf.row(v))
                .expect("both classes share a width");
        }
        for &v in &neg_nodes {
            points
                .push_row(nf.row(v))
                .expect("both classes share a width");
        }
        let n_pos = pos_nodes.len();
        let labels = std::iter::repeat_n(1, n_pos)
            .chain(std::iter::repeat_n(-1, neg_nodes.len()))
            .collect();
        let mut nodes = pos_nodes;
        nodes.extend(neg_nodes);
        LevelProblem {
            points,
            labels,
            nodes,
            n_pos,
        }
    }

    fn len(&self) -> usize {
        self.labels.len()
    }

    /// Support-vector node ids of each class.
    fn sv_nodes(&self, fit: &Fit) -> (Vec<usize>, Vec<usize>) {
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for &i in &fit.sv_indices {
            if i < self.n_pos {
                pos.push(self.nodes[i]);
            } else {
                neg.push(self.nodes[i]);
            }
        }
        (pos, neg)
    }

    fn class_nodes(&self) -> (Vec<usize>, Vec<usize>) {
        (
            self.nodes[..self.n_pos].to_vec(),
            self.nodes[self.n_pos..].to_vec(),
        )
    }
}

struct Trained {
    fit: Fit,
    eval: EvaluatedModel,
}

struct Evaluator<'a> {
    validation: &'a DataSet,
    solver: &'a SolverConfig,
    names: &'a dataset::LabelNames,
}

impl Evaluator<'_> {
    fn train_one(
        &self,
        problem: &LevelProblem,
        params: ModelParams,
        level: usize,
    ) -> Result<Trained> {
        let mut fit = train_points(&problem.points, &problem.labels, params, self.solver)?;
        fit.model.label_names = self.names.clone();
        let metrics = predict_dataset(&fit.model, self.validation)?;
        let eval = EvaluatedModel::new(fit.model.clone(), metrics, level);
        Ok(Trained { fit, eval })
    }

    /// Train every parameter point concurrently, in design order.
    fn train_all(
        &self,
        problem: &LevelProblem,
        points: &[(f64, f64)],
        level: usize,
    ) -> Result<Vec<Trained>> {
        let results = par::map_slice(points, |&(lc, lg)| {
            self.train_one(problem, ModelParams::from_log2(lc, lg), level)
        });
        let trained = results.into_iter().collect::<Result<Vec<_>>>()?;
        for t in &trained {
            let (lc, lg) = t.eval.model.params.log2();
            log::debug!(
                "level {level}: log2C {lc:.3} log2g {lg:.3} -> {}",
                t.eval.report_line()
            );
        }
        Ok(trained)
    }

    fn sweep(
        &self,
        problem: &LevelProblem,
        points: &[(f64, f64)],
        level: usize,
    ) -> Result<Trained> {
        pick(self.train_all(problem, points, level)?)
    }
}

fn pick(mut trained: Vec<Trained>) -> Result<Trained> {
    let evals: Vec<EvaluatedModel> = trained.iter().map(|t| t.eval.clone()).collect();
    let i = select_index(&evals)?;
    Ok(trained.swap_remove(i))
}

/// k-NN graph and coarsening hierarchy of each class, built concurrently.
/// Returns `(minority, majority)`.
pub fn build_class_hierarchies(
    data: &DataSet,
    cfg: &TrainConfig,
) -> Result<(Hierarchy, Hierarchy)> {
    let knn = KnnConfig::with_k(cfg.k_neighbors);
    let build = |label: i8, tag: &str| -> Result<Hierarchy> {
        let points = data.features().select_rows(&data.class_indices(label));
        let g = build_knn_graph(&points, &knn)?;
        Ok(build_hierarchy(
            g,
            &cfg.clustering,
            cfg.coarsest_threshold,
            seed::derive(cfg.seed, tag),
        ))
    };
    let (pos, neg) = par::join(|| build(1, "hierarchy/pos"), || build(-1, "hierarchy/neg"));
    Ok((pos?, neg?))
}

/// Multilevel training on `train`. The returned model predicts in the
/// feature space of `train` (no scaling is applied here).
pub fn train_multilevel(train: &DataSet, cfg: &TrainConfig) -> Result<TrainReport> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(MlsvmError::EmptyData);
    }
    if !train.has_both_classes() {
        return Err(MlsvmError::SingleClass);
    }
    let start = Instant::now();
    let mut times = PhaseTimes::default();

    let sampled;
    let data = match cfg.sample_fraction {
        Some(p) if p < 1.0 => {
            sampled = dataset::sample(train, p, seed::derive(cfg.seed, "sample"))?;
            &sampled
        }
        _ => train,
    };
    if !data.has_both_classes() {
        return Err(MlsvmError::SingleClass);
    }
    let validation_indices = make_validation_set(train, seed::derive(cfg.seed, "validation"))?;
    let validation = train.subset(&validation_indices);
    times.sampling = start.elapsed();

    let phase = Instant::now();
    let (pos, neg) = build_class_hierarchies(data, cfg)?;
    times.coarsening = phase.elapsed();
    log::info!(
        "hierarchy depth: minority {} ({} -> {} nodes), majority {} ({} -> {} nodes)",
        pos.depth(),
        pos.graph(0).n(),
        pos.coarsest().n(),
        neg.depth(),
        neg.graph(0).n(),
        neg.coarsest().n()
    );

    let ev = Evaluator {
        validation: &validation,
        solver: &cfg.solver,
        names: data.label_names(),
    };

    let phase = Instant::now();
    let (mut lp, mut ln) = (pos.depth() - 1, neg.depth() - 1);
    let mut problem = LevelProblem::new(
        &pos,
        lp,
        (0..pos.coarsest().n()).collect(),
        &neg,
        ln,
        (0..neg.coarsest().n()).collect(),
    );
    let mut current = match cfg.fixed_params {
        Some(p) => ev.train_one(&problem, p, lp.max(ln))?,
        None => {
            let level = lp.max(ln);
            let first = ev.train_all(&problem, &ud_first_sweep(&cfg.grid), level)?;
            let evals: Vec<EvaluatedModel> = first.iter().map(|t| t.eval.clone()).collect();
            let center = evals[select_index(&evals)?].model.params.log2();
            let mut all = first;
            all.extend(ev.train_all(&problem, &ud_second_sweep(&cfg.grid, center), level)?);
            pick(all)?
        }
    };
    times.initial_training = phase.elapsed();
    let mut per_level = vec![current.eval.clone()];
    let mut training_sizes = vec![problem.len()];
    let mut alignment_steps = 0;

    let phase = Instant::now();
    if cfg.mode == Mode::Quality {
        while lp > 0 || ln > 0 {
            let (sv_pos, sv_neg) = problem.sv_nodes(&current.fit);
            let (all_pos, all_neg) = problem.class_nodes();
            let (step_pos, step_neg) = match lp.cmp(&ln) {
                std::cmp::Ordering::Equal => (true, true),
                std::cmp::Ordering::Greater => (true, false),
                std::cmp::Ordering::Less => (false, true),
            };
            if step_pos != step_neg {
                alignment_steps += 1;
            }
            // A class that is not uncontracted this step keeps all its points.
            let next_pos = if step_pos {
                lp -= 1;
                pos.uncontract(lp + 1, if sv_pos.is_empty() { &all_pos } else { &sv_pos })?
            } else {
                all_pos
            };
            let next_neg = if step_neg {
                ln -= 1;
                neg.uncontract(ln + 1, if sv_neg.is_empty() { &all_neg } else { &sv_neg })?
            } else {
                all_neg
            };
            problem = LevelProblem::new(&pos, lp, next_pos, &neg, ln, next_neg);
            let inherited = current.eval.model.params;
            let level = lp.max(ln);
            current = if cfg.fixed_params.is_none() && problem.len() <= cfg.ms_skip_threshold {
                ev.sweep(
                    &problem,
                    &ud_second_sweep(&cfg.grid, inherited.log2()),
                    level,
                )?
            } else {
                ev.train_one(&problem, inherited, level)?
            };
            log::info!(
                "level {level}: {} points ({} minority), {}",
                problem.len(),
                problem.n_pos,
                current.eval.report_line()
            );
            per_level.push(current.eval.clone());
            training_sizes.push(problem.len());
        }
    }
    times.refinement = phase.elapsed();

    let best = per_level[select_index(&per_level)?].clone();
    times.total = start.elapsed();
    Ok(TrainReport {
        best,
        per_level,
        training_sizes,
        positive_hierarchy: pos.summary(),
        negative_hierarchy: neg.summary(),
        wall_times: times,
        validation_indices,
        alignment_steps,
    })
}

/// Metrics of `model` on the labeled rows of `data`.
pub fn predict_dataset(model: &crate::svm::SvmModel, data: &DataSet) -> Result<Metrics> {
    if data.is_empty() {
        return Err(MlsvmError::EmptyData);
    }
    let predictions = model.predict_all(data.features())?;
    compute_metrics(&predictions, data.labels())
}

#[derive(Debug, Clone)]
pub struct CvRun {
    pub rep: usize,
    pub fold: usize,
    pub metrics: Metrics,
    pub num_svs: usize,
    pub level: usize,
    pub train_time: Duration,
    pub phase_times: PhaseTimes,
    /// Held-out rows of the input data.
    pub test_indices: Vec<usize>,
    /// Rows of the input data used for validation while training.
    pub validation_indices: Vec<usize>,
    pub positive_depth: usize,
    pub negative_depth: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CvSummary {
    pub sn: f64,
    pub sp: f64,
    pub gmean: f64,
    pub accuracy: f64,
    pub num_svs: f64,
    pub train_time: Duration,
}

#[derive(Debug, Clone)]
pub struct CvReport {
    pub k: usize,
    pub repetitions: usize,
    /// Ordered by repetition, then fold.
    pub runs: Vec<CvRun>,
    pub mean: CvSummary,
}

/// Repeated k-fold cross-validation. Each run standardizes with its own
/// training-fold statistics, trains, and is scored on the held-out fold.
pub fn cross_validate(
    data: &DataSet,
    cfg: &TrainConfig,
    k: usize,
    repetitions: usize,
) -> Result<CvReport> {
    cfg.validate()?;
    if repetitions == 0 {
        return Err(MlsvmError::InvalidConfig(
            "repetitions must be at least 1".into(),
        ));
    }
    let plans = (0..repetitions)
        .map(|r| split_folds(data.len(), k, seed::derive(cfg.seed, &format!("folds/{r}"))))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..repetitions)
        .flat_map(|r| (0..k).map(move |f| (r, f)))
        .collect();
    let runs = par::map_slice(&jobs, |&(rep, fold)| -> Result<CvRun> {
        let plan = &plans[rep];
        let train_idx = plan.train_indices(fold);
        let test_idx = plan.test_indices(fold);
        let (train, test) = standardize(&data.subset(&train_idx), &[data.subset(&test_idx)])?;
        let run_cfg = TrainConfig {
            seed: seed::derive(cfg.seed, &format!("run/{rep}/{fold}")),
            ..cfg.clone()
        };
        let started = Instant::now();
        let report = train_multilevel(&train, &run_cfg)?;
        let train_time = started.elapsed();
        let metrics = predict_dataset(&report.best.model, &test[0])?;
        Ok(CvRun {
            rep,
            fold,
            metrics,
            num_svs: report.best.num_svs,
            level: report.best.level,
            train_time,
            phase_times: report.wall_times,
            validation_indices: report
                .validation_indices
                .iter()
                .map(|&i| train_idx[i])
                .collect(),
            test_indices: test_idx,
            positive_depth: report.positive_hierarchy.len(),
            negative_depth: report.negative_hierarchy.len(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let n = runs.len() as f64;
    let mean_of = |f: &dyn Fn(&CvRun) -> f64| runs.iter().map(f).sum::<f64>() / n;
    let mean = CvSummary {
        sn: mean_of(&|r| r.metrics.sn),
        sp: mean_of(&|r| r.metrics.sp),
        gmean: mean_of(&|r| r.metrics.gmean),
        accuracy: mean_of(&|r| r.metrics.accuracy),
        num_svs: mean_of(&|r| r.num_svs as f64),
        train_time: runs.iter().map(|r| r.train_time).sum::<Duration>() / runs.len() as u32,
    };
    Ok(CvReport {
        k,
        repetitions,
        runs,
        mean,
    })
}
