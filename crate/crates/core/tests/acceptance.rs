//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use mlsvm::clustering::{label_propagation, low_diameter, ClusteringMethod, LdConfig, LpConfig};
use mlsvm::dataset::{standardize, DataSet};
use mlsvm::driver::{
    cross_validate, predict_dataset, train_multilevel, CvReport, Mode, TrainConfig,
};
use mlsvm::hierarchy::build_hierarchy;
use mlsvm::knn::{build_knn_graph, KnnConfig};
use mlsvm::model_select::compute_metrics;
use mlsvm::par;
use mlsvm::svm::{max_kkt_violation, train_points, ModelParams, SolverConfig};
use mlsvm::synthetic::{self, Blobs};

const SEED: u64 = 42;

const TWONORM_MIN_GMEAN: f64 = 0.94;
const TWONORM_MAX_SECONDS: f64 = 120.0;
const RINGNORM_MIN_GMEAN: f64 = 0.90;
const FAST_MAX_TIME_RATIO: f64 = 0.5;
const FAST_MAX_GMEAN_GAP: f64 = 0.05;
const IMBALANCED_MIN_GMEAN: f64 = 0.95;
const ORACLE_PROBLEMS: u64 = 50;
const ORACLE_MAX_N: usize = 30;
const ORACLE_REL_TOL: f64 = 1e-5;
const KKT_TOL: f64 = 1e-3;
const LD_RUNS: u64 = 1000;
const LD_MIN_RATE: f64 = 0.99;
const CONSERVATION_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cv(data: &DataSet, clustering: ClusteringMethod) -> CvReport {
    let cfg = TrainConfig {
        clustering,
        seed: SEED,
        ..TrainConfig::default()
    };
    cross_validate(data, &cfg, 5, 5).expect("cross-validation runs")
}

fn twonorm() -> Outcome {
    let data = synthetic::twonorm(SEED);
    let started = Instant::now();
    let report = par::with_threads(Some(1), || cv(&data, ClusteringMethod::default()));
    let secs = started.elapsed().as_secs_f64();
    let g = report.mean.gmean;
    check(
        report.runs.len() == 25 && g >= TWONORM_MIN_GMEAN && secs <= TWONORM_MAX_SECONDS,
        format!(
            "twonorm 5x5 cv, LP, 1 thread: mean G-mean {g:.4} (>= {TWONORM_MIN_GMEAN}), {secs:.1} s (<= {TWONORM_MAX_SECONDS})"
        ),
    )
}

struct RingnormRuns {
    lp: CvReport,
    ld: CvReport,
}

fn ringnorm(runs: &RingnormRuns) -> Outcome {
    let (lp, ld) = (runs.lp.mean.gmean, runs.ld.mean.gmean);
    check(
        lp >= RINGNORM_MIN_GMEAN && ld >= RINGNORM_MIN_GMEAN,
        format!("ringnorm 5x5 cv mean G-mean: LP {lp:.4}, LD {ld:.4} (>= {RINGNORM_MIN_GMEAN})"),
    )
}

fn depth_differs(runs: &RingnormRuns) -> Outcome {
    let depths = |r: &CvReport| {
        let run = &r.runs[0];
        (run.positive_depth, run.negative_depth)
    };
    let (lp, ld) = (depths(&runs.lp), depths(&runs.ld));
    check(
        lp != ld,
        format!("ringnorm hierarchy depths (class +1, class -1): LP {lp:?}, LD {ld:?}"),
    )
}

fn blobs_split(blobs: Blobs) -> (DataSet, DataSet) {
    let (train, test) = standardize(&blobs.generate(SEED), &[blobs.generate(SEED + 1)]).unwrap();
    (train, test.into_iter().next().unwrap())
}

fn fast_speedup() -> Outcome {
    let (train, test) = blobs_split(Blobs {
        n_pos: 5000,
        n_neg: 45_000,
        dim: 2,
        separation: 3.0,
        spread: 1.0,
    });
    let cfg = TrainConfig {
        seed: SEED,
        ..TrainConfig::default()
    };
    let quality = train_multilevel(&train, &cfg).unwrap();
    let fast = train_multilevel(
        &train,
        &TrainConfig {
            mode: Mode::Fast,
            ..cfg
        },
    )
    .unwrap();
    let (tq, tf) = (quality.wall_times.total, fast.wall_times.total);
    let ratio = tf.as_secs_f64() / tq.as_secs_f64();
    let gq = predict_dataset(&quality.best.model, &test).unwrap().gmean;
    let gf = predict_dataset(&fast.best.model, &test).unwrap().gmean;
    check(
        ratio <= FAST_MAX_TIME_RATIO && (gq - gf).abs() <= FAST_MAX_GMEAN_GAP,
        format!(
            "50000-point 1:9 2-D blobs: fast {:.2} s vs quality {:.2} s (ratio {ratio:.3} <= {FAST_MAX_TIME_RATIO}); held-out G-mean fast {gf:.4} vs quality {gq:.4} (gap <= {FAST_MAX_GMEAN_GAP})",
            tf.as_secs_f64(),
            tq.as_secs_f64()
        ),
    )
}

fn imbalance() -> Outcome {
    let (train, test) = blobs_split(Blobs {
        n_pos: 500,
        n_neg: 50_000,
        dim: 5,
        separation: 10.0,
        spread: 1.0,
    });
    let cfg = TrainConfig {
        seed: SEED,
        ..TrainConfig::default()
    };
    let report = train_multilevel(&train, &cfg).unwrap();
    let g = predict_dataset(&report.best.model, &test).unwrap().gmean;
    let trivial = compute_metrics(&vec![-1; test.len()], test.labels()).unwrap();
    check(
        g >= IMBALANCED_MIN_GMEAN && trivial.gmean == 0.0,
        format!(
            "500/50000 blobs: held-out G-mean {g:.4} (>= {IMBALANCED_MIN_GMEAN}); all-majority G-mean {:.4}, accuracy {:.4}",
            trivial.gmean, trivial.accuracy
        ),
    )
}

fn solver_oracle() -> Outcome {
    let cfg = SolverConfig::default();
    let mut worst_gap = 0.0f64;
    let mut worst_kkt = 0.0f64;
    for seed in 0..ORACLE_PROBLEMS {
        let p = common::random_problem(seed, ORACLE_MAX_N);
        let fit = train_points(
            &p.points,
            &p.labels,
            ModelParams::new(p.c, p.gamma).unwrap(),
            &cfg,
        )
        .unwrap();
        let q = common::q_matrix(&p.points, &p.labels, p.gamma);
        let oracle = common::dual_objective(&q, &common::qp_oracle(&q, &p.labels, p.c, 20_000));
        let ours = common::dual_objective(&q, &fit.alpha);
        worst_gap = worst_gap.max((ours - oracle).abs() / oracle.abs().max(1.0));
        worst_kkt = worst_kkt.max(max_kkt_violation(
            &fit.alpha,
            &fit.training_decisions,
            &p.labels,
            p.c,
        ));
    }
    check(
        worst_gap <= ORACLE_REL_TOL && worst_kkt <= KKT_TOL,
        format!(
            "{ORACLE_PROBLEMS} random problems (n <= {ORACLE_MAX_N}): max relative objective gap {worst_gap:.2e} (<= {ORACLE_REL_TOL:e}), max KKT residual {worst_kkt:.2e} (<= {KKT_TOL:e})"
        ),
    )
}

fn clustering_suite() -> Outcome {
    let mut failures = Vec::new();
    for seed in 0..10 {
        let g = common::knn_fixture(300, 3, 10, seed);
        let cfg = LpConfig { rounds: 10, seed };
        let a = label_propagation(&g, &cfg);
        if a != label_propagation(&g, &cfg) {
            failures.push(format!("LP not deterministic on fixture {seed}"));
        }
        if a.assignment.len() != g.n() || !a.is_compact() {
            failures.push(format!(
                "LP output is not a compact partition on fixture {seed}"
            ));
        }
        let ld = low_diameter(&g, &LdConfig { beta: 0.4, seed });
        if !ld.is_compact() {
            failures.push(format!(
                "LD output is not a compact partition on fixture {seed}"
            ));
        }
        if low_diameter(&g, &LdConfig { beta: 1e6, seed }).num_clusters != g.n() {
            failures.push(format!(
                "beta = 1e6 did not give singletons on fixture {seed}"
            ));
        }
    }
    let tri = common::bridged_triangles();
    let c = label_propagation(
        &tri,
        &LpConfig {
            rounds: 10,
            seed: 0,
        },
    );
    let split = c.num_clusters == 2
        && c.assignment[0] == c.assignment[1]
        && c.assignment[1] == c.assignment[2]
        && c.assignment[3] == c.assignment[4]
        && c.assignment[4] == c.assignment[5];
    if !split {
        failures.push(format!("triangle fixture gave {:?}", c.assignment));
    }
    let (rate, connected) = common::ld_diameter_bound_rate(LD_RUNS, 0.4);
    if !connected {
        failures.push("a low-diameter cluster was disconnected".into());
    }
    if rate < LD_MIN_RATE {
        failures.push(format!(
            "diameter bound held in only {:.1}% of runs",
            100.0 * rate
        ));
    }
    let limit = (4.0 * 1000f64.ln() / 0.4).ceil();
    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "LP determinism/partition, triangles, LD connectivity and singletons; diameter <= {limit} in {:.1}% of {LD_RUNS} runs (>= {:.0}%)",
                100.0 * rate,
                100.0 * LD_MIN_RATE
            )
        } else {
            failures.join("; ")
        },
    )
}

fn conservation() -> Outcome {
    let g = build_knn_graph(&common::ten_blobs(), &KnnConfig::with_k(10)).unwrap();
    let h = build_hierarchy(g, &ClusteringMethod::low_diameter(), 20, SEED);
    let (mass, com) = common::conservation_error(&h);
    let structure = (0..5)
        .all(|s| common::singleton_contraction_preserves(&common::knn_fixture(200, 4, 10, s)));
    check(
        h.depth() >= 3 && mass == 0 && com <= CONSERVATION_TOL && structure,
        format!(
            "{} levels; mass error {mass}, center-of-mass error {com:.2e} (<= {CONSERVATION_TOL:e}); singleton contraction preserves structure: {structure}",
            h.depth()
        ),
    )
}

fn cli_cv(data: &Path, out: &Path) -> Result<String, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_mlsvm"))
        .args(["cv", "--k", "5", "--reps", "2", "--seed", "42", "--data"])
        .arg(data)
        .arg("--results")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(String::from_utf8_lossy(&status.stderr).into_owned());
    }
    std::fs::read_to_string(out).map_err(|e| e.to_string())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("ringnorm.csv");
    let ring = synthetic::ringnorm_sized(600, 600, 20, SEED);
    synthetic::write_csv(&ring, std::fs::File::create(&data).unwrap()).unwrap();
    let a = cli_cv(&data, &dir.path().join("a.txt"))?;
    let b = cli_cv(&data, &dir.path().join("b.txt"))?;
    check(
        a == b && a.lines().count() == 12,
        format!(
            "two cv runs with seed {SEED}: results files byte-identical = {} ({} bytes)",
            a == b,
            a.len()
        ),
    )
}

fn run(id: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let started = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let elapsed = started.elapsed();
    let (tag, detail) = match &outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!(
        "{tag} criterion {id} ({name}): {detail} [{:.1} s]",
        secs(elapsed)
    );
    outcome.is_ok()
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn main() {
    let mut passed = Vec::new();
    passed.push(run(1, "twonorm quality", twonorm));
    let ring = synthetic::ringnorm(SEED);
    let runs = RingnormRuns {
        lp: cv(&ring, ClusteringMethod::default()),
        ld: cv(&ring, ClusteringMethod::low_diameter()),
    };
    passed.push(run(2, "ringnorm quality", || ringnorm(&runs)));
    passed.push(run(3, "hierarchy depth differs", || depth_differs(&runs)));
    passed.push(run(4, "fast-mode speedup", fast_speedup));
    passed.push(run(5, "imbalance handling", imbalance));
    passed.push(run(6, "solver oracle", solver_oracle));
    passed.push(run(7, "clustering properties", clustering_suite));
    passed.push(run(8, "hierarchy conservation", conservation));
    passed.push(run(9, "end-to-end determinism", determinism));
    let failed = passed.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        passed.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
