//! Command-line front end.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::clustering::ClusteringMethod;
use crate::dataset::{
    feature_matrix, parse, CsvOptions, DataSet, Format, LabelColumn, OneHotSchema, RawTable,
    ScalingStats,
};
use crate::driver::{self, CvReport, Mode, PhaseTimes, TrainConfig};
use crate::error::{MlsvmError, Result};
use crate::hierarchy::{LevelSummary, SummaryTable};
use crate::matrix::Matrix;
use crate::model_select::{compute_metrics, Metrics, ParamGrid};
use crate::par;
use crate::svm::{SolverConfig, SvmModel};
use crate::synthetic::{self, Blobs};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_TRAINING: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "mlsvm",
    version,
    about = "Multilevel RBF SVM training for imbalanced binary data"
)]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "MLSVM_THREADS")]
    pub threads: Option<usize>,

    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Repeated k-fold cross-validation.
    Cv(CvArgs),
    /// Train one model and write it with its preprocessing files.
    Train(TrainArgs),
    /// Predict with a trained model.
    Predict(PredictArgs),
    /// Print the coarsening hierarchy of each class.
    Inspect(InspectArgs),
    /// Write a synthetic data set as CSV.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Sparse,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Input data file.
    #[arg(long)]
    pub data: PathBuf,

    /// Input format; inferred from the extension when omitted (`.csv` is CSV,
    /// anything else sparse `label idx:val` text).
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,

    /// The CSV file starts with a header row.
    #[arg(long)]
    pub header: bool,

    /// CSV label column, by zero-based index or header name.
    #[arg(long, default_value = "0")]
    pub label_column: String,

    /// CSV columns to treat as categorical (comma separated, index or name).
    #[arg(long, value_delimiter = ',')]
    pub categorical: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Quality,
    Fast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClusteringArg {
    /// Label propagation.
    Lp,
    /// Low-diameter decomposition.
    Ld,
}

#[derive(Debug, Clone, Args)]
pub struct TrainOptions {
    #[arg(long, value_enum, default_value = "quality")]
    pub mode: ModeArg,

    #[arg(long, value_enum, default_value = "lp")]
    pub clustering: ClusteringArg,

    /// Label propagation rounds.
    #[arg(long, default_value_t = 10)]
    pub lp_rounds: usize,

    /// Low-diameter decomposition parameter.
    #[arg(long, default_value_t = 0.4)]
    pub beta: f64,

    #[arg(long, default_value_t = 10)]
    pub k_neighbors: usize,

    #[arg(long, default_value_t = 500)]
    pub coarsest_threshold: usize,

    #[arg(long, default_value_t = 10_000)]
    pub ms_skip_threshold: usize,

    /// Train on a random fraction of the training data.
    #[arg(long)]
    pub sample_fraction: Option<f64>,

    /// Fixed C (requires --fixed-gamma; disables model selection).
    #[arg(long, requires = "fixed_gamma")]
    pub fixed_c: Option<f64>,

    #[arg(long, requires = "fixed_c")]
    pub fixed_gamma: Option<f64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 1e-3)]
    pub kkt_tolerance: f64,

    #[arg(long, default_value_t = 10_000_000)]
    pub max_iterations: usize,

    /// Disable shrinking of the solver's active set.
    #[arg(long)]
    pub no_shrinking: bool,

    /// Kernel cache size per solver, in MiB.
    #[arg(long, default_value_t = 256)]
    pub cache_mb: usize,

    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    pub log2c_min: f64,

    #[arg(long, default_value_t = 15.0, allow_hyphen_values = true)]
    pub log2c_max: f64,

    #[arg(long, default_value_t = -15.0, allow_hyphen_values = true)]
    pub log2g_min: f64,

    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub log2g_max: f64,
}

impl TrainOptions {
    pub fn to_config(&self) -> Result<TrainConfig> {
        let clustering = match self.clustering {
            ClusteringArg::Lp => ClusteringMethod::LabelPropagation {
                rounds: self.lp_rounds,
            },
            ClusteringArg::Ld => ClusteringMethod::LowDiameter { beta: self.beta },
        };
        let fixed_params = match (self.fixed_c, self.fixed_gamma) {
            (Some(c), Some(g)) => Some(crate::svm::ModelParams::new(c, g)?),
            _ => None,
        };
        let cfg = TrainConfig {
            mode: match self.mode {
                ModeArg::Quality => Mode::Quality,
                ModeArg::Fast => Mode::Fast,
            },
            clustering,
            k_neighbors: self.k_neighbors,
            coarsest_threshold: self.coarsest_threshold,
            ms_skip_threshold: self.ms_skip_threshold,
            sample_fraction: self.sample_fraction,
            fixed_params,
            seed: self.seed,
            solver: SolverConfig {
                kkt_tolerance: self.kkt_tolerance,
                max_iterations: self.max_iterations,
                kernel_cache_bytes: self.cache_mb << 20,
                shrinking: !self.no_shrinking,
            },
            grid: ParamGrid {
                log2_c: (self.log2c_min, self.log2c_max),
                log2_gamma: (self.log2g_min, self.log2g_max),
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[command(flatten)]
    pub train: TrainOptions,

    /// Number of folds.
    #[arg(long, default_value_t = 5)]
    pub k: usize,

    /// Number of repetitions with fresh folds.
    #[arg(long, default_value_t = 5)]
    pub reps: usize,

    /// Machine-readable results file.
    #[arg(long)]
    pub results: Option<PathBuf>,

    /// Add a per-run training time column to the results file.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[command(flatten)]
    pub train: TrainOptions,

    /// Model output path. Scaling statistics go to `<model>.scaling` and the
    /// category encoding to `<model>.schema.json`.
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[arg(long)]
    pub model: PathBuf,

    /// The CSV input has no label column.
    #[arg(long)]
    pub unlabeled: bool,

    /// Predictions output path (one label per line).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct InspectArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[command(flatten)]
    pub train: TrainOptions,

    /// Write every level's edge list to `<dir>/<class>_level<l>.edges`.
    #[arg(long)]
    pub dump_graph: Option<PathBuf>,

    /// Write every contraction map to `<dir>/<class>_level<l>.clusters`.
    #[arg(long)]
    pub dump_clustering: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeneratorKind {
    Twonorm,
    Ringnorm,
    Blobs,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub kind: GeneratorKind,

    #[arg(long)]
    pub out: PathBuf,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Minority size (default 3700 for twonorm/ringnorm, 500 for blobs).
    #[arg(long)]
    pub n_pos: Option<usize>,

    /// Majority size (default 3700 for twonorm/ringnorm, 5000 for blobs).
    #[arg(long)]
    pub n_neg: Option<usize>,

    #[arg(long, default_value_t = 20)]
    pub dim: usize,

    /// Distance between blob centers.
    #[arg(long, default_value_t = 10.0)]
    pub separation: f64,

    /// Standard deviation of each blob.
    #[arg(long, default_value_t = 1.0)]
    pub spread: f64,
}

/// Exit code for an error.
pub fn exit_code(err: &MlsvmError) -> i32 {
    match err {
        MlsvmError::InvalidConfig(_) => EXIT_CONFIG,
        MlsvmError::Parse { .. }
        | MlsvmError::Structural { .. }
        | MlsvmError::DimensionMismatch { .. }
        | MlsvmError::ClassCount(_)
        | MlsvmError::SingleClass
        | MlsvmError::EmptyData
        | MlsvmError::ModelFormat(_)
        | MlsvmError::Io(_) => EXIT_DATA,
        MlsvmError::InvalidLevel { .. }
        | MlsvmError::InvalidNode { .. }
        | MlsvmError::NonCompactClustering(_) => EXIT_TRAINING,
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    init_logging(cli.verbose);
    let threads = cli.threads;
    match par::with_threads(threads, move || run(&cli.command)) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .format_timestamp(None)
        .try_init();
}

pub fn run(command: &Command) -> Result<()> {
    match command {
        Command::Cv(a) => run_cv(a),
        Command::Train(a) => run_train(a),
        Command::Predict(a) => run_predict(a),
        Command::Inspect(a) => run_inspect(a),
        Command::Generate(a) => run_generate(a),
    }
}

/// Write `path` through a temporary file in the same directory, so the path
/// either keeps its old contents or receives the complete new ones.
pub fn write_atomic<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        body(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| MlsvmError::Io(e.error))?;
    Ok(())
}

fn parse_column(s: &str) -> LabelColumn {
    match s.parse::<usize>() {
        Ok(i) => LabelColumn::Index(i),
        Err(_) => LabelColumn::Name(s.to_string()),
    }
}

impl DataArgs {
    fn format(&self) -> Format {
        match self.format {
            Some(FormatArg::Csv) => Format::Csv,
            Some(FormatArg::Sparse) => Format::SparseText,
            None => {
                let csv = self
                    .data
                    .extension()
                    .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
                if csv {
                    Format::Csv
                } else {
                    Format::SparseText
                }
            }
        }
    }

    fn read_table(&self, labeled: bool) -> Result<RawTable> {
        let opts = CsvOptions {
            has_header: self.header,
            label: labeled.then(|| parse_column(&self.label_column)),
            categorical: self.categorical.iter().map(|c| parse_column(c)).collect(),
        };
        let file = File::open(&self.data).map_err(|e| {
            MlsvmError::Io(io::Error::new(
                e.kind(),
                format!("{}: {e}", self.data.display()),
            ))
        })?;
        parse(BufReader::new(file), self.format(), &opts)
    }

    /// Labeled, one-hot encoded data and the fitted encoding.
    fn load_labeled(&self) -> Result<(DataSet, OneHotSchema)> {
        let table = self.read_table(true)?;
        let schema = OneHotSchema::fit(&table);
        let data = DataSet::from_table(&schema.apply(&table)?)?;
        Ok((data, schema))
    }
}

fn print_hierarchies(pos: &[LevelSummary], neg: &[LevelSummary]) {
    println!("minority class hierarchy ({} levels)", pos.len());
    print!("{}", SummaryTable(pos));
    println!("majority class hierarchy ({} levels)", neg.len());
    print!("{}", SummaryTable(neg));
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

pub fn run_cv(args: &CvArgs) -> Result<()> {
    let cfg = args.train.to_config()?;
    if args.k < 2 || args.reps == 0 {
        return Err(MlsvmError::InvalidConfig(
            "--k must be at least 2 and --reps at least 1".into(),
        ));
    }
    let (data, _) = args.data.load_labeled()?;
    log::info!(
        "{} points, {} features, {} minority / {} majority",
        data.len(),
        data.dim(),
        data.n_pos(),
        data.n_neg()
    );
    let report = driver::cross_validate(&data, &cfg, args.k, args.reps)?;
    print_cv_table(&report);
    if let Some(path) = &args.results {
        write_atomic(path, |w| write_results(&report, args.timings, w))?;
    }
    Ok(())
}

fn mean_phases(report: &CvReport) -> PhaseTimes {
    let n = report.runs.len().max(1) as u32;
    let sum = |f: fn(&PhaseTimes) -> Duration| {
        report
            .runs
            .iter()
            .map(|r| f(&r.phase_times))
            .sum::<Duration>()
            / n
    };
    PhaseTimes {
        sampling: sum(|p| p.sampling),
        coarsening: sum(|p| p.coarsening),
        initial_training: sum(|p| p.initial_training),
        refinement: sum(|p| p.refinement),
        total: sum(|p| p.total),
    }
}

fn print_cv_table(report: &CvReport) {
    println!(
        "{:>4} {:>4} {:>7} {:>7} {:>7} {:>7} {:>7} {:>5} {:>9}",
        "rep", "fold", "SN", "SP", "G-mean", "acc", "SVs", "level", "train_s"
    );
    for r in &report.runs {
        println!(
            "{:>4} {:>4} {:>7.4} {:>7.4} {:>7.4} {:>7.4} {:>7} {:>5} {:>9.3}",
            r.rep,
            r.fold,
            r.metrics.sn,
            r.metrics.sp,
            r.metrics.gmean,
            r.metrics.accuracy,
            r.num_svs,
            r.level,
            secs(r.train_time)
        );
    }
    let m = &report.mean;
    println!(
        "mean over {} runs: SN {:.4}  SP {:.4}  G-mean {:.4}  acc {:.4}  SVs {:.1}",
        report.runs.len(),
        m.sn,
        m.sp,
        m.gmean,
        m.accuracy,
        m.num_svs
    );
    let p = mean_phases(report);
    println!(
        "mean wall time (s): coarsening {:.3}  initial {:.3}  refinement {:.3}  total {:.3}",
        secs(p.coarsening),
        secs(p.initial_training),
        secs(p.refinement),
        secs(p.total)
    );
}

/// Header, one line per run, then the aggregate line.
pub fn write_results(report: &CvReport, timings: bool, w: &mut dyn Write) -> Result<()> {
    write!(w, "rep fold sn sp gmean acc n_sv")?;
    if timings {
        write!(w, " train_s")?;
    }
    writeln!(w)?;
    for r in &report.runs {
        write!(
            w,
            "{} {} {:.6} {:.6} {:.6} {:.6} {}",
            r.rep,
            r.fold,
            r.metrics.sn,
            r.metrics.sp,
            r.metrics.gmean,
            r.metrics.accuracy,
            r.num_svs
        )?;
        if timings {
            write!(w, " {:.3}", secs(r.train_time))?;
        }
        writeln!(w)?;
    }
    let m = &report.mean;
    write!(
        w,
        "mean mean {:.6} {:.6} {:.6} {:.6} {:.1}",
        m.sn, m.sp, m.gmean, m.accuracy, m.num_svs
    )?;
    if timings {
        write!(w, " {:.3}", secs(m.train_time))?;
    }
    writeln!(w)?;
    Ok(())
}

fn sidecar(model: &Path, suffix: &str) -> PathBuf {
    let mut s = model.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn scaling_path(model: &Path) -> PathBuf {
    sidecar(model, ".scaling")
}

pub fn schema_path(model: &Path) -> PathBuf {
    sidecar(model, ".schema.json")
}

pub fn run_train(args: &TrainArgs) -> Result<()> {
    let cfg = args.train.to_config()?;
    let (raw, schema) = args.data.load_labeled()?;
    let stats = ScalingStats::fit(raw.features())?;
    let data = raw.with_scaling(&stats)?;
    let report = driver::train_multilevel(&data, &cfg)?;

    print_hierarchies(&report.positive_hierarchy, &report.negative_hierarchy);
    println!("level models (sn sp gmean acc n_sv level):");
    for (m, size) in report.per_level.iter().zip(&report.training_sizes) {
        println!("  {}  [{} training points]", m.report_line(), size);
    }
    let (lc, lg) = report.best.model.params.log2();
    println!(
        "selected: level {}  log2C {lc:.4}  log2gamma {lg:.4}  {} support vectors",
        report.best.level, report.best.num_svs
    );
    println!("validation: {}", report.best.metrics);
    let on_train = driver::predict_dataset(&report.best.model, &data)?;
    println!("training set: {on_train}");

    let schema_json = serde_json::to_string_pretty(&schema)
        .map_err(|e| MlsvmError::InvalidConfig(format!("schema serialization: {e}")))?;
    write_atomic(&scaling_path(&args.model), |w| stats.write(w))?;
    write_atomic(&schema_path(&args.model), |w| {
        writeln!(w, "{schema_json}")?;
        Ok(())
    })?;
    write_atomic(&args.model, |w| report.best.model.write(w))?;
    Ok(())
}

fn read_schema(path: &Path) -> Result<OneHotSchema> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| MlsvmError::ModelFormat(format!("{}: {e}", path.display())))
}

/// Widen or validate `m` to `dim` columns. Only sparse input may omit
/// trailing all-zero features.
fn fit_width(m: Matrix, dim: usize, format: Format) -> Result<Matrix> {
    use std::cmp::Ordering;
    match m.cols().cmp(&dim) {
        Ordering::Equal => Ok(m),
        Ordering::Less if format == Format::SparseText => {
            let mut out = Matrix::zeros(m.rows(), dim);
            for i in 0..m.rows() {
                out.row_mut(i)[..m.cols()].copy_from_slice(m.row(i));
            }
            Ok(out)
        }
        _ => Err(MlsvmError::DimensionMismatch {
            expected: dim,
            found: m.cols(),
        }),
    }
}

pub fn run_predict(args: &PredictArgs) -> Result<()> {
    let model = SvmModel::read(BufReader::new(File::open(&args.model)?))?;
    let stats = ScalingStats::read(BufReader::new(File::open(scaling_path(&args.model))?))?;
    let schema = read_schema(&schema_path(&args.model))?;
    if stats.dim() != model.dim() {
        return Err(MlsvmError::DimensionMismatch {
            expected: model.dim(),
            found: stats.dim(),
        });
    }

    let table = args.data.read_table(!args.unlabeled)?;
    let encoded = if schema.is_identity() {
        table
    } else {
        let mut schema = schema;
        // The schema covers the training columns, label included.
        if table.label_column.is_none() && schema.columns.len() == table.columns.len() + 1 {
            let label_at = match parse_column(&args.data.label_column) {
                LabelColumn::Index(i) => i,
                LabelColumn::Name(_) => 0,
            };
            if label_at < schema.columns.len() {
                schema.columns.remove(label_at);
            }
        }
        schema.apply(&table)?
    };
    let features = fit_width(feature_matrix(&encoded)?, model.dim(), args.data.format())?;
    if features.rows() == 0 {
        return Err(MlsvmError::EmptyData);
    }
    let features = stats.apply(&features)?;
    let predictions = model.predict_all(&features)?;

    let metrics = match encoded.label_column {
        Some(_) => {
            let truth = DataSet::from_table_with_names(&encoded, &model.label_names)?;
            Some(compute_metrics(&predictions, truth.labels())?)
        }
        None => None,
    };
    write_atomic(&args.out, |w| {
        for &p in &predictions {
            writeln!(w, "{}", model.label_names.name(p))?;
        }
        Ok(())
    })?;
    if let Some(m) = metrics {
        print_metrics(&m);
    }
    Ok(())
}

fn print_metrics(m: &Metrics) {
    println!("{:<12} {:>8}", "metric", "value");
    println!("{:<12} {:>8.4}", "sensitivity", m.sn);
    println!("{:<12} {:>8.4}", "specificity", m.sp);
    println!("{:<12} {:>8.4}", "g-mean", m.gmean);
    println!("{:<12} {:>8.4}", "accuracy", m.accuracy);
    println!("tp {} fn {} tn {} fp {}", m.tp, m.fn_, m.tn, m.fp);
    if m.tp + m.fn_ == 0 {
        println!("note: no positive rows; sensitivity reported as 0");
    }
}

pub fn run_inspect(args: &InspectArgs) -> Result<()> {
    let cfg = args.train.to_config()?;
    let (raw, _) = args.data.load_labeled()?;
    let data = raw.with_scaling(&ScalingStats::fit(raw.features())?)?;
    let data = match cfg.sample_fraction {
        Some(p) if p < 1.0 => {
            crate::dataset::sample(&data, p, crate::seed::derive(cfg.seed, "sample"))?
        }
        _ => data,
    };
    let (pos, neg) = driver::build_class_hierarchies(&data, &cfg)?;
    print_hierarchies(&pos.summary(), &neg.summary());
    for (name, h) in [("minority", &pos), ("majority", &neg)] {
        if let Some(dir) = &args.dump_graph {
            std::fs::create_dir_all(dir)?;
            for l in 0..h.depth() {
                let path = dir.join(format!("{name}_level{l}.edges"));
                write_atomic(&path, |w| Ok(h.graph(l).write_edges(w)?))?;
            }
        }
        if let Some(dir) = &args.dump_clustering {
            std::fs::create_dir_all(dir)?;
            for l in 1..h.depth() {
                let map = h.levels[l]
                    .fine_to_coarse
                    .as_ref()
                    .expect("levels above 0 carry a map");
                let path = dir.join(format!("{name}_level{}.clusters", l - 1));
                write_atomic(&path, |w| {
                    for (v, c) in map.iter().enumerate() {
                        writeln!(w, "{v} {c}")?;
                    }
                    Ok(())
                })?;
            }
        }
    }
    Ok(())
}

pub fn run_generate(args: &GenerateArgs) -> Result<()> {
    let (default_pos, default_neg) = match args.kind {
        GeneratorKind::Blobs => (500, 5000),
        _ => (3700, 3700),
    };
    let n_pos = args.n_pos.unwrap_or(default_pos);
    let n_neg = args.n_neg.unwrap_or(default_neg);
    if n_pos == 0 || n_neg == 0 || args.dim == 0 {
        return Err(MlsvmError::InvalidConfig(
            "class sizes and dimension must be positive".into(),
        ));
    }
    let data = match args.kind {
        GeneratorKind::Twonorm => synthetic::twonorm_sized(n_pos, n_neg, args.dim, args.seed),
        GeneratorKind::Ringnorm => synthetic::ringnorm_sized(n_pos, n_neg, args.dim, args.seed),
        GeneratorKind::Blobs => Blobs {
            n_pos,
            n_neg,
            dim: args.dim,
            separation: args.separation,
            spread: args.spread,
        }
        .generate(args.seed),
    };
    write_atomic(&args.out, |w| synthetic::write_csv(&data, w))
}
