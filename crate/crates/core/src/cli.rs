//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 input parse error, 3 numerical
//! non-convergence.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::experiments::{self, GridConfig, SuccessPredicate};
use crate::glasso::{
    empirical_covariance, glasso_fit, select_graph, Centering, CovarianceConfig, GlassoOptions,
    Normalization,
};
use crate::graphs::{
    clique_number, k_core_bound, parse_edge_list, parse_graph, parse_graph6, Graph,
};
use crate::numerics::{sample_standard_normal, DenseMatrix, SeededRng};
use crate::plot::write_plots;
use crate::rigidity::{gcr, mlt, MAX_MLT_VERTICES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NONCONVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "mlt-lasso",
    version,
    about = "Maximum likelihood thresholds and graphical lasso model selection"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the MLT of a graph (at most 9 vertices) with its clique and k-core bounds
    Mlt(GraphArgs),
    /// Print the generic completion rank of a graph
    Gcr(GraphArgs),
    /// Print the clique lower bound and k-core upper bound of a graph
    Bounds(GraphArgs),
    /// Fit the graphical lasso and print the precision matrix and selected edges as JSON
    Glasso(GlassoArgs),
    /// Run the Monte Carlo grid and write results as CSV
    Experiment(ExperimentArgs),
    /// Draw one SVG per p from an experiment CSV
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GraphFormat {
    Auto,
    Graph6,
    Edges,
}

#[derive(Debug, Args)]
struct GraphArgs {
    /// graph6 string, edge list such as "3; 1 2; 2 3", or "-" to read one graph per line from stdin
    graph: String,
    #[arg(long, value_enum, default_value = "auto")]
    format: GraphFormat,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NormalizeArg {
    Sample,
    Unnormalized,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CenteringArg {
    ZeroMean,
    Center,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PredicateArg {
    Atmost,
    Strict,
}

impl From<NormalizeArg> for Normalization {
    fn from(v: NormalizeArg) -> Self {
        match v {
            NormalizeArg::Sample => Normalization::SampleAveraged,
            NormalizeArg::Unnormalized => Normalization::Unnormalized,
        }
    }
}

impl From<CenteringArg> for Centering {
    fn from(v: CenteringArg) -> Self {
        match v {
            CenteringArg::ZeroMean => Centering::AssumeZeroMean,
            CenteringArg::Center => Centering::CenterColumns,
        }
    }
}

impl From<PredicateArg> for SuccessPredicate {
    fn from(v: PredicateArg) -> Self {
        match v {
            PredicateArg::Atmost => SuccessPredicate::MltAtMostN,
            PredicateArg::Strict => SuccessPredicate::MltLessThanN,
        }
    }
}

#[derive(Debug, Args)]
struct GlassoArgs {
    #[arg(long)]
    alpha: f64,
    /// CSV data matrix, one row per variable and one column per sample
    #[arg(long, conflicts_with_all = ["covariance", "p"])]
    data: Option<PathBuf>,
    /// CSV covariance matrix, used as S directly
    #[arg(long, conflicts_with = "p")]
    covariance: Option<PathBuf>,
    /// Generate standard normal data with this many variables
    #[arg(long, requires = "n")]
    p: Option<usize>,
    /// Number of generated samples
    #[arg(long, requires = "p")]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, default_value_t = 0.0)]
    zero_tol: f64,
    #[arg(long, value_enum, default_value = "sample")]
    normalize: NormalizeArg,
    #[arg(long, value_enum, default_value = "zero-mean")]
    centering: CenteringArg,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// JSON config; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path (standard output when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated vertex counts, e.g. 3,4,5
    #[arg(long, value_delimiter = ',')]
    p_values: Option<Vec<usize>>,
    #[arg(long)]
    alpha_start: Option<f64>,
    #[arg(long)]
    alpha_stop: Option<f64>,
    #[arg(long)]
    alpha_step: Option<f64>,
    #[arg(long, value_enum)]
    predicate: Option<PredicateArg>,
    #[arg(long, value_enum)]
    normalize: Option<NormalizeArg>,
    #[arg(long, value_enum)]
    centering: Option<CenteringArg>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    zero_tol: Option<f64>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Suppress progress on standard error
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Experiment CSV
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(m: impl ToString) -> Self {
        Self {
            code: EXIT_USAGE,
            message: m.to_string(),
        }
    }
    fn input(m: impl ToString) -> Self {
        Self {
            code: EXIT_INPUT,
            message: m.to_string(),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = write!(err, "{e}");
            return EXIT_USAGE;
        }
        Err(e) => {
            // --help and --version
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut (dyn Write + Send)) -> Result<i32, CliError> {
    match cli.command {
        Command::Mlt(a) => graph_command(&a, out, |g, rng| {
            if g.vertex_count() > MAX_MLT_VERTICES {
                return Err(CliError::input(format!(
                    "MLT is computed exactly only for graphs with at most {MAX_MLT_VERTICES} vertices; this graph has {}",
                    g.vertex_count()
                )));
            }
            let m = mlt(g, rng).map_err(CliError::input)?;
            Ok(format!(
                "mlt={m} clique={} kcore={}",
                clique_number(g),
                k_core_bound(g)
            ))
        }),
        Command::Gcr(a) => graph_command(&a, out, |g, rng| {
            Ok(format!("gcr={}", gcr(g, rng).map_err(CliError::input)?))
        }),
        Command::Bounds(a) => graph_command(&a, out, |g, _| {
            Ok(format!(
                "clique={} kcore={}",
                clique_number(g),
                k_core_bound(g)
            ))
        }),
        Command::Glasso(a) => glasso_command(&a, out),
        Command::Experiment(a) => experiment_command(&a, out, err),
        Command::Plot(a) => {
            let file = std::fs::File::open(&a.input)
                .map_err(|e| CliError::input(format!("{}: {e}", a.input.display())))?;
            let rows = experiments::read_csv(file).map_err(CliError::input)?;
            let paths = write_plots(&rows, &a.out_dir).map_err(CliError::input)?;
            for p in paths {
                writeln!(out, "{}", p.display()).map_err(CliError::input)?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn parse_one(text: &str, format: GraphFormat) -> Result<Graph, CliError> {
    match format {
        GraphFormat::Auto => parse_graph(text),
        GraphFormat::Graph6 => parse_graph6(text),
        GraphFormat::Edges => parse_edge_list(text),
    }
    .map_err(|e| CliError::input(format!("cannot parse graph {text:?}: {e}")))
}

fn graph_command(
    a: &GraphArgs,
    out: &mut dyn Write,
    f: impl Fn(&Graph, &mut SeededRng) -> Result<String, CliError>,
) -> Result<i32, CliError> {
    let inputs: Vec<String> = if a.graph == "-" {
        std::io::stdin()
            .lock()
            .lines()
            .collect::<Result<Vec<_>, _>>()
            .map_err(CliError::input)?
            .into_iter()
            .filter(|l| !l.trim().is_empty())
            .collect()
    } else {
        vec![a.graph.clone()]
    };
    let mut rng = SeededRng::new(a.seed);
    for text in inputs {
        let g = parse_one(&text, a.format)?;
        let line = f(&g, &mut rng)?;
        writeln!(out, "{line}").map_err(CliError::input)?;
    }
    Ok(EXIT_OK)
}

fn read_matrix_csv(path: &Path) -> Result<DenseMatrix<f64>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::input(format!("{}: no rows", path.display())));
    }
    DenseMatrix::from_rows(&rows).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct GlassoReport {
    p: usize,
    alpha: f64,
    converged: bool,
    iterations: usize,
    duality_gap: f64,
    precision: Vec<Vec<f64>>,
    edges: Vec<(usize, usize)>,
}

fn glasso_command(a: &GlassoArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if !(a.alpha > 0.0) {
        return Err(CliError::usage(format!(
            "--alpha must be positive, got {}",
            a.alpha
        )));
    }
    if !(a.tol > 0.0) {
        return Err(CliError::usage(format!(
            "--tol must be positive, got {}",
            a.tol
        )));
    }
    let cov = CovarianceConfig {
        normalization: a.normalize.into(),
        centering: a.centering.into(),
    };
    let s = if let Some(path) = &a.covariance {
        read_matrix_csv(path)?
    } else {
        let x = match (&a.data, a.p, a.n) {
            (Some(path), _, _) => read_matrix_csv(path)?,
            (None, Some(p), Some(n)) => sample_standard_normal(&mut SeededRng::new(a.seed), p, n)
                .map_err(CliError::usage)?,
            _ => return Err(CliError::usage("give --data, --covariance, or --p and --n")),
        };
        empirical_covariance(&x, cov).map_err(CliError::input)?
    };
    let opts = GlassoOptions {
        tol: a.tol,
        max_iter: a.max_iter,
    };
    let sol = glasso_fit(&s, a.alpha, opts).map_err(CliError::input)?;
    let selected = select_graph(&sol, a.zero_tol).map_err(CliError::input)?;
    let report = GlassoReport {
        p: s.rows(),
        alpha: a.alpha,
        converged: sol.converged,
        iterations: sol.iterations,
        duality_gap: sol.duality_gap,
        precision: sol.precision.matrix().to_rows(),
        edges: selected.graph.edges(),
    };
    serde_json::to_writer_pretty(&mut *out, &report).map_err(CliError::input)?;
    writeln!(out).map_err(CliError::input)?;
    Ok(if sol.converged {
        EXIT_OK
    } else {
        EXIT_NONCONVERGED
    })
}

fn experiment_config(a: &ExperimentArgs) -> Result<GridConfig, CliError> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?
        }
        None => GridConfig::default(),
    };
    if let Some(v) = a.seed {
        cfg.master_seed = v;
    }
    if let Some(v) = a.trials {
        cfg.trials = v;
    }
    if let Some(v) = &a.p_values {
        cfg.p_values = v.clone();
    }
    if let Some(v) = a.alpha_start {
        cfg.alpha_start = v;
    }
    if let Some(v) = a.alpha_stop {
        cfg.alpha_stop = v;
    }
    if let Some(v) = a.alpha_step {
        cfg.alpha_step = v;
    }
    if let Some(v) = a.predicate {
        cfg.trial.predicate = v.into();
    }
    if let Some(v) = a.normalize {
        cfg.trial.covariance.normalization = v.into();
    }
    if let Some(v) = a.centering {
        cfg.trial.covariance.centering = v.into();
    }
    if let Some(v) = a.tol {
        cfg.trial.tol = v;
    }
    if let Some(v) = a.max_iter {
        cfg.trial.max_iter = v;
    }
    if let Some(v) = a.zero_tol {
        cfg.trial.zero_tol = v;
    }
    let code = if a.config.is_some() {
        EXIT_INPUT
    } else {
        EXIT_USAGE
    };
    cfg.validate().map_err(|e| CliError {
        code,
        message: e.to_string(),
    })?;
    Ok(cfg)
}

fn experiment_command(
    a: &ExperimentArgs,
    out: &mut dyn Write,
    err: &mut (dyn Write + Send),
) -> Result<i32, CliError> {
    let cfg = experiment_config(a)?;
    let total = cfg.cells().len();
    let step = (total / 20).max(1);
    let quiet = a.quiet;
    let progress = std::sync::Mutex::new(&mut *err);
    let results = experiments::run_grid_with_progress(&cfg, a.jobs, |done, total| {
        if !quiet && (done % step == 0 || done == total) {
            if let Ok(mut e) = progress.lock() {
                let _ = writeln!(e, "cells {done}/{total}");
            }
        }
    })
    .map_err(CliError::input)?;
    let decimals = cfg.alpha_grid().decimals;
    match &a.out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            experiments::write_csv(std::io::BufWriter::new(file), &results, decimals)
        }
        None => experiments::write_csv(&mut *out, &results, decimals),
    }
    .map_err(CliError::input)?;
    if !quiet {
        let nc: usize = results.iter().map(|r| r.nonconverged).sum();
        let _ = writeln!(err, "done: {total} cells, {nc} non-converged fits");
    }
    Ok(EXIT_OK)
}
