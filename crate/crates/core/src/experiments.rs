//! Monte Carlo estimation of `q(p, n, α)`: the probability that the graph
//! selected by the graphical lasso from `n` standard normal samples in
//! dimension `p` has maximum likelihood threshold at most `n`.
//!
//! Every trial draws from its own stream, seeded by hashing
//! `(master_seed, p, n, α index, trial index)`, and MLT lookups are seeded
//! from the graph itself. Output is therefore independent of thread count
//! and scheduling.

use std::io::{Read, Write};
use std::sync::atomic::{AtomicUsize, Ordering};

use dashmap::DashMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::glasso::{
    empirical_covariance, glasso_fit, support_graph, CovarianceConfig, GlassoError, GlassoOptions,
};
use crate::graphs::{Graph, GraphError};
use crate::numerics::{derive_seed, sample_standard_normal, DenseMatrix, SeededRng};
use crate::rigidity::{mlt, RigidityError, MAX_MLT_VERTICES};

/// z-value of the two-sided 95% normal interval.
pub const Z_95: f64 = 1.96;

pub const CSV_HEADER: [&str; 9] = [
    "p",
    "n",
    "alpha",
    "trials",
    "successes",
    "nonconverged",
    "q_hat",
    "ci_low",
    "ci_high",
];

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Glasso(#[from] GlassoError),
    #[error(transparent)]
    Rigidity(#[from] RigidityError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for ExperimentError {
    fn from(e: csv::Error) -> Self {
        ExperimentError::Csv(e.to_string())
    }
}

/// What counts as a success for a selected graph `G` and sample size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SuccessPredicate {
    /// `mlt(G) <= n`
    #[default]
    #[serde(rename = "atmost")]
    MltAtMostN,
    /// `mlt(G) < n`
    #[serde(rename = "strict")]
    MltLessThanN,
}

impl SuccessPredicate {
    pub fn holds(self, mlt: usize, n: usize) -> bool {
        match self {
            SuccessPredicate::MltAtMostN => mlt <= n,
            SuccessPredicate::MltLessThanN => mlt < n,
        }
    }
}

/// Settings shared by every cell of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrialConfig {
    pub covariance: CovarianceConfig,
    pub predicate: SuccessPredicate,
    pub tol: f64,
    pub max_iter: usize,
    pub zero_tol: f64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        let g = GlassoOptions::default();
        Self {
            covariance: CovarianceConfig::default(),
            predicate: SuccessPredicate::default(),
            tol: g.tol,
            max_iter: g.max_iter,
            zero_tol: 0.0,
        }
    }
}

impl TrialConfig {
    fn glasso_options(&self) -> GlassoOptions {
        GlassoOptions {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub p_values: Vec<usize>,
    pub alpha_start: f64,
    pub alpha_stop: f64,
    pub alpha_step: f64,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(flatten)]
    pub trial: TrialConfig,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            p_values: (3..=9).collect(),
            alpha_start: 0.01,
            alpha_stop: 1.5,
            alpha_step: 0.01,
            trials: 1000,
            master_seed: 0,
            trial: TrialConfig::default(),
        }
    }
}

/// Fewest decimals (up to 12) that print `v` without loss at grid scale.
fn decimals_of(v: f64) -> usize {
    (0..=12)
        .find(|&d| {
            let s = 10f64.powi(d as i32);
            ((v * s).round() - v * s).abs() < 1e-6
        })
        .unwrap_or(12)
}

/// The α grid `start, start + step, ..` up to `stop`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid {
    pub values: Vec<f64>,
    /// Decimal places needed to print grid points exactly.
    pub decimals: usize,
}

impl GridConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::InvalidConfig(m));
        if !(self.alpha_step > 0.0) || !self.alpha_step.is_finite() {
            return bad(format!(
                "alpha_step must be positive, got {}",
                self.alpha_step
            ));
        }
        if !(self.alpha_start > 0.0) || !self.alpha_start.is_finite() {
            return bad(format!(
                "alpha_start must be positive, got {}",
                self.alpha_start
            ));
        }
        if !(self.alpha_stop >= self.alpha_start) || !self.alpha_stop.is_finite() {
            return bad(format!(
                "alpha_stop {} is below alpha_start {}",
                self.alpha_stop, self.alpha_start
            ));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if let Some(&p) = self
            .p_values
            .iter()
            .find(|&&p| p == 0 || p > MAX_MLT_VERTICES)
        {
            return bad(format!("p = {p} outside 1..={MAX_MLT_VERTICES}"));
        }
        if !(self.trial.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.trial.tol));
        }
        if !(self.trial.zero_tol >= 0.0) {
            return bad(format!(
                "zero_tol must be non-negative, got {}",
                self.trial.zero_tol
            ));
        }
        Ok(())
    }

    pub fn alpha_grid(&self) -> AlphaGrid {
        let decimals = decimals_of(self.alpha_start).max(decimals_of(self.alpha_step));
        let count =
            ((self.alpha_stop - self.alpha_start) / self.alpha_step + 1e-9).floor() as usize + 1;
        let scale = 10f64.powi(decimals as i32);
        let values = (0..count)
            .map(|k| ((self.alpha_start + k as f64 * self.alpha_step) * scale).round() / scale)
            .collect();
        AlphaGrid { values, decimals }
    }

    /// Every `(p, n, α)` cell, sorted by `p`, then `n`, then `α`.
    pub fn cells(&self) -> Vec<CellSpec> {
        let grid = self.alpha_grid();
        let mut ps = self.p_values.clone();
        ps.sort_unstable();
        ps.dedup();
        let mut out = Vec::new();
        for p in ps {
            for n in 1..=p {
                for (alpha_index, &alpha) in grid.values.iter().enumerate() {
                    out.push(CellSpec {
                        p,
                        n,
                        alpha_index,
                        alpha,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSpec {
    pub p: usize,
    pub n: usize,
    pub alpha_index: usize,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCellResult {
    pub p: usize,
    pub n: usize,
    pub alpha: f64,
    pub trials: usize,
    pub successes: usize,
    pub nonconverged: usize,
    pub q_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Normal-approximation interval `q̂ ± 1.96 √(q̂(1 − q̂)/trials)`, clamped
/// to `[0, 1]`. Returns `(q̂, low, high)`.
pub fn confidence_interval(successes: usize, trials: usize) -> (f64, f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let q = successes as f64 / trials as f64;
    let half = Z_95 * (q * (1.0 - q) / trials as f64).sqrt();
    (q, (q - half).max(0.0), (q + half).min(1.0))
}

/// Memo table of MLT values keyed by labeled graph.
///
/// A miss seeds its rank computations from the graph itself, so the stored
/// value does not depend on which thread got there first.
#[derive(Debug, Default)]
pub struct MltCache {
    seed: u64,
    map: DashMap<(usize, u64), usize>,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl MltCache {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    fn key(g: &Graph) -> Result<(usize, u64), RigidityError> {
        match g.bitmask() {
            Some(mask) if g.vertex_count() <= MAX_MLT_VERTICES => Ok((g.vertex_count(), mask)),
            _ => Err(RigidityError::TooManyVertices(g.vertex_count())),
        }
    }

    /// MLT of `g`, computing and storing it on a miss.
    pub fn mlt(&self, g: &Graph) -> Result<usize, RigidityError> {
        let key = Self::key(g)?;
        let mut rng = SeededRng::new(derive_seed(self.seed, &[key.0 as u64, key.1]));
        mlt_cached(g, self, &mut rng)
    }

    pub fn get(&self, g: &Graph) -> Option<usize> {
        Self::key(g).ok().and_then(|k| self.map.get(&k).map(|v| *v))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> usize {
        self.misses.load(Ordering::Relaxed)
    }

    /// Snapshot of all entries as graphs with their cached values.
    pub fn entries(&self) -> Vec<(Graph, usize)> {
        let mut out: Vec<_> = self
            .map
            .iter()
            .map(|e| {
                let (p, mask) = *e.key();
                (
                    Graph::from_bitmask(p, mask).expect("keys are valid graphs"),
                    *e.value(),
                )
            })
            .collect();
        out.sort_by_key(|(g, _)| (g.vertex_count(), g.bitmask()));
        out
    }
}

/// Cached MLT lookup; `rng` drives the rank computation on a miss only.
pub fn mlt_cached(
    g: &Graph,
    cache: &MltCache,
    rng: &mut SeededRng,
) -> Result<usize, RigidityError> {
    let key = MltCache::key(g)?;
    if let Some(v) = cache.map.get(&key) {
        cache.hits.fetch_add(1, Ordering::Relaxed);
        return Ok(*v);
    }
    cache.misses.fetch_add(1, Ordering::Relaxed);
    let v = mlt(g, rng)?;
    cache.map.insert(key, v);
    Ok(v)
}

/// Outcome of one glasso selection.
struct Selection {
    graph: Graph,
    converged: bool,
}

/// Runs the graphical lasso on data `x` and returns the selected graph.
/// Variables with zero sample variance are isolated vertices and the fit
/// runs on the rest.
fn select_from_data(
    x: &DenseMatrix<f64>,
    alpha: f64,
    cfg: &TrialConfig,
) -> Result<Selection, ExperimentError> {
    let p = x.rows();
    let s = empirical_covariance(x, cfg.covariance)?;
    let live: Vec<usize> = (0..p).filter(|&i| s[(i, i)] > 0.0).collect();
    let mut graph = Graph::empty(p)?;
    if live.len() < 2 {
        return Ok(Selection {
            graph,
            converged: true,
        });
    }
    let sub = DenseMatrix::from_vec(
        live.len(),
        live.len(),
        live.iter()
            .flat_map(|&i| live.iter().map(move |&j| (i, j)))
            .map(|ij| s[ij])
            .collect(),
    )
    .map_err(GlassoError::from)?;
    let sol = glasso_fit(&sub, alpha, cfg.glasso_options())?;
    for (a, b) in support_graph(sol.precision.matrix(), cfg.zero_tol)?.edges() {
        graph.insert_edge(live[a - 1] + 1, live[b - 1] + 1)?;
    }
    Ok(Selection {
        graph,
        converged: sol.converged,
    })
}

/// Estimates `q(p, n, α)` for one cell.
pub fn run_cell(
    cell: CellSpec,
    trials: usize,
    master_seed: u64,
    cfg: &TrialConfig,
    cache: &MltCache,
) -> Result<GridCellResult, ExperimentError> {
    let CellSpec {
        p,
        n,
        alpha_index,
        alpha,
    } = cell;
    if !(1..=MAX_MLT_VERTICES).contains(&p) || n == 0 || n > p {
        return Err(ExperimentError::InvalidConfig(format!(
            "cell needs 1 <= n <= p <= {MAX_MLT_VERTICES}, got p={p} n={n}"
        )));
    }
    if !(alpha > 0.0) {
        return Err(GlassoError::NonPositiveAlpha(alpha).into());
    }
    if trials == 0 {
        return Err(ExperimentError::InvalidConfig(
            "trials must be at least 1".into(),
        ));
    }

    let mut successes = 0;
    let mut nonconverged = 0;
    for t in 0..trials {
        let seed = derive_seed(
            master_seed,
            &[p as u64, n as u64, alpha_index as u64, t as u64],
        );
        let mut rng = SeededRng::new(seed);
        let x = sample_standard_normal(&mut rng, p, n).expect("p, n >= 1");
        let sel = select_from_data(&x, alpha, cfg)?;
        if !sel.converged {
            nonconverged += 1;
        }
        if cfg.predicate.holds(cache.mlt(&sel.graph)?, n) {
            successes += 1;
        }
    }
    let (q_hat, ci_low, ci_high) = confidence_interval(successes, trials);
    Ok(GridCellResult {
        p,
        n,
        alpha,
        trials,
        successes,
        nonconverged,
        q_hat,
        ci_low,
        ci_high,
    })
}

/// Runs every cell of the grid on `jobs` worker threads.
pub fn run_grid(cfg: &GridConfig, jobs: usize) -> Result<Vec<GridCellResult>, ExperimentError> {
    run_grid_with_progress(cfg, jobs, |_, _| {})
}

/// [`run_grid`] with a callback invoked as `(cells_done, cells_total)`
/// after each cell.
pub fn run_grid_with_progress<F>(
    cfg: &GridConfig,
    jobs: usize,
    progress: F,
) -> Result<Vec<GridCellResult>, ExperimentError>
where
    F: Fn(usize, usize) + Sync,
{
    cfg.validate()?;
    let cells = cfg.cells();
    let total = cells.len();
    let cache = MltCache::new(cfg.master_seed);
    let done = AtomicUsize::new(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
    let mut results = pool.install(|| {
        cells
            .par_iter()
            .map(|&cell| {
                let r = run_cell(cell, cfg.trials, cfg.master_seed, &cfg.trial, &cache);
                progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
                r
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    results.sort_by(|a, b| {
        (a.p, a.n)
            .cmp(&(b.p, b.n))
            .then(a.alpha.total_cmp(&b.alpha))
    });
    Ok(results)
}

/// Writes results as CSV with the fixed header. Probabilities get six
/// decimals and α gets `alpha_decimals`.
pub fn write_csv<W: Write>(
    out: W,
    results: &[GridCellResult],
    alpha_decimals: usize,
) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in results {
        w.write_record([
            r.p.to_string(),
            r.n.to_string(),
            format!("{:.*}", alpha_decimals, r.alpha),
            r.trials.to_string(),
            r.successes.to_string(),
            r.nonconverged.to_string(),
            format!("{:.6}", r.q_hat),
            format!("{:.6}", r.ci_low),
            format!("{:.6}", r.ci_high),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads results written by [`write_csv`], checking the header and the
/// per-row invariants.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<GridCellResult>, ExperimentError> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(ExperimentError::Csv(format!(
            "unexpected header {header:?}"
        )));
    }
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or_default();
        let bad = |what: &str| ExperimentError::Csv(format!("row {}: bad {what}", line + 1));
        let int = |i: usize| field(i).parse::<usize>().map_err(|_| bad(CSV_HEADER[i]));
        let float = |i: usize| field(i).parse::<f64>().map_err(|_| bad(CSV_HEADER[i]));
        let r = GridCellResult {
            p: int(0)?,
            n: int(1)?,
            alpha: float(2)?,
            trials: int(3)?,
            successes: int(4)?,
            nonconverged: int(5)?,
            q_hat: float(6)?,
            ci_low: float(7)?,
            ci_high: float(8)?,
        };
        if r.successes > r.trials || !(0.0..=1.0).contains(&r.q_hat) {
            return Err(bad("counts"));
        }
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn interval_formula() {
        assert_eq!(confidence_interval(1000, 1000), (1.0, 1.0, 1.0));
        assert_eq!(confidence_interval(0, 10), (0.0, 0.0, 0.0));
        let (q, lo, hi) = confidence_interval(500, 1000);
        let half = 1.96 * (0.25f64 / 1000.0).sqrt();
        assert_eq!(q, 0.5);
        assert!((lo - (0.5 - half)).abs() < 1e-15 && (hi - (0.5 + half)).abs() < 1e-15);
        let (_, lo, hi) = confidence_interval(1, 3);
        assert!(lo >= 0.0 && hi <= 1.0 && lo < 1.0 / 3.0);
    }

    #[test]
    fn grid_arithmetic() {
        let cfg = GridConfig {
            p_values: vec![3],
            alpha_start: 0.5,
            alpha_stop: 1.5,
            alpha_step: 0.5,
            trials: 10,
            ..GridConfig::default()
        };
        let grid = cfg.alpha_grid();
        assert_eq!(grid.values, vec![0.5, 1.0, 1.5]);
        assert_eq!(grid.decimals, 1);
        assert_eq!(cfg.cells().len(), 9);

        let default = GridConfig::default().alpha_grid();
        assert_eq!(default.values.len(), 150);
        assert_eq!(default.decimals, 2);
        assert_eq!(default.values[0], 0.01);
        assert_eq!(default.values[149], 1.5);
        assert_eq!(default.values[28], 0.29);

        let desk = GridConfig {
            alpha_step: 0.05,
            ..GridConfig::default()
        };
        assert_eq!(desk.alpha_grid().values.len(), 30);
        assert_eq!(*desk.alpha_grid().values.last().unwrap(), 1.46);

        let none = GridConfig {
            p_values: vec![],
            ..GridConfig::default()
        };
        assert!(none.cells().is_empty());
    }

    #[test]
    fn validation() {
        let ok = GridConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            GridConfig {
                alpha_step: 0.0,
                ..ok.clone()
            },
            GridConfig {
                alpha_start: -1.0,
                ..ok.clone()
            },
            GridConfig {
                alpha_stop: 0.001,
                ..ok.clone()
            },
            GridConfig {
                trials: 0,
                ..ok.clone()
            },
            GridConfig {
                p_values: vec![10],
                ..ok.clone()
            },
        ] {
            assert!(matches!(
                bad.validate(),
                Err(ExperimentError::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn config_json() {
        let cfg: GridConfig = serde_json::from_str(
            r#"{"p_values": [3, 4], "alpha_step": 0.05, "trials": 20,
                "predicate": "strict",
                "covariance": {"normalization": "unnormalized", "centering": "center-columns"}}"#,
        )
        .unwrap();
        assert_eq!(cfg.p_values, vec![3, 4]);
        assert_eq!(cfg.alpha_start, 0.01);
        assert_eq!(cfg.trial.predicate, SuccessPredicate::MltLessThanN);
        assert_eq!(
            cfg.trial.covariance.centering,
            crate::glasso::Centering::CenterColumns
        );
        assert!(serde_json::from_str::<GridConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn predicates() {
        assert!(SuccessPredicate::MltAtMostN.holds(2, 2));
        assert!(!SuccessPredicate::MltLessThanN.holds(2, 2));
        assert!(SuccessPredicate::MltLessThanN.holds(1, 2));
    }

    #[test]
    fn cache_behaviour() {
        let cache = MltCache::new(3);
        let k3 = Graph::complete(3).unwrap();
        assert_eq!(cache.mlt(&k3), Ok(3));
        assert_eq!(cache.misses(), 1);
        assert_eq!(cache.mlt(&k3), Ok(3));
        assert_eq!((cache.misses(), cache.hits()), (1, 1));
        assert_eq!(cache.mlt(&Graph::empty(6).unwrap()), Ok(1));
        assert_eq!(cache.get(&k3), Some(3));
        assert_eq!(cache.len(), 2);
        assert!(cache.mlt(&Graph::empty(10).unwrap()).is_err());

        let mut pick = SeededRng::new(8);
        let mut rng = SeededRng::new(81);
        for _ in 0..100 {
            let p = pick.gen_range(1..=9);
            let g = Graph::from_bitmask(p, pick.gen()).unwrap();
            assert_eq!(cache.mlt(&g).unwrap(), mlt(&g, &mut rng).unwrap());
        }
        // audit every entry against a fresh computation
        for (g, v) in cache.entries() {
            assert_eq!(mlt(&g, &mut rng).unwrap(), v);
        }
    }

    #[test]
    fn zero_variance_variables_are_isolated() {
        // one sample, centred: S = 0 and the graph is empty
        let cfg = TrialConfig {
            covariance: CovarianceConfig {
                centering: crate::glasso::Centering::CenterColumns,
                ..CovarianceConfig::default()
            },
            ..TrialConfig::default()
        };
        let x = DenseMatrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let sel = select_from_data(&x, 0.1, &cfg).unwrap();
        assert_eq!(sel.graph.edge_count(), 0);

        let x = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 0.0], vec![2.0, 4.5]]).unwrap();
        let sel = select_from_data(&x, 0.1, &TrialConfig::default()).unwrap();
        assert_eq!(sel.graph.edges(), vec![(1, 3)]);
    }

    #[test]
    fn cell_is_deterministic() {
        let cache = MltCache::new(0);
        let cell = CellSpec {
            p: 5,
            n: 3,
            alpha_index: 4,
            alpha: 0.3,
        };
        let cfg = TrialConfig::default();
        let a = run_cell(cell, 40, 17, &cfg, &cache).unwrap();
        let b = run_cell(cell, 40, 17, &cfg, &MltCache::new(99)).unwrap();
        assert_eq!(a, b);
        assert!(a.ci_low <= a.q_hat && a.q_hat <= a.ci_high);
        let c = run_cell(cell, 40, 18, &cfg, &cache).unwrap();
        assert_eq!(c.trials, 40);

        assert!(run_cell(CellSpec { n: 6, ..cell }, 5, 0, &cfg, &cache).is_err());
        assert!(run_cell(CellSpec { alpha: 0.0, ..cell }, 5, 0, &cfg, &cache).is_err());
        assert!(run_cell(cell, 0, 0, &cfg, &cache).is_err());
    }

    #[test]
    fn large_alpha_selects_nothing() {
        let cache = MltCache::new(0);
        let cell = CellSpec {
            p: 4,
            n: 2,
            alpha_index: 0,
            alpha: 2.0,
        };
        let r = run_cell(cell, 50, 5, &TrialConfig::default(), &cache).unwrap();
        assert_eq!(r.q_hat, 1.0);
        assert_eq!(r.ci_high, 1.0);
    }

    #[test]
    fn csv_round_trip() {
        let cfg = GridConfig {
            p_values: vec![3],
            alpha_start: 0.5,
            alpha_stop: 1.5,
            alpha_step: 0.5,
            trials: 10,
            ..GridConfig::default()
        };
        let results = run_grid(&cfg, 2).unwrap();
        assert_eq!(results.len(), 9);
        let mut buf = Vec::new();
        write_csv(&mut buf, &results, cfg.alpha_grid().decimals).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("p,n,alpha,trials,successes,nonconverged,q_hat,ci_low,ci_high\n"));
        assert!(text.lines().nth(1).unwrap().starts_with("3,1,0.5,10,"));
        let back = read_csv(&buf[..]).unwrap();
        assert_eq!(back.len(), 9);
        for (a, b) in back.iter().zip(&results) {
            assert_eq!((a.p, a.n, a.successes), (b.p, b.n, b.successes));
            assert!((a.q_hat - b.q_hat).abs() < 1e-6);
        }
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
