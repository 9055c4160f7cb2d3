//! Graphical lasso: the sparse precision estimate minimizing
//!
//! ```text
//! Tr(S K) − log det K + α Σ_{i≠j} |K_ij|
//! ```
//!
//! over positive definite `K`, and the graph of its nonzero off-diagonal
//! entries. Only off-diagonal entries are penalized, so at the optimum the
//! working covariance `W = K⁻¹` matches `S` on the diagonal.
//!
//! The solver is block coordinate ascent on the dual: each column of `W`
//! is updated by solving a lasso subproblem with cyclic coordinate descent
//! and soft thresholding, which produces exact zeros in `K`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{Graph, GraphError};
use crate::numerics::{cholesky, log_det, DenseMatrix, NumericsError, Real, SpdMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GlassoError {
    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("covariance matrix is empty")]
    Empty,
    #[error("covariance matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("covariance matrix is not symmetric")]
    NotSymmetric,
    #[error("covariance diagonal entry {0} is not positive")]
    NonPositiveDiagonal(usize),
    #[error("data matrix has no samples")]
    NoSamples,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `S = X Xᵀ / n`
    #[default]
    SampleAveraged,
    /// `S = X Xᵀ`
    Unnormalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Centering {
    #[default]
    AssumeZeroMean,
    /// Subtract the per-variable mean over the samples first.
    CenterColumns,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CovarianceConfig {
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default)]
    pub centering: Centering,
}

/// Scatter matrix of a `p x n` data matrix whose columns are samples.
///
/// The result is symmetric positive semidefinite and singular when `n < p`.
pub fn empirical_covariance<T: Real>(
    x: &DenseMatrix<T>,
    cfg: CovarianceConfig,
) -> Result<DenseMatrix<T>, GlassoError> {
    let (p, n) = (x.rows(), x.cols());
    if n == 0 {
        return Err(GlassoError::NoSamples);
    }
    let mut xc = x.clone();
    if cfg.centering == Centering::CenterColumns {
        let nt = T::from_usize(n).expect("sample count fits");
        for i in 0..p {
            let row = xc.row_mut(i);
            let mean = row.iter().fold(T::zero(), |a, &v| a + v) / nt;
            row.iter_mut().for_each(|v| *v = *v - mean);
        }
    }
    let scale = match cfg.normalization {
        Normalization::SampleAveraged => T::one() / T::from_usize(n).expect("sample count fits"),
        Normalization::Unnormalized => T::one(),
    };
    let mut s = DenseMatrix::zeros(p, p);
    for i in 0..p {
        for j in 0..=i {
            let dot = xc
                .row(i)
                .iter()
                .zip(xc.row(j))
                .fold(T::zero(), |a, (&u, &v)| a + u * v);
            s[(i, j)] = dot * scale;
            s[(j, i)] = dot * scale;
        }
    }
    Ok(s)
}

/// `max_{i≠j} |S_ij|`, the smallest penalty at which the estimate is
/// diagonal. Zero for `1 x 1` input.
pub fn alpha_max<T: Real>(s: &DenseMatrix<T>) -> T {
    let p = s.rows();
    let mut m = T::zero();
    for i in 0..p {
        for j in 0..p {
            if i != j {
                m = m.max(s[(i, j)].abs());
            }
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlassoOptions {
    /// Convergence threshold on the duality gap.
    pub tol: f64,
    /// Maximum outer sweeps over all columns.
    pub max_iter: usize,
}

impl Default for GlassoOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 200,
        }
    }
}

// Coordinate-descent sweeps allowed per lasso subproblem.
const MAX_INNER_SWEEPS: usize = 10_000;

#[derive(Debug, Clone)]
pub struct GlassoSolution<T> {
    /// Precision estimate `K`.
    pub precision: SpdMatrix<T>,
    /// Working covariance `W ≈ K⁻¹`.
    pub covariance: SpdMatrix<T>,
    pub alpha: T,
    pub iterations: usize,
    pub duality_gap: T,
    pub converged: bool,
}

fn soft_threshold<T: Real>(v: T, t: T) -> T {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        T::zero()
    }
}

/// `Tr(S K) + α Σ_{i≠j} |K_ij| − p` without checking that `K` is
/// positive definite.
fn gap_unchecked<T: Real>(s: &DenseMatrix<T>, k: &DenseMatrix<T>, alpha: T) -> T {
    let p = s.rows();
    let mut trace = T::zero();
    let mut l1 = T::zero();
    for i in 0..p {
        for j in 0..p {
            trace = trace + s[(i, j)] * k[(j, i)];
            if i != j {
                l1 = l1 + k[(i, j)].abs();
            }
        }
    }
    trace + alpha * l1 - T::from_usize(p).expect("dimension fits")
}

/// Duality gap of the graphical lasso at a primal point `K`, taking
/// `W = K⁻¹` as the dual point. Zero exactly at the optimum.
pub fn duality_gap<T: Real>(
    s: &DenseMatrix<T>,
    k: &DenseMatrix<T>,
    alpha: T,
) -> Result<T, GlassoError> {
    check_square(s)?;
    if (k.rows(), k.cols()) != (s.rows(), s.cols()) {
        return Err(NumericsError::Shape("K and S differ in shape".into()).into());
    }
    cholesky(k)?;
    Ok(gap_unchecked(s, k, alpha))
}

/// Value of the penalized negative log-likelihood at `K`.
pub fn glasso_objective<T: Real>(
    s: &DenseMatrix<T>,
    k: &SpdMatrix<T>,
    alpha: T,
) -> Result<T, GlassoError> {
    let p = T::from_usize(s.rows()).expect("dimension fits");
    Ok(gap_unchecked(s, k.matrix(), alpha) + p - log_det(k)?)
}

fn check_square<T: Real>(s: &DenseMatrix<T>) -> Result<(), GlassoError> {
    if !s.is_square() {
        return Err(GlassoError::NotSquare(s.rows(), s.cols()));
    }
    if s.rows() == 0 {
        return Err(GlassoError::Empty);
    }
    if !s.is_symmetric(T::epsilon().sqrt()) {
        return Err(GlassoError::NotSymmetric);
    }
    Ok(())
}

/// Fits the graphical lasso to a symmetric positive semidefinite `S`.
///
/// The iteration starts from `W = diag(S)` when `α ≥ alpha_max(S)`, where
/// that is already the answer, and otherwise from `S` with its off-diagonal
/// shrunk just enough to be dual feasible. It stops when the duality gap falls below
/// `opts.tol`; after `opts.max_iter` sweeps the iterate with the smallest
/// gap is returned with `converged = false`.
pub fn glasso_fit<T: Real>(
    s: &DenseMatrix<T>,
    alpha: T,
    opts: GlassoOptions,
) -> Result<GlassoSolution<T>, GlassoError> {
    if !(alpha > T::zero()) {
        return Err(GlassoError::NonPositiveAlpha(
            alpha.to_f64().unwrap_or(f64::NAN),
        ));
    }
    if !(opts.tol > 0.0) {
        return Err(GlassoError::NonPositiveTolerance(opts.tol));
    }
    check_square(s)?;
    let p = s.rows();
    if let Some(i) = (0..p).find(|&i| !(s[(i, i)] > T::zero())) {
        return Err(GlassoError::NonPositiveDiagonal(i));
    }

    let tol = T::lit(opts.tol);
    let inner_tol = tol / T::lit(1000.0);
    // Start from a strictly feasible dual point, W = (1 − λ) S + λ diag(S)
    // with λ = min(1, α / alpha_max): positive definite, diagonal equal to
    // S, and off-diagonal within α of S. Each column update then keeps W
    // feasible and positive definite.
    let amax = alpha_max(s);
    let lambda = if amax > alpha { alpha / amax } else { T::one() };
    let mut w = DenseMatrix::from_fn(p, p, |i, j| {
        if i == j {
            s[(i, i)]
        } else {
            s[(i, j)] * (T::one() - lambda)
        }
    });
    // beta[(k, j)]: lasso coefficient of variable k in the subproblem for column j
    let mut beta = DenseMatrix::<T>::zeros(p, p);
    let mut k = DenseMatrix::<T>::zeros(p, p);
    let mut wb = vec![T::zero(); p];
    let mut best: Option<(T, DenseMatrix<T>, DenseMatrix<T>)> = None;
    let mut iterations = 0;

    for iter in 1..=opts.max_iter.max(1) {
        iterations = iter;
        for j in 0..p {
            for kk in (0..p).filter(|&kk| kk != j) {
                wb[kk] = (0..p)
                    .filter(|&l| l != j)
                    .fold(T::zero(), |a, l| a + w[(kk, l)] * beta[(l, j)]);
            }
            for _ in 0..MAX_INNER_SWEEPS {
                let mut max_change = T::zero();
                for kk in (0..p).filter(|&kk| kk != j) {
                    let old = beta[(kk, j)];
                    let wkk = w[(kk, kk)];
                    let r = s[(kk, j)] - (wb[kk] - wkk * old);
                    let new = soft_threshold(r, alpha) / wkk;
                    let delta = new - old;
                    if delta != T::zero() {
                        for l in (0..p).filter(|&l| l != j) {
                            wb[l] = wb[l] + w[(l, kk)] * delta;
                        }
                        beta[(kk, j)] = new;
                        max_change = max_change.max(delta.abs() * wkk);
                    }
                }
                if max_change < inner_tol {
                    break;
                }
            }
            for kk in (0..p).filter(|&kk| kk != j) {
                w[(kk, j)] = wb[kk];
                w[(j, kk)] = wb[kk];
            }
        }

        for j in 0..p {
            let schur = (0..p)
                .filter(|&l| l != j)
                .fold(w[(j, j)], |a, l| a - w[(l, j)] * beta[(l, j)]);
            let kjj = T::one() / schur;
            k[(j, j)] = kjj;
            for l in (0..p).filter(|&l| l != j) {
                let v = -beta[(l, j)] * kjj;
                k[(l, j)] = v;
                k[(j, l)] = v;
            }
        }

        let gap = gap_unchecked(s, &k, alpha);
        if gap.abs() < tol {
            return Ok(GlassoSolution {
                precision: SpdMatrix::new_unchecked(k),
                covariance: SpdMatrix::new_unchecked(w),
                alpha,
                iterations,
                duality_gap: gap,
                converged: true,
            });
        }
        if best.as_ref().is_none_or(|(g, _, _)| gap.abs() < g.abs()) {
            best = Some((gap, k.clone(), w.clone()));
        }
    }

    let (gap, k, w) = best.expect("at least one sweep ran");
    Ok(GlassoSolution {
        precision: SpdMatrix::new_unchecked(k),
        covariance: SpdMatrix::new_unchecked(w),
        alpha,
        iterations,
        duality_gap: gap,
        converged: false,
    })
}

/// Graph selected by a precision estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectedGraph<T> {
    pub graph: Graph,
    pub source_alpha: T,
}

/// Edge `{i, j}` whenever `|K_ij| > zero_tol`.
pub fn select_graph<T: Real>(
    sol: &GlassoSolution<T>,
    zero_tol: T,
) -> Result<SelectedGraph<T>, GlassoError> {
    Ok(SelectedGraph {
        graph: support_graph(sol.precision.matrix(), zero_tol)?,
        source_alpha: sol.alpha,
    })
}

/// Off-diagonal support of a square matrix as a graph.
pub fn support_graph<T: Real>(k: &DenseMatrix<T>, zero_tol: T) -> Result<Graph, GlassoError> {
    let p = k.rows();
    let mut g = Graph::empty(p)?;
    for i in 0..p {
        for j in i + 1..p {
            if k[(i, j)].abs() > zero_tol || k[(j, i)].abs() > zero_tol {
                g.insert_edge(i + 1, j + 1)?;
            }
        }
    }
    Ok(g)
}
