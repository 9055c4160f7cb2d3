//! Rigidity matrices, generic rank, generic completion rank (GCR), and the
//! maximum likelihood threshold of graphs on at most nine vertices, where
//! the two coincide.
//!
//! Generic rank is computed exactly over the prime field of
//! [`crate::numerics::MODULUS`]: a uniformly random point never yields a
//! rank above the generic one, and falls below it only with probability
//! bounded by (polynomial degree) / q. Taking the maximum over a few
//! independent points makes a miss practically impossible.

use thiserror::Error;

use crate::graphs::Graph;
use crate::numerics::{field_rank, sample_uniform_field, DenseMatrix, Fp, Scalar, SeededRng};

/// Largest vertex count for which GCR equals the MLT.
pub const MAX_MLT_VERTICES: usize = 9;

/// Independent random points tried per generic-rank query.
pub const RANK_TRIALS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RigidityError {
    #[error("configuration has {rows} rows but the graph has {p} vertices")]
    DimensionMismatch { rows: usize, p: usize },
    #[error("MLT is only computed for graphs with at most {MAX_MLT_VERTICES} vertices, got {0}")]
    TooManyVertices(usize),
    #[error("internal inconsistency: rank never reached |E| = {edges} up to dimension {max_dim}")]
    Inconsistent { edges: usize, max_dim: usize },
}

/// `|E| x (p·n)` rigidity matrix of a graph at a configuration `X ∈ T^{p×n}`.
/// Column `(i, k)` (vertex `i`, coordinate `k`) sits at index `i·n + k`.
#[derive(Clone, Debug, PartialEq)]
pub struct RigidityMatrix<T> {
    pub graph: Graph,
    pub dim: usize,
    pub body: DenseMatrix<T>,
}

/// Builds the rigidity matrix: the row of edge `{i, j}` holds `X_i − X_j`
/// in the block of vertex `i`, `X_j − X_i` in the block of `j`, and zeros
/// elsewhere. Rows follow the lexicographic edge order.
pub fn rigidity_matrix<T: Scalar>(
    g: &Graph,
    x: &DenseMatrix<T>,
) -> Result<RigidityMatrix<T>, RigidityError> {
    let p = g.vertex_count();
    if x.rows() != p {
        return Err(RigidityError::DimensionMismatch { rows: x.rows(), p });
    }
    let n = x.cols();
    let edges: Vec<_> = g.edges0().collect();
    let mut body = DenseMatrix::zeros(edges.len(), p * n);
    for (e, &(i, j)) in edges.iter().enumerate() {
        for k in 0..n {
            let d = x[(i, k)] - x[(j, k)];
            body[(e, i * n + k)] = d;
            body[(e, j * n + k)] = -d;
        }
    }
    Ok(RigidityMatrix {
        graph: g.clone(),
        dim: n,
        body,
    })
}

/// Result of a generic rank query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericRankReport {
    pub graph: Graph,
    pub dim: usize,
    pub rank: usize,
    /// Random points actually evaluated.
    pub trials: usize,
}

/// Generic rank `r_dim` of the rigidity matrix of `g`.
///
/// Takes the maximum field rank over up to [`RANK_TRIALS`] random points,
/// stopping early once the trivial bound `min(|E|, p·dim)` is reached.
/// Dimension 0 gives an `|E| x 0` matrix of rank 0.
pub fn generic_rank(g: &Graph, dim: usize, rng: &mut SeededRng) -> GenericRankReport {
    let p = g.vertex_count();
    let ceiling = g.edge_count().min(p * dim);
    let mut rank = 0;
    let mut trials = 0;
    while rank < ceiling && trials < RANK_TRIALS {
        let x = sample_uniform_field(rng, p, dim).expect("p and dim are positive here");
        let r = rigidity_matrix::<Fp>(g, &x).expect("x has p rows");
        rank = rank.max(field_rank(&r.body));
        trials += 1;
    }
    GenericRankReport {
        graph: g.clone(),
        dim,
        rank,
        trials,
    }
}

/// Generic completion rank: the least `n >= 1` with `r_{n−1} = |E|`.
///
/// Works for any vertex count, though it only equals the MLT up to nine
/// vertices. `r_{p−1} = |E|` holds for every graph, so the search is capped
/// at `n = p + 1` and reaching the cap is reported as an internal error.
pub fn gcr(g: &Graph, rng: &mut SeededRng) -> Result<usize, RigidityError> {
    let edges = g.edge_count();
    if edges == 0 {
        return Ok(1);
    }
    let p = g.vertex_count();
    for n in 1..=p + 1 {
        if generic_rank(g, n - 1, rng).rank == edges {
            return Ok(n);
        }
    }
    Err(RigidityError::Inconsistent { edges, max_dim: p })
}

/// Maximum likelihood threshold of a graph on at most nine vertices.
pub fn mlt(g: &Graph, rng: &mut SeededRng) -> Result<usize, RigidityError> {
    if g.vertex_count() > MAX_MLT_VERTICES {
        return Err(RigidityError::TooManyVertices(g.vertex_count()));
    }
    gcr(g, rng)
}
