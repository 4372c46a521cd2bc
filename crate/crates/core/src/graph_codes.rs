//! Sparse bipartite graph ensembles that define the coding matrix `H`.
//!
//! Left nodes are signal coefficients (`N` of them), right nodes are bins
//! (`R` of them). The coding matrix is the `R x N` bi-adjacency matrix of the
//! graph, stored by both its row supports (left neighbours of each bin) and
//! its column supports (bins touched by each coefficient).

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Largest left-node count accepted by [`is_expander`].
pub const EXPANDER_MAX_LEFT: usize = 24;

/// Binary coding matrix of a bipartite graph, stored sparsely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodingMatrix {
    n_left: usize,
    n_right: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
}

impl CodingMatrix {
    /// Builds a matrix from the right-neighbour list of every left node.
    ///
    /// Each list is sorted; duplicates or out-of-range right nodes are
    /// rejected.
    pub fn from_columns(n_right: usize, mut cols: Vec<Vec<usize>>) -> Result<Self> {
        let mut rows = vec![Vec::new(); n_right];
        for (n, col) in cols.iter_mut().enumerate() {
            col.sort_unstable();
            if col.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidEnsemble(format!(
                    "left node {n} has a repeated right neighbour"
                )));
            }
            for &r in col.iter() {
                if r >= n_right {
                    return Err(Error::InvalidEnsemble(format!(
                        "left node {n} connects to right node {r} >= R = {n_right}"
                    )));
                }
                rows[r].push(n);
            }
        }
        Ok(Self {
            n_left: cols.len(),
            n_right,
            rows,
            cols,
        })
    }

    /// Builds a matrix from `(right, left)` edge pairs.
    pub fn from_edges(n_left: usize, n_right: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut cols = vec![Vec::new(); n_left];
        for &(r, n) in edges {
            if n >= n_left {
                return Err(Error::InvalidEnsemble(format!(
                    "edge ({r}, {n}) references left node >= N = {n_left}"
                )));
            }
            cols[n].push(r);
        }
        Self::from_columns(n_right, cols)
    }

    /// Signal dimension `N`.
    pub fn n_left(&self) -> usize {
        self.n_left
    }

    /// Number of bins `R`.
    pub fn n_right(&self) -> usize {
        self.n_right
    }

    /// Sorted left neighbours of right node `r`.
    pub fn row(&self, r: usize) -> &[usize] {
        &self.rows[r]
    }

    /// Sorted right neighbours of left node `n`.
    pub fn col(&self, n: usize) -> &[usize] {
        &self.cols[n]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    /// `H[r][n] == 1`.
    pub fn contains(&self, r: usize, n: usize) -> bool {
        self.cols[n].binary_search(&r).is_ok()
    }

    pub fn num_edges(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    /// Realized average left degree `d̄`.
    pub fn average_left_degree(&self) -> f64 {
        if self.n_left == 0 {
            return 0.0;
        }
        self.num_edges() as f64 / self.n_left as f64
    }

    /// Checks that rows and columns describe the same edge set.
    pub fn is_transpose_consistent(&self) -> bool {
        let mut rebuilt = vec![Vec::new(); self.n_right];
        for (n, col) in self.cols.iter().enumerate() {
            for &r in col {
                if r >= self.n_right {
                    return false;
                }
                rebuilt[r].push(n);
            }
        }
        rebuilt == self.rows && self.cols.iter().all(|c| c.windows(2).all(|w| w[0] < w[1]))
    }
}

/// Which ensemble a coding matrix is drawn from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EnsembleKind {
    /// Every left node has degree `degree`.
    Regular { degree: usize },
    /// Left edge-degree fractions `λ_j = 1/(H(D)(j-1))` for `j = 2..=D+1`.
    Irregular { max_degree: usize },
}

/// Graph ensemble together with its redundancy parameter: `η = R/K` for the
/// regular ensemble, `ε = R/K - 1` for the irregular one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub param: f64,
}

impl EnsembleSpec {
    pub fn regular(degree: usize, eta: f64) -> Self {
        Self {
            kind: EnsembleKind::Regular { degree },
            param: eta,
        }
    }

    pub fn irregular(max_degree: usize, eps: f64) -> Self {
        Self {
            kind: EnsembleKind::Irregular { max_degree },
            param: eps,
        }
    }

    /// `R/K`.
    pub fn redundancy(&self) -> f64 {
        match self.kind {
            EnsembleKind::Regular { .. } => self.param,
            EnsembleKind::Irregular { .. } => 1.0 + self.param,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.param > 0.0) || !self.param.is_finite() {
            return Err(Error::InvalidEnsemble(format!(
                "redundancy parameter must be positive, got {}",
                self.param
            )));
        }
        match self.kind {
            EnsembleKind::Regular { degree } if degree < 2 => Err(Error::InvalidEnsemble(
                format!("regular degree must be at least 2, got {degree}"),
            )),
            EnsembleKind::Irregular { max_degree } if max_degree < 2 => {
                Err(Error::InvalidEnsemble(format!(
                    "irregular max-degree parameter must be at least 2, got {max_degree}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Number of right nodes `R = round(redundancy * K)`, at least 1.
    pub fn right_nodes(&self, sparsity: usize) -> usize {
        ((self.redundancy() * sparsity as f64).round() as usize).max(1)
    }

    /// The degree parameter: `d` for regular, `D` for irregular.
    pub fn degree_param(&self) -> usize {
        match self.kind {
            EnsembleKind::Regular { degree } => degree,
            EnsembleKind::Irregular { max_degree } => max_degree,
        }
    }

    /// `η` for regular, `ε` for irregular.
    pub fn redundancy_param(&self) -> f64 {
        self.param
    }

    pub fn sample(&self, n: usize, r: usize, seed: u64) -> Result<CodingMatrix> {
        match self.kind {
            EnsembleKind::Regular { degree } => sample_regular(n, r, degree, seed),
            EnsembleKind::Irregular { max_degree } => sample_irregular(n, r, max_degree, seed),
        }
    }
}

fn sample_neighbours(rng: &mut crate::rng::StdRng, r: usize, degree: usize) -> Vec<usize> {
    let mut col = rand::seq::index::sample(rng, r, degree).into_vec();
    col.sort_unstable();
    col
}

/// Samples from the left `d`-regular ensemble: every left node picks `d`
/// distinct right nodes uniformly at random.
pub fn sample_regular(n: usize, r: usize, d: usize, seed: u64) -> Result<CodingMatrix> {
    if r == 0 {
        return Err(Error::InvalidEnsemble("R must be at least 1".into()));
    }
    if d < 2 {
        return Err(Error::InvalidEnsemble(format!(
            "regular degree must be at least 2, got {d}"
        )));
    }
    if d > r {
        return Err(Error::InvalidEnsemble(format!(
            "degree {d} exceeds the number of right nodes {r}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let cols = (0..n).map(|_| sample_neighbours(&mut rng, r, d)).collect();
    CodingMatrix::from_columns(r, cols)
}

/// Harmonic number `H(D) = sum_{j=1}^{D} 1/j`.
pub fn harmonic(d: usize) -> f64 {
    (1..=d).rev().map(|j| 1.0 / j as f64).sum()
}

/// Edge-perspective left degree fractions `λ_j`, indexed from `j = 2`.
pub fn irregular_edge_fractions(max_degree: usize) -> Vec<f64> {
    let h = harmonic(max_degree);
    (2..=max_degree + 1)
        .map(|j| 1.0 / (h * (j - 1) as f64))
        .collect()
}

/// Node-perspective left degree fractions `ν_j ∝ λ_j / j`, indexed from
/// `j = 2`.
pub fn irregular_node_fractions(max_degree: usize) -> Vec<f64> {
    let raw: Vec<f64> = irregular_edge_fractions(max_degree)
        .iter()
        .zip(2..)
        .map(|(l, j)| l / j as f64)
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Average left degree `d̄ = H(D)(1 + 1/D)` of the irregular ensemble.
pub fn irregular_average_degree(max_degree: usize) -> f64 {
    harmonic(max_degree) * (1.0 + 1.0 / max_degree as f64)
}

/// Samples from the irregular ensemble with maximum left degree `D + 1`.
pub fn sample_irregular(n: usize, r: usize, max_degree: usize, seed: u64) -> Result<CodingMatrix> {
    if r == 0 {
        return Err(Error::InvalidEnsemble("R must be at least 1".into()));
    }
    if max_degree < 2 {
        return Err(Error::InvalidEnsemble(format!(
            "irregular max-degree parameter must be at least 2, got {max_degree}"
        )));
    }
    let weights = irregular_node_fractions(max_degree);
    let degree_dist = WeightedIndex::new(&weights)
        .map_err(|e| Error::InvalidEnsemble(format!("degree distribution: {e}")))?;
    let mut rng = rng_from_seed(seed);
    let mut cols = Vec::with_capacity(n);
    for _ in 0..n {
        let degree = degree_dist.sample(&mut rng) + 2;
        if degree > r {
            return Err(Error::InvalidEnsemble(format!(
                "sampled left degree {degree} exceeds the number of right nodes {r}"
            )));
        }
        cols.push(sample_neighbours(&mut rng, r, degree));
    }
    CodingMatrix::from_columns(r, cols)
}

/// Restricts `h` to the columns in `support`.
///
/// The result has `support.len()` left nodes, renumbered in ascending order of
/// the original indices; right nodes keep their labels.
pub fn prune(h: &CodingMatrix, support: &[usize]) -> Result<CodingMatrix> {
    let mut support = support.to_vec();
    support.sort_unstable();
    support.dedup();
    if let Some(&bad) = support.iter().find(|&&n| n >= h.n_left()) {
        return Err(Error::InvalidDimension(format!(
            "support index {bad} outside [0, {})",
            h.n_left()
        )));
    }
    let cols = support.iter().map(|&n| h.col(n).to_vec()).collect();
    CodingMatrix::from_columns(h.n_right(), cols)
}

/// Exhaustive `(eps, 1/2)`-expander check on a left-`d`-regular graph.
///
/// Returns `true` iff every left subset `S` with `|S| <= eps * K` has more than
/// `d |S| / 2` distinct right neighbours.
pub fn is_expander(h: &CodingMatrix, eps: f64, d: usize) -> Result<bool> {
    is_expander_with_cap(h, eps, d, EXPANDER_MAX_LEFT)
}

pub fn is_expander_with_cap(h: &CodingMatrix, eps: f64, d: usize, cap: usize) -> Result<bool> {
    let k = h.n_left();
    if k > cap {
        return Err(Error::Capacity {
            what: "left nodes for exhaustive expander check",
            size: k,
            limit: cap,
        });
    }
    if let Some(n) = (0..k).find(|&n| h.col(n).len() != d) {
        return Err(Error::InvalidEnsemble(format!(
            "left node {n} has degree {} but d = {d}",
            h.col(n).len()
        )));
    }
    let max_size = ((eps * k as f64) + 1e-9).floor() as usize;
    let mut counts = vec![0usize; h.n_right()];
    Ok(expands(h, d, max_size, 0, 0, 0, &mut counts))
}

/// Depth-first enumeration of subsets; `distinct` is `|N(S)|` for the subset
/// currently encoded in `counts`.
fn expands(
    h: &CodingMatrix,
    d: usize,
    max_size: usize,
    start: usize,
    size: usize,
    distinct: usize,
    counts: &mut [usize],
) -> bool {
    if size == max_size {
        return true;
    }
    for n in start..h.n_left() {
        let mut added = 0;
        for &r in h.col(n) {
            if counts[r] == 0 {
                added += 1;
            }
            counts[r] += 1;
        }
        let new_size = size + 1;
        let ok = 2 * (distinct + added) > d * new_size
            && expands(h, d, max_size, n + 1, new_size, distinct + added, counts);
        for &r in h.col(n) {
            counts[r] -= 1;
        }
        if !ok {
            return false;
        }
    }
    true
}
