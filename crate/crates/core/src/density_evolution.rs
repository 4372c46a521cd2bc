//! Density evolution for the peeling decoder on regular and irregular
//! ensembles.
//!
//! `p_i` is the probability that an edge of the pruned graph survives `i`
//! peeling iterations on a cycle-free neighbourhood. Right degrees are taken
//! as Poisson, which gives the closed-form right generating polynomial
//! `ρ(x) = exp(-mean (1 - x))`.

use crate::graph_codes::{harmonic, irregular_average_degree};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITERS: usize = 1000;
/// Points on the uniform grid of `(0, 1]` used by the contraction check.
pub const CONTRACTION_GRID: usize = 10_000;

/// Ensemble whose recursion is traced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DeEnsemble {
    Regular { degree: usize, eta: f64 },
    Irregular { max_degree: usize, eps: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeParams {
    pub ensemble: DeEnsemble,
    pub max_iters: usize,
    pub tol: f64,
}

impl DeParams {
    pub fn regular(degree: usize, eta: f64) -> Self {
        Self {
            ensemble: DeEnsemble::Regular { degree, eta },
            max_iters: DEFAULT_MAX_ITERS,
            tol: DEFAULT_TOL,
        }
    }

    pub fn irregular(max_degree: usize, eps: f64) -> Self {
        Self {
            ensemble: DeEnsemble::Irregular { max_degree, eps },
            max_iters: DEFAULT_MAX_ITERS,
            tol: DEFAULT_TOL,
        }
    }
}

/// Sequence `p_0 = 1, p_1, ...` produced by [`de_trace`].
#[derive(Clone, Debug, PartialEq)]
pub struct DeTrace {
    pub densities: Vec<f64>,
    /// `p_i < tol` was reached.
    pub converged: bool,
    /// Value the recursion settled at when it did not converge.
    pub fixed_point: Option<f64>,
}

impl DeTrace {
    /// Number of iterations performed.
    pub fn iterations(&self) -> usize {
        self.densities.len() - 1
    }

    /// First iteration `i` with `p_i < threshold`.
    pub fn first_below(&self, threshold: f64) -> Option<usize> {
        self.densities.iter().position(|&p| p < threshold)
    }
}

/// One step of the regular recursion `(1 - exp(-(d/η) p))^(d-1)`.
pub fn de_step_regular(p: f64, d: usize, eta: f64) -> f64 {
    let inner = -(-(d as f64 / eta) * p).exp_m1();
    inner.powi(d as i32 - 1).clamp(0.0, 1.0)
}

/// Left edge generating polynomial of the irregular ensemble,
/// `λ(x) = (1/H(D)) sum_{m=1}^{D} x^m / m`, by Horner's scheme.
pub fn left_edge_polynomial(x: f64, max_degree: usize) -> f64 {
    left_edge_polynomial_with(x, max_degree, harmonic(max_degree))
}

fn left_edge_polynomial_with(x: f64, max_degree: usize, h: f64) -> f64 {
    let mut acc = 0.0;
    for m in (1..=max_degree).rev() {
        acc = acc * x + 1.0 / m as f64;
    }
    acc * x / h
}

/// One step of the irregular recursion `λ(1 - ρ(1 - p))` with
/// `ρ(x) = exp(-d̄ (1 - x) / (1 + ε))`.
pub fn de_step_irregular(p: f64, max_degree: usize, eps: f64) -> f64 {
    IrregularMap::new(max_degree, eps).step(p)
}

/// Irregular recursion with `H(D)` and `d̄` precomputed.
#[derive(Clone, Copy, Debug)]
struct IrregularMap {
    max_degree: usize,
    harmonic: f64,
    right_mean: f64,
}

impl IrregularMap {
    fn new(max_degree: usize, eps: f64) -> Self {
        Self {
            max_degree,
            harmonic: harmonic(max_degree),
            right_mean: irregular_average_degree(max_degree) / (1.0 + eps),
        }
    }

    fn step(&self, p: f64) -> f64 {
        // 1 - ρ(1 - p) = 1 - exp(-mean * p)
        let x = -(-self.right_mean * p).exp_m1();
        left_edge_polynomial_with(x, self.max_degree, self.harmonic).clamp(0.0, 1.0)
    }
}

/// Iterates the recursion from `p_0 = 1`.
///
/// Stops when `p_i < tol` (converged), when the relative step
/// `|p_i - p_{i-1}| < tol * p_{i-1}` (stalled at a non-zero fixed point), or
/// after `max_iters` steps. A run that ends without converging records its
/// last density as `fixed_point`.
pub fn de_trace(params: &DeParams) -> DeTrace {
    let step: Box<dyn Fn(f64) -> f64> = match params.ensemble {
        DeEnsemble::Regular { degree, eta } => Box::new(move |p| de_step_regular(p, degree, eta)),
        DeEnsemble::Irregular { max_degree, eps } => {
            let map = IrregularMap::new(max_degree, eps);
            Box::new(move |p| map.step(p))
        }
    };
    let mut densities = vec![1.0];
    let mut prev = 1.0;
    for _ in 0..params.max_iters {
        let p = step(prev);
        densities.push(p);
        if p < params.tol {
            return DeTrace {
                densities,
                converged: true,
                fixed_point: None,
            };
        }
        if (p - prev).abs() < params.tol * prev {
            break;
        }
        prev = p;
    }
    let last = *densities.last().unwrap();
    DeTrace {
        densities,
        converged: false,
        fixed_point: Some(last),
    }
}

/// `f(p) < p` on every point of the uniform grid of `(0, 1]`.
pub fn is_contracting_regular(d: usize, eta: f64) -> bool {
    (1..=CONTRACTION_GRID).all(|i| {
        let p = i as f64 / CONTRACTION_GRID as f64;
        de_step_regular(p, d, eta) < p
    })
}

pub fn is_contracting_irregular(max_degree: usize, eps: f64) -> bool {
    let map = IrregularMap::new(max_degree, eps);
    (1..=CONTRACTION_GRID).all(|i| {
        let p = i as f64 / CONTRACTION_GRID as f64;
        map.step(p) < p
    })
}

/// Smallest redundancy `η` (to within `tol`) for which the regular
/// recursion with degree `d` is contracting.
pub fn min_eta(d: usize, tol: f64) -> f64 {
    assert!(d >= 2, "degree must be at least 2");
    assert!(tol > 0.0, "tolerance must be positive");
    // (1 - e^{-p})^{d-1} < p on (0, 1], so η = d always contracts.
    let (mut lo, mut hi) = (0.0, d as f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if is_contracting_regular(d, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
