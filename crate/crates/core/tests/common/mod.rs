#![allow(dead_code)]

use rand::Rng;
use rand_distr::StandardNormal;
use sgcs::rng::StdRng;
use sgcs::{CodingMatrix, SparseSignal, C64};

/// Bin labels in the worked example start at 1; bin `label` is index
/// `label - 1` here.
pub const WORKED_EDGES: [(usize, [usize; 2]); 5] = [
    (1, [2, 6]),
    (3, [4, 8]),
    (5, [2, 5]),
    (10, [3, 5]),
    (13, [2, 8]),
];

pub const WORKED_VALUES: [(usize, f64); 5] = [(1, 1.0), (3, 4.0), (5, 2.0), (10, 3.0), (13, 7.0)];

/// The N = 20, R = 9, d = 2 graph of the five-coefficient worked example.
/// Coefficients outside the support get arbitrary degree-2 columns.
pub fn worked_graph() -> CodingMatrix {
    let mut cols: Vec<Vec<usize>> = (0..20).map(|n| vec![n % 9, (n + 4) % 9]).collect();
    for (k, labels) in WORKED_EDGES {
        cols[k] = labels.iter().map(|l| l - 1).collect();
    }
    CodingMatrix::from_columns(9, cols).unwrap()
}

pub fn worked_signal() -> SparseSignal {
    SparseSignal::new(20, WORKED_VALUES.iter().map(|&(k, v)| (k, C64::new(v, 0.0)))).unwrap()
}

/// The N = 8, R = 5, d = 2 graph whose pruned graph on {1, 4, 5, 6} has a
/// single degree-one right node.
pub fn stall_graph() -> CodingMatrix {
    let cols = vec![
        vec![0, 4],
        vec![2, 3],
        vec![3, 4],
        vec![0, 2],
        vec![0, 1],
        vec![1, 3],
        vec![1, 2],
        vec![2, 4],
    ];
    CodingMatrix::from_columns(5, cols).unwrap()
}

pub fn cn(rng: &mut StdRng, sigma2: f64) -> C64 {
    let s = (sigma2 / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

pub fn add_noise(y: &mut [C64], rng: &mut StdRng, sigma2: f64) {
    for v in y {
        *v += cn(rng, sigma2);
    }
}

/// Per-sample noise variance for a coefficient of unit magnitude at `snr_db`.
pub fn sigma2_for(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Upper `1 - 1e-3` quantile of χ² with `df` degrees of freedom
/// (Wilson-Hilferty).
pub fn chi2_crit_999(df: usize) -> f64 {
    let z = 3.090_232;
    let k = df as f64;
    let a = 2.0 / (9.0 * k);
    k * (1.0 - a + z * a.sqrt()).powi(3)
}

/// Pearson statistic of `observed` against probabilities `p`, with cells of
/// expected count below 5 pooled into their neighbour. Returns
/// `(statistic, degrees of freedom)`.
pub fn chi2_stat(observed: &[u64], p: &[f64]) -> (f64, usize) {
    let total: u64 = observed.iter().sum();
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for (o, pi) in observed.iter().zip(p) {
        o_acc += *o as f64;
        e_acc += pi * total as f64;
        if e_acc >= 5.0 {
            cells.push((o_acc, e_acc));
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if let Some(last) = cells.last_mut() {
        last.0 += o_acc;
        last.1 += e_acc;
    }
    let stat = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    (stat, cells.len() - 1)
}

pub fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut log_c = 0.0f64;
    for k in 0..=n {
        if k > 0 {
            log_c += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        out.push((log_c + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp());
    }
    out
}
