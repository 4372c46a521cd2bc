//! Robust bin detection under additive Gaussian noise.
//!
//! Every bin goes through the same three steps: an energy test for
//! zero-tons, a single-ton search that proposes an index-value pair, and a
//! residual test that accepts the pair or declares a multi-ton. The search
//! is either maximum likelihood over the bin's coding row, or successive
//! frequency refinement on a clustered DFT matrix.

mod kay;
mod region;

pub use kay::{kay_estimate, kay_estimate_centered, kay_weights};
pub use region::{unwrapped_measure, CertaintyRegion};

use crate::detect_noiseless::{BinDetector, BinHypothesis};
use crate::error::{Error, Result};
use crate::measurement::{Alphabet, BinDetectionMatrix, Flavor, C64};

/// Default threshold slack `γ`.
pub const DEFAULT_GAMMA: f64 = 0.2;

/// Mean energy always treated as zero, so that bins emptied by exact
/// subtraction pass with `σ² = 0`.
pub const ENERGY_FLOOR: f64 = 1e-20;

/// Single-ton search strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchFlavor {
    /// Exhaustive residual minimization over the coding row.
    Ml,
    /// Successive frequency estimation over DFT clusters.
    Clustered,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectorConfig {
    pub gamma: f64,
    pub sigma2: f64,
    pub alphabet: Alphabet,
    pub flavor: SearchFlavor,
}

impl DetectorConfig {
    pub fn new(gamma: f64, sigma2: f64, alphabet: Alphabet, flavor: SearchFlavor) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidConfig(format!("gamma must lie in (0, 1), got {gamma}")));
        }
        if !(sigma2 >= 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidConfig(format!("noise variance must be >= 0, got {sigma2}")));
        }
        Ok(Self {
            gamma,
            sigma2,
            alphabet,
            flavor,
        })
    }

    /// `(1 + γ) σ²`, the largest mean energy attributed to noise.
    pub fn threshold(&self) -> f64 {
        (1.0 + self.gamma) * self.sigma2 + ENERGY_FLOOR
    }
}

fn mean_energy(y: &[C64]) -> f64 {
    y.iter().map(|v| v.norm_sqr()).sum::<f64>() / y.len() as f64
}

/// `‖y‖² / P ≤ (1 + γ) σ²`.
pub fn zero_ton_test(y: &[C64], cfg: &DetectorConfig) -> bool {
    mean_energy(y) <= cfg.threshold()
}

/// `‖y - x̂ s_k‖² / P ≤ (1 + γ) σ²`.
pub fn verify_singleton(y: &[C64], s_k: &[C64], xhat: C64, cfg: &DetectorConfig) -> bool {
    let energy: f64 = y.iter().zip(s_k).map(|(a, s)| (a - xhat * s).norm_sqr()).sum();
    energy / y.len() as f64 <= cfg.threshold()
}

/// `(s^† y, ‖s‖²)`.
fn project(y: &[C64], s: &[C64]) -> (C64, f64) {
    let mut dot = C64::new(0.0, 0.0);
    let mut norm = 0.0;
    for (a, b) in y.iter().zip(s) {
        dot += b.conj() * a;
        norm += b.norm_sqr();
    }
    (dot, norm)
}

/// Best of `ks` by `‖y - a_k s_k‖² = ‖y‖² - |s_k^† y|² / ‖s_k‖²`; returns
/// `(k, a_k)`. Ties go to the smallest index.
fn best_projection(
    y: &[C64],
    s: &BinDetectionMatrix,
    ks: impl Iterator<Item = usize>,
) -> Option<(usize, C64)> {
    let mut buf = Vec::with_capacity(s.rows());
    let mut best: Option<(usize, C64, f64)> = None;
    for k in ks {
        let (dot, norm) = project(y, s.column(k, &mut buf));
        if norm == 0.0 {
            continue;
        }
        // Maximizing the captured energy minimizes the residual.
        let captured = dot.norm_sqr() / norm;
        let better = match best {
            None => true,
            Some((bk, _, bc)) => captured > bc || (captured == bc && k < bk),
        };
        if better {
            best = Some((k, dot / norm, captured));
        }
    }
    best.map(|(k, a, _)| (k, a))
}

/// Exhaustive single-ton search over `candidates`; the value is quantized to
/// the alphabet.
pub fn ml_singleton_search(
    y: &[C64],
    s: &BinDetectionMatrix,
    candidates: &[usize],
    cfg: &DetectorConfig,
) -> Result<(usize, C64)> {
    let (k, a) = best_projection(y, s, candidates.iter().copied()).ok_or(Error::NoCandidate)?;
    Ok((k, cfg.alphabet.nearest(a)))
}

/// Base-frequency certainty region fused from all clusters of `y`.
pub fn fuse_clusters(y: &[C64], s: &BinDetectionMatrix) -> Result<CertaintyRegion> {
    let (clusters, per_cluster) = s
        .cluster_shape()
        .ok_or_else(|| Error::InvalidConfig("clustered search needs a clustered DFT matrix".into()))?;
    let mut region: Option<CertaintyRegion> = None;
    for c in 0..clusters {
        let est = kay_estimate_centered(&y[c * per_cluster..(c + 1) * per_cluster])?;
        match region.as_mut() {
            None => region = Some(CertaintyRegion::initial(est)),
            Some(r) => r.refine(est, c as u32),
        }
        let r = region.as_mut().unwrap();
        r.prune_to_grid(s.n());
        if r.is_empty() {
            return Err(Error::NoCandidate);
        }
    }
    Ok(region.unwrap())
}

/// Single-ton search by successive frequency refinement; only grid indices
/// inside the fused certainty region and inside `candidates` (sorted) are
/// scored.
pub fn dft_singleton_search(
    y: &[C64],
    s: &BinDetectionMatrix,
    candidates: &[usize],
    cfg: &DetectorConfig,
) -> Result<(usize, C64)> {
    let region = fuse_clusters(y, s)?;
    let mut ks: Vec<usize> = region
        .grid_points(s.n())
        .filter(|k| candidates.binary_search(k).is_ok())
        .collect();
    ks.sort_unstable();
    ks.dedup();
    let (k, a) = best_projection(y, s, ks.into_iter()).ok_or(Error::NoCandidate)?;
    Ok((k, cfg.alphabet.nearest(a)))
}

/// Zero-ton test, then single-ton search, then verification.
pub fn robust_bin_detect(
    y: &[C64],
    s: &BinDetectionMatrix,
    candidates: &[usize],
    cfg: &DetectorConfig,
) -> BinHypothesis {
    if zero_ton_test(y, cfg) {
        return BinHypothesis::ZeroTon;
    }
    let found = match cfg.flavor {
        SearchFlavor::Ml => ml_singleton_search(y, s, candidates, cfg),
        SearchFlavor::Clustered => dft_singleton_search(y, s, candidates, cfg),
    };
    let Ok((k, xhat)) = found else {
        return BinHypothesis::MultiTon;
    };
    let mut buf = Vec::with_capacity(s.rows());
    if verify_singleton(y, s.column(k, &mut buf), xhat, cfg) {
        BinHypothesis::SingleTon {
            index: k,
            value: xhat,
        }
    } else {
        BinHypothesis::MultiTon
    }
}

/// [`BinDetector`] running [`robust_bin_detect`].
#[derive(Clone, Debug, PartialEq)]
pub struct RobustDetector {
    pub cfg: DetectorConfig,
}

impl RobustDetector {
    pub fn new(cfg: DetectorConfig) -> Self {
        Self { cfg }
    }
}

impl BinDetector for RobustDetector {
    fn detect(&self, y: &[C64], s: &BinDetectionMatrix, candidates: &[usize]) -> BinHypothesis {
        debug_assert!(
            self.cfg.flavor == SearchFlavor::Ml || s.flavor() == Flavor::ClusteredDft,
            "clustered search needs a clustered DFT matrix"
        );
        robust_bin_detect(y, s, candidates, &self.cfg)
    }

    fn is_zero_ton(&self, y: &[C64]) -> bool {
        zero_ton_test(y, &self.cfg)
    }
}
