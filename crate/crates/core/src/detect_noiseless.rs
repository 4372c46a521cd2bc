//! Noiseless bin classification by the two-row ratio test.
//!
//! With `S` made of the DFT rows 0 and 1 and columns scaled by `G_n`, a
//! single-ton at `k` observes `x[k] G_k (1, W^k)`: both entries have the same
//! magnitude and their ratio is `W^k`, which pins `k` down exactly.

use std::f64::consts::TAU;

use crate::measurement::{BinDetectionMatrix, C64};

/// Verdict for one bin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BinHypothesis {
    ZeroTon,
    SingleTon { index: usize, value: C64 },
    MultiTon,
}

impl BinHypothesis {
    pub fn is_zero_ton(&self) -> bool {
        matches!(self, Self::ZeroTon)
    }

    pub fn is_single_ton(&self) -> bool {
        matches!(self, Self::SingleTon { .. })
    }

    pub fn pair(&self) -> Option<(usize, C64)> {
        match *self {
            Self::SingleTon { index, value } => Some((index, value)),
            _ => None,
        }
    }
}

/// Floating-point slack of the ratio test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiselessTolerance {
    /// `||y1| - |y0|| <= magnitude_rel * max(|y0|, |y1|)`.
    pub magnitude_rel: f64,
    /// Allowed distance of `θ N / 2π` from the nearest integer.
    pub phase_grid: f64,
    /// Zero-ton when `‖y‖² <= zero_energy`.
    pub zero_energy: f64,
}

impl Default for NoiselessTolerance {
    fn default() -> Self {
        Self {
            magnitude_rel: 1e-6,
            phase_grid: 1e-6,
            zero_energy: 1e-12 * 2.0,
        }
    }
}

/// `∠(y[1] / y[0])` in `[0, 2π)`, scaled to grid units `N / 2π`.
pub fn ratio_test_index(y: &[C64], n: usize) -> f64 {
    let theta = (y[1] / y[0]).arg().rem_euclid(TAU);
    theta * n as f64 / TAU
}

/// Classifies a length-2 bin observed through the noiseless matrix with
/// column scales `scale`.
pub fn classify_noiseless(
    y: &[C64],
    scale: &[f64],
    n: usize,
    tol: &NoiselessTolerance,
) -> BinHypothesis {
    assert_eq!(y.len(), 2, "noiseless bins have two rows");
    let energy = y[0].norm_sqr() + y[1].norm_sqr();
    if energy <= tol.zero_energy {
        return BinHypothesis::ZeroTon;
    }
    let (m0, m1) = (y[0].norm(), y[1].norm());
    if m0 == 0.0 || (m1 - m0).abs() > tol.magnitude_rel * m0.max(m1) {
        return BinHypothesis::MultiTon;
    }
    let k_cont = ratio_test_index(y, n);
    let k_round = k_cont.round_ties_even();
    if (k_cont - k_round).abs() > tol.phase_grid {
        return BinHypothesis::MultiTon;
    }
    let index = (k_round as usize) % n;
    BinHypothesis::SingleTon {
        index,
        value: y[0] / scale[index],
    }
}

/// A bin classifier used by the peeling decoder.
pub trait BinDetector: Sync {
    /// Classifies bin `y`. `candidates` is the sorted support of the bin's
    /// coding row.
    fn detect(&self, y: &[C64], s: &BinDetectionMatrix, candidates: &[usize]) -> BinHypothesis;

    /// Whether `y` carries no unexplained energy.
    fn is_zero_ton(&self, y: &[C64]) -> bool;
}

/// Ratio-test detector for the noiseless matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NoiselessDetector {
    pub tol: NoiselessTolerance,
}

impl BinDetector for NoiselessDetector {
    fn detect(&self, y: &[C64], s: &BinDetectionMatrix, candidates: &[usize]) -> BinHypothesis {
        let scale = s
            .scale()
            .expect("noiseless detector needs the noiseless detection matrix");
        match classify_noiseless(y, scale, s.n(), &self.tol) {
            // An index outside the bin cannot be a single-ton of this bin.
            BinHypothesis::SingleTon { index, .. } if candidates.binary_search(&index).is_err() => {
                BinHypothesis::MultiTon
            }
            h => h,
        }
    }

    fn is_zero_ton(&self, y: &[C64]) -> bool {
        y.iter().map(|v| v.norm_sqr()).sum::<f64>() <= self.tol.zero_energy
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(e: usize, n: usize) -> C64 {
        C64::from_polar(1.0, TAU * e as f64 / n as f64)
    }

    #[test]
    fn zero_bin() {
        let tol = NoiselessTolerance::default();
        let y = [C64::new(0.0, 0.0); 2];
        assert_eq!(classify_noiseless(&y, &[1.0; 20], 20, &tol), BinHypothesis::ZeroTon);
    }

    #[test]
    fn ratio_test_single_ton() {
        let tol = NoiselessTolerance::default();
        let y = [C64::new(3.0, 0.0), 3.0 * w(10, 20)];
        assert_eq!(ratio_test_index(&y, 20).round(), 10.0);
        match classify_noiseless(&y, &[1.0; 20], 20, &tol) {
            BinHypothesis::SingleTon { index, value } => {
                assert_eq!(index, 10);
                assert!((value - C64::new(3.0, 0.0)).norm() < 1e-12);
            }
            h => panic!("{h:?}"),
        }
    }

    #[test]
    fn ratio_test_multi_ton() {
        let tol = NoiselessTolerance::default();
        let y = [C64::new(10.0, 0.0), w(1, 20) + 2.0 * w(5, 20) + 7.0 * w(13, 20)];
        let k = ratio_test_index(&y, 20);
        assert!((k - 12.59).abs() < 5e-3, "{k}");
        assert_eq!(classify_noiseless(&y, &[1.0; 20], 20, &tol), BinHypothesis::MultiTon);
    }

    #[test]
    fn index_wraps_near_two_pi() {
        let tol = NoiselessTolerance::default();
        let n = 1000;
        let y = [C64::new(1.0, 0.0), w(n - 1, n)];
        assert_eq!(classify_noiseless(&y, &vec![1.0; n], n, &tol).pair().unwrap().0, n - 1);
        let y = [C64::new(1.0, 0.0), C64::from_polar(1.0, -1e-12)];
        assert_eq!(classify_noiseless(&y, &vec![1.0; n], n, &tol).pair().unwrap().0, 0);
    }

    #[test]
    fn value_divides_scale() {
        let tol = NoiselessTolerance::default();
        let scale: Vec<f64> = (0..8).map(|i| 1.0 + i as f64 / 8.0).collect();
        let x = C64::new(-0.5, 2.0);
        let y = [x * scale[5], x * scale[5] * w(5, 8)];
        let (k, v) = classify_noiseless(&y, &scale, 8, &tol).pair().unwrap();
        assert_eq!(k, 5);
        assert!((v - x).norm() < 1e-12 * x.norm());
    }
}
