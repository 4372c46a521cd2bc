//! Weighted phase-difference frequency estimation for a single complex
//! sinusoid `y[m] = a e^{iωm} + w[m]`.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::measurement::C64;

/// Smoothing weights `r_m`, `m = 0..Q-2`.
pub fn kay_weights(q: usize) -> Vec<f64> {
    assert!(q >= 2, "need at least two samples");
    let qf = q as f64;
    let half = qf / 2.0;
    let norm = 1.5 * qf / (qf * qf - 1.0);
    (0..q - 1)
        .map(|m| {
            let t = (m as f64 - (half - 1.0)) / half;
            norm * (1.0 - t * t)
        })
        .collect()
}

fn check_samples(samples: &[C64]) -> Result<()> {
    assert!(samples.len() >= 2, "need at least two samples");
    if samples.iter().any(|s| s.norm_sqr() == 0.0) {
        return Err(Error::DegeneratePhase);
    }
    Ok(())
}

fn weighted_phase_sum(samples: &[C64], weights: &[f64]) -> f64 {
    samples
        .windows(2)
        .zip(weights)
        .map(|(pair, r)| r * (pair[0].conj() * pair[1]).arg())
        .sum()
}

/// `Σ r_m ∠(y*[m] y[m+1])` wrapped to `[0, 2π)`.
pub fn kay_estimate(samples: &[C64]) -> Result<f64> {
    check_samples(samples)?;
    let w = kay_weights(samples.len());
    Ok(weighted_phase_sum(samples, &w).rem_euclid(TAU))
}

/// Same estimator applied after demodulating by the coarse estimate
/// `ω̄ = ∠ Σ y*[m] y[m+1]`.
///
/// The plain estimator averages principal-value phase differences, so for
/// `ω` near `π` some differences wrap to `-π` and the average collapses.
/// Centering first keeps all differences near zero.
pub fn kay_estimate_centered(samples: &[C64]) -> Result<f64> {
    check_samples(samples)?;
    let coarse = samples
        .windows(2)
        .map(|pair| pair[0].conj() * pair[1])
        .sum::<C64>()
        .arg();
    let rot = C64::from_polar(1.0, -coarse);
    let mut phase = C64::new(1.0, 0.0);
    let centered: Vec<C64> = samples
        .iter()
        .map(|&s| {
            let z = s * phase;
            phase *= rot;
            z
        })
        .collect();
    let w = kay_weights(samples.len());
    Ok((coarse + weighted_phase_sum(&centered, &w)).rem_euclid(TAU))
}
