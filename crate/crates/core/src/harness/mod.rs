//! Monte-Carlo experiment driver.

mod config;
mod sweep;

pub use config::{parse_kv, ExperimentConfig, Mode, SignalRegime, SweepSpec, DEFAULT_TRIALS, KEYS};
pub use sweep::{sweep, write_csv, SweepRow, CSV_HEADER};

use std::time::Instant;

use rand::seq::index;
use rand::Rng;

use crate::detect_noiseless::NoiselessDetector;
use crate::detect_noisy::{DetectorConfig, RobustDetector, SearchFlavor};
use crate::error::{Error, Result};
use crate::graph_codes::CodingMatrix;
use crate::measurement::{measure, Alphabet, BinDetectionMatrix, SparseSignal};
use crate::peeling::{default_scan_cap, peel_decode, DecodeReport};
use crate::rng::{derive_seed, rng_from_seed, stream};

/// `K`-sparse signal with a uniformly random support and values drawn
/// uniformly from `alphabet` (`{±1}` when `None`).
pub fn gen_signal(n: usize, k: usize, alphabet: Option<&Alphabet>, seed: u64) -> Result<SparseSignal> {
    if k > n {
        return Err(Error::InvalidConfig(format!("K = {k} exceeds N = {n}")));
    }
    let bpsk = Alphabet::bpsk();
    let alphabet = alphabet.unwrap_or(&bpsk);
    let mut rng = rng_from_seed(seed);
    let support = index::sample(&mut rng, n, k).into_vec();
    let values: Vec<_> = (0..k)
        .map(|_| alphabet.members()[rng.random_range(0..alphabet.len())])
        .collect();
    SparseSignal::new(n, support.into_iter().zip(values))
}

/// `σ² = ‖x‖² d̄ / (R 10^{snr/10})` with `d̄` the realized average left
/// degree of `h`.
pub fn snr_to_sigma2(x: &SparseSignal, h: &CodingMatrix, snr_db: f64) -> f64 {
    x.energy() * h.average_left_degree() / (h.n_right() as f64 * 10f64.powf(snr_db / 10.0))
}

/// Outcome of one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    /// Recovered support equals the true support.
    pub success: bool,
    /// Wall-clock seconds spent in the decoder.
    pub decode_time: f64,
    pub measurements_used: usize,
    pub iterations: usize,
}

/// Everything sampled for one trial, before decoding.
#[derive(Clone, Debug)]
pub struct TrialInstance {
    pub signal: SparseSignal,
    pub h: CodingMatrix,
    pub s: BinDetectionMatrix,
    pub bins: crate::measurement::BinMeasurementSet,
}

/// Seed of trial `trial` under master seed `seed`.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    derive_seed(derive_seed(seed, stream::TRIAL), trial as u64)
}

/// Samples the graph, detection matrix, signal and noise of one trial.
pub fn sample_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialInstance> {
    cfg.validate()?;
    let ts = trial_seed(cfg.seed, trial);
    let signal_seed = match cfg.signal {
        SignalRegime::Fixed => derive_seed(cfg.seed, stream::SIGNAL),
        SignalRegime::Fresh => derive_seed(ts, stream::SIGNAL),
    };
    let alphabet = cfg.mode.is_noisy().then_some(&cfg.alphabet);
    let signal = gen_signal(cfg.n, cfg.k, alphabet, signal_seed)?;
    let h = cfg.ensemble.sample(cfg.n, cfg.bins(), derive_seed(ts, stream::GRAPH))?;
    let s_seed = derive_seed(ts, stream::DETECTION);
    let s = match cfg.mode {
        Mode::Noiseless => BinDetectionMatrix::noiseless(cfg.n, s_seed)?,
        Mode::NoisyMl => BinDetectionMatrix::random(cfg.n, cfg.ml_rows(), s_seed)?,
        Mode::NoisyClustered => BinDetectionMatrix::clustered(
            cfg.n,
            cfg.cluster_count(),
            cfg.per_cluster_rows(),
            s_seed,
        )?,
    };
    let sigma2 = match cfg.snr_db {
        Some(snr) if cfg.mode.is_noisy() => snr_to_sigma2(&signal, &h, snr),
        _ => 0.0,
    };
    let bins = measure(&signal, &h, &s, sigma2, derive_seed(ts, stream::NOISE))?;
    Ok(TrialInstance { signal, h, s, bins })
}

/// Decodes a sampled instance with the detector the mode calls for.
pub fn decode_instance(cfg: &ExperimentConfig, inst: &TrialInstance) -> Result<DecodeReport> {
    let cap = default_scan_cap(cfg.k);
    let report = match cfg.mode {
        Mode::Noiseless => {
            peel_decode(&inst.bins, &inst.h, &inst.s, &NoiselessDetector::default(), cap)
        }
        Mode::NoisyMl | Mode::NoisyClustered => {
            let flavor = if cfg.mode == Mode::NoisyMl {
                SearchFlavor::Ml
            } else {
                SearchFlavor::Clustered
            };
            let det = RobustDetector::new(DetectorConfig::new(
                cfg.gamma,
                inst.bins.sigma2,
                cfg.alphabet.clone(),
                flavor,
            )?);
            peel_decode(&inst.bins, &inst.h, &inst.s, &det, cap)
        }
    };
    Ok(report)
}

/// Runs trial `trial`: samples, decodes (timed), and compares supports.
pub fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialRecord> {
    let inst = sample_trial(cfg, trial)?;
    let start = Instant::now();
    let report = decode_instance(cfg, &inst)?;
    let decode_time = start.elapsed().as_secs_f64();
    Ok(TrialRecord {
        trial,
        success: report.support() == inst.signal.support(),
        decode_time,
        measurements_used: inst.bins.measurements(),
        iterations: report.iterations,
    })
}
