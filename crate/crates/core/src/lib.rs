//! Exact support recovery for sparse signals from sparse-graph-coded linear
//! measurements.
//!
//! A `K`-sparse signal `x ∈ C^N` is hashed into `R` bins by a sparse
//! bipartite coding matrix `H`; every bin applies a small detection matrix
//! `S` to the coefficients it sees. A peeling decoder repeatedly finds bins
//! that contain a single non-zero coefficient, recovers that coefficient and
//! subtracts it from the other bins it touches.
//!
//! Modules:
//! - [`graph_codes`]: regular and irregular left-degree ensembles, pruning,
//!   expansion checks.
//! - [`density_evolution`]: recursions and decoding thresholds.
//! - [`measurement`]: detection matrices and bin observations.
//! - [`detect_noiseless`] and [`detect_noisy`]: bin classifiers.
//! - [`peeling`]: the decoder.
//! - [`harness`]: Monte-Carlo trials, sweeps and CSV output.

pub mod density_evolution;
pub mod detect_noiseless;
pub mod detect_noisy;
pub mod error;
pub mod graph_codes;
pub mod harness;
pub mod measurement;
pub mod peeling;
pub mod rng;

pub use detect_noiseless::{BinDetector, BinHypothesis, NoiselessDetector};
pub use detect_noisy::{DetectorConfig, RobustDetector, SearchFlavor};
pub use error::{Error, Result};
pub use graph_codes::{CodingMatrix, EnsembleKind, EnsembleSpec};
pub use measurement::{Alphabet, BinDetectionMatrix, BinMeasurementSet, SparseSignal, C64};
pub use peeling::{peel_decode, DecodeReport, DecodeStatus};
