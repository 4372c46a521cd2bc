//! Parallel trial sweeps and their CSV form.

use std::io::Write;

use rayon::prelude::*;

use super::config::{ExperimentConfig, Mode};
use super::{run_trial, TrialRecord};
use crate::error::Result;
use crate::rng::{derive_seed, stream};

pub const CSV_HEADER: [&str; 13] = [
    "mode",
    "N",
    "K",
    "eta_or_eps",
    "d_or_D",
    "P",
    "C",
    "Q",
    "snr_db",
    "trials",
    "success_rate",
    "mean_decode_time_s",
    "measurements",
];

/// Aggregate of one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub config: ExperimentConfig,
    pub records: Vec<TrialRecord>,
}

impl SweepRow {
    pub fn success_rate(&self) -> f64 {
        let ok = self.records.iter().filter(|r| r.success).count();
        ok as f64 / self.records.len() as f64
    }

    pub fn mean_decode_time(&self) -> f64 {
        self.records.iter().map(|r| r.decode_time).sum::<f64>() / self.records.len() as f64
    }

    pub fn measurements(&self) -> usize {
        self.config.measurements()
    }

    fn csv_fields(&self) -> Vec<String> {
        let c = &self.config;
        let clustered = c.mode == Mode::NoisyClustered;
        vec![
            c.mode.to_string(),
            c.n.to_string(),
            c.k.to_string(),
            c.ensemble.redundancy_param().to_string(),
            c.ensemble.degree_param().to_string(),
            c.detection_rows().to_string(),
            if clustered { c.cluster_count().to_string() } else { String::new() },
            if clustered { c.per_cluster_rows().to_string() } else { String::new() },
            match c.snr_db {
                Some(s) if c.mode.is_noisy() => s.to_string(),
                _ => String::new(),
            },
            self.records.len().to_string(),
            self.success_rate().to_string(),
            format!("{:.6e}", self.mean_decode_time()),
            self.measurements().to_string(),
        ]
    }
}

/// Runs every grid point; grid point `i` uses master seed
/// `derive(seed, i)` and its trials run in parallel. Rows come back in grid
/// order.
pub fn sweep(points: &[ExperimentConfig]) -> Result<Vec<SweepRow>> {
    points
        .iter()
        .enumerate()
        .map(|(i, base)| {
            let mut config = base.clone();
            config.seed = derive_seed(derive_seed(base.seed, stream::GRID), i as u64);
            config.validate()?;
            let records = (0..config.trials)
                .into_par_iter()
                .map(|t| run_trial(&config, t))
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepRow { config, records })
        })
        .collect()
}

/// Writes the header and one record per row, `\n`-terminated.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.csv_fields())?;
    }
    w.flush()?;
    Ok(())
}
