//! The peeling decoder.
//!
//! Each scan classifies the bins whose residual changed since their last
//! classification, then commits every single-ton verdict in ascending bin
//! order: the index-value pair is recorded, its source bin is retired, and
//! its contribution is subtracted from every bin the index hashes to.
//! Single-tons exposed by a commit are picked up in the next scan.

use std::collections::BTreeMap;

use crate::detect_noiseless::{BinDetector, BinHypothesis};
use crate::graph_codes::CodingMatrix;
use crate::measurement::{BinDetectionMatrix, BinMeasurementSet, C64};

/// Default scan cap for a signal of sparsity `k`.
pub fn default_scan_cap(k: usize) -> usize {
    2 * k + 16
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeStatus {
    /// Every bin is explained by the recovered coefficients.
    Decoded,
    /// Some bin still carries energy the decoder could not attribute.
    Stalled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeReport {
    pub recovered: BTreeMap<usize, C64>,
    /// Number of scans performed.
    pub iterations: usize,
    /// Bins classified in each scan, with their verdicts.
    pub bin_trace: Vec<Vec<(usize, BinHypothesis)>>,
    pub status: DecodeStatus,
    /// Unretired bins whose last verdict was multi-ton.
    pub residual_bins: Vec<usize>,
}

impl DecodeReport {
    pub fn support(&self) -> Vec<usize> {
        self.recovered.keys().copied().collect()
    }

    pub fn is_decoded(&self) -> bool {
        self.status == DecodeStatus::Decoded
    }
}

/// Incremental decoder state; [`peel_decode`] drives it to completion.
pub struct Peeler<'a, D: BinDetector + ?Sized> {
    h: &'a CodingMatrix,
    s: &'a BinDetectionMatrix,
    detector: &'a D,
    residual: Vec<Vec<C64>>,
    retired: Vec<bool>,
    verdict: Vec<Option<BinHypothesis>>,
    dirty: Vec<bool>,
    recovered: BTreeMap<usize, C64>,
    trace: Vec<Vec<(usize, BinHypothesis)>>,
    column_buf: Vec<C64>,
}

impl<'a, D: BinDetector + ?Sized> Peeler<'a, D> {
    pub fn new(
        bins: &BinMeasurementSet,
        h: &'a CodingMatrix,
        s: &'a BinDetectionMatrix,
        detector: &'a D,
    ) -> Self {
        assert_eq!(bins.len(), h.n_right(), "one observation per bin");
        assert_eq!(h.n_left(), s.n(), "coding and detection matrices disagree on N");
        assert!(
            bins.bins.iter().all(|b| b.len() == s.rows()),
            "bin length must equal the detection matrix rows"
        );
        let r = h.n_right();
        Self {
            h,
            s,
            detector,
            residual: bins.bins.clone(),
            retired: vec![false; r],
            verdict: vec![None; r],
            dirty: vec![true; r],
            recovered: BTreeMap::new(),
            trace: Vec::new(),
            column_buf: Vec::with_capacity(s.rows()),
        }
    }

    pub fn residual(&self, r: usize) -> &[C64] {
        &self.residual[r]
    }

    pub fn recovered(&self) -> &BTreeMap<usize, C64> {
        &self.recovered
    }

    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn is_retired(&self, r: usize) -> bool {
        self.retired[r]
    }

    /// One scan followed by its commit phase. Returns whether a new index
    /// was recovered.
    pub fn step(&mut self) -> bool {
        let mut scan = Vec::new();
        for r in 0..self.residual.len() {
            if self.retired[r] || !self.dirty[r] {
                continue;
            }
            let hyp = self.detector.detect(&self.residual[r], self.s, self.h.row(r));
            self.verdict[r] = Some(hyp);
            self.dirty[r] = false;
            scan.push((r, hyp));
        }

        let mut progress = false;
        for &(r, hyp) in &scan {
            let BinHypothesis::SingleTon { index, value } = hyp else {
                continue;
            };
            if self.retired[r] {
                continue;
            }
            match self.recovered.get(&index) {
                None => {
                    self.recovered.insert(index, value);
                    self.retired[r] = true;
                    self.subtract(index, value);
                    progress = true;
                }
                Some(&first) if first != value => {
                    // First value wins; this bin is left flagged.
                    self.verdict[r] = Some(BinHypothesis::MultiTon);
                    self.dirty[r] = false;
                }
                // Already subtracted by the first commit and marked dirty.
                Some(_) => {}
            }
        }
        self.trace.push(scan);
        progress
    }

    /// Removes `value * s_index` from every bin in the column support of
    /// `index`.
    fn subtract(&mut self, index: usize, value: C64) {
        let col = self.s.column(index, &mut self.column_buf);
        for &r in self.h.col(index) {
            for (y, s) in self.residual[r].iter_mut().zip(col) {
                *y -= value * s;
            }
            if !self.retired[r] {
                self.dirty[r] = true;
            }
        }
    }

    pub fn finish(self) -> DecodeReport {
        let decoded = self.residual.iter().all(|y| self.detector.is_zero_ton(y));
        let residual_bins = (0..self.residual.len())
            .filter(|&r| !self.retired[r] && self.verdict[r] == Some(BinHypothesis::MultiTon))
            .collect();
        DecodeReport {
            recovered: self.recovered,
            iterations: self.trace.len(),
            bin_trace: self.trace,
            status: if decoded {
                DecodeStatus::Decoded
            } else {
                DecodeStatus::Stalled
            },
            residual_bins,
        }
    }
}

/// Peels until a scan recovers nothing new or `cap` scans have run.
pub fn peel_decode<D: BinDetector + ?Sized>(
    bins: &BinMeasurementSet,
    h: &CodingMatrix,
    s: &BinDetectionMatrix,
    detector: &D,
    cap: usize,
) -> DecodeReport {
    let mut peeler = Peeler::new(bins, h, s, detector);
    while peeler.iterations() < cap && peeler.step() {}
    peeler.finish()
}

/// Pure graph peeling on the graph pruned to `support`: repeatedly removes
/// left nodes attached to a right node of residual degree one. Returns the
/// set of left nodes removed, as original indices.
pub fn oracle_peel(h: &CodingMatrix, support: &[usize]) -> Vec<usize> {
    let mut degree = vec![0usize; h.n_right()];
    for &k in support {
        for &r in h.col(k) {
            degree[r] += 1;
        }
    }
    let mut alive: BTreeMap<usize, ()> = support.iter().map(|&k| (k, ())).collect();
    let mut peeled = Vec::new();
    loop {
        let ready: Vec<usize> = alive
            .keys()
            .copied()
            .filter(|&k| h.col(k).iter().any(|&r| degree[r] == 1))
            .collect();
        if ready.is_empty() {
            break;
        }
        for k in ready {
            alive.remove(&k);
            for &r in h.col(k) {
                degree[r] -= 1;
            }
            peeled.push(k);
        }
    }
    peeled.sort_unstable();
    peeled
}
