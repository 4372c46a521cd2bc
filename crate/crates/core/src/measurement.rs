//! Bin detection matrices, the row-tensor measurement operator, and per-bin
//! observation generation.
//!
//! The full `M x N` measurement matrix `B = H ⊙ S` is never built on the
//! decode path. Bin `r` observes `y_r = S diag(h_r) x + w_r`, computed from
//! the columns `s_k` of `S` for `k` in `supp(x) ∩ row(r)` only; DFT columns
//! are evaluated on demand.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph_codes::CodingMatrix;
use crate::rng::rng_from_seed;

pub type C64 = Complex64;

/// Largest `N` accepted by [`row_tensor`].
pub const ROW_TENSOR_MAX_N: usize = 4096;

/// Finite constellation `{(A_min + l1 ρ) e^{i 2π l2 / L2}}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Alphabet {
    a_min: f64,
    rho_step: f64,
    magnitudes: usize,
    phases: usize,
    members: Vec<C64>,
}

impl Alphabet {
    pub fn new(a_min: f64, rho_step: f64, magnitudes: usize, phases: usize) -> Result<Self> {
        if !(a_min > 0.0 && a_min.is_finite()) {
            return Err(Error::InvalidConfig(format!("A_min must be positive, got {a_min}")));
        }
        if !(rho_step > 0.0 && rho_step.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "magnitude step must be positive, got {rho_step}"
            )));
        }
        if magnitudes == 0 || phases == 0 {
            return Err(Error::InvalidConfig(
                "alphabet needs at least one magnitude and one phase".into(),
            ));
        }
        let members = (0..magnitudes)
            .flat_map(|l1| {
                let amp = a_min + l1 as f64 * rho_step;
                (0..phases).map(move |l2| {
                    C64::from_polar(amp, 2.0 * PI * l2 as f64 / phases as f64)
                })
            })
            .map(snap_unit_axes)
            .collect();
        Ok(Self {
            a_min,
            rho_step,
            magnitudes,
            phases,
            members,
        })
    }

    /// The `{+1, -1}` alphabet.
    pub fn bpsk() -> Self {
        Self::new(1.0, 1.0, 1, 2).expect("valid constant alphabet")
    }

    pub fn a_min(&self) -> f64 {
        self.a_min
    }

    pub fn rho_step(&self) -> f64 {
        self.rho_step
    }

    pub fn magnitudes(&self) -> usize {
        self.magnitudes
    }

    pub fn phases(&self) -> usize {
        self.phases
    }

    pub fn members(&self) -> &[C64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Member closest to `z`; ties go to the first member in
    /// (magnitude, phase) order.
    pub fn nearest(&self, z: C64) -> C64 {
        let mut best = self.members[0];
        let mut best_dist = (z - best).norm_sqr();
        for &m in &self.members[1..] {
            let dist = (z - m).norm_sqr();
            if dist < best_dist {
                best = m;
                best_dist = dist;
            }
        }
        best
    }

    pub fn contains(&self, z: C64) -> bool {
        self.members.iter().any(|&m| (m - z).norm() <= 1e-12 * m.norm())
    }
}

/// Cleans the `1e-16` residue that `from_polar` leaves on the real and
/// imaginary axes so that e.g. `-1` is exactly `-1 + 0i`.
fn snap_unit_axes(z: C64) -> C64 {
    let scale = z.norm();
    let clean = |v: f64| if v.abs() < 1e-15 * scale { 0.0 } else { v };
    C64::new(clean(z.re), clean(z.im))
}

/// Length-`N` vector with a small number of non-zero entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSignal {
    n: usize,
    entries: BTreeMap<usize, C64>,
}

impl SparseSignal {
    pub fn new(n: usize, entries: impl IntoIterator<Item = (usize, C64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, v) in entries {
            if k >= n {
                return Err(Error::InvalidDimension(format!("index {k} outside [0, {n})")));
            }
            if v == C64::new(0.0, 0.0) {
                return Err(Error::InvalidConfig(format!("entry {k} is zero")));
            }
            if map.insert(k, v).is_some() {
                return Err(Error::InvalidConfig(format!("index {k} given twice")));
            }
        }
        Ok(Self { n, entries: map })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            entries: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sparsity(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, k: usize) -> Option<C64> {
        self.entries.get(&k).copied()
    }

    pub fn entries(&self) -> &BTreeMap<usize, C64> {
        &self.entries
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.keys().copied().collect()
    }

    /// `‖x‖²`.
    pub fn energy(&self) -> f64 {
        self.entries.values().map(|v| v.norm_sqr()).sum()
    }

    pub fn to_dense(&self) -> Vec<C64> {
        let mut x = vec![C64::new(0.0, 0.0); self.n];
        for (&k, &v) in &self.entries {
            x[k] = v;
        }
        x
    }
}

/// Which construction a [`BinDetectionMatrix`] follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    NoiselessDft,
    RandomSubgaussian,
    ClusteredDft,
}

#[derive(Clone, Debug, PartialEq)]
enum Layout {
    /// Rows `G_n` and `G_n W^n`.
    NoiselessDft { scale: Vec<f64> },
    /// Column-major `P x N` entries.
    RandomSubgaussian { rows: usize, entries: Vec<C64> },
    /// `C` clusters of `Q` DFT rows `ℓ_c + q 2^c (mod N)`.
    ClusteredDft {
        per_cluster: usize,
        starts: Vec<usize>,
        /// `2^c mod N` for each cluster.
        spacings: Vec<usize>,
    },
}

/// The `P x N` matrix applied inside every bin.
#[derive(Clone, Debug, PartialEq)]
pub struct BinDetectionMatrix {
    n: usize,
    layout: Layout,
}

/// `W^e = exp(i 2π e / N)` with `e` reduced mod `N` first.
fn dft_twiddle(exponent: u64, n: usize) -> C64 {
    let e = exponent % n as u64;
    C64::from_polar(1.0, 2.0 * PI * e as f64 / n as f64)
}

impl BinDetectionMatrix {
    /// First two DFT rows with every column scaled by `G_n ~ U[1, 2]`.
    pub fn noiseless(n: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(format!("N must be at least 2, got {n}")));
        }
        let mut rng = rng_from_seed(seed);
        let scale = (0..n).map(|_| rng.random_range(1.0..2.0)).collect();
        Self::noiseless_with_scale(scale)
    }

    /// Noiseless matrix with a caller-supplied scaling vector.
    pub fn noiseless_with_scale(scale: Vec<f64>) -> Result<Self> {
        let n = scale.len();
        if n < 2 {
            return Err(Error::InvalidDimension(format!("N must be at least 2, got {n}")));
        }
        if scale.iter().any(|g| !(*g > 0.0) || !g.is_finite()) {
            return Err(Error::InvalidConfig("column scales must be positive".into()));
        }
        Ok(Self {
            n,
            layout: Layout::NoiselessDft { scale },
        })
    }

    /// i.i.d. circularly-symmetric complex Gaussian entries with unit
    /// variance.
    pub fn random(n: usize, rows: usize, seed: u64) -> Result<Self> {
        if rows == 0 {
            return Err(Error::InvalidDimension("P must be at least 1".into()));
        }
        let mut rng = rng_from_seed(seed);
        let std = std::f64::consts::FRAC_1_SQRT_2;
        let entries = (0..n * rows)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(re * std, im * std)
            })
            .collect();
        Ok(Self {
            n,
            layout: Layout::RandomSubgaussian { rows, entries },
        })
    }

    /// `C` clusters of `Q` consecutive `2^c`-spaced DFT rows starting from
    /// a uniformly random row `ℓ_c`.
    pub fn clustered(n: usize, clusters: usize, per_cluster: usize, seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(seed);
        let starts = (0..clusters).map(|_| rng.random_range(0..n.max(1))).collect();
        Self::clustered_with_starts(n, per_cluster, starts)
    }

    pub fn clustered_with_starts(n: usize, per_cluster: usize, starts: Vec<usize>) -> Result<Self> {
        if n.is_multiple_of(2) {
            return Err(Error::InvalidDimension(format!(
                "clustered DFT matrix needs odd N, got {n}"
            )));
        }
        if starts.is_empty() {
            return Err(Error::InvalidDimension("need at least one cluster".into()));
        }
        if per_cluster < 2 {
            return Err(Error::InvalidDimension(format!(
                "need at least 2 rows per cluster, got {per_cluster}"
            )));
        }
        if let Some(&s) = starts.iter().find(|&&s| s >= n) {
            return Err(Error::InvalidDimension(format!("start row {s} outside [0, {n})")));
        }
        let mut spacings = Vec::with_capacity(starts.len());
        let mut pow = 1 % n;
        for _ in 0..starts.len() {
            spacings.push(pow);
            pow = (pow * 2) % n;
        }
        Ok(Self {
            n,
            layout: Layout::ClusteredDft {
                per_cluster,
                starts,
                spacings,
            },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Rows per bin `P`.
    pub fn rows(&self) -> usize {
        match &self.layout {
            Layout::NoiselessDft { .. } => 2,
            Layout::RandomSubgaussian { rows, .. } => *rows,
            Layout::ClusteredDft {
                per_cluster,
                starts,
                ..
            } => per_cluster * starts.len(),
        }
    }

    pub fn flavor(&self) -> Flavor {
        match self.layout {
            Layout::NoiselessDft { .. } => Flavor::NoiselessDft,
            Layout::RandomSubgaussian { .. } => Flavor::RandomSubgaussian,
            Layout::ClusteredDft { .. } => Flavor::ClusteredDft,
        }
    }

    /// Column scales `G` of the noiseless flavor.
    pub fn scale(&self) -> Option<&[f64]> {
        match &self.layout {
            Layout::NoiselessDft { scale } => Some(scale),
            _ => None,
        }
    }

    /// `(C, Q)` of the clustered flavor.
    pub fn cluster_shape(&self) -> Option<(usize, usize)> {
        match &self.layout {
            Layout::ClusteredDft {
                per_cluster,
                starts,
                ..
            } => Some((starts.len(), *per_cluster)),
            _ => None,
        }
    }

    /// Start rows `ℓ_c` of the clustered flavor.
    pub fn cluster_starts(&self) -> Option<&[usize]> {
        match &self.layout {
            Layout::ClusteredDft { starts, .. } => Some(starts),
            _ => None,
        }
    }

    /// DFT row index of row `p` (noiseless and clustered flavors).
    pub fn dft_row(&self, p: usize) -> Option<usize> {
        match &self.layout {
            Layout::NoiselessDft { .. } => Some(p),
            Layout::ClusteredDft {
                per_cluster,
                starts,
                spacings,
            } => {
                let (c, q) = (p / per_cluster, p % per_cluster);
                Some(((starts[c] as u64 + q as u64 * spacings[c] as u64) % self.n as u64) as usize)
            }
            Layout::RandomSubgaussian { .. } => None,
        }
    }

    /// Entry `S[p][k]`.
    pub fn entry(&self, p: usize, k: usize) -> C64 {
        match &self.layout {
            Layout::NoiselessDft { scale } => {
                scale[k] * dft_twiddle((p as u64) * k as u64, self.n)
            }
            Layout::RandomSubgaussian { rows, entries } => entries[k * rows + p],
            Layout::ClusteredDft { .. } => {
                let row = self.dft_row(p).unwrap() as u64;
                dft_twiddle(row * k as u64, self.n)
            }
        }
    }

    /// Column `s_k`. Stored columns are borrowed; DFT columns are evaluated
    /// into `buf`.
    pub fn column<'a>(&'a self, k: usize, buf: &'a mut Vec<C64>) -> &'a [C64] {
        match &self.layout {
            Layout::RandomSubgaussian { rows, entries } => &entries[k * rows..(k + 1) * rows],
            Layout::NoiselessDft { scale } => {
                buf.clear();
                buf.push(C64::new(scale[k], 0.0));
                buf.push(scale[k] * dft_twiddle(k as u64, self.n));
                buf
            }
            Layout::ClusteredDft {
                per_cluster,
                starts,
                spacings,
            } => {
                buf.clear();
                let n = self.n as u64;
                let k = k as u64;
                for (&start, &spacing) in starts.iter().zip(spacings) {
                    for q in 0..*per_cluster as u64 {
                        let row = (start as u64 + q * spacing as u64) % n;
                        buf.push(dft_twiddle(row * k, self.n));
                    }
                }
                buf
            }
        }
    }

    pub fn column_vec(&self, k: usize) -> Vec<C64> {
        let mut buf = Vec::new();
        self.column(k, &mut buf).to_vec()
    }
}

/// Noiseless detection matrix (`P = 2`).
pub fn build_noiseless_s(n: usize, seed: u64) -> Result<BinDetectionMatrix> {
    BinDetectionMatrix::noiseless(n, seed)
}

/// Random complex Gaussian detection matrix.
pub fn build_random_s(n: usize, rows: usize, seed: u64) -> Result<BinDetectionMatrix> {
    BinDetectionMatrix::random(n, rows, seed)
}

/// Clustered dyadic DFT detection matrix (`P = C Q`, `N` odd).
pub fn build_clustered_s(
    n: usize,
    clusters: usize,
    per_cluster: usize,
    seed: u64,
) -> Result<BinDetectionMatrix> {
    BinDetectionMatrix::clustered(n, clusters, per_cluster, seed)
}

/// Observations of all `R` bins.
#[derive(Clone, Debug, PartialEq)]
pub struct BinMeasurementSet {
    pub bins: Vec<Vec<C64>>,
    /// Noise variance per complex sample.
    pub sigma2: f64,
}

impl BinMeasurementSet {
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn rows(&self) -> usize {
        self.bins.first().map_or(0, Vec::len)
    }

    pub fn bin(&self, r: usize) -> &[C64] {
        &self.bins[r]
    }

    /// Total number of scalar measurements `M = R P`.
    pub fn measurements(&self) -> usize {
        self.len() * self.rows()
    }
}

/// Row-major dense complex matrix, used only to cross-check [`measure`].
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl DenseMatrix {
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols);
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

fn check_dims(h: &CodingMatrix, s: &BinDetectionMatrix) -> Result<()> {
    if h.n_left() != s.n() {
        return Err(Error::InvalidDimension(format!(
            "coding matrix has N = {} but detection matrix has N = {}",
            h.n_left(),
            s.n()
        )));
    }
    Ok(())
}

/// Materializes `B = H ⊙ S`: block `r` is `S` with column `n` zeroed
/// wherever `H[r][n] = 0`.
pub fn row_tensor(h: &CodingMatrix, s: &BinDetectionMatrix) -> Result<DenseMatrix> {
    check_dims(h, s)?;
    let n = h.n_left();
    if n > ROW_TENSOR_MAX_N {
        return Err(Error::Capacity {
            what: "signal dimension for dense row-tensor product",
            size: n,
            limit: ROW_TENSOR_MAX_N,
        });
    }
    let p = s.rows();
    let mut data = vec![C64::new(0.0, 0.0); h.n_right() * p * n];
    for r in 0..h.n_right() {
        for &k in h.row(r) {
            for row in 0..p {
                data[(r * p + row) * n + k] = s.entry(row, k);
            }
        }
    }
    Ok(DenseMatrix {
        rows: h.n_right() * p,
        cols: n,
        data,
    })
}

/// Generates `y_r = sum_{k in supp(x) ∩ row(r)} x[k] s_k + w_r` for every
/// bin, with `w_r` circularly-symmetric Gaussian of variance `sigma2` per
/// complex sample.
pub fn measure(
    x: &SparseSignal,
    h: &CodingMatrix,
    s: &BinDetectionMatrix,
    sigma2: f64,
    seed: u64,
) -> Result<BinMeasurementSet> {
    check_dims(h, s)?;
    if x.n() != h.n_left() {
        return Err(Error::InvalidDimension(format!(
            "signal has N = {} but coding matrix has N = {}",
            x.n(),
            h.n_left()
        )));
    }
    if !(sigma2 >= 0.0) || !sigma2.is_finite() {
        return Err(Error::InvalidConfig(format!("noise variance must be >= 0, got {sigma2}")));
    }
    let p = s.rows();
    let mut bins = vec![vec![C64::new(0.0, 0.0); p]; h.n_right()];
    let mut buf = Vec::with_capacity(p);
    for (&k, &value) in x.entries() {
        let col = s.column(k, &mut buf);
        for &r in h.col(k) {
            for (y, s_entry) in bins[r].iter_mut().zip(col) {
                *y += value * s_entry;
            }
        }
    }
    if sigma2 > 0.0 {
        let mut rng = rng_from_seed(seed);
        let std = (sigma2 / 2.0).sqrt();
        for bin in &mut bins {
            for y in bin.iter_mut() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *y += C64::new(re * std, im * std);
            }
        }
    }
    Ok(BinMeasurementSet { bins, sigma2 })
}
