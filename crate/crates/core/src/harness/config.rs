//! Experiment configuration and its flat `key = value` text form.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph_codes::{EnsembleKind, EnsembleSpec};
use crate::measurement::Alphabet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Noiseless,
    NoisyMl,
    NoisyClustered,
}

impl Mode {
    pub fn is_noisy(self) -> bool {
        self != Mode::Noiseless
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Noiseless => "noiseless",
            Mode::NoisyMl => "noisy_ml",
            Mode::NoisyClustered => "noisy_clustered",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "noiseless" => Ok(Mode::Noiseless),
            "noisy_ml" | "ml" => Ok(Mode::NoisyMl),
            "noisy_clustered" | "clustered" => Ok(Mode::NoisyClustered),
            _ => Err(Error::InvalidConfig(format!("unknown mode `{s}`"))),
        }
    }
}

/// Whether every trial of a grid point shares one signal or draws its own.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SignalRegime {
    #[default]
    Fixed,
    Fresh,
}

impl FromStr for SignalRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(SignalRegime::Fixed),
            "fresh" => Ok(SignalRegime::Fresh),
            _ => Err(Error::InvalidConfig(format!("unknown signal regime `{s}`"))),
        }
    }
}

pub const DEFAULT_TRIALS: usize = 200;

/// One grid point of an experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub n: usize,
    pub k: usize,
    pub ensemble: EnsembleSpec,
    /// Rows `P` of the random detection matrix (noisy_ml).
    pub rows: Option<usize>,
    /// `C` and `Q` of the clustered detection matrix (noisy_clustered).
    pub clusters: Option<usize>,
    pub per_cluster: Option<usize>,
    pub snr_db: Option<f64>,
    pub gamma: f64,
    pub alphabet: Alphabet,
    pub trials: usize,
    pub seed: u64,
    pub signal: SignalRegime,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(mode: Mode, n: usize, k: usize, ensemble: EnsembleSpec) -> Self {
        Self {
            mode,
            n,
            k,
            ensemble,
            rows: None,
            clusters: None,
            per_cluster: None,
            snr_db: None,
            gamma: crate::detect_noisy::DEFAULT_GAMMA,
            alphabet: Alphabet::bpsk(),
            trials: DEFAULT_TRIALS,
            seed: 0,
            signal: SignalRegime::Fixed,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.ensemble.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.k > self.n {
            return Err(Error::InvalidConfig(format!("K = {} exceeds N = {}", self.k, self.n)));
        }
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!("N must be at least 2, got {}", self.n)));
        }
        if let EnsembleKind::Regular { degree } = self.ensemble.kind {
            if degree > self.bins() {
                return Err(Error::InvalidConfig(format!(
                    "degree {degree} exceeds the {} bins",
                    self.bins()
                )));
            }
        }
        if self.mode.is_noisy() {
            match self.snr_db {
                Some(s) if s.is_finite() => {}
                _ => return Err(Error::InvalidConfig("noisy modes need a finite snr_db".into())),
            }
            if !(self.gamma > 0.0 && self.gamma < 1.0) {
                return Err(Error::InvalidConfig(format!("gamma must lie in (0, 1), got {}", self.gamma)));
            }
        }
        if self.mode == Mode::NoisyClustered {
            if self.n.is_multiple_of(2) {
                return Err(Error::InvalidConfig(format!(
                    "noisy_clustered needs odd N, got {}",
                    self.n
                )));
            }
            if self.per_cluster_rows() < 2 {
                return Err(Error::InvalidConfig("Q must be at least 2".into()));
            }
        }
        if self.detection_rows() == 0 {
            return Err(Error::InvalidConfig("detection matrix needs at least one row".into()));
        }
        Ok(())
    }

    /// Number of bins `R`.
    pub fn bins(&self) -> usize {
        self.ensemble.right_nodes(self.k)
    }

    /// `P` for noisy_ml, defaulting to `⌈3 ln N⌉`.
    pub fn ml_rows(&self) -> usize {
        self.rows.unwrap_or_else(|| (3.0 * (self.n as f64).ln()).ceil() as usize)
    }

    /// `C`, defaulting to `⌈log₂ N⌉`.
    pub fn cluster_count(&self) -> usize {
        self.clusters.unwrap_or_else(|| (self.n as f64).log2().ceil() as usize)
    }

    /// `Q`, defaulting to `⌈3 (ln N)^{1/3}⌉`.
    pub fn per_cluster_rows(&self) -> usize {
        self.per_cluster
            .unwrap_or_else(|| (3.0 * (self.n as f64).ln().cbrt()).ceil() as usize)
    }

    /// Rows `P` of the detection matrix in use.
    pub fn detection_rows(&self) -> usize {
        match self.mode {
            Mode::Noiseless => 2,
            Mode::NoisyMl => self.ml_rows(),
            Mode::NoisyClustered => self.cluster_count() * self.per_cluster_rows(),
        }
    }

    /// `M = R P`.
    pub fn measurements(&self) -> usize {
        self.bins() * self.detection_rows()
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("line {}: expected `key = value`", i + 1))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("cannot parse {key} = `{value}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let items = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_one(key, s))
        .collect::<Result<Vec<T>>>()?;
    if items.is_empty() {
        return Err(Error::InvalidConfig(format!("{key} is empty")));
    }
    Ok(items)
}

fn parse_alphabet(value: &str) -> Result<Alphabet> {
    if value == "bpsk" {
        return Ok(Alphabet::bpsk());
    }
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::InvalidConfig(format!(
            "alphabet must be `bpsk` or `a_min,step,magnitudes,phases`, got `{value}`"
        )));
    }
    Alphabet::new(
        parse_one("alphabet", parts[0])?,
        parse_one("alphabet", parts[1])?,
        parse_one("alphabet", parts[2])?,
        parse_one("alphabet", parts[3])?,
    )
}

/// Keys understood by [`SweepSpec::from_map`].
pub const KEYS: &[&str] = &[
    "mode",
    "n",
    "k",
    "k_sqrt_n",
    "ensemble",
    "degree",
    "eta",
    "eps",
    "rows",
    "clusters",
    "per_cluster",
    "snr_db",
    "gamma",
    "alphabet",
    "trials",
    "seed",
    "signal",
    "output",
];

/// A base configuration plus the axes swept over. `n`, `k`, the
/// redundancy (`eta` or `eps`) and `snr_db` accept comma-separated lists;
/// points are enumerated with `n` outermost and `snr_db` innermost.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub base: ExperimentConfig,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    /// When set, `K = ⌈√N⌉` and the `k` axis is ignored.
    pub k_sqrt_n: bool,
    pub redundancy: Vec<f64>,
    pub snr_db: Vec<Option<f64>>,
}

impl SweepSpec {
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        if let Some(bad) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(Error::InvalidConfig(format!("unknown key `{bad}`")));
        }
        let get = |key: &str| map.get(key).map(String::as_str);
        let require = |key: &str| {
            get(key).ok_or_else(|| Error::InvalidConfig(format!("missing key `{key}`")))
        };

        let mode: Mode = parse_one("mode", get("mode").unwrap_or("noiseless"))?;
        let n: Vec<usize> = parse_list("n", require("n")?)?;
        let k_sqrt_n = match get("k_sqrt_n") {
            Some(v) => parse_one("k_sqrt_n", v)?,
            None => false,
        };
        let k: Vec<usize> = match get("k") {
            Some(v) => parse_list("k", v)?,
            None if k_sqrt_n => vec![0],
            None => return Err(Error::InvalidConfig("missing key `k`".into())),
        };
        let ensemble = get("ensemble").unwrap_or("regular");
        let (redundancy, spec_of): (Vec<f64>, fn(usize, f64) -> EnsembleSpec) = match ensemble {
            "regular" => (
                parse_list("eta", require("eta")?)?,
                EnsembleSpec::regular,
            ),
            "irregular" => (
                parse_list("eps", require("eps")?)?,
                EnsembleSpec::irregular,
            ),
            other => return Err(Error::InvalidConfig(format!("unknown ensemble `{other}`"))),
        };
        let degree: usize = parse_one("degree", require("degree")?)?;
        let snr_db = match get("snr_db") {
            Some(v) => parse_list::<f64>("snr_db", v)?.into_iter().map(Some).collect(),
            None => vec![None],
        };

        let mut base = ExperimentConfig::new(mode, n[0], k[0], spec_of(degree, redundancy[0]));
        base.snr_db = snr_db[0];
        if let Some(v) = get("rows") {
            base.rows = Some(parse_one("rows", v)?);
        }
        if let Some(v) = get("clusters") {
            base.clusters = Some(parse_one("clusters", v)?);
        }
        if let Some(v) = get("per_cluster") {
            base.per_cluster = Some(parse_one("per_cluster", v)?);
        }
        if let Some(v) = get("gamma") {
            base.gamma = parse_one("gamma", v)?;
        }
        if let Some(v) = get("alphabet") {
            base.alphabet = parse_alphabet(v)?;
        }
        if let Some(v) = get("trials") {
            base.trials = parse_one("trials", v)?;
        }
        if let Some(v) = get("seed") {
            base.seed = parse_one("seed", v)?;
        }
        if let Some(v) = get("signal") {
            base.signal = parse_one("signal", v)?;
        }
        if let Some(v) = get("output") {
            base.output = Some(PathBuf::from(v));
        }
        Ok(Self {
            base,
            n,
            k,
            k_sqrt_n,
            redundancy,
            snr_db,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_map(&parse_kv(text)?)
    }

    /// All grid points, validated.
    pub fn points(&self) -> Result<Vec<ExperimentConfig>> {
        let mut out = Vec::new();
        for &n in &self.n {
            let ks: Vec<usize> = if self.k_sqrt_n {
                vec![(n as f64).sqrt().ceil() as usize]
            } else {
                self.k.clone()
            };
            for &k in &ks {
                for &red in &self.redundancy {
                    for &snr in &self.snr_db {
                        let mut cfg = self.base.clone();
                        cfg.n = n;
                        cfg.k = k;
                        cfg.ensemble = match cfg.ensemble.kind {
                            EnsembleKind::Regular { degree } => EnsembleSpec::regular(degree, red),
                            EnsembleKind::Irregular { max_degree } => {
                                EnsembleSpec::irregular(max_degree, red)
                            }
                        };
                        cfg.snr_db = snr;
                        cfg.validate()?;
                        out.push(cfg);
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_expand() {
        let text = "
            # threshold sweep
            mode = noiseless
            n = 1000
            k = 50, 60
            ensemble = regular
            degree = 3
            eta = 1.1, 1.2, 1.3
            trials = 10
            seed = 7
        ";
        let spec = SweepSpec::parse(text).unwrap();
        let pts = spec.points().unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0].k, 50);
        assert_eq!(pts[2].ensemble, EnsembleSpec::regular(3, 1.3));
        assert_eq!(pts[3].k, 60);
        assert!(pts.iter().all(|p| p.trials == 10 && p.seed == 7));
    }

    #[test]
    fn defaults_follow_dimension() {
        let cfg = ExperimentConfig::new(Mode::NoisyClustered, 4095, 20, EnsembleSpec::regular(3, 2.0));
        assert_eq!(cfg.ml_rows(), 25);
        assert_eq!(cfg.cluster_count(), 12);
        assert_eq!(cfg.per_cluster_rows(), 7);
        assert_eq!(cfg.bins(), 40);
        assert_eq!(cfg.measurements(), 40 * 84);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SweepSpec::parse("n = 10\nk = 2\ndegree = 3\neta = 1.5\nbogus = 1").is_err());
        assert!(SweepSpec::parse("n = 10\nk = 2\neta = 1.5").is_err());
        let spec = SweepSpec::parse("mode = noisy_ml\nn = 10\nk = 2\ndegree = 2\neta = 2").unwrap();
        // No SNR for a noisy mode.
        assert!(spec.points().is_err());
        let spec =
            SweepSpec::parse("mode = clustered\nn = 16\nk = 2\ndegree = 2\neta = 2\nsnr_db = 10")
                .unwrap();
        assert!(spec.points().is_err());
    }

    #[test]
    fn sqrt_coupling() {
        let spec = SweepSpec::parse(
            "mode = ml\nn = 1001, 10001\nk_sqrt_n = true\ndegree = 3\neta = 2\nsnr_db = 20",
        )
        .unwrap();
        let ks: Vec<usize> = spec.points().unwrap().iter().map(|p| p.k).collect();
        assert_eq!(ks, vec![32, 101]);
    }
}
