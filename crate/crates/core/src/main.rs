use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sgcs::density_evolution::{de_trace, min_eta, DeParams};
use sgcs::harness::{self, parse_kv, SweepSpec};
use sgcs::{Error, Result};

#[derive(Parser)]
#[command(name = "sgcs", version, about = "Sparse-graph-code support recovery experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum redundancy per left degree for the regular ensemble (CSV).
    Threshold {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6")]
        degrees: Vec<usize>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Density-evolution trace p_0, p_1, ... (CSV).
    DeTrace {
        #[arg(long, default_value = "regular")]
        ensemble: String,
        /// d for regular, D for irregular.
        #[arg(long)]
        degree: usize,
        /// η for regular, ε for irregular.
        #[arg(long)]
        redundancy: f64,
        #[arg(long, default_value_t = sgcs::density_evolution::DEFAULT_MAX_ITERS)]
        max_iters: usize,
        #[arg(long, default_value_t = sgcs::density_evolution::DEFAULT_TOL)]
        tol: f64,
    },
    /// Run one trial and print a report.
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Trial index within the master seed.
        #[arg(long, default_value_t = 0)]
        trial: usize,
    },
    /// Run a grid of Monte-Carlo points and write CSV.
    Sweep {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

/// Every configuration key can come from the file or a flag; flags win.
/// Axis keys (`n`, `k`, `eta`, `eps`, `snr_db`) take comma-separated lists.
#[derive(Args)]
struct ConfigArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    k_sqrt_n: Option<String>,
    #[arg(long)]
    ensemble: Option<String>,
    #[arg(long)]
    degree: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    rows: Option<String>,
    #[arg(long)]
    clusters: Option<String>,
    #[arg(long)]
    per_cluster: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    alphabet: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    signal: Option<String>,
    #[arg(long)]
    output: Option<String>,
}

impl ConfigArgs {
    fn into_spec(self) -> Result<SweepSpec> {
        let mut map: BTreeMap<String, String> = match &self.config {
            Some(path) => parse_kv(&fs::read_to_string(path)?)?,
            None => BTreeMap::new(),
        };
        let flags = [
            ("mode", self.mode),
            ("n", self.n),
            ("k", self.k),
            ("k_sqrt_n", self.k_sqrt_n),
            ("ensemble", self.ensemble),
            ("degree", self.degree),
            ("eta", self.eta),
            ("eps", self.eps),
            ("rows", self.rows),
            ("clusters", self.clusters),
            ("per_cluster", self.per_cluster),
            ("snr_db", self.snr_db),
            ("gamma", self.gamma),
            ("alphabet", self.alphabet),
            ("trials", self.trials),
            ("seed", self.seed),
            ("signal", self.signal),
            ("output", self.output),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                map.insert(key.to_string(), v);
            }
        }
        SweepSpec::from_map(&map)
    }
}

fn threshold(degrees: &[usize], tol: f64) -> Result<()> {
    let mut out = io::stdout().lock();
    writeln!(out, "d,min_eta")?;
    for &d in degrees {
        if d < 2 {
            return Err(Error::InvalidEnsemble(format!("degree must be at least 2, got {d}")));
        }
        writeln!(out, "{d},{:.4}", min_eta(d, tol))?;
    }
    Ok(())
}

fn trace(ensemble: &str, degree: usize, redundancy: f64, max_iters: usize, tol: f64) -> Result<()> {
    let mut params = match ensemble {
        "regular" => DeParams::regular(degree, redundancy),
        "irregular" => DeParams::irregular(degree, redundancy),
        other => return Err(Error::InvalidEnsemble(format!("unknown ensemble `{other}`"))),
    };
    params.max_iters = max_iters;
    params.tol = tol;
    let t = de_trace(&params);
    let mut out = io::stdout().lock();
    writeln!(out, "iter,p")?;
    for (i, p) in t.densities.iter().enumerate() {
        writeln!(out, "{i},{p:e}")?;
    }
    Ok(())
}

fn run(spec: SweepSpec, trial: usize) -> Result<()> {
    let cfg = spec.points()?.remove(0);
    let inst = harness::sample_trial(&cfg, trial)?;
    let start = std::time::Instant::now();
    let report = harness::decode_instance(&cfg, &inst)?;
    let elapsed = start.elapsed().as_secs_f64();
    let truth = inst.signal.support();
    let found = report.support();
    let missed = truth.iter().filter(|k| !report.recovered.contains_key(k)).count();
    let spurious = found.iter().filter(|k| inst.signal.get(**k).is_none()).count();

    println!("mode            {}", cfg.mode);
    println!("N, K            {}, {}", cfg.n, cfg.k);
    println!("bins R          {}", inst.h.n_right());
    println!("rows P          {}", inst.s.rows());
    println!("measurements    {}", inst.bins.measurements());
    if cfg.mode.is_noisy() {
        println!("noise variance  {:.6e}", inst.bins.sigma2);
    }
    println!("scans           {}", report.iterations);
    println!("status          {:?}", report.status);
    println!("recovered       {} of {}", found.len(), truth.len());
    println!("missed          {missed}");
    println!("spurious        {spurious}");
    println!("multi-ton bins  {}", report.residual_bins.len());
    println!("support match   {}", found == truth);
    println!("decode time     {elapsed:.6} s");
    Ok(())
}

fn sweep(spec: SweepSpec) -> Result<()> {
    let output = spec.base.output.clone();
    let rows = harness::sweep(&spec.points()?)?;
    match output {
        Some(path) => {
            let file = File::create(&path)?;
            harness::write_csv(&rows, BufWriter::new(file))
        }
        None => harness::write_csv(&rows, io::stdout().lock()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Threshold { degrees, tol } => threshold(&degrees, tol),
        Command::DeTrace {
            ensemble,
            degree,
            redundancy,
            max_iters,
            tol,
        } => trace(&ensemble, degree, redundancy, max_iters, tol),
        Command::Run { cfg, trial } => cfg.into_spec().and_then(|s| run(s, trial)),
        Command::Sweep { cfg } => cfg.into_spec().and_then(sweep),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
