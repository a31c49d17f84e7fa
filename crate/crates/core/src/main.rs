use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use onebit::harness::{self, ExperimentConfig, TrialData};
use onebit::metrics::evaluate;
use onebit::model::{BinaryMeasurements, SensingEnsemble, SparseSignal};
use onebit::objective::PenaltyKind;
use onebit::solver::{solve, Algorithm, RecoveryReport, Variant};
use onebit::{Error, Result};

#[derive(Parser)]
#[command(name = "onebit", version, about = "Sparse signal recovery from 1-bit measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a ground-truth signal, sensing matrix and measurements.
    Generate(Problem),
    /// Run one solver on generated data and print the report as JSON.
    Recover(Problem),
    /// Score a recovery report against the ground truth.
    Evaluate {
        #[command(flatten)]
        problem: Problem,
        /// Recovery report written by `recover`.
        #[arg(long)]
        report: PathBuf,
    },
    /// Tune, run every variant on every seed, and write the result tables.
    Experiment(Problem),
    /// Tune step size and TV budget on the tuning seed only.
    Sweep(Problem),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Biht,
    Bfcs,
}

#[derive(Clone, Copy, ValueEnum)]
enum PenaltyArg {
    L1,
    L2,
}

/// Problem and solver settings. Flags override the config file.
#[derive(Args)]
struct Problem {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Flip budget of the robust variants.
    #[arg(long)]
    l: Option<usize>,
    #[arg(long, value_enum)]
    algo: Option<AlgoArg>,
    #[arg(long, value_enum)]
    penalty: Option<PenaltyArg>,
    #[arg(long)]
    robust: bool,
    /// Comma-separated variant names, e.g. `BIHT,RoBFCS-l2`.
    #[arg(long, value_delimiter = ',')]
    variants: Option<Vec<Variant>>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Seed for single-trial commands.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated evaluation seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    nonneg: bool,
    /// Skip tuning and use `--tau` / `--epsilon` as given.
    #[arg(long)]
    no_sweep: bool,
    /// Output file or directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Problem {
    fn experiment(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
            None => ExperimentConfig::default(),
        };
        let s = &mut cfg.signal;
        s.n = self.n.unwrap_or(s.n);
        s.k = self.k.unwrap_or(s.k);
        s.d = self.d.unwrap_or(s.d);
        cfg.m = self.m.unwrap_or(cfg.m);
        cfg.sigma = self.sigma.unwrap_or(cfg.sigma);
        cfg.l_assumed = self.l.unwrap_or(cfg.l_assumed);
        cfg.tau = self.tau.or(cfg.tau);
        cfg.epsilon = self.epsilon.unwrap_or(cfg.epsilon);
        cfg.max_iters = self.max_iters.unwrap_or(cfg.max_iters);
        cfg.rel_tol = self.rel_tol.unwrap_or(cfg.rel_tol);
        cfg.nonneg |= self.nonneg;
        if let Some(seeds) = &self.seeds {
            cfg.seeds = seeds.clone();
        }
        if let Some(variants) = &self.variants {
            cfg.algorithms = variants.clone();
        } else if self.algo.is_some() || self.penalty.is_some() || self.robust {
            cfg.algorithms = vec![self.variant()];
        }
        if self.no_sweep {
            cfg.sweep = None;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn variant(&self) -> Variant {
        Variant {
            algorithm: match self.algo.unwrap_or(AlgoArg::Bfcs) {
                AlgoArg::Biht => Algorithm::Biht,
                AlgoArg::Bfcs => Algorithm::Bfcs,
            },
            penalty: match self.penalty.unwrap_or(PenaltyArg::L1) {
                PenaltyArg::L1 => PenaltyKind::OneSidedL1,
                PenaltyArg::L2 => PenaltyKind::OneSidedL2,
            },
            robust: self.robust,
        }
    }

    fn seed(&self, cfg: &ExperimentConfig) -> u64 {
        self.seed.unwrap_or(cfg.seeds[0])
    }

    /// Reads data written by `generate` from `--out`, or regenerates it from
    /// the seed.
    fn data(&self, cfg: &ExperimentConfig) -> Result<TrialData> {
        let seed = self.seed(cfg);
        match &self.data_dir() {
            Some(dir) => load_data(dir, seed),
            None => TrialData::generate(cfg, seed),
        }
    }

    fn data_dir(&self) -> Option<PathBuf> {
        self.out.clone().filter(|p| p.join(MEASUREMENTS).exists())
    }
}

const SIGNAL: &str = "signal.json";
const MATRIX: &str = "matrix.obr";
const MEASUREMENTS: &str = "measurements.json";

fn load_data(dir: &Path, seed: u64) -> Result<TrialData> {
    let signal: SparseSignal = serde_json::from_str(&std::fs::read_to_string(dir.join(SIGNAL))?)?;
    signal.validate()?;
    let measurements: BinaryMeasurements =
        serde_json::from_str(&std::fs::read_to_string(dir.join(MEASUREMENTS))?)?;
    measurements.validate()?;
    let matrix = SensingEnsemble::load(&dir.join(MATRIX), seed)?;
    Ok(TrialData {
        seed,
        signal,
        matrix,
        measurements,
    })
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(p) => {
            let cfg = p.experiment()?;
            let dir = cfg
                .out
                .clone()
                .ok_or_else(|| Error::Config("generate needs --out DIR".into()))?;
            let data = TrialData::generate(&cfg, p.seed(&cfg))?;
            std::fs::create_dir_all(&dir)?;
            std::fs::write(dir.join(SIGNAL), serde_json::to_string(&data.signal)?)?;
            std::fs::write(dir.join(MEASUREMENTS), serde_json::to_string(&data.measurements)?)?;
            data.matrix.save(&dir.join(MATRIX))?;
            eprintln!(
                "wrote {} (n={}, m={}, {} sign flips)",
                dir.display(),
                data.signal.len(),
                data.measurements.len(),
                data.measurements.flip_count().unwrap_or(0)
            );
            Ok(())
        }
        Command::Recover(p) => {
            let cfg = p.experiment()?;
            let data = p.data(&cfg)?;
            let variant = cfg.algorithms[0];
            let solver = harness::solver_config(&cfg, variant, cfg.fixed_params(variant));
            let report = solve(&data.measurements, &data.matrix, &solver)?;
            print_json(&report)
        }
        Command::Evaluate { problem, report } => {
            let cfg = problem.experiment()?;
            let data = problem.data(&cfg)?;
            let report: RecoveryReport = serde_json::from_str(&std::fs::read_to_string(report)?)?;
            let metrics = evaluate(data.signal.values(), report.x_hat.values(), &data.matrix)?;
            print_json(&metrics)
        }
        Command::Experiment(p) => {
            let cfg = p.experiment()?;
            let table = harness::run_experiment(&cfg)?;
            match &cfg.out {
                Some(dir) => {
                    table.write(dir, &cfg)?;
                    eprintln!("wrote {}", dir.display());
                }
                None => print!("{}", table.table_csv()?),
            }
            for row in table.raw.iter().filter(|r| r.error.is_some()) {
                eprintln!("failed: {}", row.error.as_deref().unwrap_or_default());
            }
            Ok(())
        }
        Command::Sweep(p) => {
            let cfg = p.experiment()?;
            let tuned: Vec<_> = harness::tune_all(&cfg)?
                .into_iter()
                .map(|(v, params)| (v.name(), params))
                .collect();
            print_json(&tuned)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
