use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use quasiopt::harness::{
    growth_csv, ingest_svd, run_aggregation_experiment, run_noise_study, run_rate_study, ExperimentConfig,
    FilterCheckConfig, NoiseStudyConfig, OutputFormat, RateStudyConfig, ValueKind,
};
use quasiopt::Error;

#[derive(Parser)]
#[command(name = "quasiopt", version, about = "Quasi-optimality parameter choice experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Aggregation experiment: error table and per-node curves.
    Aggregate {
        #[command(flatten)]
        common: Common,
        /// Use the built-in reference configuration; `--config` is rejected.
        #[arg(long, conflicts_with = "config")]
        paper_table_1: bool,
    },
    /// Convergence-rate study with log-log slope fits.
    Rates {
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo study of the noise-condition sup ratios.
    Noise {
        #[command(flatten)]
        common: Common,
    },
    /// Sampled check of the filter and index-function assumptions.
    CheckFilter {
        #[command(flatten)]
        common: Common,
    },
    /// Read a two-column `singular value,coefficient` CSV file.
    Ingest {
        file: PathBuf,
        /// Meaning of the second column.
        #[arg(long, value_enum, default_value_t = Kind::Solution)]
        kind: Kind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON configuration file; missing fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of runs (aggregate) or seeds (rates, noise).
    #[arg(long)]
    runs: Option<usize>,
    /// Directory for output files; results are printed to stdout regardless.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Solution,
    Data,
}

/// Failure classes mapped to process exit codes.
enum Failure {
    Config(anyhow::Error),
    Numeric(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config_error() {
            Failure::Config(e.into())
        } else {
            Failure::Numeric(e.into())
        }
    }
}

fn config_failure(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into())
}

fn output_failure(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Numeric(e.into())
}

fn read_config(path: &Option<PathBuf>) -> Result<Option<String>, Failure> {
    path.as_ref()
        .map(|p| std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())))
        .transpose()
        .map_err(config_failure)
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(dir.join(name), body))
        .with_context(|| format!("writing {}", dir.join(name).display()))
        .map_err(output_failure)
}

fn aggregate(common: &Common, reference: bool) -> Result<(), Failure> {
    let mut cfg = match read_config(&common.config)? {
        Some(text) if !reference => serde_json::from_str::<ExperimentConfig>(&text).map_err(config_failure)?,
        _ => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.run.seed = seed;
    }
    if let Some(runs) = common.runs {
        cfg.run.n_runs = runs;
        cfg.run.figure_run = cfg.run.figure_run.min(runs.saturating_sub(1));
    }
    if let Some(f) = common.format {
        cfg.run.format = f.into();
    }
    cfg.validate()?;
    let report = run_aggregation_experiment(&cfg)?;
    print!("{}", report.table_text());
    if let Some(dir) = &common.out {
        report.write_to(dir, cfg.run.format)?;
    }
    Ok(())
}

fn rates(common: &Common) -> Result<(), Failure> {
    let mut cfg = match read_config(&common.config)? {
        Some(text) => serde_json::from_str::<RateStudyConfig>(&text).map_err(config_failure)?,
        None => RateStudyConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(runs) = common.runs {
        cfg.seeds = runs;
    }
    cfg.validate()?;
    let report = run_rate_study(&cfg)?;
    print!("{}", report.to_text());
    if let Some(dir) = &common.out {
        match common.format.map(OutputFormat::from).unwrap_or_default() {
            OutputFormat::Json => {
                let body = serde_json::to_string_pretty(&report).map_err(output_failure)?;
                write_file(dir, "rates.json", &body)?;
            }
            OutputFormat::Csv => {
                let mut body = String::from("delta,solution,functional,functional_kappa,mean_alpha,mean_alpha_kappa\n");
                for r in &report.rows {
                    body.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        r.delta,
                        r.errors.solution,
                        r.errors.functional,
                        r.errors.functional_kappa,
                        r.mean_alpha,
                        r.mean_alpha_kappa
                    ));
                }
                write_file(dir, "rates.csv", &body)?;
            }
        }
    }
    Ok(())
}

fn noise(common: &Common) -> Result<(), Failure> {
    let mut cfg = match read_config(&common.config)? {
        Some(text) => serde_json::from_str::<NoiseStudyConfig>(&text).map_err(config_failure)?,
        None => NoiseStudyConfig::default(),
    };
    for case in &mut cfg.cases {
        if let Some(seed) = common.seed {
            case.noise.seed = seed;
        }
        if let Some(runs) = common.runs {
            case.n_seeds = runs;
        }
    }
    cfg.validate()?;
    let results = run_noise_study(&cfg)?;
    for r in &results {
        println!("{} (dimension {}, {} seeds)", r.name, r.table.dimension, r.table.n_seeds);
        println!("{:>8} {:>14} {:>14} {:>14}", "n_max", "median sup", "min sup", "max sup");
        for row in &r.table.rows {
            println!(
                "{:>8} {:>14.4} {:>14.4} {:>14.4}",
                row.n_max, row.median_sup, row.min_sup, row.max_sup
            );
        }
        println!("overall median growth: {:.3}\n", r.overall_growth);
    }
    if let Some(dir) = &common.out {
        match common.format.map(OutputFormat::from).unwrap_or_default() {
            OutputFormat::Json => {
                let body = serde_json::to_string_pretty(&results).map_err(output_failure)?;
                write_file(dir, "noise.json", &body)?;
            }
            OutputFormat::Csv => {
                for r in &results {
                    write_file(dir, &format!("growth_{}.csv", r.name), &growth_csv(r))?;
                }
            }
        }
    }
    Ok(())
}

fn check_filter(common: &Common) -> Result<(), Failure> {
    let cfg = match read_config(&common.config)? {
        Some(text) => serde_json::from_str::<FilterCheckConfig>(&text).map_err(config_failure)?,
        None => FilterCheckConfig::default(),
    };
    cfg.validate()?;
    let report = cfg.run()?;
    let body = serde_json::to_string_pretty(&report).map_err(output_failure)?;
    println!("{body}");
    if let Some(dir) = &common.out {
        write_file(dir, "filter_check.json", &body)?;
    }
    Ok(())
}

fn ingest(file: &Path, kind: Kind, out: &Option<PathBuf>) -> Result<(), Failure> {
    let svd = ingest_svd(file).map_err(|e| match e {
        Error::Io(io) => config_failure(anyhow::Error::new(io).context(format!("reading {}", file.display()))),
        other => other.into(),
    })?;
    if svd.reordered {
        eprintln!("warning: singular values were not nonincreasing; rows were sorted");
    }
    let kind = match kind {
        Kind::Solution => ValueKind::Solution,
        Kind::Data => ValueKind::Data,
    };
    let body = serde_json::to_string_pretty(&svd).map_err(output_failure)?;
    // builds the problem to validate the spectrum
    svd.into_problem(kind)?;
    println!("{body}");
    if let Some(dir) = out {
        write_file(dir, "ingested.json", &body)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Aggregate { common, paper_table_1 } => aggregate(common, *paper_table_1),
        Command::Rates { common } => rates(common),
        Command::Noise { common } => noise(common),
        Command::CheckFilter { common } => check_filter(common),
        Command::Ingest { file, kind, out } => ingest(file, *kind, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
