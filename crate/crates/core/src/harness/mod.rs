//! Experiment harness: configuration, the aggregation experiment, the
//! convergence-rate and noise-condition studies, and SVD ingestion.

mod config;
mod experiment;
mod ingest;
mod noise_study;
mod rates;

pub use config::{
    ExperimentConfig, FilterCheckConfig, GridConfig, NoiseConfig, NoiseStudyCase, NoiseStudyConfig, OutputFormat, ProblemConfig,
    RateStudyConfig, RuleConfig, RunConfig,
};
pub use experiment::{
    run_aggregation_experiment, run_single, sample_solution, summarize, ExperimentReport, RunCurves, RunReport,
    Summary,
};
pub use ingest::{ingest_svd, parse_svd_csv, IngestedSvd, ValueKind};
pub use noise_study::{growth_csv, ratio_curve_csv, run_noise_study, NoiseStudyResult};
pub use rates::{least_squares_slope, run_rate_study, theory_exponents, RateReport, RateRow, RateTriple};
