use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, OutputFormat};
use crate::aggregation::{aggregate, oracle_aggregate, SearchWindow};
use crate::error::{Error, Result};
use crate::noise::generate_noise_stream;
use crate::regularization::{distance, norm};
use crate::rng::{self, purpose};
use crate::rules::{correction_factors, family_errors, iterated_qo_select, qo_select, ParameterGrid};
use crate::spectral::SpectralProblem;

/// Per-node curves of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunCurves {
    pub alpha: Vec<f64>,
    /// `‖x − x_j‖`.
    pub error: Vec<f64>,
    /// `‖x − c_j x_j‖` for the corrected family.
    pub error2: Vec<f64>,
    /// `‖x_j − x_{j−1}‖`; undefined at the first node.
    pub qo: Vec<Option<f64>>,
    /// `‖c_j x_j − c_{j−1} x_{j−1}‖`; undefined at the first node.
    pub qo2: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub run: usize,
    pub e_qo: f64,
    pub e_best: f64,
    pub e_qo2: f64,
    pub e_best2: f64,
    pub e_agg: f64,
    /// Error of the aggregate built from the exact `p`; a lower reference.
    pub e_oracle: f64,
    /// 0-based grid positions chosen by the plain and corrected rules.
    pub qo_index: usize,
    pub qo2_index: usize,
    pub kappa_indices: Vec<usize>,
    /// Number of aggregated approximants.
    pub s: usize,
    pub solve_rank: usize,
    /// Norm of the noise components outside the range of `T`.
    pub discarded_noise_norm: f64,
    pub noise_norm: f64,
    pub curves: RunCurves,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_runs: usize,
    pub normalized_noise: bool,
    pub mean_e_qo: f64,
    pub mean_e_best: f64,
    pub mean_e_qo2: f64,
    pub mean_e_best2: f64,
    pub mean_e_agg: f64,
    pub mean_e_oracle: f64,
    pub mean_s: f64,
    pub mean_solve_rank: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub runs: Vec<RunReport>,
    pub summary: Summary,
}

fn with_empty_head(criterion: Vec<f64>) -> Vec<Option<f64>> {
    std::iter::once(None).chain(criterion.into_iter().map(Some)).collect()
}

fn min_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Samples `x_j = j^{-μ} η_j` with `η_j` uniform on `[-1, 1]`.
pub fn sample_solution(n: usize, mu: f64, seed: u64, run: u64) -> Vec<f64> {
    let mut r = rng::stream(seed, run, purpose::SOLUTION);
    (1..=n)
        .map(|j| (j as f64).powf(-mu) * r.random_range(-1.0..=1.0))
        .collect()
}

/// Executes run `run` of the aggregation experiment.
pub fn run_single(cfg: &ExperimentConfig, run: usize) -> Result<RunReport> {
    let p = &cfg.problem;
    let delta = cfg.noise.delta;
    let sv = p.spectrum.singular_values(p.n)?;
    let x = sample_solution(p.n, p.mu, cfg.run.seed, run as u64);
    let noise = if delta > 0.0 {
        generate_noise_stream(&cfg.noise_spec(), p.m, delta, run as u64)?
    } else {
        vec![0.0; p.m]
    };
    let problem = SpectralProblem::new(sv, x.clone(), &noise[..p.n], delta)?;

    let filter = cfg.rules.filter();
    let grid = ParameterGrid::build(&problem, &filter, cfg.grid.alpha1, cfg.grid.q, cfg.grid.size)?;
    let qo = qo_select(&grid)?;
    let factors = correction_factors(&grid, grid.coeffs(qo.index))?;
    let qo2_full = iterated_qo_select(&grid, &factors)?;
    let qo2 = match cfg.rules.iterated_window {
        SearchWindow::Full => qo2_full.clone(),
        SearchWindow::Active => {
            let len = qo.index + 1;
            iterated_qo_select(&grid.prefix(len)?, &factors[..len])?
        }
    };

    let error = family_errors(&grid, None, &x)?;
    let error2 = family_errors(&grid, Some(&factors), &x)?;
    let agg = aggregate(&grid, qo.alpha, &cfg.rules.aggregation_options())?;
    let oracle = oracle_aggregate(&grid, &x, Some(qo.alpha), cfg.rules.rel_tol)?;

    Ok(RunReport {
        run,
        e_qo: error[qo.index],
        e_best: min_of(&error),
        e_qo2: error2[qo2.index],
        e_best2: min_of(&error2),
        e_agg: distance(&agg.aggregate_coeffs, &x),
        e_oracle: distance(&oracle.aggregate_coeffs, &x),
        qo_index: qo.index,
        qo2_index: qo2.index,
        kappa_indices: agg.kappa_indices.unwrap_or_default(),
        s: agg.active_indices.len(),
        solve_rank: agg.solve_rank,
        discarded_noise_norm: norm(&noise[p.n..]),
        noise_norm: norm(&noise),
        curves: RunCurves {
            alpha: grid.alphas().to_vec(),
            error,
            error2,
            qo: with_empty_head(qo.criterion),
            qo2: with_empty_head(qo2_full.criterion),
        },
    })
}

fn mean(runs: &[RunReport], f: impl Fn(&RunReport) -> f64) -> f64 {
    runs.iter().map(f).sum::<f64>() / runs.len() as f64
}

pub fn summarize(runs: &[RunReport], normalized_noise: bool) -> Summary {
    Summary {
        n_runs: runs.len(),
        normalized_noise,
        mean_e_qo: mean(runs, |r| r.e_qo),
        mean_e_best: mean(runs, |r| r.e_best),
        mean_e_qo2: mean(runs, |r| r.e_qo2),
        mean_e_best2: mean(runs, |r| r.e_best2),
        mean_e_agg: mean(runs, |r| r.e_agg),
        mean_e_oracle: mean(runs, |r| r.e_oracle),
        mean_s: mean(runs, |r| r.s as f64),
        mean_solve_rank: mean(runs, |r| r.solve_rank as f64),
    }
}

/// Runs the aggregation experiment. Run `i` draws from stream `i` of the
/// base seed, so results do not depend on `n_runs` or on parallelism.
pub fn run_aggregation_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let n = cfg.run.n_runs;
    let runs = if cfg.run.parallel {
        (0..n).into_par_iter().map(|i| run_single(cfg, i)).collect::<Result<Vec<_>>>()?
    } else {
        (0..n).map(|i| run_single(cfg, i)).collect::<Result<Vec<_>>>()?
    };
    let summary = summarize(&runs, cfg.noise.normalize_to_delta);
    Ok(ExperimentReport {
        config: cfg.clone(),
        runs,
        summary,
    })
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

impl ExperimentReport {
    /// Curves of one run as CSV with columns `alpha,error,error2,qo,qo2`.
    /// The difference columns are empty on the first row.
    pub fn figure_curves_csv(&self, run: usize) -> Result<String> {
        let r = self.runs.get(run).ok_or(Error::BadRunIndex {
            index: run,
            runs: self.runs.len(),
        })?;
        let c = &r.curves;
        let rows = (0..c.alpha.len()).map(|j| {
            vec![fmt(c.alpha[j]), fmt(c.error[j]), fmt(c.error2[j]), fmt_opt(c.qo[j]), fmt_opt(c.qo2[j])]
        });
        csv_string(&["alpha", "error", "error2", "qo", "qo2"], rows)
    }

    /// One row of scalar results per run.
    pub fn runs_csv(&self) -> Result<String> {
        let header = [
            "run",
            "e_qo",
            "e_best",
            "e_qo2",
            "e_best2",
            "e_agg",
            "e_oracle",
            "qo_index",
            "qo2_index",
            "s",
            "solve_rank",
            "noise_norm",
            "discarded_noise_norm",
        ];
        let rows = self.runs.iter().map(|r| {
            vec![
                r.run.to_string(),
                fmt(r.e_qo),
                fmt(r.e_best),
                fmt(r.e_qo2),
                fmt(r.e_best2),
                fmt(r.e_agg),
                fmt(r.e_oracle),
                r.qo_index.to_string(),
                r.qo2_index.to_string(),
                r.s.to_string(),
                r.solve_rank.to_string(),
                fmt(r.noise_norm),
                fmt(r.discarded_noise_norm),
            ]
        });
        csv_string(&header, rows)
    }

    /// Plain-text table of mean errors next to the values of one run.
    pub fn table_text(&self) -> String {
        let s = &self.summary;
        let fig = &self.runs[self.config.run.figure_run.min(self.runs.len() - 1)];
        let rows = [
            ("e_qo", s.mean_e_qo, fig.e_qo),
            ("e_best", s.mean_e_best, fig.e_best),
            ("e_qo,2", s.mean_e_qo2, fig.e_qo2),
            ("e_best,2", s.mean_e_best2, fig.e_best2),
            ("e_agg", s.mean_e_agg, fig.e_agg),
        ];
        let mut out = format!(
            "{:<10} {:>12} {:>12}\n",
            "error",
            "mean value",
            format!("run {}", fig.run)
        );
        for (name, m, f) in rows {
            out.push_str(&format!("{name:<10} {m:>12.4} {f:>12.4}\n"));
        }
        out.push_str(&format!(
            "\nruns: {}   noise: {}   mean s: {:.2}   mean solve rank: {:.2}\n",
            s.n_runs,
            if s.normalized_noise { "normalized to delta" } else { "unnormalized" },
            s.mean_s,
            s.mean_solve_rank
        ));
        out
    }

    /// Writes `runs.csv` or `runs.json`, `summary.json`, `table.txt` and
    /// `figure_run<k>.csv` into `dir`.
    pub fn write_to(&self, dir: &std::path::Path, format: OutputFormat) -> Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut put = |name: String, body: String| -> Result<()> {
            let path = dir.join(name);
            std::fs::write(&path, body)?;
            written.push(path);
            Ok(())
        };
        match format {
            OutputFormat::Csv => put("runs.csv".into(), self.runs_csv()?)?,
            OutputFormat::Json => put("runs.json".into(), serde_json::to_string_pretty(&self.runs)?)?,
        }
        put("summary.json".into(), serde_json::to_string_pretty(&self.summary)?)?;
        put("table.txt".into(), self.table_text())?;
        let k = self.config.run.figure_run;
        put(format!("figure_run{k}.csv"), self.figure_curves_csv(k)?)?;
        Ok(written)
    }
}
