use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aggregation::{ActiveSet, AggregationOptions, SearchWindow};
use crate::error::{Error, Result};
use crate::noise::{Distribution, NoiseKind, NoiseSpec, SignPattern};
use crate::spectral::{check_filter_assumptions, AssumptionReport, ConstantCaps, FilterFamily, IndexFunction, Spectrum};

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(invalid(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemConfig {
    pub spectrum: Spectrum,
    /// Number of unknowns (columns of `T`).
    pub n: usize,
    /// Number of observations (rows of `T`); components beyond `n` lie in
    /// the orthogonal complement of the range and are discarded.
    pub m: usize,
    /// Solution decay: `x_j = j^{-μ} η_j` with `η_j` uniform on `[-1, 1]`.
    pub mu: f64,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self {
            spectrum: Spectrum::DiagonalGeometric { a: 0.5 },
            n: 100,
            m: 150,
            mu: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub delta: f64,
    pub kind: NoiseKind,
    pub normalize_to_delta: bool,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            delta: 0.01,
            kind: NoiseKind::Stochastic {
                decay: 0.0,
                distribution: Distribution::UniformSeparated { eps: 0.01 },
            },
            normalize_to_delta: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub alpha1: f64,
    pub q: f64,
    /// Number of grid nodes `M`.
    pub size: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            alpha1: 0.1,
            q: 0.5,
            size: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RuleConfig {
    /// Tikhonov iteration count; 1 is ordinary Tikhonov.
    pub filter_order: u32,
    /// Relative eigenvalue cut-off of the Gram solve.
    pub rel_tol: f64,
    pub active_set: ActiveSet,
    /// Window of the functional rule used to estimate `p`.
    pub lfs_window: SearchWindow,
    /// Window of the corrected quasi-optimality rule.
    pub iterated_window: SearchWindow,
}

impl Default for RuleConfig {
    fn default() -> Self {
        Self {
            filter_order: 1,
            rel_tol: 1e-2,
            active_set: ActiveSet::Selected,
            lfs_window: SearchWindow::Active,
            iterated_window: SearchWindow::Active,
        }
    }
}

impl RuleConfig {
    pub fn filter(&self) -> FilterFamily {
        match self.filter_order {
            1 => FilterFamily::Tikhonov,
            order => FilterFamily::IteratedTikhonov { order },
        }
    }

    pub fn aggregation_options(&self) -> AggregationOptions {
        AggregationOptions {
            rel_tol: self.rel_tol,
            active_set: self.active_set,
            lfs_window: self.lfs_window,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_runs: usize,
    pub seed: u64,
    /// Run index whose curves are exported.
    pub figure_run: usize,
    /// Execute runs on the rayon pool; results are identical either way.
    pub parallel: bool,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_runs: 10,
            seed: 2018,
            figure_run: 0,
            parallel: true,
            format: OutputFormat::Csv,
        }
    }
}

/// Configuration of the aggregation experiment. Defaults reproduce the
/// reference setup: `λ_k = 0.5^k`, `n = 100`, `m = 150`, `μ = 2`,
/// `δ = 0.01`, `α_j = 0.1·0.5^j`, `M = 20`, ten runs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub noise: NoiseConfig,
    pub grid: GridConfig,
    pub rules: RuleConfig,
    pub run: RunConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn noise_spec(&self) -> NoiseSpec {
        NoiseSpec {
            kind: self.noise.kind,
            normalize_to_delta: self.noise.normalize_to_delta,
            seed: self.run.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.problem;
        p.spectrum.validate().map_err(|e| invalid(e.to_string()))?;
        if p.n == 0 {
            return Err(invalid("problem.n must be at least 1"));
        }
        if p.m < p.n {
            return Err(invalid(format!("problem.m ({}) must be at least problem.n ({})", p.m, p.n)));
        }
        p.spectrum.singular_values(p.n).map_err(|e| invalid(e.to_string()))?;
        if !(p.mu >= 0.0) || !p.mu.is_finite() {
            return Err(invalid(format!("problem.mu must be nonnegative, got {}", p.mu)));
        }

        let nz = &self.noise;
        if !(nz.delta >= 0.0) || !nz.delta.is_finite() {
            return Err(invalid(format!("noise.delta must be nonnegative, got {}", nz.delta)));
        }
        self.noise_spec().validate().map_err(|e| invalid(e.to_string()))?;

        let g = &self.grid;
        positive("grid.alpha1", g.alpha1)?;
        if !(g.q > 0.0 && g.q < 1.0) {
            return Err(invalid(format!("grid.q must lie in (0, 1), got {}", g.q)));
        }
        if g.size < 2 {
            return Err(invalid(format!("grid.size must be at least 2, got {}", g.size)));
        }
        if !(g.alpha1 * g.q.powi(g.size as i32 - 1) > 0.0) {
            return Err(invalid("grid underflows to zero"));
        }

        let r = &self.rules;
        if r.filter_order == 0 {
            return Err(invalid("rules.filter_order must be at least 1"));
        }
        if !(r.rel_tol > 0.0 && r.rel_tol < 1.0) {
            return Err(invalid(format!("rules.rel_tol must lie in (0, 1), got {}", r.rel_tol)));
        }

        if self.run.n_runs == 0 {
            return Err(invalid("run.n_runs must be at least 1"));
        }
        if self.run.figure_run >= self.run.n_runs {
            return Err(invalid(format!(
                "run.figure_run ({}) must be below run.n_runs ({})",
                self.run.figure_run, self.run.n_runs
            )));
        }
        Ok(())
    }
}

/// Configuration of the convergence-rate study on a mildly ill-posed problem
/// with exact source conditions `x = (T*T)^μ w`, `f = (T*T)^γ u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RateStudyConfig {
    /// `λ_k² = k^{-β}`.
    pub beta: f64,
    pub n: usize,
    pub mu: f64,
    pub gamma: f64,
    pub deltas: Vec<f64>,
    pub seeds: usize,
    pub seed: u64,
    /// Decay `ν` of the deterministic noise `δ k^{-ν/2}` with random signs.
    pub noise_decay: f64,
    /// Points of the geometric `α` grid from 1 down to the smallest eigenvalue.
    pub grid_points: usize,
    pub parallel: bool,
}

impl Default for RateStudyConfig {
    fn default() -> Self {
        Self {
            beta: 3.0,
            n: 2000,
            mu: 0.5,
            gamma: 0.25,
            deltas: vec![1e-2, 1e-3, 1e-4, 1e-5],
            seeds: 20,
            seed: 2018,
            noise_decay: 2.0,
            grid_points: 200,
            parallel: true,
        }
    }
}

impl RateStudyConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn noise_spec(&self) -> NoiseSpec {
        NoiseSpec {
            kind: NoiseKind::PolyDeterministic {
                decay: self.noise_decay,
                signs: SignPattern::Random,
            },
            normalize_to_delta: false,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("beta", self.beta)?;
        positive("mu", self.mu)?;
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(invalid(format!("gamma must be nonnegative, got {}", self.gamma)));
        }
        if self.n < 2 {
            return Err(invalid("n must be at least 2"));
        }
        if self.seeds == 0 {
            return Err(invalid("seeds must be at least 1"));
        }
        if self.grid_points < 2 {
            return Err(invalid("grid_points must be at least 2"));
        }
        positive("noise_decay", self.noise_decay)?;
        for &d in &self.deltas {
            positive("delta", d)?;
        }
        let lo = self.deltas.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.deltas.iter().copied().fold(0.0, f64::max);
        if self.deltas.len() < 4 {
            return Err(Error::InsufficientSweep(format!(
                "need at least 4 noise levels, got {}",
                self.deltas.len()
            )));
        }
        if (hi / lo).log10() < 3.0 - 1e-9 {
            return Err(Error::InsufficientSweep(format!(
                "noise levels must span at least 3 decades, got [{lo}, {hi}]"
            )));
        }
        Ok(())
    }
}

/// One Monte Carlo noise-condition study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseStudyCase {
    pub name: String,
    pub spectrum: Spectrum,
    pub noise: NoiseSpec,
    pub n_max: Vec<usize>,
    pub n_seeds: usize,
    /// Sample dimension as a multiple of the largest `n_max`.
    #[serde(default = "default_tail_factor")]
    pub tail_factor: usize,
}

fn default_tail_factor() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseStudyConfig {
    pub cases: Vec<NoiseStudyCase>,
}

impl Default for NoiseStudyConfig {
    fn default() -> Self {
        let gaussian = NoiseSpec {
            kind: NoiseKind::Stochastic {
                decay: 2.0,
                distribution: Distribution::Gaussian,
            },
            normalize_to_delta: false,
            seed: 2018,
        };
        let band = NoiseSpec {
            kind: NoiseKind::Stochastic {
                decay: 2.0,
                distribution: Distribution::UniformBand { eps: 0.1 },
            },
            ..gaussian
        };
        let severe = Spectrum::Exponential { a: 0.9 };
        Self {
            cases: vec![
                NoiseStudyCase {
                    name: "mild_gaussian".into(),
                    spectrum: Spectrum::Polynomial { beta: 3.0 },
                    noise: gaussian,
                    n_max: vec![500, 1000, 2000],
                    n_seeds: 50,
                    tail_factor: 4,
                },
                NoiseStudyCase {
                    name: "severe_gaussian".into(),
                    spectrum: severe,
                    noise: gaussian,
                    n_max: vec![100, 200, 400],
                    n_seeds: 50,
                    tail_factor: 4,
                },
                NoiseStudyCase {
                    name: "severe_band".into(),
                    spectrum: severe,
                    noise: band,
                    n_max: vec![100, 200, 400],
                    n_seeds: 50,
                    tail_factor: 4,
                },
            ],
        }
    }
}

impl NoiseStudyConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cases.is_empty() {
            return Err(invalid("at least one noise study case is required"));
        }
        for c in &self.cases {
            c.spectrum.validate().map_err(|e| invalid(format!("{}: {e}", c.name)))?;
            c.noise.validate().map_err(|e| invalid(format!("{}: {e}", c.name)))?;
            if c.n_max.is_empty() || c.n_max.contains(&0) {
                return Err(invalid(format!("{}: n_max values must be positive", c.name)));
            }
            if c.n_seeds == 0 {
                return Err(invalid(format!("{}: n_seeds must be at least 1", c.name)));
            }
            if c.tail_factor < 2 {
                return Err(invalid(format!("{}: tail_factor must be at least 2", c.name)));
            }
            let largest = c.n_max.iter().max().copied().unwrap_or(0);
            c.spectrum
                .singular_values(largest * c.tail_factor)
                .map_err(|e| invalid(format!("{}: {e}", c.name)))?;
        }
        Ok(())
    }
}

/// Grids and index functions for a sampled check of the filter assumptions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterCheckConfig {
    /// Tikhonov iteration count; 1 is ordinary Tikhonov.
    pub filter_order: u32,
    pub phi: IndexFunction,
    pub kappa: IndexFunction,
    pub alpha_range: (f64, f64),
    pub alpha_points: usize,
    pub lambda_range: (f64, f64),
    pub lambda_points: usize,
    pub caps: ConstantCaps,
}

impl Default for FilterCheckConfig {
    fn default() -> Self {
        Self {
            filter_order: 1,
            phi: IndexFunction::power(0.5),
            kappa: IndexFunction::power(0.25),
            alpha_range: (1e-8, 1.0),
            alpha_points: 60,
            lambda_range: (1e-10, 1.0),
            lambda_points: 120,
            caps: ConstantCaps::default(),
        }
    }
}

fn geometric_points((lo, hi): (f64, f64), points: usize) -> Vec<f64> {
    let (ll, lh) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (lh + (ll - lh) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

impl FilterCheckConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.filter_order == 0 {
            return Err(invalid("filter_order must be at least 1"));
        }
        self.phi.validate().map_err(|e| invalid(format!("phi: {e}")))?;
        self.kappa.validate().map_err(|e| invalid(format!("kappa: {e}")))?;
        for (name, (lo, hi), points) in [
            ("alpha", self.alpha_range, self.alpha_points),
            ("lambda", self.lambda_range, self.lambda_points),
        ] {
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(invalid(format!("{name}_range must satisfy 0 < lo < hi, got ({lo}, {hi})")));
            }
            if points < 2 {
                return Err(invalid(format!("{name}_points must be at least 2")));
            }
        }
        Ok(())
    }

    pub fn filter(&self) -> FilterFamily {
        match self.filter_order {
            1 => FilterFamily::Tikhonov,
            order => FilterFamily::IteratedTikhonov { order },
        }
    }

    pub fn run(&self) -> Result<AssumptionReport> {
        self.validate()?;
        check_filter_assumptions(
            &self.filter(),
            &geometric_points(self.alpha_range, self.alpha_points),
            &geometric_points(self.lambda_range, self.lambda_points),
            &self.phi,
            &self.kappa,
            &self.caps,
        )
    }
}
