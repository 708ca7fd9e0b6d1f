use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::RateStudyConfig;
use crate::error::{Error, Result};
use crate::noise::{generate_noise_stream, sufficient_condition_verdict, KappaKind, Verdict};
use crate::regularization::{distance, dot, regularize};
use crate::rng::{self, purpose};
use crate::rules::grid_argmin_psi;
use crate::spectral::{DataSource, FilterFamily, IndexFunction, SpectralProblem, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTriple {
    /// `‖x − x_{α(y^δ)}‖`.
    pub solution: f64,
    /// `|⟨f, x_{α(y^δ)} − x⟩|`.
    pub functional: f64,
    /// `|⟨f, x_{α_κ(y^δ)} − x⟩|`.
    pub functional_kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub delta: f64,
    /// Means over seeds.
    pub errors: RateTriple,
    pub mean_alpha: f64,
    pub mean_alpha_kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub config: RateStudyConfig,
    pub rows: Vec<RateRow>,
    /// Least-squares slopes of `ln(mean error)` against `ln δ`.
    pub slopes: RateTriple,
    /// Predicted exponents `2μ²/(2μ+1)`, `2μ(μ+γ)/(2μ+1)`, `2(μ+γ)²/(2μ+1)`.
    pub theory: RateTriple,
    pub verdict_plain: Verdict,
    pub verdict_kappa: Verdict,
}

/// Slope of the least-squares line through `(x_i, y_i)`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn theory_exponents(mu: f64, gamma: f64) -> RateTriple {
    let d = 2.0 * mu + 1.0;
    RateTriple {
        solution: 2.0 * mu * mu / d,
        functional: 2.0 * mu * (mu + gamma) / d,
        functional_kappa: 2.0 * (mu + gamma).powi(2) / d,
    }
}

fn log_grid(hi: f64, lo: f64, points: usize) -> Vec<f64> {
    let (lh, ll) = (hi.ln(), lo.ln());
    (0..points)
        .map(|i| (lh + (ll - lh) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Errors of one seed at one noise level, plus the two chosen parameters.
fn one_sample(cfg: &RateStudyConfig, sv: &[f64], grid: &[f64], delta: f64, seed: u64) -> Result<(RateTriple, f64, f64)> {
    let n = cfg.n;
    let mut rw = rng::stream(cfg.seed, seed, purpose::SOLUTION);
    let mut ru = rng::stream(cfg.seed, seed, purpose::FUNCTIONAL);
    let mut x = Vec::with_capacity(n);
    let mut f = Vec::with_capacity(n);
    for (k, s) in sv.iter().enumerate() {
        let ev = s * s;
        let scale = 1.0 / (k + 1) as f64;
        x.push(ev.powf(cfg.mu) * rw.random_range(-1.0..=1.0) * scale);
        f.push(ev.powf(cfg.gamma) * ru.random_range(-1.0..=1.0) * scale);
    }
    let noise = generate_noise_stream(&cfg.noise_spec(), n, delta, seed)?;
    let problem = SpectralProblem::new(sv.to_vec(), x.clone(), &noise, delta)?;
    let filter = FilterFamily::Tikhonov;
    let kappa = if cfg.gamma > 0.0 {
        IndexFunction::power(cfg.gamma)
    } else {
        IndexFunction::Constant
    };
    let (alpha, _) = grid_argmin_psi(&problem, &filter, None, grid, DataSource::Noisy)?;
    let (alpha_k, _) = grid_argmin_psi(&problem, &filter, Some(&kappa), grid, DataSource::Noisy)?;
    let xa = regularize(&problem, &filter, alpha, DataSource::Noisy)?.coeffs;
    let xk = regularize(&problem, &filter, alpha_k, DataSource::Noisy)?.coeffs;
    let fx = dot(&f, &x);
    Ok((
        RateTriple {
            solution: distance(&xa, &x),
            functional: (dot(&f, &xa) - fx).abs(),
            functional_kappa: (dot(&f, &xk) - fx).abs(),
        },
        alpha,
        alpha_k,
    ))
}

/// Convergence-rate study: for every noise level, selects `α` and `α_κ` by
/// grid minimization of `ψ` and `ψ_κ`, averages the errors over seeds and
/// fits log-log slopes.
pub fn run_rate_study(cfg: &RateStudyConfig) -> Result<RateReport> {
    cfg.validate()?;
    let spectrum = Spectrum::Polynomial { beta: cfg.beta };
    let kappa_kind = KappaKind::Power { gamma: cfg.gamma };
    let verdict_plain = sufficient_condition_verdict(&spectrum, cfg.noise_decay, KappaKind::None)?;
    let verdict_kappa = sufficient_condition_verdict(&spectrum, cfg.noise_decay, kappa_kind)?;
    let sv = spectrum.singular_values(cfg.n)?;
    let smallest = sv[cfg.n - 1] * sv[cfg.n - 1];
    let grid = log_grid(1.0, smallest, cfg.grid_points);

    let mut rows = Vec::with_capacity(cfg.deltas.len());
    for &delta in &cfg.deltas {
        let run = |s: usize| one_sample(cfg, &sv, &grid, delta, s as u64);
        let samples = if cfg.parallel {
            (0..cfg.seeds).into_par_iter().map(run).collect::<Result<Vec<_>>>()?
        } else {
            (0..cfg.seeds).map(run).collect::<Result<Vec<_>>>()?
        };
        let m = samples.len() as f64;
        let avg = |g: &dyn Fn(&(RateTriple, f64, f64)) -> f64| samples.iter().map(g).sum::<f64>() / m;
        rows.push(RateRow {
            delta,
            errors: RateTriple {
                solution: avg(&|t| t.0.solution),
                functional: avg(&|t| t.0.functional),
                functional_kappa: avg(&|t| t.0.functional_kappa),
            },
            mean_alpha: avg(&|t| t.1),
            mean_alpha_kappa: avg(&|t| t.2),
        });
    }

    let ld: Vec<f64> = rows.iter().map(|r| r.delta.ln()).collect();
    let slope = |g: fn(&RateTriple) -> f64| {
        let ly: Vec<f64> = rows.iter().map(|r| g(&r.errors).ln()).collect();
        least_squares_slope(&ld, &ly)
    };
    let slopes = RateTriple {
        solution: slope(|t| t.solution),
        functional: slope(|t| t.functional),
        functional_kappa: slope(|t| t.functional_kappa),
    };
    if !(slopes.solution.is_finite() && slopes.functional.is_finite() && slopes.functional_kappa.is_finite()) {
        return Err(Error::OutOfRange("rate fit produced a non-finite slope".into()));
    }
    Ok(RateReport {
        config: cfg.clone(),
        rows,
        slopes,
        theory: theory_exponents(cfg.mu, cfg.gamma),
        verdict_plain,
        verdict_kappa,
    })
}

impl RateReport {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:>10} {:>14} {:>14} {:>14}\n",
            "delta", "solution", "functional", "functional_k"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:>10.1e} {:>14.6e} {:>14.6e} {:>14.6e}\n",
                r.delta, r.errors.solution, r.errors.functional, r.errors.functional_kappa
            ));
        }
        let (s, t) = (&self.slopes, &self.theory);
        out.push_str(&format!(
            "\n{:>10} {:>14.4} {:>14.4} {:>14.4}\n{:>10} {:>14.4} {:>14.4} {:>14.4}\n",
            "slope", s.solution, s.functional, s.functional_kappa, "theory", t.solution, t.functional, t.functional_kappa
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v - 2.0).collect();
        assert!((least_squares_slope(&x, &y) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exponents() {
        let t = theory_exponents(0.5, 0.25);
        assert!((t.solution - 0.25).abs() < 1e-15);
        assert!((t.functional - 0.375).abs() < 1e-15);
        assert!((t.functional_kappa - 0.5625).abs() < 1e-15);
    }

    #[test]
    fn small_study_runs() {
        let cfg = RateStudyConfig {
            n: 200,
            seeds: 2,
            grid_points: 40,
            ..Default::default()
        };
        let report = run_rate_study(&cfg).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert_eq!(report.verdict_plain, Verdict::Holds);
        assert_eq!(report.verdict_kappa, Verdict::Holds);
        assert!(report.slopes.solution > 0.0);
    }
}
