//! Noise models in the left singular basis and empirical statistics for the
//! noise conditions
//!
//! ```text
//! λ_n⁴ Σ_{k≤n} λ_k^{-2} κ²(λ_k²) e_k²  ≤  C Σ_{k>n} λ_k² κ²(λ_k²) e_k²
//! ```
//!
//! reported as the ratio of the two sides for every truncation level `n`.

use rand::Rng;
use rand_distr::{Distribution as _, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, purpose};
use crate::spectral::{validate_spectrum, IndexFunction, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignPattern {
    /// `(-1)^{k+1}`.
    Alternating,
    AllPositive,
    /// Independent fair signs drawn from the seed.
    Random,
}

/// Law of the standardized components `ξ_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    Gaussian,
    Rademacher,
    /// Uniform on `[-√3, √3]`, i.e. zero mean and unit variance.
    Uniform,
    /// Uniform on `[-1, -ε] ∪ [ε, 1]`.
    UniformSeparated { eps: f64 },
    /// Random sign times a magnitude uniform on `[ε, 1/ε]`.
    UniformBand { eps: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    /// `e_k = s_k δ k^{-ν/2}` with a fixed sign pattern.
    PolyDeterministic { decay: f64, signs: SignPattern },
    /// `e_k = σ_k ξ_k` with `σ_k = δ k^{-ν/2}` and i.i.d. `ξ_k`.
    Stochastic { decay: f64, distribution: Distribution },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Rescale the generated vector to Euclidean norm exactly `δ`.
    pub normalize_to_delta: bool,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            NoiseKind::PolyDeterministic { decay, .. } => {
                if !(decay > 0.0) || !decay.is_finite() {
                    return Err(Error::BadDecay(decay));
                }
            }
            NoiseKind::Stochastic { decay, distribution } => {
                // white noise (ν = 0) is allowed for the stochastic model
                if !(decay >= 0.0) || !decay.is_finite() {
                    return Err(Error::BadDecay(decay));
                }
                if let Distribution::UniformSeparated { eps } | Distribution::UniformBand { eps } = distribution {
                    if !(eps > 0.0 && eps < 1.0) {
                        return Err(Error::BadEpsilon(eps));
                    }
                }
            }
        }
        Ok(())
    }
}

fn draw<R: Rng>(dist: Distribution, rng: &mut R) -> f64 {
    let sign = |rng: &mut R| if rng.random::<bool>() { 1.0 } else { -1.0 };
    match dist {
        Distribution::Gaussian => StandardNormal.sample(rng),
        Distribution::Rademacher => sign(rng),
        Distribution::Uniform => rng.random_range(-1.0..1.0) * 3f64.sqrt(),
        Distribution::UniformSeparated { eps } => sign(rng) * rng.random_range(eps..=1.0),
        Distribution::UniformBand { eps } => sign(rng) * rng.random_range(eps..=1.0 / eps),
    }
}

/// Noise coefficients for stream 0 of `spec.seed`.
pub fn generate_noise(spec: &NoiseSpec, n: usize, delta: f64) -> Result<Vec<f64>> {
    generate_noise_stream(spec, n, delta, 0)
}

/// Noise coefficients `e_k`, `k = 1..n`, for an independent stream `index`
/// of `spec.seed`.
pub fn generate_noise_stream(spec: &NoiseSpec, n: usize, delta: f64, index: u64) -> Result<Vec<f64>> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::OutOfRange("noise dimension must be at least 1".into()));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::NonPositiveArgument { name: "delta", value: delta });
    }
    let sigma = |k: usize, decay: f64| delta * (k as f64).powf(-decay / 2.0);
    let mut noise: Vec<f64> = match spec.kind {
        NoiseKind::PolyDeterministic { decay, signs } => {
            let mut rng = rng::stream(spec.seed, index, purpose::SIGNS);
            (1..=n)
                .map(|k| {
                    let s = match signs {
                        SignPattern::Alternating if k % 2 == 0 => -1.0,
                        SignPattern::Alternating | SignPattern::AllPositive => 1.0,
                        SignPattern::Random if rng.random::<bool>() => 1.0,
                        SignPattern::Random => -1.0,
                    };
                    s * sigma(k, decay)
                })
                .collect()
        }
        NoiseKind::Stochastic { decay, distribution } => {
            let mut rng = rng::stream(spec.seed, index, purpose::NOISE);
            (1..=n).map(|k| sigma(k, decay) * draw(distribution, &mut rng)).collect()
        }
    };
    if spec.normalize_to_delta {
        let norm = noise.iter().map(|e| e * e).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::OutOfRange("cannot normalize a zero noise vector".into()));
        }
        let scale = delta / norm;
        noise.iter_mut().for_each(|e| *e *= scale);
    }
    Ok(noise)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseConditionReport {
    /// `ratios_plain[n - 1]` is the plain-condition ratio at level `n`.
    pub ratios_plain: Vec<f64>,
    pub ratios_kappa: Option<Vec<f64>>,
    pub sup_ratio_plain: f64,
    pub sup_ratio_kappa: Option<f64>,
    pub n_max: usize,
    /// First level `n` (1-based) whose tail sum is zero.
    pub degenerate_tail_at: Option<usize>,
    /// Geometric extrapolation of the tail beyond the available dimension,
    /// relative to the retained tail sum at `n_max`.
    pub tail_estimate: f64,
    pub tail_warning: bool,
}

/// Ratios `P_n / S_n` for `n = 1..n_max`, computed with the rescaled
/// recurrences `P̃_n = (λ_n/λ_{n-1})² P̃_{n-1} + w_n` and
/// `S̃_n = (λ_{n+1}/λ_n)² (w_{n+1} + S̃_{n+1})`, which never form `λ_k^{-2}`.
fn ratios_for(sv: &[f64], w: &[f64], n_max: usize) -> (Vec<f64>, Option<usize>) {
    let dim = sv.len();
    let mut tail = vec![0.0; dim];
    for n in (0..dim - 1).rev() {
        let r = sv[n + 1] / sv[n];
        tail[n] = r * r * (w[n + 1] + tail[n + 1]);
    }
    let mut head = 0.0;
    let mut ratios = Vec::with_capacity(n_max);
    let mut degenerate = None;
    for n in 0..n_max {
        if n > 0 {
            let r = sv[n] / sv[n - 1];
            head *= r * r;
        }
        head += w[n];
        if tail[n] > 0.0 {
            ratios.push(head / tail[n]);
        } else {
            degenerate.get_or_insert(n + 1);
            ratios.push(f64::INFINITY);
        }
    }
    (ratios, degenerate)
}

fn tail_extrapolation(terms: &[f64]) -> f64 {
    let q = terms.len() / 4;
    if q == 0 {
        return 0.0;
    }
    let len = terms.len();
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let before = mean(&terms[len - 2 * q..len - q]);
    let last = mean(&terms[len - q..]);
    if last == 0.0 {
        return 0.0;
    }
    if !(before > 0.0) {
        return f64::INFINITY;
    }
    let r = (last / before).powf(1.0 / q as f64);
    if r >= 1.0 {
        f64::INFINITY
    } else {
        last * r / (1.0 - r)
    }
}

fn sup(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

/// Evaluates both noise conditions on a finite sample.
///
/// Infinite tail sums are truncated at `singular_values.len()`; the report
/// carries an estimate of what was cut off.
pub fn condition_ratios(
    singular_values: &[f64],
    noise: &[f64],
    kappa: Option<&IndexFunction>,
    n_max: usize,
) -> Result<NoiseConditionReport> {
    let dim = singular_values.len();
    if noise.len() < dim {
        return Err(Error::LengthMismatch { expected: dim, found: noise.len() });
    }
    if n_max == 0 || n_max >= dim {
        return Err(Error::NMaxTooLarge { n_max, dimension: dim });
    }
    validate_spectrum(singular_values)?;
    let noise = &noise[..dim];

    let w_plain: Vec<f64> = noise.iter().map(|e| e * e).collect();
    let (ratios_plain, degenerate_plain) = ratios_for(singular_values, &w_plain, n_max);

    let (ratios_kappa, degenerate_kappa, w_tail) = match kappa {
        Some(k) => {
            let w = singular_values
                .iter()
                .zip(&w_plain)
                .map(|(s, w)| Ok(k.eval(s * s)?.powi(2) * w))
                .collect::<Result<Vec<f64>>>()?;
            let (r, d) = ratios_for(singular_values, &w, n_max);
            (Some(r), d, w)
        }
        None => (None, None, w_plain.clone()),
    };

    let terms: Vec<f64> = singular_values[n_max..]
        .iter()
        .zip(&w_tail[n_max..])
        .map(|(s, w)| s * s * w)
        .collect();
    let retained: f64 = terms.iter().sum();
    let tail_estimate = if retained > 0.0 {
        tail_extrapolation(&terms) / retained
    } else {
        f64::INFINITY
    };

    let degenerate_tail_at = match (degenerate_plain, degenerate_kappa) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    Ok(NoiseConditionReport {
        sup_ratio_plain: sup(&ratios_plain),
        sup_ratio_kappa: ratios_kappa.as_deref().map(sup),
        ratios_plain,
        ratios_kappa,
        n_max,
        degenerate_tail_at,
        tail_estimate,
        tail_warning: !(tail_estimate <= 1e-3),
    })
}

/// Shape of `κ` for the sufficient-condition tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KappaKind {
    None,
    /// `κ(t) ≍ t^γ`.
    Power { gamma: f64 },
    /// `κ(t) ≍ (ln 1/t)^{-γ}`.
    Log { gamma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// A tabulated sufficient condition is met.
    Holds,
    /// No tabulated condition applies; the condition may still hold.
    Unknown,
}

/// Looks up the sufficient conditions for polynomially decaying noise
/// `e_k² ≍ δ² k^{-ν}`.
pub fn sufficient_condition_verdict(spectrum: &Spectrum, nu: f64, kappa: KappaKind) -> Result<Verdict> {
    spectrum.validate()?;
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::OutOfRange(format!("noise decay ν must be positive, got {nu}")));
    }
    if let KappaKind::Power { gamma } | KappaKind::Log { gamma } = kappa {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::OutOfRange(format!("κ exponent γ must be nonnegative, got {gamma}")));
        }
    }
    let holds = nu > 1.0
        && match (spectrum, kappa) {
            (Spectrum::Polynomial { beta }, KappaKind::None) => *beta > nu - 1.0,
            (Spectrum::Polynomial { beta }, KappaKind::Power { gamma }) => {
                gamma > 0.0 && *beta > 2.0 * gamma * beta + nu - 1.0
            }
            (Spectrum::Polynomial { .. }, KappaKind::Log { .. }) => false,
            (_, KappaKind::None) => true,
            (_, KappaKind::Power { gamma }) => gamma > 0.0 && gamma < 1.0,
            (_, KappaKind::Log { gamma }) => gamma > 0.0,
        };
    Ok(if holds { Verdict::Holds } else { Verdict::Unknown })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n_max: usize,
    pub median_sup: f64,
    pub max_sup: f64,
    pub min_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthTable {
    pub spectrum: Spectrum,
    pub noise: NoiseSpec,
    pub n_seeds: usize,
    /// Dimension of every sample; tails are truncated here.
    pub dimension: usize,
    pub rows: Vec<GrowthRow>,
}

impl GrowthTable {
    /// `median_sup[i+1] / median_sup[i]` for consecutive rows.
    pub fn median_growth(&self) -> Vec<f64> {
        self.rows.windows(2).map(|w| w[1].median_sup / w[0].median_sup).collect()
    }

    /// Median at the last row over the median at the first.
    pub fn overall_growth(&self) -> f64 {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) => b.median_sup / a.median_sup,
            _ => f64::NAN,
        }
    }
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Monte Carlo study of the plain sup ratio as the truncation level grows.
///
/// Each seed draws one noise vector of dimension `tail_factor·max(n_max)`;
/// the sup over `n ≤ n_max` is then read off for every requested `n_max`.
pub fn stochastic_sup_ratio_study(
    spectrum: &Spectrum,
    spec: &NoiseSpec,
    n_max_list: &[usize],
    n_seeds: usize,
    tail_factor: usize,
) -> Result<GrowthTable> {
    if n_seeds == 0 {
        return Err(Error::OutOfRange("at least one seed is required".into()));
    }
    if n_max_list.is_empty() || n_max_list.contains(&0) {
        return Err(Error::OutOfRange("n_max list must be nonempty and positive".into()));
    }
    if tail_factor < 2 {
        return Err(Error::OutOfRange("tail factor must be at least 2".into()));
    }
    spec.validate()?;
    let largest = *n_max_list.iter().max().expect("nonempty");
    let dimension = tail_factor * largest;
    let sv = spectrum.singular_values(dimension)?;

    let per_seed = (0..n_seeds as u64)
        .into_par_iter()
        .map(|s| {
            let noise = generate_noise_stream(spec, dimension, 1.0, s)?;
            let report = condition_ratios(&sv, &noise, None, largest)?;
            Ok(n_max_list.iter().map(|&n| sup(&report.ratios_plain[..n])).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = n_max_list
        .iter()
        .enumerate()
        .map(|(i, &n_max)| {
            let mut values: Vec<f64> = per_seed.iter().map(|v| v[i]).collect();
            let med = median(&mut values);
            GrowthRow {
                n_max,
                median_sup: med,
                min_sup: values[0],
                max_sup: values[values.len() - 1],
            }
        })
        .collect();
    Ok(GrowthTable {
        spectrum: *spectrum,
        noise: *spec,
        n_seeds,
        dimension,
        rows,
    })
}
