//! Regularized solutions `x_α = g_α(T*T)T*ŷ` and the norms and functionals
//! evaluated on them, all in the right singular basis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{DataSource, FilterFamily, IndexFunction, SpectralProblem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizedSolution {
    pub alpha: f64,
    pub coeffs: Vec<f64>,
    pub source: DataSource,
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::NonPositiveAlpha(alpha));
    }
    Ok(())
}

pub(crate) fn check_same_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { expected: a, found: b });
    }
    Ok(())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `coeffs_k = g_α(λ_k²)·λ_k·ŷ_k`.
pub fn regularize(
    problem: &SpectralProblem,
    filter: &FilterFamily,
    alpha: f64,
    source: DataSource,
) -> Result<RegularizedSolution> {
    check_alpha(alpha)?;
    let coeffs = problem
        .singular_values()
        .iter()
        .zip(problem.eigenvalues())
        .zip(problem.data(source))
        .map(|((&s, &ev), &y)| filter.eval_unchecked(alpha, ev) * s * y)
        .collect();
    Ok(RegularizedSolution { alpha, coeffs, source })
}

/// `‖x_true − coeffs‖₂`.
pub fn error_norm(problem: &SpectralProblem, sol: &RegularizedSolution) -> Result<f64> {
    check_same_len(problem.dim(), sol.coeffs.len())?;
    Ok(distance(problem.x_true(), &sol.coeffs))
}

/// `⟨f, coeffs⟩`.
pub fn functional_value(f_coeffs: &[f64], sol: &RegularizedSolution) -> Result<f64> {
    check_same_len(f_coeffs.len(), sol.coeffs.len())?;
    Ok(dot(f_coeffs, &sol.coeffs))
}

/// `‖κ(T*T)(a − b)‖`.
pub fn mollified_norm(
    kappa: &IndexFunction,
    problem: &SpectralProblem,
    sol_a: &RegularizedSolution,
    sol_b: &RegularizedSolution,
) -> Result<f64> {
    check_same_len(problem.dim(), sol_a.coeffs.len())?;
    check_same_len(problem.dim(), sol_b.coeffs.len())?;
    let mut acc = 0.0;
    for ((&ev, a), b) in problem.eigenvalues().iter().zip(&sol_a.coeffs).zip(&sol_b.coeffs) {
        let w = kappa.eval(ev)?;
        let d = w * (a - b);
        acc += d * d;
    }
    Ok(acc.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_tikhonov() {
        let p = SpectralProblem::from_data(vec![1.0], vec![2.0]).unwrap();
        let s = regularize(&p, &FilterFamily::Tikhonov, 1.0, DataSource::Noisy).unwrap();
        assert_eq!(s.coeffs, vec![1.0]);
    }

    #[test]
    fn vanishing_alpha_recovers_solution() {
        let x = vec![1.5, -0.3, 2.0];
        let p = SpectralProblem::new(vec![1.0, 0.5, 0.1], x.clone(), &[0.0; 3], 0.0).unwrap();
        let s = regularize(&p, &FilterFamily::Tikhonov, 1e-14, DataSource::Clean).unwrap();
        for (c, x) in s.coeffs.iter().zip(&x) {
            assert!((c - x).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_non_positive_alpha() {
        let p = SpectralProblem::from_data(vec![1.0], vec![2.0]).unwrap();
        assert!(matches!(
            regularize(&p, &FilterFamily::Tikhonov, 0.0, DataSource::Noisy),
            Err(Error::NonPositiveAlpha(_))
        ));
    }

    #[test]
    fn norms_and_functionals() {
        let p = SpectralProblem::new(vec![1.0, 0.5], vec![1.0, 0.0], &[0.0, 0.0], 0.0).unwrap();
        let sol = RegularizedSolution {
            alpha: 1.0,
            coeffs: vec![0.0, 1.0],
            source: DataSource::Clean,
        };
        assert!((error_norm(&p, &sol).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let exact = RegularizedSolution {
            coeffs: vec![1.0, 0.0],
            ..sol.clone()
        };
        assert_eq!(error_norm(&p, &exact).unwrap(), 0.0);

        let s35 = RegularizedSolution {
            coeffs: vec![3.0, 5.0],
            ..sol.clone()
        };
        assert_eq!(functional_value(&[1.0, 0.0], &s35).unwrap(), 3.0);
        assert_eq!(functional_value(&[3.0, 5.0], &s35).unwrap(), 34.0);
        assert!(functional_value(&[1.0], &s35).is_err());
    }

    #[test]
    fn mollified_norm_cases() {
        let p = SpectralProblem::from_data(vec![0.5], vec![1.0]).unwrap();
        let a = RegularizedSolution {
            alpha: 1.0,
            coeffs: vec![2.0],
            source: DataSource::Noisy,
        };
        let b = RegularizedSolution { coeffs: vec![0.0], ..a.clone() };
        // κ(0.25) = 0.5
        let v = mollified_norm(&IndexFunction::power(0.5), &p, &a, &b).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert_eq!(mollified_norm(&IndexFunction::Constant, &p, &a, &b).unwrap(), 2.0);
        // λ² = 0.25 < 1/e, so the log weight is defined here but not at λ = 1
        assert!(mollified_norm(&IndexFunction::log(1.0), &p, &a, &b).is_ok());
        let q = SpectralProblem::from_data(vec![1.0], vec![1.0]).unwrap();
        assert!(matches!(
            mollified_norm(&IndexFunction::log(1.0), &q, &a, &b),
            Err(Error::LogDomain(_))
        ));
    }
}
