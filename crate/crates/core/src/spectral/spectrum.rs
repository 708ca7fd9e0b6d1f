use serde::{Deserialize, Serialize};

use super::problem::validate_spectrum;
use crate::error::{Error, Result};

/// Parametric singular-value profiles, indexed from `k = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Spectrum {
    /// Mildly ill-posed: `λ_k² = k^{-β}`.
    Polynomial { beta: f64 },
    /// Severely ill-posed: `λ_k² = a^k`.
    Exponential { a: f64 },
    /// Severely ill-posed with geometric singular values `λ_k = a^k`,
    /// i.e. `λ_k² = (a²)^k`.
    DiagonalGeometric { a: f64 },
}

impl Spectrum {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Spectrum::Polynomial { beta } if !(beta > 0.0) || !beta.is_finite() => {
                Err(Error::OutOfRange(format!("polynomial decay β must be positive, got {beta}")))
            }
            Spectrum::Exponential { a } | Spectrum::DiagonalGeometric { a } if !(a > 0.0 && a < 1.0) => {
                Err(Error::OutOfRange(format!("geometric ratio a must lie in (0, 1), got {a}")))
            }
            _ => Ok(()),
        }
    }

    /// `true` for the exponentially decaying profiles.
    pub fn is_severe(&self) -> bool {
        !matches!(self, Spectrum::Polynomial { .. })
    }

    /// Ratio `b` with `λ_k² = b^k` for the severe profiles.
    pub fn eigen_ratio(&self) -> Option<f64> {
        match *self {
            Spectrum::Polynomial { .. } => None,
            Spectrum::Exponential { a } => Some(a),
            Spectrum::DiagonalGeometric { a } => Some(a * a),
        }
    }

    /// The first `n` singular values.
    pub fn singular_values(&self, n: usize) -> Result<Vec<f64>> {
        self.validate()?;
        let sv: Vec<f64> = (1..=n)
            .map(|k| {
                let k = k as f64;
                match *self {
                    Spectrum::Polynomial { beta } => k.powf(-beta / 2.0),
                    Spectrum::Exponential { a } => a.powf(k / 2.0),
                    Spectrum::DiagonalGeometric { a } => a.powf(k),
                }
            })
            .collect();
        validate_spectrum(&sv)?;
        Ok(sv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles() {
        let p = Spectrum::Polynomial { beta: 2.0 }.singular_values(3).unwrap();
        assert_eq!(p, vec![1.0, 0.5, 1.0 / 3.0]);
        let e = Spectrum::Exponential { a: 0.25 }.singular_values(2).unwrap();
        assert_eq!(e, vec![0.5, 0.25]);
        let d = Spectrum::DiagonalGeometric { a: 0.5 }.singular_values(2).unwrap();
        assert_eq!(d, vec![0.5, 0.25]);
    }

    #[test]
    fn rejects_bad_parameters_and_underflow() {
        assert!(Spectrum::Exponential { a: 1.0 }.singular_values(2).is_err());
        assert!(Spectrum::Polynomial { beta: 0.0 }.singular_values(2).is_err());
        assert!(matches!(
            Spectrum::DiagonalGeometric { a: 0.5 }.singular_values(600),
            Err(Error::OutOfRange(_))
        ));
    }
}
