use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest exponent (in bits) the eigenvalues of `T*T` may reach before
/// they leave the normal binary64 range.
pub const MAX_EIGENVALUE_BITS: f64 = 1000.0;

/// A diagonalized linear problem `y^δ = Tx + noise`, represented entirely by
/// the singular system of `T`.
///
/// `singular_values[k]` is the k-th singular value `λ_k` of `T`; the
/// corresponding eigenvalue of `T*T` is `λ_k²`, available through
/// [`SpectralProblem::eigenvalues`]. Coefficient vectors are expressed in the
/// right (`x_true`) and left (`y_clean`, `y_noisy`) singular bases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralProblem {
    singular_values: Vec<f64>,
    eigenvalues: Vec<f64>,
    x_true: Vec<f64>,
    y_clean: Vec<f64>,
    y_noisy: Vec<f64>,
    delta: f64,
}

/// Which data vector a computation consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Clean,
    Noisy,
}

/// Maps a singular value of `T` to the spectral variable of `T*T`.
///
/// Every filter, index function and weight in this crate is evaluated at the
/// eigenvalue `λ²`, never at the singular value itself.
#[inline]
pub fn eigenvalue_of(singular_value: f64) -> f64 {
    singular_value * singular_value
}

pub(crate) fn validate_spectrum(singular_values: &[f64]) -> Result<()> {
    for (index, &value) in singular_values.iter().enumerate() {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::NonPositiveSingularValue { index, value });
        }
        if eigenvalue_of(value) < f64::MIN_POSITIVE {
            return Err(Error::OutOfRange(format!(
                "eigenvalue λ² of singular value {value} at index {index} underflows binary64 \
                 (keep n·log2(1/a) below {MAX_EIGENVALUE_BITS} bits)"
            )));
        }
    }
    for (index, pair) in singular_values.windows(2).enumerate() {
        if pair[1] > pair[0] {
            return Err(Error::NonMonotoneSpectrum {
                index: index + 1,
                previous: pair[0],
                next: pair[1],
            });
        }
    }
    Ok(())
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::LengthMismatch { expected, found });
    }
    Ok(())
}

impl SpectralProblem {
    /// Builds the problem from the spectrum, the true solution and an already
    /// scaled noise vector: `y_clean = λ ⊙ x`, `y_noisy = y_clean + noise`.
    pub fn new(singular_values: Vec<f64>, x_true: Vec<f64>, noise: &[f64], delta: f64) -> Result<Self> {
        let n = singular_values.len();
        check_len(n, x_true.len())?;
        check_len(n, noise.len())?;
        validate_spectrum(&singular_values)?;
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::NonPositiveArgument { name: "delta", value: delta });
        }
        let y_clean: Vec<f64> = singular_values.iter().zip(&x_true).map(|(l, x)| l * x).collect();
        let y_noisy = y_clean.iter().zip(noise).map(|(y, e)| y + e).collect();
        let eigenvalues = singular_values.iter().copied().map(eigenvalue_of).collect();
        Ok(Self {
            singular_values,
            eigenvalues,
            x_true,
            y_clean,
            y_noisy,
            delta,
        })
    }

    /// Builds a problem where only the observed data is known. The true
    /// solution is set to zero and `y_clean` mirrors `y_noisy`.
    pub fn from_data(singular_values: Vec<f64>, y_noisy: Vec<f64>) -> Result<Self> {
        let n = singular_values.len();
        check_len(n, y_noisy.len())?;
        validate_spectrum(&singular_values)?;
        let eigenvalues = singular_values.iter().copied().map(eigenvalue_of).collect();
        Ok(Self {
            singular_values,
            eigenvalues,
            x_true: vec![0.0; n],
            y_clean: y_noisy.clone(),
            y_noisy,
            delta: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.singular_values.len()
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Eigenvalues `λ_k²` of `T*T`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn x_true(&self) -> &[f64] {
        &self.x_true
    }

    pub fn y_clean(&self) -> &[f64] {
        &self.y_clean
    }

    pub fn y_noisy(&self) -> &[f64] {
        &self.y_noisy
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn data(&self, source: DataSource) -> &[f64] {
        match source {
            DataSource::Clean => &self.y_clean,
            DataSource::Noisy => &self.y_noisy,
        }
    }

    /// `y_noisy - y_clean`.
    pub fn noise(&self) -> Vec<f64> {
        self.y_noisy.iter().zip(&self.y_clean).map(|(a, b)| a - b).collect()
    }

    /// Returns a copy with the noisy data multiplied by `factor`.
    pub fn with_scaled_data(&self, factor: f64) -> Self {
        let mut scaled = self.clone();
        scaled.y_noisy.iter_mut().for_each(|y| *y *= factor);
        scaled
    }
}
