use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type FilterFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// A user-supplied filter `g_α(λ)` together with its declared qualification.
#[derive(Clone)]
pub struct CustomFilter {
    pub name: String,
    pub qualification: f64,
    eval: Arc<FilterFn>,
}

impl CustomFilter {
    pub fn new<F>(name: impl Into<String>, qualification: f64, eval: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            qualification,
            eval: Arc::new(eval),
        }
    }
}

impl fmt::Debug for CustomFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFilter")
            .field("name", &self.name)
            .field("qualification", &self.qualification)
            .finish_non_exhaustive()
    }
}

/// Spectral filter families `g_α(λ)` approximating `1/λ`.
///
/// The argument `λ` is always an eigenvalue of `T*T`.
#[derive(Debug, Clone)]
pub enum FilterFamily {
    /// `g_α(λ) = 1/(α + λ)`, qualification 1.
    Tikhonov,
    /// n-fold iterated Tikhonov, `g_α(λ) = (1 - (α/(α+λ))^n)/λ`, qualification n.
    IteratedTikhonov { order: u32 },
    Custom(CustomFilter),
}

fn check_args(alpha: f64, lambda: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::NonPositiveArgument { name: "alpha", value: alpha });
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::NonPositiveArgument { name: "lambda", value: lambda });
    }
    Ok(())
}

impl FilterFamily {
    pub fn iterated_tikhonov(order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::OutOfRange("iterated Tikhonov order must be >= 1".into()));
        }
        Ok(FilterFamily::IteratedTikhonov { order })
    }

    /// Qualification order `μ₀` of the family.
    pub fn qualification(&self) -> f64 {
        match self {
            FilterFamily::Tikhonov => 1.0,
            FilterFamily::IteratedTikhonov { order } => f64::from(*order),
            FilterFamily::Custom(c) => c.qualification,
        }
    }

    pub fn eval(&self, alpha: f64, lambda: f64) -> Result<f64> {
        check_args(alpha, lambda)?;
        Ok(self.eval_unchecked(alpha, lambda))
    }

    /// `1 - λ g_α(λ)`.
    pub fn residual(&self, alpha: f64, lambda: f64) -> Result<f64> {
        check_args(alpha, lambda)?;
        Ok(self.residual_unchecked(alpha, lambda))
    }

    pub(crate) fn eval_unchecked(&self, alpha: f64, lambda: f64) -> f64 {
        match self {
            FilterFamily::Tikhonov | FilterFamily::IteratedTikhonov { order: 1 } => 1.0 / (alpha + lambda),
            FilterFamily::IteratedTikhonov { order } => {
                // 1 - (α/(α+λ))^n without cancellation when λ ≪ α
                let log_ratio = (-lambda / (alpha + lambda)).ln_1p();
                -(f64::from(*order) * log_ratio).exp_m1() / lambda
            }
            FilterFamily::Custom(c) => (c.eval)(alpha, lambda),
        }
    }

    pub(crate) fn residual_unchecked(&self, alpha: f64, lambda: f64) -> f64 {
        match self {
            FilterFamily::Tikhonov => alpha / (alpha + lambda),
            FilterFamily::IteratedTikhonov { order } => (alpha / (alpha + lambda)).powi(*order as i32),
            FilterFamily::Custom(c) => 1.0 - lambda * (c.eval)(alpha, lambda),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tikhonov_value() {
        assert_eq!(FilterFamily::Tikhonov.eval(1.0, 1.0).unwrap(), 0.5);
        assert_eq!(FilterFamily::Tikhonov.residual(1.0, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn iterated_order_one_is_tikhonov() {
        let it = FilterFamily::iterated_tikhonov(1).unwrap();
        let g = it.eval(0.3, 0.7).unwrap();
        assert!((g - 1.0).abs() <= 1e-14);
        for &(a, l) in &[(1e-6, 3.0), (2.0, 1e-9), (0.5, 0.5)] {
            let t = FilterFamily::Tikhonov.eval(a, l).unwrap();
            assert!((it.eval(a, l).unwrap() - t).abs() <= 1e-14 * t);
        }
    }

    #[test]
    fn iterated_order_two_closed_form() {
        let it = FilterFamily::iterated_tikhonov(2).unwrap();
        assert!((it.eval(1.0, 1.0).unwrap() - 0.75).abs() < 1e-15);
        // hand-evaluated: α=0.5, λ=2 → (1 - 0.2²)/2 = 0.48
        assert!((it.eval(0.5, 2.0).unwrap() - 0.48).abs() < 1e-15);
    }

    #[test]
    fn iterated_small_lambda_is_stable() {
        // λ ≪ α: g ≈ n/α
        let it = FilterFamily::iterated_tikhonov(3).unwrap();
        let g = it.eval(1.0, 1e-14).unwrap();
        assert!((g - 3.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_positive_arguments() {
        assert!(matches!(
            FilterFamily::Tikhonov.eval(0.0, 1.0),
            Err(Error::NonPositiveArgument { name: "alpha", .. })
        ));
        assert!(matches!(
            FilterFamily::Tikhonov.eval(1.0, -1.0),
            Err(Error::NonPositiveArgument { name: "lambda", .. })
        ));
        assert!(FilterFamily::iterated_tikhonov(0).is_err());
    }

    #[test]
    fn custom_filter_residual() {
        let f = FilterFamily::Custom(CustomFilter::new("tikhonov-copy", 1.0, |a, l| 1.0 / (a + l)));
        assert_eq!(f.qualification(), 1.0);
        assert!((f.residual(1.0, 3.0).unwrap() - 0.25).abs() < 1e-15);
    }
}
