use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper end of the domain of logarithmic index functions, `e^{-1}`.
pub const LOG_DOMAIN_MAX: f64 = 0.367_879_441_171_442_33;

/// Continuous, nonnegative, nondecreasing functions on `(0, t_max]` used to
/// express smoothness of solutions (`φ`) and functionals (`κ`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndexFunction {
    /// `t ↦ t^μ`.
    Power { exponent: f64 },
    /// `t ↦ (ln(1/t))^{-ν}`, defined on `(0, 1/e]`.
    Log { exponent: f64 },
    Constant,
    Product { left: Box<IndexFunction>, right: Box<IndexFunction> },
    /// `t ↦ outer(inner(t))`.
    Composition { outer: Box<IndexFunction>, inner: Box<IndexFunction> },
}

impl IndexFunction {
    pub fn power(exponent: f64) -> Self {
        IndexFunction::Power { exponent }
    }

    pub fn log(exponent: f64) -> Self {
        IndexFunction::Log { exponent }
    }

    pub fn product(left: IndexFunction, right: IndexFunction) -> Self {
        IndexFunction::Product {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn compose(outer: IndexFunction, inner: IndexFunction) -> Self {
        IndexFunction::Composition {
            outer: Box::new(outer),
            inner: Box::new(inner),
        }
    }

    /// Checks exponents are positive and finite, recursively.
    pub fn validate(&self) -> Result<()> {
        match self {
            IndexFunction::Power { exponent } | IndexFunction::Log { exponent } => {
                if !(*exponent > 0.0) || !exponent.is_finite() {
                    return Err(Error::OutOfRange(format!(
                        "index function exponent must be positive, got {exponent}"
                    )));
                }
                Ok(())
            }
            IndexFunction::Constant => Ok(()),
            IndexFunction::Product { left, right } => {
                left.validate()?;
                right.validate()
            }
            IndexFunction::Composition { outer, inner } => {
                outer.validate()?;
                inner.validate()
            }
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            // limit from the right; index functions are only sampled on (0, t_max]
            return match self {
                IndexFunction::Constant => Ok(1.0),
                _ if t == 0.0 => Ok(0.0),
                _ => Err(Error::NonPositiveArgument { name: "t", value: t }),
            };
        }
        match self {
            IndexFunction::Power { exponent } => Ok(t.powf(*exponent)),
            IndexFunction::Log { exponent } => {
                if t > LOG_DOMAIN_MAX {
                    return Err(Error::LogDomain(t));
                }
                Ok((-t.ln()).powf(-*exponent))
            }
            IndexFunction::Constant => Ok(1.0),
            IndexFunction::Product { left, right } => Ok(left.eval(t)? * right.eval(t)?),
            IndexFunction::Composition { outer, inner } => outer.eval(inner.eval(t)?),
        }
    }

    /// `θ(t) = φ(t)·√t`.
    pub fn theta(&self, t: f64) -> Result<f64> {
        Ok(self.eval(t)? * t.max(0.0).sqrt())
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, IndexFunction::Constant)
    }
}

/// Solves `θ(t) = δ` for `t` in `bracket` by monotone bisection, where
/// `θ(t) = φ(t)√t`. The returned `t` satisfies `|θ(t) - δ| ≤ 1e-12·δ`
/// unless the bracket collapses to adjacent floats first.
pub fn theta_inverse(phi: &IndexFunction, delta: f64, bracket: (f64, f64)) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::NonPositiveArgument { name: "delta", value: delta });
    }
    let (mut lo, mut hi) = bracket;
    if !(lo >= 0.0) || !(hi > lo) {
        return Err(Error::OutOfRange(format!("invalid bracket [{lo}, {hi}]")));
    }
    let theta_lo = phi.theta(lo)?;
    let theta_hi = phi.theta(hi)?;
    if !(theta_lo <= delta && delta <= theta_hi) {
        return Err(Error::BracketDoesNotStraddle { lo, hi, target: delta });
    }
    let tol = 1e-12 * delta;
    if (theta_hi - delta).abs() <= tol {
        return Ok(hi);
    }
    if lo > 0.0 && (theta_lo - delta).abs() <= tol {
        return Ok(lo);
    }
    for _ in 0..2000 {
        // geometric midpoint once the bracket is positive, so tiny roots
        // are reached in a few dozen steps
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        let value = phi.theta(mid)?;
        if (value - delta).abs() <= tol {
            return Ok(mid);
        }
        if value < delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let best = if (phi.theta(lo)? - delta).abs() <= (phi.theta(hi)? - delta).abs() { lo } else { hi };
    Ok(best)
}
