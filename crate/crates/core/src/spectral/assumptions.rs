//! Grid-sampled verification of the structural filter and index-function
//! assumptions used by the quasi-optimality convergence theory.
//!
//! Each item reports the worst constant observed over the supplied `α` and
//! `λ` grids. Upper-bound constants pass when the measured value does not
//! exceed the cap; lower-bound constants pass when it is at least the cap.

use serde::{Deserialize, Serialize};

use super::filter::FilterFamily;
use super::index_fn::IndexFunction;
use crate::error::{Error, Result};

/// User-chosen caps for the constants of each assumption item.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantCaps {
    /// upper cap for `sup √λ·g_α(λ)·√α`
    pub c1: f64,
    /// lower cap for `1 - λg_α(λ)` on `λ < α`
    pub c2: f64,
    /// lower cap for `α·g_α(λ)` on `λ < α`
    pub c3: f64,
    /// upper cap for `α·g_α(λ)` on `λ < α`
    pub c4: f64,
    /// upper cap for the qualification constant of `φ`
    pub c5: f64,
    /// upper cap for the qualification constant of `φκ`
    pub c6: f64,
    /// upper cap for `κ` being covered by qualification 1/2
    pub c7: f64,
}

impl Default for ConstantCaps {
    fn default() -> Self {
        Self {
            c1: 10.0,
            c2: 1e-3,
            c3: 1e-3,
            c4: 10.0,
            c5: 10.0,
            c6: 10.0,
            c7: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Upper,
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionItem {
    pub name: String,
    pub bound: Bound,
    pub measured: f64,
    pub cap: f64,
    pub passed: bool,
}

impl AssumptionItem {
    fn new(name: &str, bound: Bound, measured: f64, cap: f64) -> Self {
        let passed = match bound {
            Bound::Upper => measured.is_finite() && measured <= cap,
            Bound::Lower => measured.is_finite() && measured >= cap,
        };
        Self {
            name: name.to_string(),
            bound,
            measured,
            cap,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// `min λg_α(λ)` and `max λg_α(λ)` over the grids; must lie in `[0, 1]`.
    pub range_min: f64,
    pub range_max: f64,
    pub range_ok: bool,
    pub items: Vec<AssumptionItem>,
    /// Grid infimum of `(1 - λg_α(λ))·g_α(λ)/α^{μ₀}`; diagnostic only.
    pub k_infimum: f64,
    pub declared_qualification: f64,
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.range_ok && self.items.iter().all(|i| i.passed)
    }

    pub fn item(&self, name: &str) -> Option<&AssumptionItem> {
        self.items.iter().find(|i| i.name == name)
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for &v in grid {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveArgument { name: "grid", value: v });
        }
    }
    Ok(())
}

pub fn check_filter_assumptions(
    filter: &FilterFamily,
    alpha_grid: &[f64],
    lambda_grid: &[f64],
    phi: &IndexFunction,
    kappa: &IndexFunction,
    caps: &ConstantCaps,
) -> Result<AssumptionReport> {
    check_grid(alpha_grid)?;
    check_grid(lambda_grid)?;

    let mu0 = filter.qualification();
    let mut range_min = f64::INFINITY;
    let mut range_max = f64::NEG_INFINITY;
    let mut c1 = 0.0f64;
    let mut c2 = f64::INFINITY;
    let mut c3 = f64::INFINITY;
    let mut c4 = 0.0f64;
    let mut c5 = 0.0f64;
    let mut c6 = 0.0f64;
    let mut c7 = 0.0f64;

    for &alpha in alpha_grid {
        let phi_a = phi.eval(alpha)?;
        let kappa_a = kappa.eval(alpha)?;
        let mut sup_phi = 0.0f64;
        let mut sup_phi_kappa = 0.0f64;
        let mut sup_kappa_tail = 0.0f64;
        for &lambda in lambda_grid {
            let g = filter.eval_unchecked(alpha, lambda);
            let r = filter.residual_unchecked(alpha, lambda);
            let lg = lambda * g;
            range_min = range_min.min(lg);
            range_max = range_max.max(lg);
            c1 = c1.max(lambda.sqrt() * g * alpha.sqrt());
            if lambda < alpha {
                c2 = c2.min(r);
                c3 = c3.min(alpha * g);
                c4 = c4.max(alpha * g);
            }
            let phi_l = phi.eval(lambda)?;
            let kappa_l = kappa.eval(lambda)?;
            sup_phi = sup_phi.max((phi_l * r).abs());
            sup_phi_kappa = sup_phi_kappa.max((kappa_l * phi_l * r).abs());
            if lambda > alpha {
                sup_kappa_tail = sup_kappa_tail.max(kappa_l / lambda.sqrt());
            }
        }
        c5 = c5.max(sup_phi / phi_a);
        c6 = c6.max(sup_phi_kappa / (kappa_a * phi_a));
        c7 = c7.max(sup_kappa_tail / (kappa_a / alpha.sqrt()));
    }

    // no λ < α sample means the item is vacuous on this grid
    if c2.is_infinite() {
        c2 = 1.0;
        c3 = 1.0;
    }

    let mut k_infimum = f64::INFINITY;
    for &lambda in lambda_grid {
        for &alpha in alpha_grid {
            let g = filter.eval_unchecked(alpha, lambda);
            let r = filter.residual_unchecked(alpha, lambda);
            k_infimum = k_infimum.min(r * g / alpha.powf(mu0));
        }
    }

    let items = vec![
        AssumptionItem::new("sqrt_lambda_g", Bound::Upper, c1, caps.c1),
        AssumptionItem::new("residual_below_alpha", Bound::Lower, c2, caps.c2),
        AssumptionItem::new("g_lower_below_alpha", Bound::Lower, c3, caps.c3),
        AssumptionItem::new("g_upper_below_alpha", Bound::Upper, c4, caps.c4),
        AssumptionItem::new("qualification_phi", Bound::Upper, c5, caps.c5),
        AssumptionItem::new("qualification_phi_kappa", Bound::Upper, c6, caps.c6),
        AssumptionItem::new("kappa_half_qualification", Bound::Upper, c7, caps.c7),
    ];

    Ok(AssumptionReport {
        range_min,
        range_max,
        range_ok: range_min >= 0.0 && range_max <= 1.0,
        items,
        k_infimum,
        declared_qualification: mu0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_grid(hi: f64, lo: f64, points: usize) -> Vec<f64> {
        let ratio = (lo / hi).powf(1.0 / (points - 1) as f64);
        (0..points).map(|i| hi * ratio.powi(i as i32)).collect()
    }

    #[test]
    fn tikhonov_holder_pair_passes() {
        let alphas = log_grid(1.0, 1e-8, 60);
        let lambdas = log_grid(1.0, 1e-10, 120);
        let report = check_filter_assumptions(
            &FilterFamily::Tikhonov,
            &alphas,
            &lambdas,
            &IndexFunction::power(0.5),
            &IndexFunction::power(0.25),
            &ConstantCaps::default(),
        )
        .unwrap();
        assert!(report.all_passed(), "{report:#?}");
        // exact Tikhonov supremum of √λ/(α+λ)·√α is 1/2
        assert!(report.item("sqrt_lambda_g").unwrap().measured <= 0.5 + 1e-12);
    }

    #[test]
    fn tikhonov_over_qualified_phi_fails() {
        let lambdas = log_grid(1.0, 1e-10, 120);
        let caps = ConstantCaps::default();
        let measure = |alpha_min: f64| {
            let alphas = log_grid(1.0, alpha_min, 40);
            check_filter_assumptions(
                &FilterFamily::Tikhonov,
                &alphas,
                &lambdas,
                &IndexFunction::power(1.5),
                &IndexFunction::Constant,
                &caps,
            )
            .unwrap()
        };
        let coarse = measure(1e-4);
        let fine = measure(1e-8);
        let c_coarse = coarse.item("qualification_phi").unwrap().measured;
        let c_fine = fine.item("qualification_phi").unwrap().measured;
        // brute force: sup_λ λ^{1.5}α/(α+λ) / α^{1.5} ≈ √(λ_max/α) for small α
        assert!(c_fine > 10.0 * c_coarse);
        assert!(!fine.item("qualification_phi").unwrap().passed);
    }

    #[test]
    fn iterated_tikhonov_constants() {
        let alphas = log_grid(1.0, 1e-6, 30);
        let lambdas = log_grid(1.0, 1e-9, 90);
        let n = 3;
        let report = check_filter_assumptions(
            &FilterFamily::iterated_tikhonov(n).unwrap(),
            &alphas,
            &lambdas,
            &IndexFunction::power(2.0),
            &IndexFunction::power(0.5),
            &ConstantCaps::default(),
        )
        .unwrap();
        assert!(report.range_ok);
        assert!(report.item("sqrt_lambda_g").unwrap().measured <= f64::from(n));
        assert!(report.item("residual_below_alpha").unwrap().measured >= 0.5f64.powi(n as i32));
        assert!(report.item("g_lower_below_alpha").unwrap().measured >= 1.0 - 0.5f64.powi(n as i32) - 1e-12);
        assert!(report.item("g_upper_below_alpha").unwrap().measured <= f64::from(n));
        assert!(report.k_infimum > 0.0);
    }

    #[test]
    fn empty_grids() {
        let f = FilterFamily::Tikhonov;
        let phi = IndexFunction::power(1.0);
        assert!(matches!(
            check_filter_assumptions(&f, &[], &[1.0], &phi, &phi, &ConstantCaps::default()),
            Err(Error::EmptyGrid)
        ));
        assert!(matches!(
            check_filter_assumptions(&f, &[1.0], &[], &phi, &phi, &ConstantCaps::default()),
            Err(Error::EmptyGrid)
        ));
    }
}
