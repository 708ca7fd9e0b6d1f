//! Heuristic regularization-parameter choice for linear ill-posed problems
//! in spectral (singular-basis) form.
//!
//! The crate provides spectral filters and index functions, the
//! quasi-optimality family of parameter-choice rules including the
//! linear-functional and corrected variants, aggregation of approximants
//! through an estimated Gram system, noise models together with the
//! empirical noise-condition statistics, and an experiment harness.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aggregation;
pub mod error;
pub mod harness;
pub mod noise;
pub mod regularization;
pub mod rng;
pub mod rules;
pub mod spectral;

pub use error::{Error, Result};
pub use regularization::{error_norm, functional_value, mollified_norm, regularize, RegularizedSolution};
pub use rules::{
    correction_factors, geometric_alphas, grid_argmin_psi, iterated_qo_select, lfs_select, psi, psi_kappa,
    qo_select, ParameterGrid, RuleSelection,
};
pub use spectral::{DataSource, FilterFamily, IndexFunction, SpectralProblem};
