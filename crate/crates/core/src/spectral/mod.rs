//! Diagonalized problem representation, filter families and index functions.

mod assumptions;
mod filter;
mod index_fn;
mod problem;
mod spectrum;

pub use assumptions::{check_filter_assumptions, AssumptionItem, AssumptionReport, Bound, ConstantCaps};
pub use filter::{CustomFilter, FilterFamily};
pub use index_fn::{theta_inverse, IndexFunction, LOG_DOMAIN_MAX};
pub use problem::{eigenvalue_of, DataSource, SpectralProblem, MAX_EIGENVALUE_BITS};
pub use spectrum::Spectrum;
pub(crate) use problem::validate_spectrum;
