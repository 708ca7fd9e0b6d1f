//! Heuristic parameter-choice rules: the quasi-optimality functionals `ψ`,
//! `ψ_κ` and their grid minimizers, the discrete quasi-optimality rule, its
//! linear-functional variant and the corrected (iterated) rule.
//!
//! All discrete rules compare each grid node `j ≥ 1` with its predecessor
//! and resolve ties to the smallest index, i.e. the largest `α`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regularization::{check_alpha, check_same_len, distance, dot, norm, regularize, RegularizedSolution};
use crate::spectral::{DataSource, FilterFamily, IndexFunction, SpectralProblem};

/// Geometric parameter sequence `α_j = α₁ q^j`, `j = 0..m`.
pub fn geometric_alphas(alpha1: f64, q: f64, m: usize) -> Result<Vec<f64>> {
    if !(alpha1 > 0.0) || !alpha1.is_finite() {
        return Err(Error::NonPositiveAlpha(alpha1));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::OutOfRange(format!("grid ratio q must lie in (0, 1), got {q}")));
    }
    if m < 2 {
        return Err(Error::GridTooSmall(m));
    }
    let alphas: Vec<f64> = (0..m).map(|j| alpha1 * q.powi(j as i32)).collect();
    if alphas.iter().any(|a| !(*a > 0.0)) {
        return Err(Error::OutOfRange("grid underflows to zero".into()));
    }
    Ok(alphas)
}

/// A strictly decreasing geometric grid with one regularized solution per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterGrid {
    alpha1: f64,
    q: f64,
    alphas: Vec<f64>,
    solutions: Vec<RegularizedSolution>,
}

impl ParameterGrid {
    /// Regularizes the noisy data at every node of `α₁ q^j`, `j = 0..m`.
    pub fn build(problem: &SpectralProblem, filter: &FilterFamily, alpha1: f64, q: f64, m: usize) -> Result<Self> {
        Self::build_from(problem, filter, alpha1, q, m, DataSource::Noisy)
    }

    pub fn build_from(
        problem: &SpectralProblem,
        filter: &FilterFamily,
        alpha1: f64,
        q: f64,
        m: usize,
        source: DataSource,
    ) -> Result<Self> {
        let alphas = geometric_alphas(alpha1, q, m)?;
        let solutions = alphas
            .iter()
            .map(|&a| regularize(problem, filter, a, source))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            alpha1,
            q,
            alphas,
            solutions,
        })
    }

    /// Wraps arbitrary coefficient vectors as the solutions of a geometric grid.
    pub fn from_coefficients(alpha1: f64, q: f64, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        let alphas = geometric_alphas(alpha1, q, coeffs.len())?;
        let dim = coeffs[0].len();
        for c in &coeffs {
            check_same_len(dim, c.len())?;
        }
        let solutions = alphas
            .iter()
            .zip(coeffs)
            .map(|(&alpha, coeffs)| RegularizedSolution {
                alpha,
                coeffs,
                source: DataSource::Noisy,
            })
            .collect();
        Ok(Self {
            alpha1,
            q,
            alphas,
            solutions,
        })
    }

    /// The first `len` nodes of the grid.
    pub fn prefix(&self, len: usize) -> Result<Self> {
        if len < 2 || len > self.len() {
            return Err(Error::GridTooSmall(len));
        }
        Ok(Self {
            alpha1: self.alpha1,
            q: self.q,
            alphas: self.alphas[..len].to_vec(),
            solutions: self.solutions[..len].to_vec(),
        })
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.solutions[0].coeffs.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn solutions(&self) -> &[RegularizedSolution] {
        &self.solutions
    }

    pub fn coeffs(&self, index: usize) -> &[f64] {
        &self.solutions[index].coeffs
    }

    /// Grid position of `alpha`, matched to a relative tolerance of 1e-12.
    pub fn index_of(&self, alpha: f64) -> Option<usize> {
        self.alphas
            .iter()
            .position(|&a| (a - alpha).abs() <= 1e-12 * a.abs().max(alpha.abs()))
    }
}

/// Outcome of a discrete rule.
///
/// `index` is the 0-based grid position of the chosen node, always `≥ 1`.
/// `criterion[j - 1]` holds the minimized quantity for grid position `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSelection {
    pub index: usize,
    pub alpha: f64,
    pub criterion: Vec<f64>,
}

impl RuleSelection {
    /// Criterion value at grid position `index`, or `None` for the first node.
    pub fn criterion_at(&self, index: usize) -> Option<f64> {
        index.checked_sub(1).and_then(|j| self.criterion.get(j).copied())
    }
}

/// Position of the first minimum; NaN never wins.
fn first_argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] || values[best].is_nan() {
            best = i;
        }
    }
    best
}

fn select(grid: &ParameterGrid, criterion: Vec<f64>) -> RuleSelection {
    let index = first_argmin(&criterion) + 1;
    RuleSelection {
        index,
        alpha: grid.alphas[index],
        criterion,
    }
}

fn require_pairs(grid: &ParameterGrid) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::GridTooSmall(grid.len()));
    }
    Ok(())
}

fn psi_weighted(
    problem: &SpectralProblem,
    filter: &FilterFamily,
    kappa: Option<&IndexFunction>,
    alpha: f64,
    source: DataSource,
) -> Result<f64> {
    check_alpha(alpha)?;
    let mut acc = 0.0;
    for (&ev, &y) in problem.eigenvalues().iter().zip(problem.data(source)) {
        let g = filter.eval_unchecked(alpha, ev);
        let r = filter.residual_unchecked(alpha, ev);
        let weight = match kappa {
            Some(k) => k.eval(ev)?,
            None => 1.0,
        };
        let term = weight * r * ev.sqrt() * g * y;
        acc += term * term;
    }
    Ok(acc.sqrt())
}

/// `ψ(α, ŷ) = ‖(I − T*T g_α(T*T)) x_α‖`.
pub fn psi(problem: &SpectralProblem, filter: &FilterFamily, alpha: f64, source: DataSource) -> Result<f64> {
    psi_weighted(problem, filter, None, alpha, source)
}

/// `ψ_κ(α, ŷ) = ‖κ(T*T)(I − T*T g_α(T*T)) x_α‖`.
pub fn psi_kappa(
    problem: &SpectralProblem,
    filter: &FilterFamily,
    kappa: &IndexFunction,
    alpha: f64,
    source: DataSource,
) -> Result<f64> {
    psi_weighted(problem, filter, Some(kappa), alpha, source)
}

/// Minimizes `ψ` (or `ψ_κ` when `kappa` is given) over `grid`.
/// Ties go to the largest `α`.
pub fn grid_argmin_psi(
    problem: &SpectralProblem,
    filter: &FilterFamily,
    kappa: Option<&IndexFunction>,
    grid: &[f64],
    source: DataSource,
) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut best: Option<(f64, f64)> = None;
    for &alpha in grid {
        let value = psi_weighted(problem, filter, kappa, alpha, source)?;
        best = match best {
            None => Some((alpha, value)),
            Some((ba, bv)) if value < bv || (value == bv && alpha > ba) => Some((alpha, value)),
            keep => keep,
        };
    }
    Ok(best.expect("grid is nonempty"))
}

/// Discrete quasi-optimality: minimize `‖x_j − x_{j−1}‖` over `j ≥ 1`.
pub fn qo_select(grid: &ParameterGrid) -> Result<RuleSelection> {
    require_pairs(grid)?;
    let criterion = (1..grid.len())
        .map(|j| distance(grid.coeffs(j), grid.coeffs(j - 1)))
        .collect();
    Ok(select(grid, criterion))
}

/// Linear-functional quasi-optimality for `f`: minimize `|⟨f, x_j − x_{j−1}⟩|`.
pub fn lfs_select(grid: &ParameterGrid, f_coeffs: &[f64]) -> Result<RuleSelection> {
    require_pairs(grid)?;
    check_same_len(grid.dim(), f_coeffs.len())?;
    let criterion = (1..grid.len())
        .map(|j| {
            let (cur, prev) = (grid.coeffs(j), grid.coeffs(j - 1));
            f_coeffs
                .iter()
                .zip(cur.iter().zip(prev))
                .map(|(f, (a, b))| f * (a - b))
                .sum::<f64>()
                .abs()
        })
        .collect();
    Ok(select(grid, criterion))
}

/// `c_i = ⟨reference, x_i⟩ / ‖x_i‖²` for every grid node.
pub fn correction_factors(grid: &ParameterGrid, reference: &[f64]) -> Result<Vec<f64>> {
    check_same_len(grid.dim(), reference.len())?;
    (0..grid.len())
        .map(|i| {
            let x = grid.coeffs(i);
            let nn = dot(x, x);
            if nn == 0.0 {
                return Err(Error::ZeroNormApproximant(i));
            }
            Ok(dot(reference, x) / nn)
        })
        .collect()
}

/// Quasi-optimality on the corrected family `c_i x_i`.
pub fn iterated_qo_select(grid: &ParameterGrid, factors: &[f64]) -> Result<RuleSelection> {
    require_pairs(grid)?;
    check_same_len(grid.len(), factors.len())?;
    let criterion = (1..grid.len())
        .map(|j| {
            let (cj, cp) = (factors[j], factors[j - 1]);
            grid.coeffs(j)
                .iter()
                .zip(grid.coeffs(j - 1))
                .map(|(a, b)| {
                    let d = cj * a - cp * b;
                    d * d
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    Ok(select(grid, criterion))
}

/// Errors `‖x − c_i x_i‖` of a (possibly corrected) family against `x`.
pub fn family_errors(grid: &ParameterGrid, factors: Option<&[f64]>, x: &[f64]) -> Result<Vec<f64>> {
    check_same_len(grid.dim(), x.len())?;
    if let Some(f) = factors {
        check_same_len(grid.len(), f.len())?;
    }
    Ok((0..grid.len())
        .map(|i| {
            let c = factors.map_or(1.0, |f| f[i]);
            grid.coeffs(i)
                .iter()
                .zip(x)
                .map(|(a, b)| (c * a - b) * (c * a - b))
                .sum::<f64>()
                .sqrt()
        })
        .collect())
}

/// Norm of each approximant on the grid.
pub fn solution_norms(grid: &ParameterGrid) -> Vec<f64> {
    (0..grid.len()).map(|i| norm(grid.coeffs(i))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_of(coeffs: Vec<Vec<f64>>) -> ParameterGrid {
        ParameterGrid::from_coefficients(1.0, 0.5, coeffs).unwrap()
    }

    #[test]
    fn psi_single_mode_closed_form() {
        let p = SpectralProblem::from_data(vec![1.0], vec![1.0]).unwrap();
        let v = psi(&p, &FilterFamily::Tikhonov, 1.0, DataSource::Noisy).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        let zero = SpectralProblem::from_data(vec![1.0], vec![0.0]).unwrap();
        assert_eq!(psi(&zero, &FilterFamily::Tikhonov, 1.0, DataSource::Noisy).unwrap(), 0.0);
    }

    #[test]
    fn psi_two_modes_term_by_term() {
        // λ² = (1, 0.25), ŷ = (1, 2), α = 0.5
        let p = SpectralProblem::from_data(vec![1.0, 0.5], vec![1.0, 2.0]).unwrap();
        let v = psi(&p, &FilterFamily::Tikhonov, 0.5, DataSource::Noisy).unwrap();
        // mode 1: g = 1/1.5, r = 0.5/1.5; mode 2: g = 1/0.75, r = 0.5/0.75
        let t1 = (0.5f64 / 1.5).powi(2) * 1.0 * (1.0f64 / 1.5).powi(2) * 1.0;
        let t2 = (0.5f64 / 0.75).powi(2) * 0.25 * (1.0f64 / 0.75).powi(2) * 4.0;
        assert!((v - (t1 + t2).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn psi_kappa_cases() {
        let p = SpectralProblem::from_data(vec![0.5], vec![1.0]).unwrap();
        let f = FilterFamily::Tikhonov;
        let plain = psi(&p, &f, 1.0, DataSource::Noisy).unwrap();
        let constant = psi_kappa(&p, &f, &IndexFunction::Constant, 1.0, DataSource::Noisy).unwrap();
        assert_eq!(plain, constant);
        // κ² = 0.25, r = 0.8, λ² = 0.25, g = 0.8
        let v = psi_kappa(&p, &f, &IndexFunction::power(0.5), 1.0, DataSource::Noisy).unwrap();
        let expected = (0.25f64 * 0.8 * 0.8 * 0.25 * 0.8 * 0.8 * 1.0).sqrt();
        assert!((v - expected).abs() < 1e-15);
    }

    #[test]
    fn argmin_psi_tie_prefers_largest_alpha() {
        let p = SpectralProblem::from_data(vec![1.0, 0.5], vec![0.0, 0.0]).unwrap();
        let grid = [0.01, 1.0, 0.1];
        let (a, v) = grid_argmin_psi(&p, &FilterFamily::Tikhonov, None, &grid, DataSource::Noisy).unwrap();
        assert_eq!((a, v), (1.0, 0.0));
        assert!(matches!(
            grid_argmin_psi(&p, &FilterFamily::Tikhonov, None, &[], DataSource::Noisy),
            Err(Error::EmptyGrid)
        ));
    }

    #[test]
    fn argmin_psi_single_mode_peak() {
        // one mode with λ² = 1: ψ(α) = α/(1+α)² peaks at α = 1 and is
        // smallest at the grid end farthest from 1 in ratio
        let p = SpectralProblem::from_data(vec![1.0], vec![1.0]).unwrap();
        let grid = [4.0, 2.0, 1.0, 0.5, 0.125];
        let values: Vec<f64> = grid
            .iter()
            .map(|&a| psi(&p, &FilterFamily::Tikhonov, a, DataSource::Noisy).unwrap())
            .collect();
        let expected = grid[first_argmin(&values)];
        let (a, _) = grid_argmin_psi(&p, &FilterFamily::Tikhonov, None, &grid, DataSource::Noisy).unwrap();
        assert_eq!(a, expected);
        assert_eq!(a, 0.125);
    }

    #[test]
    fn qo_two_nodes_and_ties() {
        let g = grid_of(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let s = qo_select(&g).unwrap();
        assert_eq!(s.index, 1);
        assert_eq!(s.alpha, 0.5);
        assert_eq!(s.criterion_at(0), None);

        let same = grid_of(vec![vec![1.0, 2.0]; 4]);
        let s = qo_select(&same).unwrap();
        assert_eq!(s.index, 1);
        assert_eq!(s.criterion, vec![0.0; 3]);
    }

    #[test]
    fn qo_picks_minimal_difference() {
        let g = grid_of(vec![vec![0.0], vec![1.0], vec![1.1], vec![3.0]]);
        let s = qo_select(&g).unwrap();
        assert_eq!(s.index, 2);
        assert!((s.criterion[1] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn lfs_orthogonal_and_one_mode() {
        let g = grid_of(vec![vec![1.0, 0.0], vec![1.0, 2.0], vec![1.0, 5.0]]);
        let s = lfs_select(&g, &[1.0, 0.0]).unwrap();
        assert_eq!(s.index, 1);
        assert_eq!(s.criterion, vec![0.0, 0.0]);

        let one = grid_of(vec![vec![0.0], vec![1.0], vec![1.5], vec![1.6], vec![3.0]]);
        assert_eq!(lfs_select(&one, &[1.0]).unwrap().index, qo_select(&one).unwrap().index);
        assert!(matches!(lfs_select(&one, &[1.0, 2.0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn correction_factor_cases() {
        let g = grid_of(vec![vec![1.0, 0.0], vec![0.0, 2.0]]);
        let c = correction_factors(&g, &[1.0, 0.0]).unwrap();
        assert_eq!(c, vec![1.0, 0.0]);
        let z = grid_of(vec![vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert!(matches!(correction_factors(&z, &[1.0, 0.0]), Err(Error::ZeroNormApproximant(1))));
    }

    #[test]
    fn correction_factor_minimizes_scaled_error() {
        let x = [0.3, -1.2, 0.7];
        let xi = [0.5, -0.4, 1.0];
        let g = grid_of(vec![xi.to_vec(), vec![1.0, 1.0, 1.0]]);
        let c = correction_factors(&g, &x).unwrap()[0];
        // golden-section search on c ↦ ‖x − c·x_i‖
        let err = |c: f64| x.iter().zip(&xi).map(|(a, b)| (a - c * b).powi(2)).sum::<f64>();
        let (mut lo, mut hi) = (-10.0f64, 10.0f64);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let m1 = hi - phi * (hi - lo);
            let m2 = lo + phi * (hi - lo);
            if err(m1) < err(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        assert!((c - 0.5 * (lo + hi)).abs() < 1e-8);
    }

    #[test]
    fn iterated_qo_reductions() {
        let g = grid_of(vec![vec![0.0, 1.0], vec![1.0, 1.0], vec![1.1, 0.9], vec![4.0, 0.0]]);
        let ones = iterated_qo_select(&g, &[1.0; 4]).unwrap();
        assert_eq!(ones, qo_select(&g).unwrap());
        let zeros = iterated_qo_select(&g, &[0.0; 4]).unwrap();
        assert_eq!(zeros.index, 1);
        assert!(zeros.criterion.iter().all(|&v| v == 0.0));
        assert!(iterated_qo_select(&g, &[1.0; 3]).is_err());
    }

    #[test]
    fn grid_construction() {
        let alphas = geometric_alphas(0.1, 0.5, 20).unwrap();
        assert_eq!(alphas.len(), 20);
        assert!((alphas[19] - 0.1 * 0.5f64.powi(19)).abs() < 1e-20);
        assert!(alphas.windows(2).all(|w| w[1] < w[0]));
        assert!(matches!(geometric_alphas(0.1, 0.5, 1), Err(Error::GridTooSmall(1))));
        assert!(geometric_alphas(0.1, 1.0, 5).is_err());

        let p = SpectralProblem::from_data(vec![1.0, 0.5], vec![1.0, 1.0]).unwrap();
        let g = ParameterGrid::build(&p, &FilterFamily::Tikhonov, 0.1, 0.5, 5).unwrap();
        for (a, s) in g.alphas().iter().zip(g.solutions()) {
            assert_eq!(*a, s.alpha);
        }
        assert_eq!(g.index_of(0.1 * 0.125), Some(3));
        assert_eq!(g.index_of(0.3), None);
        assert_eq!(g.prefix(3).unwrap().len(), 3);
        assert!(g.prefix(1).is_err());
    }
}
