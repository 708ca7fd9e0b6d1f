//! Aggregation of grid approximants `x_agg = Σ c_j x_j` where `c` solves the
//! Gram system `G c = p` and `p` is estimated by the linear functional
//! strategy.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regularization::{check_same_len, dot};
use crate::rules::{lfs_select, ParameterGrid};

/// Which approximants enter the Gram system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActiveSet {
    /// Nodes `j` with `α_j ≥ α(y^δ)`.
    #[default]
    Selected,
    /// Every grid node.
    Full,
}

/// Grid window searched by the functional rule when estimating each `p_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchWindow {
    /// Only the active nodes (at least the first two).
    #[default]
    Active,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregationOptions {
    /// Eigenvalues of `G` below `rel_tol·λ_max(G)` are discarded.
    pub rel_tol: f64,
    pub active_set: ActiveSet,
    pub lfs_window: SearchWindow,
}

impl Default for AggregationOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            active_set: ActiveSet::Selected,
            lfs_window: SearchWindow::Active,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationResult {
    /// 0-based grid positions of the aggregated approximants.
    pub active_indices: Vec<usize>,
    #[serde(skip)]
    pub gram: DMatrix<f64>,
    pub p_estimated: Vec<f64>,
    /// Grid positions chosen by the functional rule for each `p_i`;
    /// `None` when `p` was supplied exactly.
    pub kappa_indices: Option<Vec<usize>>,
    pub coefficients: Vec<f64>,
    pub aggregate_coeffs: Vec<f64>,
    pub solve_rank: usize,
}

/// `G_ij = ⟨x_i, x_j⟩` over `indices`.
pub fn build_gram(grid: &ParameterGrid, indices: &[usize]) -> Result<DMatrix<f64>> {
    if indices.is_empty() {
        return Err(Error::EmptySubset);
    }
    let s = indices.len();
    let mut g = DMatrix::zeros(s, s);
    for a in 0..s {
        for b in a..s {
            let v = dot(grid.coeffs(indices[a]), grid.coeffs(indices[b]));
            g[(a, b)] = v;
            g[(b, a)] = v;
        }
    }
    Ok(g)
}

/// For each active `i`, runs the functional rule with `f = x_i` and
/// returns `(p_i, κ_i)` with `p_i = ⟨x_{κ_i}, x_i⟩`.
pub fn estimate_p(grid: &ParameterGrid, active: &[usize], window: SearchWindow) -> Result<(Vec<f64>, Vec<usize>)> {
    if active.is_empty() {
        return Err(Error::EmptySubset);
    }
    let searched = match window {
        SearchWindow::Full => grid.clone(),
        SearchWindow::Active => {
            let last = *active.iter().max().expect("nonempty");
            grid.prefix((last + 1).max(2))?
        }
    };
    let pairs = active
        .par_iter()
        .map(|&i| {
            let f = grid.coeffs(i);
            let sel = lfs_select(&searched, f)?;
            Ok((dot(grid.coeffs(sel.index), f), sel.index))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pairs.into_iter().unzip())
}

/// Spectrally truncated solve of `G c = p`: eigenpairs with eigenvalue below
/// `rel_tol·λ_max` are dropped and the minimal-norm solution on the rest is
/// returned with the retained rank.
pub fn solve_coefficients(gram: &DMatrix<f64>, p: &[f64], rel_tol: f64) -> Result<(Vec<f64>, usize)> {
    let s = gram.nrows();
    if s == 0 {
        return Err(Error::EmptySubset);
    }
    check_same_len(s, gram.ncols())?;
    check_same_len(s, p.len())?;
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::OutOfRange(format!("rel_tol must lie in (0, 1), got {rel_tol}")));
    }
    if s == 1 {
        let g = gram[(0, 0)];
        if !(g > 0.0) {
            return Err(Error::ZeroMatrix);
        }
        return Ok((vec![p[0] / g], 1));
    }
    let eig = SymmetricEigen::new(gram.clone());
    let lambda_max = eig.eigenvalues.max();
    if !(lambda_max > 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let threshold = rel_tol * lambda_max;
    let p = DVector::from_column_slice(p);
    let mut c = DVector::zeros(s);
    let mut rank = 0;
    for (k, &ev) in eig.eigenvalues.iter().enumerate() {
        if ev < threshold {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        c += v * (v.dot(&p) / ev);
        rank += 1;
    }
    Ok((c.as_slice().to_vec(), rank))
}

fn combine(grid: &ParameterGrid, indices: &[usize], coefficients: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; grid.dim()];
    for (&j, &c) in indices.iter().zip(coefficients) {
        for (o, x) in out.iter_mut().zip(grid.coeffs(j)) {
            *o += c * x;
        }
    }
    out
}

fn active_indices(grid: &ParameterGrid, alpha_selected: f64, set: ActiveSet) -> Result<Vec<usize>> {
    let idx = grid.index_of(alpha_selected).ok_or(Error::AlphaNotInGrid(alpha_selected))?;
    Ok(match set {
        ActiveSet::Selected => (0..=idx).collect(),
        ActiveSet::Full => (0..grid.len()).collect(),
    })
}

/// Full pipeline: active set, Gram matrix, estimated `p`, coefficients and
/// the aggregated approximant.
pub fn aggregate(grid: &ParameterGrid, alpha_selected: f64, opts: &AggregationOptions) -> Result<AggregationResult> {
    let active = active_indices(grid, alpha_selected, opts.active_set)?;
    let gram = build_gram(grid, &active)?;
    let (p, kappa) = estimate_p(grid, &active, opts.lfs_window)?;
    let (coefficients, solve_rank) = solve_coefficients(&gram, &p, opts.rel_tol)?;
    let aggregate_coeffs = combine(grid, &active, &coefficients);
    Ok(AggregationResult {
        active_indices: active,
        gram,
        p_estimated: p,
        kappa_indices: Some(kappa),
        coefficients,
        aggregate_coeffs,
        solve_rank,
    })
}

/// Aggregation with the exact `p_i = ⟨x, x_i⟩`; a reference for testing.
/// With `alpha_selected = None` every grid node is used.
pub fn oracle_aggregate(
    grid: &ParameterGrid,
    x_true: &[f64],
    alpha_selected: Option<f64>,
    rel_tol: f64,
) -> Result<AggregationResult> {
    check_same_len(grid.dim(), x_true.len())?;
    let active = match alpha_selected {
        Some(a) => active_indices(grid, a, ActiveSet::Selected)?,
        None => (0..grid.len()).collect(),
    };
    let gram = build_gram(grid, &active)?;
    let p: Vec<f64> = active.iter().map(|&i| dot(x_true, grid.coeffs(i))).collect();
    let (coefficients, solve_rank) = solve_coefficients(&gram, &p, rel_tol)?;
    let aggregate_coeffs = combine(grid, &active, &coefficients);
    Ok(AggregationResult {
        active_indices: active,
        gram,
        p_estimated: p,
        kappa_indices: None,
        coefficients,
        aggregate_coeffs,
        solve_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regularization::distance;
    use crate::rules::correction_factors;

    fn grid_of(coeffs: Vec<Vec<f64>>) -> ParameterGrid {
        ParameterGrid::from_coefficients(1.0, 0.5, coeffs).unwrap()
    }

    #[test]
    fn gram_small_cases() {
        let g = grid_of(vec![vec![2.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(build_gram(&g, &[0]).unwrap(), DMatrix::from_element(1, 1, 4.0));
        assert_eq!(build_gram(&g, &[1, 2]).unwrap(), DMatrix::identity(2, 2));
        assert!(matches!(build_gram(&g, &[]), Err(Error::EmptySubset)));
    }

    #[test]
    fn solve_identity_and_rank_one() {
        let (c, r) = solve_coefficients(&DMatrix::identity(2, 2), &[1.0, 2.0], 1e-10).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-15 && (c[1] - 2.0).abs() < 1e-15);
        assert_eq!(r, 2);

        let ones = DMatrix::from_element(2, 2, 1.0);
        let (c, r) = solve_coefficients(&ones, &[1.0, 1.0], 1e-12).unwrap();
        assert_eq!(r, 1);
        assert!((c[0] - 0.5).abs() < 1e-14 && (c[1] - 0.5).abs() < 1e-14);

        assert!(matches!(
            solve_coefficients(&DMatrix::zeros(2, 2), &[1.0, 1.0], 1e-10),
            Err(Error::ZeroMatrix)
        ));
        assert!(solve_coefficients(&ones, &[1.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn rank_grows_as_tolerance_shrinks() {
        let g = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-3, 1e-6, 1e-9]));
        let p = [1.0; 4];
        let ranks: Vec<usize> = [1e-1, 1e-4, 1e-7, 1e-10]
            .iter()
            .map(|&t| solve_coefficients(&g, &p, t).unwrap().1)
            .collect();
        assert_eq!(ranks, vec![1, 2, 3, 4]);
    }

    #[test]
    fn single_active_node_is_correction_factor() {
        let g = grid_of(vec![vec![1.0, 2.0], vec![0.5, 3.0], vec![0.1, 0.1]]);
        let r = aggregate(&g, 1.0, &AggregationOptions::default()).unwrap();
        assert_eq!(r.active_indices, vec![0]);
        let kappa = r.kappa_indices.as_ref().unwrap()[0];
        assert_eq!(kappa, 1);
        let c = correction_factors(&g, g.coeffs(kappa)).unwrap()[0];
        assert_eq!(r.coefficients, vec![c]);
        assert_eq!(r.aggregate_coeffs, vec![c * 1.0, c * 2.0]);
    }

    #[test]
    fn oracle_recovers_member() {
        let g = grid_of(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let r = oracle_aggregate(&g, &[1.0, 0.0], Some(1.0), 1e-10).unwrap();
        assert_eq!(r.coefficients, vec![1.0]);
        assert_eq!(distance(&r.aggregate_coeffs, &[1.0, 0.0]), 0.0);
    }

    #[test]
    fn alpha_must_be_a_node() {
        let g = grid_of(vec![vec![1.0], vec![2.0]]);
        assert!(matches!(
            aggregate(&g, 0.3, &AggregationOptions::default()),
            Err(Error::AlphaNotInGrid(_))
        ));
    }

    #[test]
    fn permuting_active_set_permutes_coefficients() {
        let g = grid_of(vec![vec![1.0, 0.2, 0.0], vec![0.3, 1.0, 0.1], vec![0.0, 0.4, 1.0]]);
        let x = [0.7, -0.2, 0.5];
        let gram = build_gram(&g, &[0, 1, 2]).unwrap();
        let p: Vec<f64> = (0..3).map(|i| dot(&x, g.coeffs(i))).collect();
        let (c, _) = solve_coefficients(&gram, &p, 1e-12).unwrap();
        let order = [2, 0, 1];
        let gram_perm = build_gram(&g, &order).unwrap();
        let p_perm: Vec<f64> = order.iter().map(|&i| p[i]).collect();
        let (c_perm, _) = solve_coefficients(&gram_perm, &p_perm, 1e-12).unwrap();
        for (k, &i) in order.iter().enumerate() {
            assert!((c_perm[k] - c[i]).abs() < 1e-12);
        }
        let a = combine(&g, &[0, 1, 2], &c);
        let b = combine(&g, &order, &c_perm);
        assert!(distance(&a, &b) < 1e-12);
    }
}
