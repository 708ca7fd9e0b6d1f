//! Direct-summation reference implementations used to cross-check the
//! `quasiopt` crate.
//!
//! Everything here is written as the plainest possible loop over the
//! defining formulas, with no shared code and no dependency on the crate
//! under test. Performance is irrelevant; inputs are tiny.

#![allow(clippy::needless_range_loop)]

/// Filter families known to the oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Filter {
    Tikhonov,
    /// n-fold iterated Tikhonov.
    Iterated(u32),
}

/// `g_α(λ)`; the iterated filter uses the finite geometric series
/// `Σ_{i<n} α^i / (α+λ)^{i+1}`.
pub fn g(filter: Filter, alpha: f64, ev: f64) -> f64 {
    match filter {
        Filter::Tikhonov => 1.0 / (alpha + ev),
        Filter::Iterated(n) => {
            let mut sum = 0.0;
            let mut term = 1.0 / (alpha + ev);
            for _ in 0..n {
                sum += term;
                term *= alpha / (alpha + ev);
            }
            sum
        }
    }
}

/// `1 − λ g_α(λ)` in closed form.
pub fn r(filter: Filter, alpha: f64, ev: f64) -> f64 {
    let base = alpha / (alpha + ev);
    match filter {
        Filter::Tikhonov => base,
        Filter::Iterated(n) => (0..n).fold(1.0, |acc, _| acc * base),
    }
}

pub fn regularize(filter: Filter, sv: &[f64], y: &[f64], alpha: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 0..sv.len() {
        let ev = sv[k] * sv[k];
        out.push(g(filter, alpha, ev) * sv[k] * y[k]);
    }
    out
}

/// `ψ_κ(α, y)`, with `kappa` evaluated at eigenvalues; pass `|_| 1.0` for `ψ`.
pub fn psi(filter: Filter, sv: &[f64], y: &[f64], alpha: f64, kappa: &dyn Fn(f64) -> f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..sv.len() {
        let ev = sv[k] * sv[k];
        let kk = kappa(ev);
        let rr = r(filter, alpha, ev);
        let gg = g(filter, alpha, ev);
        sum += kk * kk * rr * rr * ev * gg * gg * y[k] * y[k];
    }
    sum.sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    s.sqrt()
}

/// Position of the first smallest value.
pub fn first_min(values: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] < values[best] {
            best = i;
        }
    }
    best
}

/// Position of the smallest value, preferring the largest `alpha` on ties.
pub fn argmin_largest_alpha(values: &[f64], alphas: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] < values[best] || (values[i] == values[best] && alphas[i] > alphas[best]) {
            best = i;
        }
    }
    best
}

/// `‖x_j − x_{j−1}‖` for `j = 1..M-1` (0-based positions).
pub fn qo_criterion(family: &[Vec<f64>]) -> Vec<f64> {
    let mut out = Vec::new();
    for j in 1..family.len() {
        out.push(dist(&family[j], &family[j - 1]));
    }
    out
}

/// `|⟨f, x_j − x_{j−1}⟩|` together with the scale `Σ|f_k|(|x_j,k| + |x_{j−1},k|)`
/// that bounds its rounding error, cancellation included.
pub fn lfs_criterion(family: &[Vec<f64>], f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut vals = Vec::new();
    let mut scales = Vec::new();
    for j in 1..family.len() {
        let mut s = 0.0;
        let mut a = 0.0;
        for k in 0..f.len() {
            let d = family[j][k] - family[j - 1][k];
            s += f[k] * d;
            a += f[k].abs() * (family[j][k].abs() + family[j - 1][k].abs());
        }
        vals.push(s.abs());
        scales.push(a);
    }
    (vals, scales)
}

pub fn correction_factors(family: &[Vec<f64>], reference: &[f64]) -> Vec<f64> {
    family.iter().map(|x| dot(reference, x) / dot(x, x)).collect()
}

/// Quasi-optimality criterion of the family `c_i x_i`.
pub fn iterated_criterion(family: &[Vec<f64>], c: &[f64]) -> Vec<f64> {
    let scaled: Vec<Vec<f64>> = family
        .iter()
        .zip(c)
        .map(|(x, ci)| x.iter().map(|v| ci * v).collect())
        .collect();
    qo_criterion(&scaled)
}

pub fn gram(family: &[Vec<f64>], idx: &[usize]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; idx.len()]; idx.len()];
    for a in 0..idx.len() {
        for b in 0..idx.len() {
            out[a][b] = dot(&family[idx[a]], &family[idx[b]]);
        }
    }
    out
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(*bi);
            r
        })
        .collect();
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if m[row][col].abs() > m[piv][col].abs() {
                piv = row;
            }
        }
        m.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..=n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = m[row][n];
        for k in row + 1..n {
            s -= m[row][k] * x[k];
        }
        x[row] = s / m[row][row];
    }
    x
}

/// Eigenvalues and eigenvectors (as columns) of a symmetric matrix by
/// cyclic Jacobi rotations.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m = a.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[p][q] * m[p][q];
            }
        }
        let diag: f64 = (0..n).map(|i| m[i][i] * m[i][i]).sum();
        if off <= 1e-34 * (diag + off) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    ((0..n).map(|i| m[i][i]).collect(), v)
}

/// Spectral-truncation solve of `G c = p` keeping eigenvalues
/// `≥ rel_tol·λ_max`; returns the solution and the retained rank.
pub fn truncated_solve(gm: &[Vec<f64>], p: &[f64], rel_tol: f64) -> (Vec<f64>, usize) {
    let (vals, vecs) = jacobi_eigen(gm);
    let n = p.len();
    let lmax = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut c = vec![0.0; n];
    let mut rank = 0;
    for k in 0..n {
        if vals[k] < rel_tol * lmax {
            continue;
        }
        rank += 1;
        let mut vp = 0.0;
        for i in 0..n {
            vp += vecs[i][k] * p[i];
        }
        for i in 0..n {
            c[i] += vecs[i][k] * vp / vals[k];
        }
    }
    (c, rank)
}

/// Spectral condition number of a symmetric positive definite matrix.
pub fn condition_number(gm: &[Vec<f64>]) -> f64 {
    let (vals, _) = jacobi_eigen(gm);
    let lmax = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lmin = vals.iter().copied().fold(f64::INFINITY, f64::min);
    lmax / lmin
}

/// Ratios `λ_n⁴ Σ_{k≤n} λ_k^{-2} w_k / Σ_{k>n} λ_k² w_k` with
/// `w_k = κ²(λ_k²) e_k²`, `n = 1..n_max`, by direct double sums.
pub fn condition_ratios(sv: &[f64], noise: &[f64], kappa: &dyn Fn(f64) -> f64, n_max: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        let ln = sv[n - 1];
        let mut lhs = 0.0;
        for k in 1..=n {
            let ev = sv[k - 1] * sv[k - 1];
            let w = kappa(ev).powi(2) * noise[k - 1].powi(2);
            lhs += w / ev;
        }
        lhs *= ln.powi(4);
        let mut rhs = 0.0;
        for k in n + 1..=sv.len() {
            let ev = sv[k - 1] * sv[k - 1];
            rhs += ev * kappa(ev).powi(2) * noise[k - 1].powi(2);
        }
        out.push(lhs / rhs);
    }
    out
}

/// `|a − b| ≤ tol·scale`, with `scale` defaulting to `max(|a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64, scale: Option<f64>) -> bool {
    let s = scale.unwrap_or_else(|| a.abs().max(b.abs()));
    (a - b).abs() <= tol * s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iterated_series_matches_closed_form() {
        let (a, l) = (0.3f64, 0.7f64);
        let closed = (1.0 - (a / (a + l)).powi(3)) / l;
        assert!((g(Filter::Iterated(3), a, l) - closed).abs() < 1e-15);
    }

    #[test]
    fn jacobi_diagonalizes() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let (mut vals, _) = jacobi_eigen(&a);
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        let x = solve_dense(&a, &[3.0, 3.0]);
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hand_ratio() {
        let r = condition_ratios(&[1.0, 0.5], &[1.0, 1.0], &|_| 1.0, 1);
        assert_eq!(r, vec![4.0]);
    }
}
