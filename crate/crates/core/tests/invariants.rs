//! Property tests of numerical invariants of the public API.

use proptest::prelude::*;
use quasiopt::aggregation::{aggregate, AggregationOptions};
use quasiopt::noise::{condition_ratios, generate_noise, Distribution, NoiseKind, NoiseSpec, SignPattern};
use quasiopt::rules::{geometric_alphas, qo_select};
use quasiopt::{psi, regularize, DataSource, FilterFamily, ParameterGrid, SpectralProblem};
use quasiopt_validation as oracle;

fn sorted_spectrum(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3f64..1.0, 2..=max_n).prop_map(|mut v| {
        v.sort_by(|a, b| b.total_cmp(a));
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn regularized_coefficients_match_oracle(sv in sorted_spectrum(12), la in -6.0f64..0.0, order in 1u32..=4) {
        let y: Vec<f64> = sv.iter().map(|s| s.sqrt()).collect();
        let alpha = 10f64.powf(la);
        let p = SpectralProblem::from_data(sv.clone(), y.clone()).unwrap();
        let (f, of) = if order == 1 {
            (FilterFamily::Tikhonov, oracle::Filter::Tikhonov)
        } else {
            (FilterFamily::IteratedTikhonov { order }, oracle::Filter::Iterated(order))
        };
        let sol = regularize(&p, &f, alpha, DataSource::Noisy).unwrap();
        for (a, b) in sol.coeffs.iter().zip(oracle::regularize(of, &sv, &y, alpha)) {
            prop_assert!(oracle::close(*a, b, 1e-12, None));
        }
    }

    #[test]
    fn psi_is_nonnegative_and_vanishes_on_zero_data(sv in sorted_spectrum(12), la in -6.0f64..0.0) {
        let n = sv.len();
        let alpha = 10f64.powf(la);
        let zero = SpectralProblem::from_data(sv.clone(), vec![0.0; n]).unwrap();
        prop_assert_eq!(psi(&zero, &FilterFamily::Tikhonov, alpha, DataSource::Noisy).unwrap(), 0.0);
        let one = SpectralProblem::from_data(sv, vec![1.0; n]).unwrap();
        prop_assert!(psi(&one, &FilterFamily::Tikhonov, alpha, DataSource::Noisy).unwrap() > 0.0);
    }

    #[test]
    fn geometric_grid_is_decreasing(la in -3.0f64..1.0, q in 0.05f64..0.95, m in 2usize..40) {
        let a = geometric_alphas(10f64.powf(la), q, m).unwrap();
        prop_assert_eq!(a.len(), m);
        prop_assert!(a.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn qo_index_is_interior_and_minimal(sv in sorted_spectrum(15), m in 3usize..12) {
        let y: Vec<f64> = sv.iter().enumerate().map(|(k, s)| s * (1.0 + 0.1 * k as f64)).collect();
        let p = SpectralProblem::from_data(sv, y).unwrap();
        let grid = ParameterGrid::build(&p, &FilterFamily::Tikhonov, 1.0, 0.5, m).unwrap();
        let sel = qo_select(&grid).unwrap();
        prop_assert!(sel.index >= 1 && sel.index < m);
        let best = sel.criterion.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(sel.criterion_at(sel.index), Some(best));
    }

    #[test]
    fn aggregate_reproduces_a_single_member(n in 2usize..10, la in -3.0f64..0.0) {
        // with one active approximant the aggregate is its projection onto p
        let sv: Vec<f64> = (0..n).map(|k| 0.8f64.powi(k as i32)).collect();
        let p = SpectralProblem::from_data(sv, vec![1.0; n]).unwrap();
        let grid = ParameterGrid::build(&p, &FilterFamily::Tikhonov, 10f64.powf(la), 0.5, 4).unwrap();
        let res = aggregate(&grid, grid.alphas()[0], &AggregationOptions::default()).unwrap();
        prop_assert_eq!(res.active_indices, vec![0]);
        let x0 = grid.coeffs(0);
        let c = res.p_estimated[0] / oracle::dot(x0, x0);
        prop_assert!(oracle::close(res.coefficients[0], c, 1e-12, None));
    }

    #[test]
    fn noise_is_seed_deterministic(seed in any::<u64>(), n in 2usize..50) {
        let spec = NoiseSpec {
            kind: NoiseKind::Stochastic { decay: 1.0, distribution: Distribution::Gaussian },
            normalize_to_delta: true,
            seed,
        };
        let a = generate_noise(&spec, n, 0.1).unwrap();
        prop_assert_eq!(&a, &generate_noise(&spec, n, 0.1).unwrap());
        let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(oracle::close(norm, 0.1, 1e-12, None));
    }

    #[test]
    fn condition_ratios_match_oracle(sv in sorted_spectrum(30), seed in any::<u64>()) {
        let spec = NoiseSpec {
            kind: NoiseKind::PolyDeterministic { decay: 1.0, signs: SignPattern::Random },
            normalize_to_delta: false,
            seed,
        };
        let noise = generate_noise(&spec, sv.len(), 1.0).unwrap();
        let n_max = sv.len() - 1;
        let r = condition_ratios(&sv, &noise, None, n_max).unwrap();
        let o = oracle::condition_ratios(&sv, &noise, &|_| 1.0, n_max);
        for (a, b) in r.ratios_plain.iter().zip(&o) {
            prop_assert!(oracle::close(*a, *b, 1e-11, None));
        }
    }
}
