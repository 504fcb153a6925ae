//! Property tests of the algebraic and information-theoretic invariants.

use gaussfermi::algorithms::{tomograph_mixed, test_bounded_rank, test_pure, GaussianSet, TestConfig};
use gaussfermi::dense::{
    correlation_matrix, fidelity, gaussian_to_dense, gaussianification, relative_entropy, trace_distance, DenseState,
};
use gaussfermi::gaussian::{distance_bounds, nongaussianity_bounds, overlap_pure, DistanceMode, GaussianState};
use gaussfermi::random;
use gaussfermi::sampler::{matchings, Estimator, RngStream, Scheme, StateSource};
use gaussfermi::skewlin::{
    normal_eigenvalue_gap, normal_form, pfaffian, schatten_norm, skew_norm, Schatten, SkewMatrix,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn state(n: usize, pure: bool, r: &mut ChaCha8Rng) -> GaussianState {
    GaussianState::from_correlation(random::correlation(n, pure, r)).unwrap()
}

/// Random full-rank density matrix `G G† / Tr`.
fn random_dense(n: usize, r: &mut ChaCha8Rng) -> DenseState {
    let d = 1 << n;
    let g = DMatrix::from_fn(d, d, |_, _| Complex64::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5));
    let m = &g * g.adjoint();
    let tr = m.trace();
    DenseState::new(m / tr).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pfaffian_squares_to_determinant(seed in any::<u64>(), n in 1usize..=8) {
        let a = random::skew(2 * n, &mut rng(seed));
        let pf = pfaffian(&a);
        let det = a.to_dense().determinant();
        prop_assert!((pf * pf - det).abs() <= 1e-9 * det.abs().max(1e-300) + 1e-12);
    }

    #[test]
    fn pfaffian_transforms_with_determinant(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let a = random::skew(2 * n, &mut r);
        let b = DMatrix::from_fn(2 * n, 2 * n, |_, _| r.random::<f64>() - 0.5);
        let bab = SkewMatrix::from_dense_projected(&(&b * a.to_dense() * b.transpose())).unwrap();
        let want = b.determinant() * pfaffian(&a);
        prop_assert!((pfaffian(&bab) - want).abs() <= 1e-9 * want.abs().max(1e-12));
    }

    #[test]
    fn normal_form_reconstructs(seed in any::<u64>(), n in 1usize..=10) {
        let a = random::skew(2 * n, &mut rng(seed));
        let nf = normal_form(&a).unwrap();
        prop_assert!(nf.reconstruct().checked_sub(&a).unwrap().max_abs() <= 1e-9);
        prop_assert!(nf.lambdas.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(nf.lambdas.iter().all(|&l| l >= 0.0));
    }

    #[test]
    fn normal_eigenvalues_obey_weyl(seed in any::<u64>(), n in 1usize..=10) {
        let mut r = rng(seed);
        let a = random::skew(2 * n, &mut r);
        let b = random::skew(2 * n, &mut r);
        let gap = normal_eigenvalue_gap(&a, &b).unwrap();
        prop_assert!(gap <= skew_norm(&a.checked_sub(&b).unwrap(), Schatten::Inf) + 1e-9);
    }

    #[test]
    fn antisymmetric_trace_inequality(seed in any::<u64>(), n in 1usize..=10) {
        let c = random::skew(2 * n, &mut rng(seed)).to_dense();
        let l = SkewMatrix::canonical(n).unwrap().to_dense();
        let lhs = schatten_norm(&c, Schatten::One).powi(2) + 2.0 * (&l * &c * &l * &c).trace();
        let rhs = 2.0 * schatten_norm(&c, Schatten::Two).powi(2) + (&c * &l).trace().powi(2);
        prop_assert!(lhs >= rhs - 1e-9);
    }

    #[test]
    fn distance_sandwich(seed in any::<u64>(), n in 1usize..=4, p1 in any::<bool>(), p2 in any::<bool>()) {
        let mut r = rng(seed);
        let (a, b) = (state(n, p1, &mut r), state(n, p2, &mut r));
        let d = trace_distance(&gaussian_to_dense(&a).unwrap(), &gaussian_to_dense(&b).unwrap()).unwrap();
        let mode = match (p1, p2) {
            (true, true) => DistanceMode::PurePure,
            (true, false) => DistanceMode::PureVsAny,
            _ => DistanceMode::MixedMixed,
        };
        let rep = distance_bounds(a.corr(), b.corr(), mode).unwrap();
        prop_assert!(rep.lb_infty <= d + 1e-9);
        prop_assert!(d <= rep.ub_mixed + 1e-9);
        if let Some(u) = rep.ub_pure { prop_assert!(d <= u + 1e-9); }
        if let Some(u) = rep.ub_pure_vs_any { prop_assert!(d <= u + 1e-9); }
    }

    #[test]
    fn pure_overlap_is_dense_fidelity(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let (a, b) = (state(n, true, &mut r), state(n, true, &mut r));
        let ov = overlap_pure(&a, &b).unwrap();
        let f = fidelity(&gaussian_to_dense(&a).unwrap(), &gaussian_to_dense(&b).unwrap()).unwrap();
        prop_assert!((ov - f).abs() <= 1e-9);
        let rep = distance_bounds(a.corr(), b.corr(), DistanceMode::PurePure).unwrap();
        prop_assert!(rep.fid_lb_frobenius <= ov + 1e-9);
        let [_, n2, ninf] = rep.delta_norms;
        if ninf < 2.0 - 1e-9 {
            prop_assert!(1.0 - n2 * n2 / 16.0 <= ov + 1e-9);
        }
        if a.parity() * b.parity() < 0.0 {
            prop_assert!(ov <= 1e-9);
        }
    }

    #[test]
    fn reconstructed_states_validate(seed in any::<u64>(), n in 1usize..=6, pure in any::<bool>()) {
        let s = state(n, pure, &mut rng(seed));
        let again = GaussianState::from_correlation(s.normal_form().reconstruct()).unwrap();
        prop_assert!(again.corr().checked_sub(s.corr()).unwrap().max_abs() <= 1e-9);
    }

    #[test]
    fn rotation_keeps_normal_eigenvalues(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let s = state(n, false, &mut r);
        let q = random::orthogonal(2 * n, &mut r);
        let t = s.rotate(&q).unwrap();
        for (x, y) in s.lambdas().iter().zip(t.lambdas()) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn nongaussianity_bounds_stay_in_range(seed in any::<u64>(), n in 1usize..=6, pure in any::<bool>()) {
        let s = state(n, pure, &mut rng(seed));
        for rr in 0..n {
            let b = nongaussianity_bounds(s.corr(), rr).unwrap();
            prop_assert!((0.0..=1.0).contains(&b.lb_rank_set));
            prop_assert!((0.0..=2.0).contains(&b.lb_all_gaussian));
            prop_assert!(b.ub_pure_set >= 0.0);
        }
    }

    #[test]
    fn pure_vs_arbitrary_state_bound(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let psi = state(n, true, &mut r);
        let rho = random_dense(n, &mut r);
        let d = trace_distance(&gaussian_to_dense(&psi).unwrap(), &rho).unwrap();
        let dg = psi.corr().checked_sub(&correlation_matrix(&rho).unwrap()).unwrap();
        prop_assert!(d <= skew_norm(&dg, Schatten::One).sqrt() + 1e-9);
    }

    #[test]
    fn pinsker_holds(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let (a, b) = (random_dense(n, &mut r), random_dense(n, &mut r));
        let s = relative_entropy(&a, &b).unwrap();
        prop_assume!(s.is_finite());
        let d = trace_distance(&a, &b).unwrap();
        prop_assert!(0.5 * d <= (std::f64::consts::LN_2 / 2.0 * s).sqrt() + 1e-9);
    }

    #[test]
    fn exact_mixed_tomography_returns_the_gaussianification(seed in any::<u64>(), n in 1usize..=3) {
        let rho = random_dense(n, &mut rng(seed));
        let src = StateSource::Dense(rho.clone());
        let rep = tomograph_mixed(&src, 0.2, 0.1, &Estimator::new(Scheme::Exact), RngStream::new(seed)).unwrap();
        let g = gaussianification(&rho).unwrap().g;
        let d = trace_distance(&gaussian_to_dense(&rep.learned).unwrap(), &gaussian_to_dense(&g).unwrap()).unwrap();
        prop_assert!(d <= 1e-9);
    }

    #[test]
    fn exact_scheme_tests_are_deterministic(seed in any::<u64>(), pure in any::<bool>()) {
        let s = state(4, pure, &mut rng(seed));
        let src = StateSource::ExactGaussian(s);
        let est = Estimator::new(Scheme::Exact);
        let cfg = TestConfig::new(0.0, 0.45, 0.1, 0, GaussianSet::MixedSet);
        let a = test_pure(&src, &cfg, &est, RngStream::new(1)).unwrap();
        let b = test_pure(&src, &cfg, &est, RngStream::new(2)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.shots_used, 0);
        let th = cfg.pure_thresholds(4).unwrap();
        prop_assert_eq!(a.evidence.threshold, th.eps_t);
    }

    #[test]
    fn rank_test_threshold_recomputes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let src = StateSource::ExactGaussian(state(4, false, &mut r));
        let cfg = TestConfig::new(0.0, 0.9, 0.1, 1, GaussianSet::RankSet);
        let v = test_bounded_rank(&src, &cfg, &Estimator::new(Scheme::Exact), RngStream::new(seed)).unwrap();
        let th = cfg.rank_thresholds(4).unwrap();
        let want = match v.evidence.stage {
            gaussfermi::algorithms::Stage::EigenvalueStage => th.eps_t,
            gaussfermi::algorithms::Stage::TomographyStage => th.eps_t2.unwrap(),
        };
        prop_assert_eq!(v.evidence.threshold, want);
    }

    #[test]
    fn sampled_counts_add_up(seed in any::<u64>(), n in 1usize..=6, shots in 1u64..5000) {
        let src = StateSource::ExactGaussian(state(n, false, &mut rng(seed)));
        let c = src.sample_counts(shots, &mut RngStream::new(seed).rng());
        prop_assert_eq!(c.total(), shots);
        prop_assert!(c.map.keys().all(|&x| x < 1 << n));
    }

    #[test]
    fn matching_plans_are_perfect(n in 1usize..=12) {
        let plan = matchings(n);
        prop_assert_eq!(plan.matchings.len(), 2 * n - 1);
        for m in &plan.matchings {
            let mut seen = vec![false; 2 * n];
            for &(j, k) in m {
                prop_assert!(j < k && !seen[j] && !seen[k]);
                seen[j] = true;
                seen[k] = true;
            }
        }
    }
}
