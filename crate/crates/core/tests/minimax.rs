use proptest::prelude::*;
use qdisc::minimax::minimax_two_state_with;
use qdisc::{
    bayes_risk_n, check_certificate, covariantize, equalization_profile, minimax_covariant, minimax_n,
    minimax_two_state, random, Complex64, ComplexMatrix, DensityMatrix, DiscriminationProblem, Error,
    PriorDistribution, Tolerances,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_pair(d: usize, rng: &mut ChaCha8Rng) -> (DensityMatrix, DensityMatrix) {
    let r1 = rng.random_range(1..=d);
    let r2 = rng.random_range(1..=d);
    (random::density_matrix(d, r1, rng), random::density_matrix(d, r2, rng))
}

fn random_problem(n: usize, rng: &mut ChaCha8Rng) -> DiscriminationProblem {
    let states = (0..n)
        .map(|_| {
            let rank = rng.random_range(1..=2);
            random::density_matrix(2, rank, rng)
        })
        .collect();
    DiscriminationProblem::with_error_weights(states).unwrap()
}

/// Cyclic group generated by V diag(ωᵏ) V† with ω a primitive n-th root of unity.
fn cyclic_group(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Vec<ComplexMatrix> {
    let v = random::unitary(d, rng);
    let charges: Vec<usize> = (0..d).map(|_| rng.random_range(0..n)).collect();
    (0..n)
        .map(|k| {
            let diag = ComplexMatrix::from_fn(d, d, |i, j| {
                if i == j {
                    let angle = 2.0 * std::f64::consts::PI * (k * charges[i]) as f64 / n as f64;
                    Complex64::from_polar(1.0, angle)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            &v * diag * v.adjoint()
        })
        .collect()
}

#[test]
fn two_state_equalization_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..200 {
        let d = 2 + k % 2;
        let (rho1, rho2) = random_pair(d, &mut rng);
        let sol = minimax_two_state(&rho1, &rho2).unwrap();
        let b = sol.povm.elements();
        let imbalance = rho1.probability(&b[0]) - rho2.probability(&b[1]);
        assert!(imbalance.abs() <= 1e-8, "pair {k}: imbalance {imbalance:e}");
        assert!(sol.equalized);
        let problem = DiscriminationProblem::with_error_weights(vec![rho1, rho2]).unwrap();
        let bound = check_certificate(&sol.certificate, &problem).unwrap();
        assert!(sol.risk - bound <= problem.tolerances.gap_tol, "pair {k}");
    }
}

#[test]
fn profiles_are_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let (rho1, rho2) = random_pair(3, &mut rng);
        let profile = equalization_profile(&rho1, &rho2, 0.01).unwrap();
        assert_eq!(profile.grid.len(), 101);
        assert!(profile.is_monotone(1e-9));
        assert!(profile.endpoints_ok());
    }
    let rho = DensityMatrix::maximally_mixed(2);
    assert!(equalization_profile(&rho, &rho, 0.0).is_err());
    assert!(equalization_profile(&rho, &rho, 0.7).is_err());
}

#[test]
fn pure_vs_mixed_two_state_values() {
    let rho1 = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
    let rho2 = DensityMatrix::maximally_mixed(2);
    let sol = minimax_two_state(&rho1, &rho2).unwrap();
    assert!((sol.risk - 1.0 / 3.0).abs() < 1e-12);
    assert!((sol.worst_prior.weights()[0] - 1.0 / 3.0).abs() < 1e-9);
    let p1 = sol.povm.element(0).matrix();
    assert!((p1[(0, 0)].re - 2.0 / 3.0).abs() < 1e-9);
    assert!(p1[(1, 1)].norm() < 1e-9);
}

#[test]
fn two_state_rejects_mismatched_dimensions() {
    let a = DensityMatrix::maximally_mixed(2);
    let b = DensityMatrix::maximally_mixed(3);
    assert!(matches!(
        minimax_two_state_with(&a, &b, &Tolerances::default()),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn minimax_dominates_bayes_on_a_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in [2, 3] {
        let problem = random_problem(n, &mut rng);
        let sol = minimax_n(&problem).unwrap();
        for k in 0..100 {
            let prior = if n == 2 {
                let a = (k as f64 + 0.5) / 100.0;
                PriorDistribution::two(a).unwrap()
            } else {
                let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
                PriorDistribution::normalized(&raw).unwrap()
            };
            let bayes = bayes_risk_n(&problem, &prior).unwrap();
            assert!(sol.risk >= bayes.risk - problem.tolerances.gap_tol, "n = {n}, prior {prior:?}");
        }
    }
}

#[test]
fn n_state_agrees_with_two_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..5 {
        let (rho1, rho2) = random_pair(2, &mut rng);
        let two = minimax_two_state(&rho1, &rho2).unwrap();
        let problem = DiscriminationProblem::with_error_weights(vec![rho1, rho2]).unwrap();
        let general = minimax_n(&problem).unwrap();
        assert!((two.risk - general.risk).abs() <= 2.0 * problem.tolerances.gap_tol);
    }
}

#[test]
fn four_state_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let problem = random_problem(4, &mut rng);
    let sol = minimax_n(&problem).unwrap();
    let bound = check_certificate(&sol.certificate, &problem).unwrap();
    assert!(sol.risk - bound <= 1e-5);
    assert!(sol.grid_sandwich_width.unwrap() <= 1e-3);
    assert!(problem.check_povm(&sol.povm).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn weight_scaling_keeps_the_optimizer(seed in any::<u64>(), n in 2usize..=3, lambda in 0.1f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let problem = random_problem(n, &mut rng);
        let scaled = problem.with_weights(problem.weights().scaled(lambda)).unwrap();
        let tol = problem.tolerances.gap_tol;

        let prior = PriorDistribution::uniform(n);
        let base = bayes_risk_n(&problem, &prior).unwrap();
        let other = bayes_risk_n(&scaled, &prior).unwrap();
        prop_assert!((other.risk - lambda * base.risk).abs() <= 1e-8 * lambda.max(1.0));
        let transferred = problem.bayes_risk_of(&other.povm, prior.weights());
        prop_assert!(transferred - base.certificate.bound <= 1e-8);

        let base = minimax_n(&problem).unwrap();
        let other = minimax_n(&scaled).unwrap();
        prop_assert!((other.risk - lambda * base.risk).abs() <= tol * (1.0 + lambda));
        let transferred = problem.worst_case_risk(&other.povm);
        prop_assert!(transferred - base.certificate.bound <= tol * (1.0 + 1.0 / lambda));
    }

    #[test]
    fn covariant_risks_are_constant(seed in any::<u64>(), n in 2usize..=5, d in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reps = cyclic_group(n, d, &mut rng);
        let rank = rng.random_range(1..=d);
        let rho0 = random::density_matrix(d, rank, &mut rng);
        let sol = minimax_covariant(&rho0, &reps).unwrap();
        let hi = sol.per_state_risk.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = sol.per_state_risk.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(hi - lo <= 1e-8);
        prop_assert!(sol.sandwich_width <= 1e-7);

        let povm = covariantize(&sol.povm, &reps).unwrap();
        for (a, b) in povm.elements().iter().zip(sol.povm.elements()) {
            prop_assert!((a - b).max_abs() <= 1e-10);
        }
    }
}
