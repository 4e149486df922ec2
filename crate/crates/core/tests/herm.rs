use proptest::prelude::*;
use qdisc::herm::{cholesky, inverse_pd, max_abs};
use qdisc::{eig_hermitian, random, signed_parts, trace_norm, ComplexMatrix, DensityMatrix, HermitianOperator, Povm};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eig_round_trip(seed in any::<u64>(), d in 1usize..=8) {
        let m = random::hermitian(d, &mut rng(seed));
        let back = eig_hermitian(&m).reconstruct();
        prop_assert!((&back - &m).max_abs() <= 1e-9 * m.max_abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eigenvalues_descend(seed in any::<u64>(), d in 1usize..=8) {
        let spec = eig_hermitian(&random::hermitian(d, &mut rng(seed)));
        prop_assert!(spec.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn trace_norm_matches_sign_projectors(seed in any::<u64>(), d in 1usize..=8) {
        let m = random::hermitian(d, &mut rng(seed));
        let parts = signed_parts(&m, 1e-9 * m.max_abs().max(1.0));
        let split = parts.positive.trace_product(&m) - parts.negative.trace_product(&m);
        prop_assert!((trace_norm(&m) - split).abs() <= 1e-8);
    }

    #[test]
    fn sign_projectors_partition_identity(seed in any::<u64>(), d in 1usize..=8) {
        let m = random::hermitian(d, &mut rng(seed));
        let parts = signed_parts(&m, 1e-9 * m.max_abs().max(1.0));
        let all = [&parts.positive, &parts.kernel, &parts.negative];
        for p in all {
            prop_assert!((p.matrix() * p.matrix() - p.matrix()).iter().all(|z| z.norm() <= 1e-9));
        }
        for i in 0..3 {
            for j in i + 1..3 {
                prop_assert!(max_abs(&(all[i].matrix() * all[j].matrix())) <= 1e-9);
            }
        }
        let sum = &(&parts.positive + &parts.kernel) + &parts.negative;
        prop_assert!((&sum - &HermitianOperator::identity(d)).max_abs() <= 1e-9);
    }

    #[test]
    fn cholesky_agrees_with_spectrum(seed in any::<u64>(), d in 1usize..=6) {
        let m = random::hermitian(d, &mut rng(seed));
        let pd = m.min_eigenvalue() > 1e-9 * m.max_abs();
        let indefinite = m.min_eigenvalue() < -1e-9 * m.max_abs();
        let factor = cholesky(&m);
        if pd {
            let l = factor.clone().expect("positive definite");
            prop_assert!(max_abs(&(&l * l.adjoint() - m.matrix())) <= 1e-9 * m.max_abs());
            let inv = inverse_pd(&m).unwrap();
            prop_assert!(max_abs(&(m.matrix() * inv.matrix() - ComplexMatrix::identity(d, d))) <= 1e-6);
        }
        if indefinite {
            prop_assert!(factor.is_none());
        }
    }

    #[test]
    fn random_density_matrices_are_valid(seed in any::<u64>(), d in 1usize..=6, r in 1usize..=6) {
        let rank = r.min(d);
        let rho = random::density_matrix(d, rank, &mut rng(seed));
        prop_assert!((rho.op().trace() - 1.0).abs() <= 1e-10);
        prop_assert!(rho.op().min_eigenvalue() >= -1e-10);
        prop_assert!(DensityMatrix::new(rho.op().clone()).is_ok());
    }
}

#[test]
fn rejects_invalid_inputs() {
    let not_hermitian = ComplexMatrix::from_row_slice(
        2,
        2,
        &[1.0, 1.0, 0.0, 1.0].map(|x| qdisc::Complex64::new(x, 0.0)),
    );
    assert!(HermitianOperator::new(not_hermitian).is_err());
    assert!(DensityMatrix::from_diagonal(&[0.7, 0.7]).is_err());
    assert!(DensityMatrix::from_diagonal(&[1.5, -0.5]).is_err());
    let half = HermitianOperator::from_diagonal(&[0.5, 0.5]);
    assert!(Povm::new(vec![half.clone()]).is_err());
    assert!(Povm::new(vec![half.clone(), half]).is_ok());
    assert!(Povm::new(vec![
        HermitianOperator::from_diagonal(&[1.5, 0.0]),
        HermitianOperator::from_diagonal(&[-0.5, 1.0]),
    ])
    .is_err());
}
