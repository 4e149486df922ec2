use crate::bayes::{best_certificate, solve_bayes, stationary_dual};
use crate::error::{Error, Result};
use crate::herm::{tol, unitarity_residual, ComplexMatrix, DensityMatrix, HermitianOperator, Povm};
use crate::problem::{DiscriminationProblem, PriorDistribution, Tolerances, WeightMatrix};

use super::MinimaxSolution;

const CLOSURE_TOL: f64 = 1e-8;

fn check_representation(reps: &[ComplexMatrix], dim: usize) -> Result<()> {
    for (k, u) in reps.iter().enumerate() {
        if u.nrows() != dim || u.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: u.nrows(),
            });
        }
        let residual = unitarity_residual(u);
        if residual > tol::UNITARITY {
            return Err(Error::NonUnitaryRep { index: k, residual });
        }
    }
    // UᵢUⱼ must equal some U_k up to a phase
    let d = dim as f64;
    for (i, ui) in reps.iter().enumerate() {
        for (j, uj) in reps.iter().enumerate() {
            let product = ui * uj;
            let closed = reps
                .iter()
                .any(|uk| ((uk.adjoint() * &product).trace().norm() - d).abs() <= CLOSURE_TOL * d);
            if !closed {
                return Err(Error::NotAGroup(i, j));
            }
        }
    }
    Ok(())
}

/// Group average P′ᵢ = UᵢKUᵢ† with K = (1/n) Σⱼ Uⱼ†PⱼUⱼ.
pub fn covariantize(povm: &Povm, reps: &[ComplexMatrix]) -> Result<Povm> {
    if reps.len() != povm.len() {
        return Err(Error::InvalidProblem(format!(
            "{} outcomes but {} group elements",
            povm.len(),
            reps.len()
        )));
    }
    check_representation(reps, povm.dim())?;
    let n = reps.len() as f64;
    let pulled_back: Vec<HermitianOperator> = povm
        .elements()
        .iter()
        .zip(reps)
        .map(|(p, u)| p.conjugate_by(&u.adjoint()))
        .collect();
    let seed = HermitianOperator::linear_combination(povm.dim(), pulled_back.iter().map(|p| (1.0 / n, p)));
    Povm::new(reps.iter().map(|u| seed.conjugate_by(u)).collect())
}

pub fn minimax_covariant(rho0: &DensityMatrix, reps: &[ComplexMatrix]) -> Result<MinimaxSolution> {
    minimax_covariant_with(rho0, reps, &Tolerances::default())
}

pub fn minimax_covariant_with(
    rho0: &DensityMatrix,
    reps: &[ComplexMatrix],
    tolerances: &Tolerances,
) -> Result<MinimaxSolution> {
    check_representation(reps, rho0.dim())?;
    let states: Vec<DensityMatrix> = reps.iter().map(|u| rho0.conjugate_by(u)).collect();
    let n = states.len();
    let problem = DiscriminationProblem::new(states, WeightMatrix::error_weights(n), tolerances.clone())?;
    let prior = PriorDistribution::uniform(n);
    let bayes = solve_bayes(&problem, &prior)?;
    let povm = covariantize(&bayes.povm, reps)?;

    let costs = problem.cost_operators(prior.weights());
    let certificate = best_certificate(
        &costs,
        &[bayes.certificate.y.clone(), stationary_dual(&costs, &povm)],
        &prior,
    );
    let per_state_risk = problem.per_state_risk(&povm);
    let risk = per_state_risk.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lowest = per_state_risk.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(MinimaxSolution {
        sandwich_width: risk - certificate.bound,
        equalized: risk - lowest <= tolerances.equalization_tol,
        equalization_support: (0..n).collect(),
        povm,
        risk,
        worst_prior: prior,
        certificate,
        per_state_risk,
        unique: None,
        grid_sandwich_width: None,
        iterations: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herm::{Complex64, ComplexVector};

    fn rotation(theta: f64) -> ComplexMatrix {
        let (s, c) = theta.sin_cos();
        ComplexMatrix::from_row_slice(
            2,
            2,
            &[c, -s, s, c].map(|x| Complex64::new(x, 0.0)),
        )
    }

    fn trine_reps() -> Vec<ComplexMatrix> {
        (0..3).map(|k| rotation(k as f64 * std::f64::consts::PI / 3.0)).collect()
    }

    fn ket0() -> DensityMatrix {
        DensityMatrix::pure(&ComplexVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]))
        .unwrap()
    }

    #[test]
    fn trine_success() {
        let sol = minimax_covariant(&ket0(), &trine_reps()).unwrap();
        for s in sol.success_from_error_risk() {
            assert!((s - 2.0 / 3.0).abs() < 1e-6);
        }
        assert!(sol.equalized);
        assert!(sol.sandwich_width.abs() < 1e-7);
    }

    #[test]
    fn covariant_input_is_fixed() {
        let reps = trine_reps();
        let seed = HermitianOperator::outer(&ComplexVector::from_vec(vec![
            Complex64::new((2.0f64 / 3.0).sqrt(), 0.0),
            Complex64::new(0.0, 0.0),
        ]));
        let povm = Povm::new(reps.iter().map(|u| seed.conjugate_by(u)).collect()).unwrap();
        let out = covariantize(&povm, &reps).unwrap();
        for (a, b) in povm.elements().iter().zip(out.elements()) {
            assert!((a - b).max_abs() < 1e-10);
        }
    }

    #[test]
    fn trivial_group() {
        let povm = Povm::new(vec![HermitianOperator::identity(2)]).unwrap();
        let out = covariantize(&povm, &[ComplexMatrix::identity(2, 2)]).unwrap();
        assert!((out.element(0) - povm.element(0)).max_abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_representations() {
        let povm = Povm::new(vec![
            HermitianOperator::from_diagonal(&[1.0, 0.0]),
            HermitianOperator::from_diagonal(&[0.0, 1.0]),
        ])
        .unwrap();
        let scaled = ComplexMatrix::identity(2, 2) * Complex64::new(1.1, 0.0);
        assert!(matches!(
            covariantize(&povm, &[ComplexMatrix::identity(2, 2), scaled]),
            Err(Error::NonUnitaryRep { index: 1, .. })
        ));
        let r = rotation(0.3);
        assert!(matches!(
            covariantize(&povm, &[ComplexMatrix::identity(2, 2), r]),
            Err(Error::NotAGroup(..))
        ));
        assert!(matches!(
            covariantize(&povm, &[ComplexMatrix::identity(3, 3), ComplexMatrix::identity(3, 3)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn identity_reps_are_indistinguishable() {
        let reps = vec![ComplexMatrix::identity(2, 2); 3];
        let sol = minimax_covariant(&ket0(), &reps).unwrap();
        assert!((sol.risk - 2.0 / 3.0).abs() < 1e-8);
    }
}
