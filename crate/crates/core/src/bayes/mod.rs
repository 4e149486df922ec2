//! Bayesian minimum-risk discrimination.
//!
//! For a prior a and costs wᵢⱼ the risk of a POVM is
//! Σᵢ aᵢ Σⱼ wᵢⱼ Tr[ρᵢ Pⱼ] = Σⱼ Tr[Cⱼ Pⱼ] with Cⱼ = Σᵢ wᵢⱼ aᵢ ρᵢ. Any Hermitian
//! Y with Y ≤ Cⱼ for every j certifies Tr[Y] as a lower bound on that risk, so
//! every solution carries such a Y alongside its POVM.

mod barrier;

use crate::error::{Error, Result};
use crate::herm::{
    self, default_kernel_tol, signed_parts, tol, DensityMatrix, HermitianOperator, Povm,
};
use crate::problem::{DiscriminationProblem, PriorDistribution, WeightMatrix};

/// Witness of a lower bound `bound = Tr[y]` on the Bayes risk at `prior`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualCertificate {
    pub y: HermitianOperator,
    pub prior: PriorDistribution,
    pub bound: f64,
}

impl DualCertificate {
    pub fn new(y: HermitianOperator, prior: PriorDistribution) -> Self {
        let bound = y.trace();
        Self { y, prior, bound }
    }

    /// Worst eigenvalue of Cⱼ − Y over outcomes, with the offending outcome.
    pub fn worst_violation(&self, problem: &DiscriminationProblem) -> (usize, f64) {
        slack(&problem.cost_operators(self.prior.weights()), &self.y)
    }
}

#[derive(Clone, Debug)]
pub struct BayesSolution {
    pub povm: Povm,
    pub prior: PriorDistribution,
    pub risk: f64,
    /// Tr[ρᵢ Pᵢ].
    pub success_per_state: Vec<f64>,
    pub certificate: DualCertificate,
    /// risk − certificate.bound.
    pub gap: f64,
    /// Risk of each centered iterate of the solver, in order.
    pub trace: Vec<f64>,
}

fn slack(costs: &[HermitianOperator], y: &HermitianOperator) -> (usize, f64) {
    costs
        .iter()
        .enumerate()
        .map(|(j, c)| (j, (c - y).min_eigenvalue()))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Shifts Y down by its worst violation so that Y ≤ Cⱼ for every j.
fn make_feasible(costs: &[HermitianOperator], y: &HermitianOperator) -> HermitianOperator {
    let (_, worst) = slack(costs, y);
    if worst < 0.0 {
        y.shift(worst)
    } else {
        y.clone()
    }
}

/// Best feasible certificate among the candidates after shifting each one.
pub(crate) fn best_certificate(
    costs: &[HermitianOperator],
    candidates: &[HermitianOperator],
    prior: &PriorDistribution,
) -> DualCertificate {
    candidates
        .iter()
        .map(|y| DualCertificate::new(make_feasible(costs, y), prior.clone()))
        .max_by(|a, b| a.bound.total_cmp(&b.bound))
        .expect("at least one candidate")
}

/// Hermitian part of Σⱼ Cⱼ Pⱼ, which equals the optimal Y when P is optimal.
pub(crate) fn stationary_dual(costs: &[HermitianOperator], povm: &Povm) -> HermitianOperator {
    let d = povm.dim();
    let mut acc = herm::ComplexMatrix::zeros(d, d);
    for (c, p) in costs.iter().zip(povm.elements()) {
        acc += c.matrix() * p.matrix();
    }
    HermitianOperator::hermitian_part(&acc)
}

fn assemble(
    problem: &DiscriminationProblem,
    prior: &PriorDistribution,
    povm: Povm,
    extra_candidates: &[HermitianOperator],
    trace: Vec<f64>,
) -> BayesSolution {
    let costs = problem.cost_operators(prior.weights());
    let mut candidates = vec![stationary_dual(&costs, &povm)];
    candidates.extend_from_slice(extra_candidates);
    let certificate = best_certificate(&costs, &candidates, prior);
    let risk = problem.bayes_risk_of(&povm, prior.weights());
    let success_per_state = problem
        .states()
        .iter()
        .zip(povm.elements())
        .map(|(rho, p)| rho.probability(p))
        .collect();
    BayesSolution {
        gap: risk - certificate.bound,
        povm,
        prior: prior.clone(),
        risk,
        success_per_state,
        certificate,
        trace,
    }
}

/// Helstrom measurement for two states. The kernel of a₁ρ₁ − a₂ρ₂ goes to
/// outcome 1.
pub fn helstrom_two_state(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    prior: &PriorDistribution,
) -> Result<BayesSolution> {
    helstrom_with_kernel_weight(rho1, rho2, prior, 1.0, None)
}

/// Helstrom measurement with P₁ = Π₊ + κK and P₂ = Π₋ + (1 − κ)K, where
/// (Π₊, K, Π₋) are the sign projectors of a₁ρ₁ − a₂ρ₂. `kernel_tol` is an
/// absolute band; `None` uses 1e-9 · max(1, ‖a₁ρ₁ − a₂ρ₂‖).
pub fn helstrom_with_kernel_weight(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    prior: &PriorDistribution,
    kernel_weight: f64,
    kernel_tol: Option<f64>,
) -> Result<BayesSolution> {
    let (povm, _) = helstrom_povm(rho1, rho2, prior, kernel_weight, kernel_tol)?;
    let problem = DiscriminationProblem::new(
        vec![rho1.clone(), rho2.clone()],
        WeightMatrix::error_weights(2),
        Default::default(),
    )?;
    Ok(assemble(&problem, prior, povm, &[], Vec::new()))
}

/// Helstrom POVM plus the kernel dimension of a₁ρ₁ − a₂ρ₂.
pub(crate) fn helstrom_povm(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    prior: &PriorDistribution,
    kernel_weight: f64,
    kernel_tol: Option<f64>,
) -> Result<(Povm, herm::SignedParts)> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho1.dim(),
            found: rho2.dim(),
        });
    }
    if prior.len() != 2 {
        return Err(Error::InvalidPrior(format!(
            "two-state prior needs 2 weights, got {}",
            prior.len()
        )));
    }
    if !(0.0..=1.0).contains(&kernel_weight) {
        return Err(Error::InvalidProblem(format!(
            "kernel weight {kernel_weight} outside [0, 1]"
        )));
    }
    let a = prior.weights();
    let d = &rho1.op().scale(a[0]) - &rho2.op().scale(a[1]);
    let tol = kernel_tol.unwrap_or_else(|| default_kernel_tol(&d));
    let parts = signed_parts(&d, tol);
    let p1 = &parts.positive + &parts.kernel.scale(kernel_weight);
    let p2 = &parts.negative + &parts.kernel.scale(1.0 - kernel_weight);
    Ok((Povm::new(vec![p1, p2])?, parts))
}

/// Minimum-risk POVM for an arbitrary prior and cost matrix, with a dual
/// certificate whose gap is at most `gap_tol`.
pub fn bayes_risk_n(
    problem: &DiscriminationProblem,
    prior: &PriorDistribution,
) -> Result<BayesSolution> {
    let solution = solve_bayes(problem, prior)?;
    if solution.gap > problem.tolerances.gap_tol {
        return Err(Error::BayesConvergence {
            best_gap: solution.gap,
            partial: Box::new(solution),
        });
    }
    Ok(solution)
}

/// As [`bayes_risk_n`] but returns the best iterate whatever its gap.
pub(crate) fn solve_bayes(
    problem: &DiscriminationProblem,
    prior: &PriorDistribution,
) -> Result<BayesSolution> {
    // stop well inside the requested gap so that the feasibility shift of
    // the candidates cannot push it back over
    solve_bayes_to(problem, prior, 0.01 * problem.tolerances.gap_tol)
}

/// Runs the barrier until the certified gap is at most `target`.
pub(crate) fn solve_bayes_to(
    problem: &DiscriminationProblem,
    prior: &PriorDistribution,
    target: f64,
) -> Result<BayesSolution> {
    problem.check_prior(prior)?;
    let costs = problem.cost_operators(prior.weights());
    let outcome = barrier::maximize(&costs, problem.tolerances.max_iterations, |povm, y| {
        let risk: f64 = costs.iter().zip(povm.elements()).map(|(c, p)| c.trace_product(p)).sum();
        let cert = best_certificate(&costs, &[stationary_dual(&costs, povm), y.clone()], prior);
        risk - cert.bound <= target
    });
    let povm = outcome.povm.ok_or(Error::InvalidPovm {
        completeness: f64::NAN,
        min_eigenvalue: f64::NAN,
    })?;
    Ok(assemble(problem, prior, povm, &[outcome.dual], outcome.trace))
}

/// Verifies Y ≤ Σᵢ wᵢⱼ μᵢ ρᵢ for every j and returns the certified bound Tr[Y].
pub fn check_certificate(cert: &DualCertificate, problem: &DiscriminationProblem) -> Result<f64> {
    problem.check_prior(&cert.prior)?;
    if cert.y.dim() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            found: cert.y.dim(),
        });
    }
    let (outcome, worst) = cert.worst_violation(problem);
    if worst < -tol::CERTIFICATE_FEASIBILITY {
        return Err(Error::InfeasibleCertificate {
            outcome,
            violation: -worst,
        });
    }
    Ok(cert.y.trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herm::{Complex64, ComplexVector};
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pure_vs_mixed() -> (DensityMatrix, DensityMatrix) {
        (
            DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap(),
            DensityMatrix::maximally_mixed(2),
        )
    }

    fn pure_pair(overlap: f64) -> (DensityMatrix, DensityMatrix) {
        let s = (1.0 - overlap * overlap).sqrt();
        let a = ComplexVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let b = ComplexVector::from_vec(vec![Complex64::new(overlap, 0.0), Complex64::new(s, 0.0)]);
        (DensityMatrix::pure(&a).unwrap(), DensityMatrix::pure(&b).unwrap())
    }

    fn trine() -> Vec<DensityMatrix> {
        (0..3)
            .map(|k| {
                let th = k as f64 * std::f64::consts::PI / 3.0;
                let v = ComplexVector::from_vec(vec![
                    Complex64::new(th.cos(), 0.0),
                    Complex64::new(th.sin(), 0.0),
                ]);
                DensityMatrix::pure(&v).unwrap()
            })
            .collect()
    }

    #[test]
    fn helstrom_orthogonal_states() {
        let a = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let b = DensityMatrix::from_diagonal(&[0.0, 1.0]).unwrap();
        let sol = helstrom_two_state(&a, &b, &PriorDistribution::uniform(2)).unwrap();
        assert!(sol.risk.abs() < 1e-15);
        assert!((sol.povm.element(0) - &HermitianOperator::from_diagonal(&[1.0, 0.0])).max_abs() < 1e-14);
    }

    #[test]
    fn helstrom_pure_vs_mixed_prior() {
        let (a, b) = pure_vs_mixed();
        let prior = PriorDistribution::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let sol = helstrom_two_state(&a, &b, &prior).unwrap();
        assert!((sol.risk - 1.0 / 3.0).abs() < 1e-10);
        assert!(sol.gap.abs() < 1e-10);
        // the kernel diag(1,0) is assigned to outcome 1
        assert!((sol.povm.element(0) - &HermitianOperator::from_diagonal(&[1.0, 0.0])).max_abs() < 1e-12);
    }

    #[test]
    fn helstrom_pure_pair() {
        let (a, b) = pure_pair(std::f64::consts::FRAC_PI_4.cos());
        let sol = helstrom_two_state(&a, &b, &PriorDistribution::uniform(2)).unwrap();
        let expected = (1.0 - std::f64::consts::FRAC_1_SQRT_2) / 2.0;
        assert!((sol.risk - expected).abs() < 1e-10);
        assert!((sol.risk - 0.1464466).abs() < 1e-7);
    }

    #[test]
    fn helstrom_rejects_bad_input() {
        let (a, _) = pure_vs_mixed();
        let c = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            helstrom_two_state(&a, &c, &PriorDistribution::uniform(2)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            helstrom_two_state(&a, &a, &PriorDistribution::uniform(3)),
            Err(Error::InvalidPrior(_))
        ));
    }

    #[test]
    fn helstrom_invariant_under_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let d = 3;
            let a = random::density_matrix(d, 2, &mut rng);
            let b = random::density_matrix(d, 3, &mut rng);
            let u = random::unitary(d, &mut rng);
            let prior = PriorDistribution::new(vec![0.4, 0.6]).unwrap();
            let r0 = helstrom_two_state(&a, &b, &prior).unwrap().risk;
            let r1 = helstrom_two_state(&a.conjugate_by(&u), &b.conjugate_by(&u), &prior)
                .unwrap()
                .risk;
            assert!((r0 - r1).abs() < 1e-9);
        }
    }

    #[test]
    fn n_state_matches_helstrom_on_qubits() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 0..100 {
            let a = random::density_matrix(2, 1 + k % 2, &mut rng);
            let b = random::density_matrix(2, 2, &mut rng);
            let p = 0.1 + 0.8 * (k as f64 / 100.0);
            let prior = PriorDistribution::new(vec![p, 1.0 - p]).unwrap();
            let closed = helstrom_two_state(&a, &b, &prior).unwrap();
            let problem = DiscriminationProblem::with_error_weights(vec![a, b]).unwrap();
            let sol = bayes_risk_n(&problem, &prior).unwrap();
            assert!((sol.risk - closed.risk).abs() < 1e-8, "{} vs {}", sol.risk, closed.risk);
            assert!(sol.gap <= 1e-7);
        }
    }

    #[test]
    fn identical_states_cannot_beat_guessing() {
        let rho = DensityMatrix::from_diagonal(&[0.7, 0.3]).unwrap();
        let problem = DiscriminationProblem::with_error_weights(vec![rho.clone(), rho.clone(), rho]).unwrap();
        let sol = bayes_risk_n(&problem, &PriorDistribution::uniform(3)).unwrap();
        assert!((sol.risk - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn trine_uniform_prior() {
        let problem = DiscriminationProblem::with_error_weights(trine()).unwrap();
        let sol = bayes_risk_n(&problem, &PriorDistribution::uniform(3)).unwrap();
        assert!((sol.risk - 1.0 / 3.0).abs() < 1e-7);
        for s in &sol.success_per_state {
            assert!((s - 2.0 / 3.0).abs() < 1e-6);
        }
        assert!(check_certificate(&sol.certificate, &problem).is_ok());
    }

    #[test]
    fn certificate_checks() {
        let (a, b) = pure_vs_mixed();
        let problem = DiscriminationProblem::with_error_weights(vec![a, b]).unwrap();
        let prior = PriorDistribution::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let zero = DualCertificate::new(HermitianOperator::zeros(2), prior.clone());
        assert_eq!(check_certificate(&zero, &problem).unwrap(), 0.0);

        // C₁ = a₂ρ₂ = I/3 and C₂ = a₁ρ₁ = diag(1/3, 0): Y = diag(1/3, 0) is optimal
        let y = HermitianOperator::from_diagonal(&[1.0 / 3.0, 0.0]);
        let opt = DualCertificate::new(y, prior.clone());
        assert!((check_certificate(&opt, &problem).unwrap() - 1.0 / 3.0).abs() < 1e-15);

        let too_big = DualCertificate::new(HermitianOperator::identity(2), prior);
        assert!(matches!(
            check_certificate(&too_big, &problem),
            Err(Error::InfeasibleCertificate { .. })
        ));
    }

    #[test]
    fn solver_trace_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let states: Vec<_> = (0..3).map(|_| random::density_matrix(3, 2, &mut rng)).collect();
            let problem = DiscriminationProblem::with_error_weights(states).unwrap();
            let prior = PriorDistribution::normalized(&[0.2, 0.3, 0.5]).unwrap();
            let sol = bayes_risk_n(&problem, &prior).unwrap();
            assert!(sol.trace.len() > 1);
            for w in sol.trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{:?}", sol.trace);
            }
        }
    }

    #[test]
    fn bayes_risk_is_concave_in_prior() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let states: Vec<_> = (0..3).map(|_| random::density_matrix(2, 2, &mut rng)).collect();
        let problem = DiscriminationProblem::with_error_weights(states).unwrap();
        let grid = crate::problem::simplex_grid(3, 0.25);
        for a in &grid {
            for b in &grid {
                let ra = solve_bayes(&problem, &PriorDistribution::normalized(a).unwrap()).unwrap().risk;
                let rb = solve_bayes(&problem, &PriorDistribution::normalized(b).unwrap()).unwrap().risk;
                let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.3 * x + 0.7 * y).collect();
                let rm = solve_bayes(&problem, &PriorDistribution::normalized(&mid).unwrap()).unwrap().risk;
                assert!(rm >= 0.3 * ra + 0.7 * rb - 2e-7);
            }
        }
    }
}
