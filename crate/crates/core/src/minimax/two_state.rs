use crate::bayes::{best_certificate, helstrom_povm, stationary_dual};
use crate::error::{Error, Result};
use crate::herm::{self, support_projector, DensityMatrix, HermitianOperator, Povm};
use crate::problem::{DiscriminationProblem, PriorDistribution, Tolerances, WeightMatrix};

use super::MinimaxSolution;

const BRACKET_WIDTH: f64 = 1e-12;

/// Samples of f(a) = Tr[ρ₁P₁⁽ᵃ⁾] − Tr[ρ₂P₂⁽ᵃ⁾] with the kernel of
/// aρ₁ − (1−a)ρ₂ assigned wholly to outcome 2 (`f_minus`) or to outcome 1
/// (`f_plus`).
#[derive(Clone, Debug)]
pub struct EqualizationProfile {
    pub grid: Vec<(f64, f64, f64)>,
}

impl EqualizationProfile {
    /// f_minus ≤ f_plus pointwise and both nondecreasing, up to `slack`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        let ordered = self.grid.iter().all(|&(_, lo, hi)| lo <= hi + slack);
        let rising = self
            .grid
            .windows(2)
            .all(|w| w[1].1 >= w[0].1 - slack && w[1].2 >= w[0].2 - slack);
        ordered && rising
    }

    /// f(0) ≤ 0 ≤ f(1) on both branches.
    pub fn endpoints_ok(&self) -> bool {
        match (self.grid.first(), self.grid.last()) {
            (Some(first), Some(last)) => {
                first.0 == 0.0 && last.0 == 1.0 && first.2 <= 0.0 && last.1 >= 0.0
            }
            _ => false,
        }
    }
}

struct Side {
    povm: Povm,
    f: f64,
}

struct Evaluation {
    minus: Side,
    plus: Side,
    parts: herm::SignedParts,
}

fn imbalance(rho1: &DensityMatrix, rho2: &DensityMatrix, povm: &Povm) -> f64 {
    rho1.probability(povm.element(0)) - rho2.probability(povm.element(1))
}

fn evaluate(rho1: &DensityMatrix, rho2: &DensityMatrix, a: f64, rel_tol: f64) -> Result<Evaluation> {
    let prior = PriorDistribution::new(vec![a, 1.0 - a])?;
    let d = &rho1.op().scale(a) - &rho2.op().scale(1.0 - a);
    let tol = rel_tol * d.max_abs().max(1.0);
    let (minus, _) = helstrom_povm(rho1, rho2, &prior, 0.0, Some(tol))?;
    let (plus, parts) = helstrom_povm(rho1, rho2, &prior, 1.0, Some(tol))?;
    Ok(Evaluation {
        minus: Side {
            f: imbalance(rho1, rho2, &minus),
            povm: minus,
        },
        plus: Side {
            f: imbalance(rho1, rho2, &plus),
            povm: plus,
        },
        parts,
    })
}

pub fn equalization_profile(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    grid_step: f64,
) -> Result<EqualizationProfile> {
    if !(grid_step > 0.0 && grid_step <= 0.5) {
        return Err(Error::InvalidProblem(format!("grid step {grid_step} outside (0, 0.5]")));
    }
    let steps = (1.0 / grid_step).round() as usize;
    let grid = (0..=steps)
        .map(|k| {
            let a = k as f64 / steps as f64;
            let e = evaluate(rho1, rho2, a, herm::tol::KERNEL_RELATIVE)?;
            Ok((a, e.minus.f, e.plus.f))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EqualizationProfile { grid })
}

pub fn minimax_two_state(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<MinimaxSolution> {
    minimax_two_state_with(rho1, rho2, &Tolerances::default())
}

/// Rank of the part of `op` living on the joint support of the two states.
fn rank_on_support(op: &HermitianOperator, support: &HermitianOperator, tol: f64) -> usize {
    herm::rank(&op.sandwich(support), tol)
}

pub fn minimax_two_state_with(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    tolerances: &Tolerances,
) -> Result<MinimaxSolution> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho1.dim(),
            found: rho2.dim(),
        });
    }
    tolerances.validate()?;
    let problem = DiscriminationProblem::new(
        vec![rho1.clone(), rho2.clone()],
        WeightMatrix::error_weights(2),
        tolerances.clone(),
    )?;
    let joint = rho1.op() + rho2.op();
    let support = support_projector(&joint, 1e-10)?;
    let rel_tol = tolerances.kernel_tol;

    // Equalize inside the kernel: B₁ = Π₊ + αK with Tr[(ρ₁+ρ₂)B₁] = 1.
    let kernel_solution = |a: f64, e: &Evaluation| -> Result<(f64, Povm, bool)> {
        let k = &e.parts.kernel;
        let inside = joint.trace_product(&e.parts.positive);
        let denom = joint.trace_product(k);
        let alpha = if denom > 1e-15 {
            ((1.0 - inside) / denom).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let b1 = &e.parts.positive + &k.scale(alpha);
        let b2 = &e.parts.negative + &k.scale(1.0 - alpha);
        let unique = rank_on_support(k, &support, 1e-9) <= 1;
        Ok((a, Povm::new(vec![b1, b2])?, unique))
    };

    let mut iterations = 0;
    let start = evaluate(rho1, rho2, 0.0, rel_tol)?;
    let end = evaluate(rho1, rho2, 1.0, rel_tol)?;
    let (a0, povm, unique) = if start.plus.f >= 0.0 {
        kernel_solution(0.0, &start)?
    } else if end.minus.f <= 0.0 {
        kernel_solution(1.0, &end)?
    } else {
        // invariant: f_plus(lo) < 0 < f_minus(hi)
        let (mut lo, mut hi) = ((0.0, start), (1.0, end));
        let mut found = None;
        while hi.0 - lo.0 > BRACKET_WIDTH {
            iterations += 1;
            let mid = 0.5 * (lo.0 + hi.0);
            let e = evaluate(rho1, rho2, mid, rel_tol)?;
            if e.plus.f < 0.0 {
                lo = (mid, e);
            } else if e.minus.f > 0.0 {
                hi = (mid, e);
            } else {
                found = Some(kernel_solution(mid, &e)?);
                break;
            }
        }
        match found {
            Some(sol) => sol,
            None => {
                // B = (f⁺ P⁽⁻⁾ − f⁻ P⁽⁺⁾) / (f⁺ − f⁻) with one-sided limits at a₀
                let (f_left, f_right) = (lo.1.plus.f, hi.1.minus.f);
                let w_left = f_right / (f_right - f_left);
                let povm = Povm::mixture(
                    &[w_left, 1.0 - w_left],
                    &[&lo.1.plus.povm, &hi.1.minus.povm],
                )?;
                let jump = hi.1.minus.povm.element(0) - lo.1.plus.povm.element(0);
                let unique = rank_on_support(&jump, &support, 0.5) <= 1;
                (0.5 * (lo.0 + hi.0), povm, unique)
            }
        }
    };

    let worst_prior = PriorDistribution::two(a0)?;
    let costs = problem.cost_operators(worst_prior.weights());
    let (reference, _) = helstrom_povm(rho1, rho2, &worst_prior, 1.0, None)?;
    let certificate = best_certificate(
        &costs,
        &[stationary_dual(&costs, &povm), stationary_dual(&costs, &reference)],
        &worst_prior,
    );
    let per_state_risk = problem.per_state_risk(&povm);
    let risk = per_state_risk[0].max(per_state_risk[1]);
    let equalized = imbalance(rho1, rho2, &povm).abs() <= tolerances.equalization_tol;
    Ok(MinimaxSolution {
        sandwich_width: risk - certificate.bound,
        povm,
        risk,
        worst_prior,
        certificate,
        per_state_risk,
        equalized,
        equalization_support: vec![0, 1],
        unique: Some(unique),
        grid_sandwich_width: None,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herm::{Complex64, ComplexVector};

    fn ket(re: &[f64]) -> ComplexVector {
        ComplexVector::from_iterator(re.len(), re.iter().map(|&x| Complex64::new(x, 0.0)))
    }

    #[test]
    fn pure_vs_mixed_solution() {
        let rho1 = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let rho2 = DensityMatrix::maximally_mixed(2);
        let sol = minimax_two_state(&rho1, &rho2).unwrap();
        let p1 = HermitianOperator::from_diagonal(&[2.0 / 3.0, 0.0]);
        let p2 = HermitianOperator::from_diagonal(&[1.0 / 3.0, 1.0]);
        assert!((sol.povm.element(0) - &p1).max_abs() < 1e-6);
        assert!((sol.povm.element(1) - &p2).max_abs() < 1e-6);
        assert!((sol.risk - 1.0 / 3.0).abs() < 1e-9);
        assert!((sol.worst_prior.weights()[0] - 1.0 / 3.0).abs() < 1e-6);
        assert!(sol.equalized);
        assert_eq!(sol.unique, Some(true));
        assert!(sol.sandwich_width.abs() < 1e-9);
    }

    #[test]
    fn orthogonal_states() {
        let rho1 = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let rho2 = DensityMatrix::from_diagonal(&[0.0, 1.0]).unwrap();
        let sol = minimax_two_state(&rho1, &rho2).unwrap();
        assert!(sol.risk.abs() < 1e-12);
        assert!(sol.equalized);
        let p1 = sol.povm.element(0);
        assert!((p1 - &HermitianOperator::from_diagonal(&[1.0, 0.0])).max_abs() < 1e-12);
    }

    #[test]
    fn pure_pair_equal_priors() {
        let c: f64 = 0.6;
        let rho1 = DensityMatrix::pure(&ket(&[1.0, 0.0])).unwrap();
        let rho2 = DensityMatrix::pure(&ket(&[c, (1.0 - c * c).sqrt()])).unwrap();
        let sol = minimax_two_state(&rho1, &rho2).unwrap();
        let success = (1.0 + (1.0 - c * c).sqrt()) / 2.0;
        for s in sol.success_from_error_risk() {
            assert!((s - success).abs() < 1e-9);
        }
        assert!((sol.worst_prior.weights()[0] - 0.5).abs() < 1e-9);
        // orthogonal measurement
        let p = sol.povm.element(0);
        let sq = HermitianOperator::hermitian_part(&(p.matrix() * p.matrix()));
        assert!((&sq - p).max_abs() < 1e-8);
    }

    #[test]
    fn identical_states_are_degenerate() {
        let rho = DensityMatrix::from_diagonal(&[0.6, 0.4]).unwrap();
        let sol = minimax_two_state(&rho, &rho).unwrap();
        assert!((sol.risk - 0.5).abs() < 1e-12);
        assert!(sol.equalized);
        assert_eq!(sol.unique, Some(false));
    }

    #[test]
    fn profile_examples() {
        let a = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let b = DensityMatrix::from_diagonal(&[0.0, 1.0]).unwrap();
        let prof = equalization_profile(&a, &b, 0.1).unwrap();
        for &(x, lo, hi) in &prof.grid {
            if x > 0.0 && x < 1.0 {
                assert!(lo.abs() < 1e-12 && hi.abs() < 1e-12);
            }
        }

        let rho2 = DensityMatrix::maximally_mixed(2);
        let prof = equalization_profile(&a, &rho2, 1.0 / 6.0).unwrap();
        assert!(prof.is_monotone(1e-9) && prof.endpoints_ok());
        for &(x, lo, hi) in &prof.grid {
            if x < 1.0 / 3.0 - 1e-9 {
                assert!(hi < 0.0);
            } else if x > 1.0 / 3.0 + 1e-9 && x < 1.0 {
                assert!((lo - 0.5).abs() < 1e-12 && (hi - 0.5).abs() < 1e-12);
            }
        }
        assert!(equalization_profile(&a, &rho2, 0.0).is_err());
        assert!(equalization_profile(&a, &rho2, 0.7).is_err());
    }
}
