//! Brute-force bounds that do not share code paths with the solvers:
//! random POVM sampling for upper bounds and prior grids for lower bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bayes::DualCertificate;
use crate::error::{Error, Result};
use crate::herm::{inverse_sqrt, HermitianOperator, Povm};
use crate::problem::{simplex_grid, DiscriminationProblem, PriorDistribution};
use crate::random;

const MAX_RESAMPLES: usize = 10;
const NORMALIZER_FLOOR: f64 = 1e-12;
const DIAGONAL_TOL: f64 = 1e-12;
const MAX_DIAGONAL_DIMENSIONS: usize = 6;
const MAX_DIAGONAL_POINTS: usize = 50_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    /// Best worst-case risk among the POVMs examined.
    pub primal_bound: f64,
    /// Best certified lower bound over the prior grid.
    pub dual_bound: f64,
    pub sandwich_width: f64,
    pub samples: usize,
    pub seed: u64,
    /// POVM attaining `primal_bound`.
    pub best_povm: Option<Povm>,
}

impl OracleReport {
    fn new(primal_bound: f64, dual_bound: f64, samples: usize, seed: u64, best_povm: Option<Povm>) -> Self {
        Self {
            primal_bound,
            dual_bound,
            sandwich_width: primal_bound - dual_bound,
            samples,
            seed,
            best_povm,
        }
    }

    pub fn contains(&self, value: f64, slack: f64) -> bool {
        self.dual_bound - slack <= value && value <= self.primal_bound + slack
    }
}

/// Random POVM Pᵢ = S^{-1/2}AᵢS^{-1/2} with Aᵢ = GᵢGᵢ† for Gaussian d×kᵢ
/// factors Gᵢ of uniformly drawn rank kᵢ.
pub fn sample_povm(dim: usize, n_outcomes: usize, seed: u64) -> Result<Povm> {
    sample_povm_with_rng(dim, n_outcomes, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn sample_povm_with_rng<R: Rng + ?Sized>(dim: usize, n_outcomes: usize, rng: &mut R) -> Result<Povm> {
    if dim == 0 || n_outcomes < 2 {
        return Err(Error::InvalidProblem(format!(
            "cannot sample {n_outcomes} outcomes in dimension {dim}"
        )));
    }
    for _ in 0..MAX_RESAMPLES {
        let factors: Vec<HermitianOperator> = (0..n_outcomes)
            .map(|_| {
                let rank = rng.random_range(1..=dim);
                let g = random::ginibre(dim, rank, rng);
                HermitianOperator::hermitian_part(&(&g * g.adjoint()))
            })
            .collect();
        if let Ok(povm) = normalize_factors(factors) {
            return Ok(povm);
        }
    }
    Err(Error::SingularNormalizer {
        attempts: MAX_RESAMPLES,
    })
}

fn normalize_factors(factors: Vec<HermitianOperator>) -> Result<Povm> {
    let dim = factors[0].dim();
    let total = HermitianOperator::linear_combination(dim, factors.iter().map(|a| (1.0, a)));
    let scale = total.max_eigenvalue().max(f64::MIN_POSITIVE);
    let inv = inverse_sqrt(&total, NORMALIZER_FLOOR * scale).ok_or(Error::SingularNormalizer { attempts: 1 })?;
    Povm::new(factors.iter().map(|a| a.sandwich(&inv)).collect())
}

/// POVMs every run examines: uniform guessing and each deterministic guess.
fn baseline_povms(n: usize, dim: usize) -> Vec<Povm> {
    let mut out = vec![Povm::new(vec![HermitianOperator::identity(dim).scale(1.0 / n as f64); n])
        .expect("uniform guess is a POVM")];
    for j in 0..n {
        let elements = (0..n)
            .map(|k| {
                if k == j {
                    HermitianOperator::identity(dim)
                } else {
                    HermitianOperator::zeros(dim)
                }
            })
            .collect();
        out.push(Povm::new(elements).expect("deterministic guess is a POVM"));
    }
    out
}

fn feasible_bound(costs: &[HermitianOperator], y: &HermitianOperator, prior: &PriorDistribution) -> f64 {
    let worst = costs
        .iter()
        .map(|c| (c - y).min_eigenvalue())
        .fold(f64::INFINITY, f64::min);
    DualCertificate::new(y.shift(worst.min(0.0)), prior.clone()).bound
}

/// Sandwich from `n_samples` seeded random POVMs plus `candidates` (upper
/// side) and a barycentric prior grid (lower side).
pub fn brute_force_minimax(
    problem: &DiscriminationProblem,
    n_samples: usize,
    grid_step: f64,
    seed: u64,
    candidates: &[Povm],
) -> Result<OracleReport> {
    if n_samples == 0 {
        return Err(Error::InvalidProblem("need at least one sample".into()));
    }
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(Error::InvalidProblem(format!("grid step {grid_step} outside (0, 1]")));
    }
    let (n, dim) = (problem.n(), problem.dim());
    for c in candidates {
        problem.check_povm(c)?;
    }
    let sampled = (0..n_samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            sample_povm_with_rng(dim, n, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut pool = baseline_povms(n, dim);
    pool.extend_from_slice(candidates);
    pool.extend(sampled);
    let risks: Vec<Vec<f64>> = pool.par_iter().map(|p| problem.per_state_risk(p)).collect();

    let (best, primal) = risks
        .iter()
        .map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, v)| if v < acc.1 { (k, v) } else { acc });

    let dual = simplex_grid(n, grid_step)
        .par_iter()
        .map(|a| {
            let prior = PriorDistribution::normalized(a).expect("grid points are probability vectors");
            let costs = problem.cost_operators(prior.weights());
            let (k, _) = risks
                .iter()
                .map(|r| r.iter().zip(prior.weights()).map(|(x, w)| x * w).sum::<f64>())
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (k, v)| if v < acc.1 { (k, v) } else { acc });
            let mut stationary = crate::herm::ComplexMatrix::zeros(dim, dim);
            for (c, p) in costs.iter().zip(pool[k].elements()) {
                stationary += c.matrix() * p.matrix();
            }
            let floor = costs.iter().map(|c| c.min_eigenvalue()).fold(f64::INFINITY, f64::min);
            let scalar = HermitianOperator::identity(dim).scale(floor);
            feasible_bound(&costs, &HermitianOperator::hermitian_part(&stationary), &prior)
                .max(feasible_bound(&costs, &scalar, &prior))
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);

    Ok(OracleReport::new(primal, dual, n_samples, seed, Some(pool.swap_remove(best))))
}

/// Exhaustive search over diagonal POVMs on a grid, for problems whose states
/// are all diagonal. The lower side uses Y = diag(minⱼ Cⱼ[k,k]), which is
/// optimal for diagonal problems at each grid prior.
pub fn diagonal_exhaustive(problem: &DiscriminationProblem, grid_step: f64) -> Result<OracleReport> {
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(Error::InvalidProblem(format!("grid step {grid_step} outside (0, 1]")));
    }
    let (n, dim) = (problem.n(), problem.dim());
    let mut diagonals = Vec::with_capacity(n);
    for (i, rho) in problem.states().iter().enumerate() {
        let m = rho.matrix();
        for r in 0..dim {
            for c in 0..dim {
                if r != c && m[(r, c)].norm() > DIAGONAL_TOL {
                    return Err(Error::NotDiagonal(i));
                }
            }
        }
        diagonals.push((0..dim).map(|k| m[(k, k)].re).collect::<Vec<f64>>());
    }
    if dim * n > MAX_DIAGONAL_DIMENSIONS {
        return Err(Error::ProblemTooLarge(format!(
            "{dim}×{n} diagonal entries exceed {MAX_DIAGONAL_DIMENSIONS}"
        )));
    }
    let columns = simplex_grid(n, grid_step);
    let total = (columns.len() as f64).powi(dim as i32);
    if total > MAX_DIAGONAL_POINTS as f64 {
        return Err(Error::ProblemTooLarge(format!("{total} grid points")));
    }
    let total = total as usize;

    // contribution[k][c][i]: risk of state i from basis index k when the
    // outcome probabilities at k are columns[c]
    let contribution: Vec<Vec<Vec<f64>>> = (0..dim)
        .map(|k| {
            columns
                .iter()
                .map(|col| {
                    (0..n)
                        .map(|i| {
                            let w: f64 = (0..n).map(|j| problem.weights().get(i, j) * col[j]).sum();
                            diagonals[i][k] * w
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let base = columns.len();
    let (best_index, primal) = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut risk = vec![0.0; n];
            for row in &contribution {
                let c = idx % base;
                idx /= base;
                for (r, x) in risk.iter_mut().zip(&row[c]) {
                    *r += x;
                }
            }
            risk.into_iter().fold(f64::NEG_INFINITY, f64::max)
        })
        .enumerate()
        .reduce(
            || (usize::MAX, f64::INFINITY),
            |a, b| if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a },
        );

    let mut idx = best_index;
    let mut entries = vec![vec![0.0; dim]; n];
    for k in 0..dim {
        let col = &columns[idx % base];
        idx /= base;
        for (entry, &x) in entries.iter_mut().zip(col) {
            entry[k] = x;
        }
    }
    let best_povm = Povm::new(entries.iter().map(|e| HermitianOperator::from_diagonal(e)).collect())?;

    let dual = simplex_grid(n, grid_step)
        .iter()
        .map(|a| {
            (0..dim)
                .map(|k| {
                    (0..n)
                        .map(|j| (0..n).map(|i| problem.weights().get(i, j) * a[i] * diagonals[i][k]).sum::<f64>())
                        .fold(f64::INFINITY, f64::min)
                })
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(OracleReport::new(primal, dual, total, 0, Some(best_povm)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herm::DensityMatrix;

    fn pure_vs_mixed() -> DiscriminationProblem {
        DiscriminationProblem::with_error_weights(vec![
            DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap(),
            DensityMatrix::maximally_mixed(2),
        ])
        .unwrap()
    }

    #[test]
    fn sampled_povms_are_valid_and_seeded() {
        for seed in 0..20 {
            let p = sample_povm(2, 2, seed).unwrap();
            assert!(p.completeness_residual() <= 1e-9);
            assert!(p.min_eigenvalue() >= -1e-10);
            assert_eq!(p, sample_povm(2, 2, seed).unwrap());
        }
        assert_ne!(sample_povm(3, 4, 1).unwrap(), sample_povm(3, 4, 2).unwrap());
        assert!(sample_povm(2, 1, 0).is_err());
    }

    #[test]
    fn identical_factors_give_uniform_povm() {
        let a = HermitianOperator::from_diagonal(&[2.0, 0.5]);
        let p = normalize_factors(vec![a.clone(), a.clone(), a]).unwrap();
        for e in p.elements() {
            assert!((e - &HermitianOperator::identity(2).scale(1.0 / 3.0)).max_abs() < 1e-14);
        }
    }

    #[test]
    fn pure_vs_mixed_sandwich() {
        let report = brute_force_minimax(&pure_vs_mixed(), 10_000, 1e-3, 7, &[]).unwrap();
        assert!(report.contains(1.0 / 3.0, 0.0));
        assert!(report.sandwich_width <= 0.02);
        assert!(report.primal_bound <= 1.0 / 3.0 + 0.01, "{report:?}");
        assert_eq!(report, brute_force_minimax(&pure_vs_mixed(), 10_000, 1e-3, 7, &[]).unwrap());
    }

    #[test]
    fn trivial_sandwiches() {
        let a = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let b = DensityMatrix::from_diagonal(&[0.0, 1.0]).unwrap();
        let ortho = DiscriminationProblem::with_error_weights(vec![a.clone(), b]).unwrap();
        let r = brute_force_minimax(&ortho, 2000, 0.01, 1, &[]).unwrap();
        assert!(r.dual_bound.abs() < 1e-12 && r.primal_bound < 0.05);

        let same = DiscriminationProblem::with_error_weights(vec![a.clone(), a]).unwrap();
        let r = brute_force_minimax(&same, 100, 0.01, 1, &[]).unwrap();
        assert!((r.primal_bound - 0.5).abs() < 1e-6 && (r.dual_bound - 0.5).abs() < 1e-6);
    }

    #[test]
    fn diagonal_examples() {
        let report = diagonal_exhaustive(&pure_vs_mixed(), 1.0 / 300.0).unwrap();
        assert!((report.primal_bound - 1.0 / 3.0).abs() <= 1.0 / 300.0);
        assert!(report.dual_bound <= report.primal_bound + 1e-9);
        let best = report.best_povm.unwrap();
        assert!((best.element(0) - &HermitianOperator::from_diagonal(&[2.0 / 3.0, 0.0])).max_abs() < 0.01);

        let a = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let b = DensityMatrix::from_diagonal(&[0.0, 1.0]).unwrap();
        let ortho = DiscriminationProblem::with_error_weights(vec![a.clone(), b]).unwrap();
        assert_eq!(diagonal_exhaustive(&ortho, 0.1).unwrap().primal_bound, 0.0);
        let same = DiscriminationProblem::with_error_weights(vec![a.clone(), a]).unwrap();
        let r = diagonal_exhaustive(&same, 0.1).unwrap();
        assert!((r.primal_bound - 0.5).abs() < 1e-12 && (r.dual_bound - 0.5).abs() < 1e-12);
    }

    #[test]
    fn diagonal_rejections() {
        let big = DiscriminationProblem::with_error_weights(vec![DensityMatrix::maximally_mixed(4); 2]).unwrap();
        assert!(matches!(diagonal_exhaustive(&big, 0.1), Err(Error::ProblemTooLarge(_))));
        let plus = DensityMatrix::from_matrix(
            crate::herm::ComplexMatrix::from_element(2, 2, crate::herm::Complex64::new(0.5, 0.0)),
        )
        .unwrap();
        let p = DiscriminationProblem::with_error_weights(vec![DensityMatrix::maximally_mixed(2), plus]).unwrap();
        assert!(matches!(diagonal_exhaustive(&p, 0.1), Err(Error::NotDiagonal(1))));
    }
}
