//! N-state minimax through the least favorable prior.
//!
//! Every Bayes solve at a prior a contributes two things: a certified lower
//! bound on r_B(a), hence on the minimax value, and the per-state risk vector
//! R of its POVM, a linear upper cut a ↦ a·R on r_B. The best mixture of the
//! collected POVMs is the upper end of the sandwich; new priors come from the
//! maximizer of the piecewise-linear model minₖ a·Rₖ.

use rayon::prelude::*;

use crate::bayes::{solve_bayes, solve_bayes_to, BayesSolution};
use crate::error::{Error, Result};
use crate::herm::Povm;
use crate::problem::{simplex_grid, DiscriminationProblem, PriorDistribution};

use super::game::{best_mixture, model_maximizer};
use super::MinimaxSolution;

const MAX_REFINEMENTS: usize = 400;
const SUPPORT_TOL: f64 = 1e-9;
const MIXTURE_WEIGHT_FLOOR: f64 = 1e-12;
const ZOOM_LEVELS: usize = 2;
/// Gap target for grid solves, which only screen for the worst prior.
const SCREENING_GAP: f64 = 1e-6;

/// Points per side of a local grid.
fn zoom_radius(n: usize) -> i64 {
    if n <= 3 {
        10
    } else {
        4
    }
}

/// Each level spans two spacings of the previous one on either side.
fn zoom_step(n: usize, coarse: f64, pool: &Pool) -> f64 {
    let r = zoom_radius(n) as f64;
    coarse * (2.0 / r).powi(pool.zoom + 1)
}

/// Priors center + h·z for integer z with Σz = 0 and |zᵢ| ≤ radius on the
/// first n − 1 coordinates, in lexicographic order of z.
fn local_grid(center: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = center.len();
    let r = zoom_radius(n);
    let mut out = Vec::new();
    let mut z = vec![-r; n - 1];
    loop {
        let last = -z.iter().sum::<i64>();
        let a: Vec<f64> = z
            .iter()
            .chain(std::iter::once(&last))
            .zip(center)
            .map(|(&k, &c)| c + h * k as f64)
            .collect();
        if a.iter().all(|&x| x >= 0.0) {
            out.push(a);
        }
        let mut pos = n - 1;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if z[pos] < r {
                z[pos] += 1;
                for later in z.iter_mut().skip(pos + 1) {
                    *later = -r;
                }
                break;
            }
        }
    }
}

struct Pool {
    povms: Vec<Povm>,
    cuts: Vec<Vec<f64>>,
    best: Option<BayesSolution>,
    solves: usize,
    zoom: i32,
}

impl Pool {
    fn add(&mut self, problem: &DiscriminationProblem, solution: BayesSolution) {
        self.solves += 1;
        self.cuts.push(problem.per_state_risk(&solution.povm));
        self.povms.push(solution.povm.clone());
        let better = self
            .best
            .as_ref()
            .is_none_or(|b| solution.certificate.bound > b.certificate.bound);
        if better {
            self.best = Some(solution);
        }
    }

    /// Best mixture of the collected POVMs and its recomputed worst-case risk.
    fn mixture(&self, problem: &DiscriminationProblem) -> Result<(Povm, f64)> {
        let (lambda, _) = best_mixture(&self.cuts)?;
        let kept: Vec<usize> = (0..lambda.len())
            .filter(|&k| lambda[k] > MIXTURE_WEIGHT_FLOOR)
            .collect();
        let total: f64 = kept.iter().map(|&k| lambda[k]).sum();
        let weights: Vec<f64> = kept.iter().map(|&k| lambda[k] / total).collect();
        let parts: Vec<&Povm> = kept.iter().map(|&k| &self.povms[k]).collect();
        let povm = Povm::mixture(&weights, &parts)?;
        let risk = problem.worst_case_risk(&povm);
        Ok((povm, risk))
    }

    fn lower(&self) -> f64 {
        self.best.as_ref().map_or(f64::NEG_INFINITY, |b| b.certificate.bound)
    }
}

pub fn minimax_n(problem: &DiscriminationProblem) -> Result<MinimaxSolution> {
    let n = problem.n();
    let tolerances = &problem.tolerances;
    tolerances.validate()?;
    let step = tolerances.grid_step_for(n);
    let screen = SCREENING_GAP.max(0.01 * tolerances.gap_tol);
    let grid = simplex_grid(n, step);
    let solved = grid
        .par_iter()
        .map(|a| solve_bayes_to(problem, &PriorDistribution::normalized(a)?, screen))
        .collect::<Result<Vec<_>>>()?;

    let mut pool = Pool {
        povms: Vec::new(),
        cuts: Vec::new(),
        best: None,
        solves: 0,
        zoom: 0,
    };
    for s in solved {
        pool.add(problem, s);
    }
    for _ in 0..ZOOM_LEVELS {
        let center = pool.best.as_ref().expect("grid is never empty").prior.weights().to_vec();
        let zoomed = local_grid(&center, zoom_step(n, step, &pool))
            .par_iter()
            .map(|a| solve_bayes_to(problem, &PriorDistribution::normalized(a)?, screen))
            .collect::<Result<Vec<_>>>()?;
        for s in zoomed {
            pool.add(problem, s);
        }
        pool.zoom += 1;
    }
    let grid_lower = pool.lower();

    let mut mixed = pool.mixture(problem)?;
    for _ in 0..MAX_REFINEMENTS {
        if mixed.1 - pool.lower() <= tolerances.gap_tol {
            break;
        }
        let (a, _) = model_maximizer(&pool.cuts)?;
        let prior = PriorDistribution::normalized(&a)?;
        pool.add(problem, solve_bayes(problem, &prior)?);
        mixed = pool.mixture(problem)?;
    }
    let (povm, _) = mixed;
    let (support_prior, _) = model_maximizer(&pool.cuts)?;

    let per_state_risk = problem.per_state_risk(&povm);
    let risk = per_state_risk.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let support: Vec<usize> = (0..n).filter(|&i| support_prior[i] > SUPPORT_TOL).collect();
    let equalized = support
        .iter()
        .all(|&i| risk - per_state_risk[i] <= tolerances.equalization_tol);
    let best = pool.best.take().expect("grid is never empty");
    let solution = MinimaxSolution {
        sandwich_width: risk - best.certificate.bound,
        povm,
        risk,
        worst_prior: best.prior,
        certificate: best.certificate,
        per_state_risk,
        equalized,
        equalization_support: support,
        unique: None,
        grid_sandwich_width: Some(risk - grid_lower),
        iterations: pool.solves,
    };
    if solution.sandwich_width > tolerances.gap_tol {
        return Err(Error::MinimaxConvergence {
            width: solution.sandwich_width,
            partial: Box::new(solution),
        });
    }
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herm::{Complex64, ComplexVector, DensityMatrix};

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
    fn trine_value() {
        let problem = DiscriminationProblem::with_error_weights(trine()).unwrap();
        let sol = minimax_n(&problem).unwrap();
        assert!((sol.risk - 1.0 / 3.0).abs() < 1e-6);
        for a in sol.worst_prior.weights() {
            assert!((a - 1.0 / 3.0).abs() < 1e-3);
        }
        assert!(sol.equalized);
        assert!(sol.grid_sandwich_width.unwrap() <= 1e-3);
    }

    #[test]
    fn identical_states() {
        let rho = DensityMatrix::from_diagonal(&[0.5, 0.5]).unwrap();
        let problem = DiscriminationProblem::with_error_weights(vec![rho.clone(), rho.clone(), rho]).unwrap();
        let sol = minimax_n(&problem).unwrap();
        assert!((sol.risk - 2.0 / 3.0).abs() < 1e-7);
    }

    #[test]
    fn pure_vs_mixed_as_n_state() {
        let problem = DiscriminationProblem::with_error_weights(vec![
            DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap(),
            DensityMatrix::maximally_mixed(2),
        ])
        .unwrap();
        let sol = minimax_n(&problem).unwrap();
        assert!((sol.risk - 1.0 / 3.0).abs() < 1e-7);
        assert!(sol.equalized);
    }
}
