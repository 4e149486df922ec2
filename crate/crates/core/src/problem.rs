//! Problem description shared by the Bayesian and minimax solvers.

use crate::error::{Error, Result};
use crate::herm::{DensityMatrix, HermitianOperator, Povm};

const PRIOR_SUM_TOL: f64 = 1e-12;

/// A probability vector over state indices. Also used for the Lagrange
/// multipliers of the minimax program, which live on the same simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct PriorDistribution {
    weights: Vec<f64>,
}

impl PriorDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidPrior("empty prior".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidPrior(format!("negative or non-finite weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > PRIOR_SUM_TOL {
            return Err(Error::InvalidPrior(format!("weights sum to {total}")));
        }
        Ok(Self { weights })
    }

    /// Clips negatives and rescales to unit sum.
    pub fn normalized(weights: &[f64]) -> Result<Self> {
        let clipped: Vec<f64> = weights.iter().map(|w| w.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidPrior(format!("cannot normalize {weights:?}")));
        }
        Ok(Self {
            weights: clipped.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn two(a: f64) -> Result<Self> {
        Self::new(vec![a, 1.0 - a])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Costs wᵢⱼ of declaring state j when state i was prepared.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    w: Vec<f64>,
}

impl WeightMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidWeights("weight matrix must be square".into()));
        }
        let w: Vec<f64> = rows.into_iter().flatten().collect();
        if let Some(x) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidWeights(format!("negative or non-finite weight {x}")));
        }
        Ok(Self { n, w })
    }

    /// wᵢⱼ = 1 − δᵢⱼ: the risk is the error probability.
    pub fn error_weights(n: usize) -> Self {
        let w = (0..n * n)
            .map(|k| if k / n == k % n { 0.0 } else { 1.0 })
            .collect();
        Self { n, w }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.w.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            w: self.w.iter().map(|x| x * s).collect(),
        }
    }

    pub fn is_error_weights(&self) -> bool {
        *self == Self::error_weights(self.n)
    }
}

/// Numerical settings for the Bayesian and minimax solvers.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative kernel band for sign decompositions.
    pub kernel_tol: f64,
    /// Target duality gap for the Bayes solver and sandwich width for minimax.
    pub gap_tol: f64,
    /// Allowed spread of per-state risks on the support of the worst prior.
    pub equalization_tol: f64,
    /// Step of the barycentric prior grid; `None` picks a size-dependent default.
    pub simplex_grid_step: Option<f64>,
    /// Iteration budget of the Bayes solver (Newton steps).
    pub max_iterations: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            kernel_tol: crate::herm::tol::KERNEL_RELATIVE,
            gap_tol: 1e-7,
            equalization_tol: 1e-8,
            simplex_grid_step: None,
            max_iterations: 100_000,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.kernel_tol, self.gap_tol, self.equalization_tol]
            .iter()
            .all(|t| t.is_finite() && *t > 0.0);
        let step_ok = self
            .simplex_grid_step
            .is_none_or(|s| s.is_finite() && s > 0.0 && s <= 0.5);
        if !positive || !step_ok || self.max_iterations == 0 {
            return Err(Error::InvalidProblem(format!("invalid tolerances {self:?}")));
        }
        Ok(())
    }

    /// Grid step actually used for `n` states.
    pub fn grid_step_for(&self, n: usize) -> f64 {
        self.simplex_grid_step.unwrap_or(match n {
            0..=3 => 0.02,
            4 => 0.05,
            5 => 0.1,
            _ => 0.25,
        })
    }
}

/// States, costs and solver settings: the input to every solver.
#[derive(Clone, Debug)]
pub struct DiscriminationProblem {
    states: Vec<DensityMatrix>,
    weights: WeightMatrix,
    pub tolerances: Tolerances,
}

impl DiscriminationProblem {
    pub fn new(
        states: Vec<DensityMatrix>,
        weights: WeightMatrix,
        tolerances: Tolerances,
    ) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::InvalidProblem(format!(
                "need at least two states, got {}",
                states.len()
            )));
        }
        let d = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.dim(),
            });
        }
        if weights.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: states.len(),
                found: weights.len(),
            });
        }
        tolerances.validate()?;
        Ok(Self {
            states,
            weights,
            tolerances,
        })
    }

    /// Error weights and default tolerances.
    pub fn with_error_weights(states: Vec<DensityMatrix>) -> Result<Self> {
        let n = states.len();
        Self::new(states, WeightMatrix::error_weights(n), Tolerances::default())
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn weights(&self) -> &WeightMatrix {
        &self.weights
    }

    pub fn with_weights(&self, weights: WeightMatrix) -> Result<Self> {
        Self::new(self.states.clone(), weights, self.tolerances.clone())
    }

    pub fn check_prior(&self, prior: &PriorDistribution) -> Result<()> {
        if prior.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: prior.len(),
            });
        }
        Ok(())
    }

    pub fn check_povm(&self, povm: &Povm) -> Result<()> {
        if povm.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: povm.len(),
            });
        }
        if povm.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: povm.dim(),
            });
        }
        Ok(())
    }

    /// Cⱼ = Σᵢ wᵢⱼ aᵢ ρᵢ: the operator priced by outcome j.
    pub fn cost_operators(&self, prior: &[f64]) -> Vec<HermitianOperator> {
        let n = self.n();
        (0..n)
            .map(|j| {
                HermitianOperator::linear_combination(
                    self.dim(),
                    (0..n).map(|i| (self.weights.get(i, j) * prior[i], self.states[i].op())),
                )
            })
            .collect()
    }

    /// Table of Tr[ρᵢ Pⱼ].
    pub fn probability_table(&self, povm: &Povm) -> Vec<Vec<f64>> {
        self.states.iter().map(|rho| povm.probabilities(rho)).collect()
    }

    /// Σⱼ wᵢⱼ Tr[ρᵢ Pⱼ] for every i.
    pub fn per_state_risk(&self, povm: &Povm) -> Vec<f64> {
        self.probability_table(povm)
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, p)| self.weights.get(i, j) * p)
                    .sum()
            })
            .collect()
    }

    /// Σᵢ aᵢ Σⱼ wᵢⱼ Tr[ρᵢ Pⱼ].
    pub fn bayes_risk_of(&self, povm: &Povm, prior: &[f64]) -> f64 {
        self.per_state_risk(povm)
            .iter()
            .zip(prior)
            .map(|(r, a)| r * a)
            .sum()
    }

    /// maxᵢ Σⱼ wᵢⱼ Tr[ρᵢ Pⱼ].
    pub fn worst_case_risk(&self, povm: &Povm) -> f64 {
        self.per_state_risk(povm)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Barycentric grid {k/m : Σk = m} on the n-simplex with m = round(1/step),
/// in lexicographic order of the integer compositions.
pub fn simplex_grid(n: usize, step: f64) -> Vec<Vec<f64>> {
    let m = (1.0 / step).round().max(1.0) as usize;
    let mut out = Vec::new();
    let mut current = vec![0usize; n];
    fn rec(pos: usize, left: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        let n = cur.len();
        if pos == n - 1 {
            cur[pos] = left;
            out.push(cur.iter().map(|&k| k as f64 / m as f64).collect());
            return;
        }
        for k in 0..=left {
            cur[pos] = k;
            rec(pos + 1, left - k, m, cur, out);
        }
    }
    if n > 0 {
        rec(0, m, m, &mut current, &mut out);
    }
    out
}
