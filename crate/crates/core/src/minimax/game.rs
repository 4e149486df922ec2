//! The finite matrix game between a mixture of collected POVMs and the
//! choice of state. Column k of the payoff table holds the per-state risks of
//! POVM k.

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};

/// min over mixtures λ of maxᵢ Σₖ λₖ Rᵢₖ. Returns (λ, value).
pub(crate) fn best_mixture(risks: &[Vec<f64>]) -> Result<(Vec<f64>, f64)> {
    let n = risks[0].len();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let delta = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    let lambda: Vec<_> = risks.iter().map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    for i in 0..n {
        let mut row: Vec<_> = lambda.iter().zip(risks).map(|(&v, r)| (v, r[i])).collect();
        row.push((delta, -1.0));
        lp.add_constraint(row.as_slice(), ComparisonOp::Le, 0.0);
    }
    let ones: Vec<_> = lambda.iter().map(|&v| (v, 1.0)).collect();
    lp.add_constraint(ones.as_slice(), ComparisonOp::Eq, 1.0);
    let solution = lp
        .solve()
        .map_err(|e| Error::LinearProgram(e.to_string()))?
        .into_solution()
        .map_err(|_| Error::LinearProgram("interrupted".into()))?;
    let weights: Vec<f64> = lambda.iter().map(|&v| solution.var_value(v).max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    Ok((weights.iter().map(|w| w / total).collect(), solution.objective()))
}

/// max over priors a of minₖ Σᵢ aᵢ Rᵢₖ: the cutting-plane model of the
/// concave Bayes-risk function. Returns (a, value).
pub(crate) fn model_maximizer(risks: &[Vec<f64>]) -> Result<(Vec<f64>, f64)> {
    let n = risks[0].len();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let value = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    let prior: Vec<_> = (0..n).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    for r in risks {
        let mut row: Vec<_> = prior.iter().zip(r).map(|(&v, &x)| (v, -x)).collect();
        row.push((value, 1.0));
        lp.add_constraint(row.as_slice(), ComparisonOp::Le, 0.0);
    }
    let ones: Vec<_> = prior.iter().map(|&v| (v, 1.0)).collect();
    lp.add_constraint(ones.as_slice(), ComparisonOp::Eq, 1.0);
    let solution = lp
        .solve()
        .map_err(|e| Error::LinearProgram(e.to_string()))?
        .into_solution()
        .map_err(|_| Error::LinearProgram("interrupted".into()))?;
    let a: Vec<f64> = prior.iter().map(|&v| solution.var_value(v).max(0.0)).collect();
    let total: f64 = a.iter().sum();
    Ok((a.iter().map(|x| x / total).collect(), solution.objective()))
}
