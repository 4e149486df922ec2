//! Dual log-barrier path following for max Tr[Y] subject to Y ≤ Cⱼ.
//!
//! For barrier weight t the centering problem is
//!
//! ```text
//! maximize  t Tr[Y] + Σⱼ log det(Cⱼ − Y)
//! ```
//!
//! whose optimum satisfies Σⱼ Pⱼ = I with Pⱼ = (Cⱼ − Y)⁻¹ / t. Those Pⱼ form
//! a POVM on the central path with duality gap exactly n·d / t. Writing the
//! Newton step as ΔY = W / t gives the well-scaled system
//!
//! ```text
//! Σⱼ Pⱼ W Pⱼ = I − Σⱼ Pⱼ
//! ```
//!
//! whose right-hand side is the completeness residual. Every iterate Y is
//! strictly feasible. After each centering the recovered POVM is normalized
//! and its objective recorded.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::herm::{inverse_pd, is_positive_definite, Complex64, ComplexMatrix, HermitianOperator, Povm};

const CENTERING_DECREMENT: f64 = 1e-18;
const MAX_CENTERING_STEPS: usize = 80;
const BARRIER_GROWTH: f64 = 10.0;
const MAX_BARRIER_WEIGHT: f64 = 1e16;

pub(crate) struct BarrierOutcome {
    /// Normalized POVM recovered at the last centered point.
    pub povm: Option<Povm>,
    /// Strictly feasible Y at the last centered point, in the original scale.
    pub dual: HermitianOperator,
    /// Objective Σ Tr[Cⱼ Pⱼ] of each recovered POVM, in order.
    pub trace: Vec<f64>,
}

/// Runs the path. `stop` sees each recovered POVM with the current Y and
/// returns true once the caller's certified gap is small enough.
pub(crate) fn maximize<F>(costs: &[HermitianOperator], max_newton: usize, mut stop: F) -> BarrierOutcome
where
    F: FnMut(&Povm, &HermitianOperator) -> bool,
{
    let d = costs[0].dim();
    let scale = costs.iter().map(|c| c.max_abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        let n = costs.len() as f64;
        let povm = Povm::new(vec![HermitianOperator::identity(d).scale(1.0 / n); costs.len()]).ok();
        return BarrierOutcome {
            povm,
            dual: HermitianOperator::zeros(d),
            trace: vec![0.0],
        };
    }
    let c: Vec<HermitianOperator> = costs.iter().map(|x| x.scale(1.0 / scale)).collect();
    let floor = c.iter().map(|x| x.min_eigenvalue()).fold(f64::INFINITY, f64::min);
    let mut y = HermitianOperator::identity(d).scale(floor - 1.0);

    let mut t = 1.0;
    let mut newton_steps = 0;
    let mut trace = Vec::new();
    let mut last = None;
    let mut previous: Option<HermitianOperator> = None;
    loop {
        for _ in 0..MAX_CENTERING_STEPS {
            if newton_steps >= max_newton {
                break;
            }
            let Some(p) = primal(&c, &y, t) else { break };
            let Some((w, decrement_sq)) = newton_step(&p) else { break };
            newton_steps += 1;
            if decrement_sq / 2.0 <= CENTERING_DECREMENT {
                break;
            }
            let lambda = decrement_sq.sqrt();
            let mut s = if lambda < 0.25 { 1.0 } else { 1.0 / (1.0 + lambda) };
            let delta = w.scale(1.0 / t);
            let mut moved = false;
            while s > 1e-12 {
                let candidate = &y + &delta.scale(s);
                if c.iter().all(|cj| is_positive_definite(&(cj - &candidate))) {
                    y = candidate;
                    moved = true;
                    break;
                }
                s *= 0.5;
            }
            if !moved {
                break;
            }
        }
        let dual = y.scale(scale);
        if let Some(povm) = primal(&c, &y, t).and_then(|p| Povm::normalized(p).ok()) {
            trace.push(povm.elements().iter().zip(costs).map(|(pj, cj)| pj.trace_product(cj)).sum());
            let done = stop(&povm, &dual);
            last = Some(povm);
            if done {
                break;
            }
        }
        if newton_steps >= max_newton || t >= MAX_BARRIER_WEIGHT {
            break;
        }
        t *= BARRIER_GROWTH;
        // the central path is Y* − K/t to first order
        let guess = previous
            .as_ref()
            .map(|prev| &y + &(&y - prev).scale(1.0 / BARRIER_GROWTH));
        previous = Some(y.clone());
        if let Some(guess) = guess {
            if c.iter().all(|cj| is_positive_definite(&(cj - &guess))) {
                y = guess;
            }
        }
    }
    BarrierOutcome {
        povm: last,
        dual: y.scale(scale),
        trace,
    }
}

/// Pⱼ = (Cⱼ − Y)⁻¹ / t, or `None` if Y has left the interior.
fn primal(c: &[HermitianOperator], y: &HermitianOperator, t: f64) -> Option<Vec<HermitianOperator>> {
    c.iter()
        .map(|cj| inverse_pd(&(cj - y)).map(|inv| inv.scale(1.0 / t)))
        .collect()
}

fn vectorize(m: &ComplexMatrix) -> DVector<Complex64> {
    DVector::from_column_slice(m.as_slice())
}

/// Solves Σⱼ Pⱼ W Pⱼ = I − Σⱼ Pⱼ; returns W and the squared decrement.
fn newton_step(p: &[HermitianOperator]) -> Option<(HermitianOperator, f64)> {
    let d = p[0].dim();
    let mut system = DMatrix::<Complex64>::zeros(d * d, d * d);
    let mut residual = ComplexMatrix::identity(d, d);
    for pj in p {
        let pm = pj.matrix();
        system += pm.transpose().kronecker(pm);
        residual -= pm;
    }
    let b = vectorize(&residual);
    let solution = match Cholesky::new(system.clone()) {
        Some(ch) => ch.solve(&b),
        None => system.lu().solve(&b)?,
    };
    let w = HermitianOperator::hermitian_part(&ComplexMatrix::from_column_slice(d, d, solution.as_slice()));
    let mut decrement_sq = 0.0;
    for pj in p {
        let pw = pj.matrix() * w.matrix();
        decrement_sq += (&pw * &pw).trace().re;
    }
    decrement_sq.is_finite().then_some((w, decrement_sq.max(0.0)))
}
