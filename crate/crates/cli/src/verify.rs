//! Independent re-check of a solution document against its problem.

use anyhow::{ensure, Context, Result};
use qdisc::herm::tol;
use qdisc::{
    check_certificate, dual_basis, DiscriminationProblem, DualCertificate, HermitianOperator, Povm,
    PriorDistribution, PureStateSet,
};
use serde::Serialize;

use crate::schema::{matrix_from_doc, operators_from_doc, Matrix, Mode, Problem, SolutionFile, SCHEMA_VERSION};

const VALUE_TOL: f64 = 1e-9;
const UNAMBIGUITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub limit: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema_version: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    /// Passes when `residual ≤ limit`.
    fn at_most(&mut self, name: impl Into<String>, residual: f64, limit: f64) {
        self.0.push(Check {
            name: name.into(),
            residual,
            limit,
            passed: residual <= limit,
        });
    }

    fn holds(&mut self, name: impl Into<String>, ok: bool) {
        self.at_most(name, if ok { 0.0 } else { 1.0 }, 0.0);
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Shape, hermiticity, positivity and completeness of a claimed POVM.
fn check_povm(checks: &mut Checks, label: &str, elements: &[Matrix], outcomes: usize, dim: usize) -> Option<Povm> {
    checks.at_most(format!("{label}outcome count"), elements.len().abs_diff(outcomes) as f64, 0.0);
    let ops = match operators_from_doc(elements) {
        Ok(ops) => ops,
        Err(_) => {
            checks.holds(format!("{label}hermiticity"), false);
            return None;
        }
    };
    if ops.iter().any(|p| p.dim() != dim) || ops.is_empty() {
        checks.holds(format!("{label}dimension"), false);
        return None;
    }
    let povm = Povm::new_unchecked(ops).ok()?;
    checks.at_most(format!("{label}positivity"), (-povm.min_eigenvalue()).max(0.0), tol::POVM_POSITIVITY);
    checks.at_most(format!("{label}completeness"), povm.completeness_residual(), tol::POVM_COMPLETENESS);
    Some(povm)
}

fn check_risks(checks: &mut Checks, sol: &SolutionFile, problem: &DiscriminationProblem, povm: &Povm) -> Option<f64> {
    let per_state = problem.per_state_risk(povm);
    let success: Vec<f64> = problem
        .states()
        .iter()
        .zip(povm.elements())
        .map(|(rho, p)| rho.probability(p))
        .collect();
    checks.at_most("success per state", max_abs_diff(&success, &sol.success_per_state), VALUE_TOL);
    if let Some(claimed) = &sol.per_state_risk {
        checks.at_most("per-state risk", max_abs_diff(&per_state, claimed), VALUE_TOL);
    }
    let risk = match sol.mode {
        Mode::Bayes => problem.bayes_risk_of(povm, sol.prior.as_deref()?),
        _ => problem.worst_case_risk(povm),
    };
    let claimed = sol.risk.unwrap_or(f64::NAN);
    checks.at_most("risk", (risk - claimed).abs(), VALUE_TOL);
    Some(risk)
}

fn check_certificate_doc(checks: &mut Checks, sol: &SolutionFile, problem: &DiscriminationProblem, risk: f64) {
    let Some(doc) = &sol.certificate else {
        checks.holds("certificate present", false);
        return;
    };
    let parsed = matrix_from_doc(&doc.y)
        .and_then(|y| Ok(HermitianOperator::new(y)?))
        .and_then(|y| Ok((y, PriorDistribution::new(doc.prior.clone())?)));
    let Ok((y, prior)) = parsed else {
        checks.holds("certificate well formed", false);
        return;
    };
    if sol.mode == Mode::Bayes {
        let given = sol.prior.as_deref().unwrap_or(&[]);
        checks.at_most("certificate prior", max_abs_diff(prior.weights(), given), 1e-12);
    }
    if y.dim() != problem.dim() || prior.len() != problem.n() {
        checks.holds("certificate dimension", false);
        return;
    }
    let cert = DualCertificate::new(y, prior);
    let (_, worst) = cert.worst_violation(problem);
    checks.at_most("certificate feasibility", (-worst).max(0.0), tol::CERTIFICATE_FEASIBILITY);
    let bound = match check_certificate(&cert, problem) {
        Ok(b) => b,
        Err(_) => cert.bound,
    };
    checks.at_most("certificate bound", (bound - doc.bound).abs(), VALUE_TOL);
    checks.at_most("duality gap", risk - bound, problem.tolerances.gap_tol);
    if let Some(gap) = sol.gap {
        checks.at_most("claimed gap", (gap - (risk - bound)).abs(), VALUE_TOL);
    }
}

fn check_equalization(checks: &mut Checks, sol: &SolutionFile, problem: &DiscriminationProblem, povm: &Povm) {
    if sol.equalized != Some(true) {
        return;
    }
    let per_state = problem.per_state_risk(povm);
    let support = sol.equalization_support.clone().unwrap_or_else(|| (0..problem.n()).collect());
    if support.iter().any(|&i| i >= problem.n()) {
        checks.holds("equalization support", false);
        return;
    }
    let hi = per_state.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = support.iter().map(|&i| hi - per_state[i]).fold(0.0, f64::max);
    checks.at_most("equalization", spread, problem.tolerances.equalization_tol);
}

fn check_unambiguous(checks: &mut Checks, sol: &SolutionFile, states: &PureStateSet) -> Result<()> {
    let n = states.len();
    let kappa_star = 1.0 / dual_basis(states)?.frame_operator().max_eigenvalue();
    let mut verify_one = |label: &str, elements: &[Matrix], claimed: &[f64]| {
        let Some(povm) = check_povm(checks, label, elements, n + 1, states.dim()) else {
            return;
        };
        let mut cross: f64 = 0.0;
        let mut success = Vec::with_capacity(n);
        for (i, psi) in states.vectors().iter().enumerate() {
            for j in 0..n {
                let p = povm.element(j).expectation(psi);
                if i == j {
                    success.push(p);
                } else {
                    cross = cross.max(p.abs());
                }
            }
        }
        checks.at_most(format!("{label}unambiguity"), cross, UNAMBIGUITY_TOL);
        checks.at_most(format!("{label}success per state"), max_abs_diff(&success, claimed), VALUE_TOL);
        let worst = success.iter().copied().fold(f64::INFINITY, f64::min);
        checks.at_most(format!("{label}minimum success optimal"), (worst - kappa_star).abs(), VALUE_TOL);
    };
    verify_one("", &sol.povm, &sol.success_per_state);
    if let Some(r) = &sol.refined {
        verify_one("refined ", &r.povm, &r.success_per_state);
    }
    let kappa = sol.kappa.unwrap_or(f64::NAN);
    checks.at_most("kappa", (kappa - kappa_star).abs(), VALUE_TOL);
    Ok(())
}

pub fn verify(sol: &SolutionFile, problem: &Problem) -> Result<VerifyReport> {
    ensure!(
        sol.schema_version == SCHEMA_VERSION,
        "unsupported schema_version {:?}",
        sol.schema_version
    );
    let mut checks = Checks::default();
    checks.holds("solver converged", sol.converged);
    match problem {
        Problem::Unambiguous(states) => {
            ensure!(sol.mode == Mode::Unambiguous, "solution mode does not match the problem");
            check_unambiguous(&mut checks, sol, states)?;
        }
        Problem::Discrimination { problem, prior } => {
            let expected = if prior.is_some() { Mode::Bayes } else { Mode::Minimax };
            ensure!(sol.mode == expected, "solution mode does not match the problem");
            if let Some(p) = prior {
                let given = sol.prior.as_deref().context("bayes solution without prior")?;
                checks.at_most("prior", max_abs_diff(p.weights(), given), 1e-12);
            }
            check_discrimination(&mut checks, sol, problem);
        }
        Problem::Covariant { problem, .. } => {
            ensure!(sol.mode == Mode::Covariant, "solution mode does not match the problem");
            check_discrimination(&mut checks, sol, problem);
        }
    }
    let passed = checks.0.iter().all(|c| c.passed);
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION.into(),
        passed,
        checks: checks.0,
    })
}

fn check_discrimination(checks: &mut Checks, sol: &SolutionFile, problem: &DiscriminationProblem) {
    let Some(povm) = check_povm(checks, "", &sol.povm, problem.n(), problem.dim()) else {
        return;
    };
    let Some(risk) = check_risks(checks, sol, problem, &povm) else {
        checks.holds("prior present", false);
        return;
    };
    check_certificate_doc(checks, sol, problem, risk);
    if sol.mode != Mode::Bayes {
        check_equalization(checks, sol, problem, &povm);
    }
}

pub fn render_text(report: &VerifyReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{tag} {}: residual {:.3e} (limit {:.1e})\n", c.name, c.residual, c.limit));
    }
    out.push_str(if report.passed { "verified\n" } else { "verification failed\n" });
    out
}
