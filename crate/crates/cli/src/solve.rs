use std::fmt::Write as _;

use anyhow::Result;
use qdisc::minimax::{minimax_covariant_with, minimax_two_state_with};
use qdisc::{
    bayes_risk_n, brute_force_minimax, dual_basis, helstrom_two_state, minimax_n, refine, unambiguous_minimax,
    BayesSolution, DiscriminationProblem, Error, MinimaxSolution, OracleReport, PriorDistribution,
};

use crate::schema::{
    matrix_to_doc, povm_to_doc, CertificateDoc, Mode, OracleDoc, Problem, RefinedDoc, SolutionFile, SCHEMA_VERSION,
};

/// Solver failure that still produced a usable partial answer.
pub struct Partial(pub SolutionFile, pub String);

pub enum Outcome {
    Solved(SolutionFile),
    Unconverged(Partial),
}

fn certificate_doc(cert: &qdisc::DualCertificate) -> CertificateDoc {
    CertificateDoc {
        y: matrix_to_doc(cert.y.matrix()),
        prior: cert.prior.weights().to_vec(),
        bound: cert.bound,
    }
}

fn blank(mode: Mode, converged: bool) -> SolutionFile {
    SolutionFile {
        schema_version: SCHEMA_VERSION.into(),
        mode,
        converged,
        povm: Vec::new(),
        success_per_state: Vec::new(),
        risk: None,
        per_state_risk: None,
        prior: None,
        certificate: None,
        gap: None,
        equalized: None,
        equalization_support: None,
        unique: None,
        kappa: None,
        witnesses: None,
        refined: None,
        oracle: None,
    }
}

fn from_bayes(sol: &BayesSolution, problem: &DiscriminationProblem, converged: bool) -> SolutionFile {
    SolutionFile {
        povm: povm_to_doc(&sol.povm),
        success_per_state: sol.success_per_state.clone(),
        risk: Some(sol.risk),
        per_state_risk: Some(problem.per_state_risk(&sol.povm)),
        prior: Some(sol.prior.weights().to_vec()),
        certificate: Some(certificate_doc(&sol.certificate)),
        gap: Some(sol.gap),
        ..blank(Mode::Bayes, converged)
    }
}

fn from_minimax(mode: Mode, sol: &MinimaxSolution, problem: &DiscriminationProblem, converged: bool) -> SolutionFile {
    let success = problem
        .states()
        .iter()
        .zip(sol.povm.elements())
        .map(|(rho, p)| rho.probability(p))
        .collect();
    SolutionFile {
        povm: povm_to_doc(&sol.povm),
        success_per_state: success,
        risk: Some(sol.risk),
        per_state_risk: Some(sol.per_state_risk.clone()),
        prior: Some(sol.worst_prior.weights().to_vec()),
        certificate: Some(certificate_doc(&sol.certificate)),
        gap: Some(sol.sandwich_width),
        equalized: Some(sol.equalized),
        equalization_support: Some(sol.equalization_support.clone()),
        unique: sol.unique,
        ..blank(mode, converged)
    }
}

pub fn oracle_doc(report: &OracleReport, grid_step: f64, with_povm: bool) -> OracleDoc {
    OracleDoc {
        schema_version: SCHEMA_VERSION.into(),
        primal_bound: report.primal_bound,
        dual_bound: report.dual_bound,
        sandwich_width: report.sandwich_width,
        samples: report.samples,
        seed: report.seed,
        grid_step,
        best_povm: with_povm.then(|| report.best_povm.as_ref().map(povm_to_doc)).flatten(),
    }
}

fn minimax_outcome(
    mode: Mode,
    result: qdisc::Result<MinimaxSolution>,
    problem: &DiscriminationProblem,
) -> Result<Outcome> {
    match result {
        Ok(sol) => Ok(Outcome::Solved(from_minimax(mode, &sol, problem, true))),
        Err(Error::MinimaxConvergence { width, partial }) => Ok(Outcome::Unconverged(Partial(
            from_minimax(mode, &partial, problem, false),
            format!("minimax sandwich width {width:e} above tolerance"),
        ))),
        Err(e) => Err(e.into()),
    }
}

pub struct OracleRequest {
    pub samples: usize,
    pub seed: u64,
    pub grid_step: f64,
}

pub fn solve(problem: &Problem, oracle: Option<&OracleRequest>) -> Result<Outcome> {
    let mut outcome = match problem {
        Problem::Discrimination { problem, prior: Some(prior) } => solve_bayes(problem, prior)?,
        Problem::Discrimination { problem, prior: None } => {
            let result = if problem.n() == 2 && problem.weights().is_error_weights() {
                let s = problem.states();
                minimax_two_state_with(&s[0], &s[1], &problem.tolerances)
            } else {
                minimax_n(problem)
            };
            minimax_outcome(Mode::Minimax, result, problem)?
        }
        Problem::Covariant { seed, group, problem } => minimax_outcome(
            Mode::Covariant,
            minimax_covariant_with(seed, group, &problem.tolerances),
            problem,
        )?,
        Problem::Unambiguous(states) => {
            let sol = unambiguous_minimax(states)?;
            let refined = (!sol.unique).then(|| {
                let r = refine(&sol, &dual_basis(states).expect("set was validated"));
                RefinedDoc {
                    povm: povm_to_doc(&r.povm),
                    success_per_state: r.success_per_state,
                    endpoint_is_canonical: r.endpoint_is_canonical,
                }
            });
            Outcome::Solved(SolutionFile {
                povm: povm_to_doc(&sol.povm),
                success_per_state: sol.success_per_state.clone(),
                unique: Some(sol.unique),
                kappa: Some(sol.kappa),
                witnesses: Some(sol.witnesses.clone()),
                refined,
                ..blank(Mode::Unambiguous, true)
            })
        }
    };
    if let (Some(req), Some(target)) = (oracle, discrimination_problem(problem)) {
        if req.samples > 0 {
            let report = brute_force_minimax(target, req.samples, req.grid_step, req.seed, &[])?;
            let doc = Some(oracle_doc(&report, req.grid_step, false));
            match &mut outcome {
                Outcome::Solved(s) | Outcome::Unconverged(Partial(s, _)) => s.oracle = doc,
            }
        }
    }
    Ok(outcome)
}

fn solve_bayes(problem: &DiscriminationProblem, prior: &PriorDistribution) -> Result<Outcome> {
    let result = if problem.n() == 2 && problem.weights().is_error_weights() {
        let s = problem.states();
        helstrom_two_state(&s[0], &s[1], prior)
    } else {
        bayes_risk_n(problem, prior)
    };
    match result {
        Ok(sol) => Ok(Outcome::Solved(from_bayes(&sol, problem, true))),
        Err(Error::BayesConvergence { best_gap, partial }) => Ok(Outcome::Unconverged(Partial(
            from_bayes(&partial, problem, false),
            format!("Bayes gap {best_gap:e} above tolerance"),
        ))),
        Err(e) => Err(e.into()),
    }
}

pub fn discrimination_problem(problem: &Problem) -> Option<&DiscriminationProblem> {
    match problem {
        Problem::Discrimination { problem, .. } | Problem::Covariant { problem, .. } => Some(problem),
        Problem::Unambiguous(_) => None,
    }
}

fn list(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|x| format!("{x:.10}")).collect();
    format!("[{}]", parts.join(", "))
}

pub fn render_text(sol: &SolutionFile) -> String {
    let mut out = String::new();
    let mode = serde_json::to_value(sol.mode).expect("mode serializes");
    let _ = writeln!(out, "mode: {}", mode.as_str().unwrap_or("?"));
    let _ = writeln!(out, "converged: {}", sol.converged);
    if let Some(r) = sol.risk {
        let _ = writeln!(out, "risk: {r:.12}");
    }
    if let Some(g) = sol.gap {
        let _ = writeln!(out, "certified gap: {g:.3e}");
    }
    if let Some(p) = &sol.prior {
        let label = if sol.mode == Mode::Bayes { "prior" } else { "worst prior" };
        let _ = writeln!(out, "{label}: {}", list(p));
    }
    if let Some(r) = &sol.per_state_risk {
        let _ = writeln!(out, "per-state risk: {}", list(r));
    }
    let _ = writeln!(out, "success per state: {}", list(&sol.success_per_state));
    if let Some(e) = sol.equalized {
        let _ = writeln!(out, "equalized: {e}");
    }
    if let Some(k) = sol.kappa {
        let _ = writeln!(out, "kappa: {k:.12}");
    }
    if let Some(u) = sol.unique {
        let _ = writeln!(out, "unique: {u}");
    }
    if let Some(w) = &sol.witnesses {
        if !w.is_empty() {
            let _ = writeln!(out, "witnesses: {w:?}");
        }
    }
    if let Some(r) = &sol.refined {
        let _ = writeln!(out, "refined success per state: {}", list(&r.success_per_state));
    }
    if let Some(o) = &sol.oracle {
        let _ = writeln!(out, "oracle sandwich: [{:.10}, {:.10}]", o.dual_bound, o.primal_bound);
    }
    for (j, p) in sol.povm.iter().enumerate() {
        let _ = writeln!(out, "P{}:", j + 1);
        for row in p {
            let cells: Vec<String> = row.iter().map(|z| format!("{:+.8}{:+.8}i", z[0], z[1])).collect();
            let _ = writeln!(out, "  {}", cells.join("  "));
        }
    }
    out
}
