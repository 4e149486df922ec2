use thiserror::Error;

use crate::bayes::BayesSolution;
use crate::minimax::MinimaxSolution;

/// Errors raised by the discrimination solvers and their input validation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NonHermitian { residual: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a density matrix (min eigenvalue {min_eigenvalue:e}, trace {trace})")]
    InvalidDensityMatrix { min_eigenvalue: f64, trace: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NegativeOperator { min_eigenvalue: f64 },

    #[error(
        "not a POVM (completeness residual {completeness:e}, min eigenvalue {min_eigenvalue:e})"
    )]
    InvalidPovm {
        completeness: f64,
        min_eigenvalue: f64,
    },

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("infeasible certificate: outcome {outcome} violated by {violation:e}")]
    InfeasibleCertificate { outcome: usize, violation: f64 },

    #[error("Bayes solver did not reach the gap tolerance (best gap {best_gap:e})")]
    BayesConvergence {
        best_gap: f64,
        partial: Box<BayesSolution>,
    },

    #[error("minimax solver did not close the duality sandwich (best width {width:e})")]
    MinimaxConvergence {
        width: f64,
        partial: Box<MinimaxSolution>,
    },

    #[error("states are linearly dependent (min Gram eigenvalue {min_gram_eigenvalue:e})")]
    LinearlyDependent { min_gram_eigenvalue: f64 },

    #[error("state vector {index} is not normalized (norm {norm})")]
    NotNormalized { index: usize, norm: f64 },

    #[error("representation element {index} is not unitary (residual {residual:e})")]
    NonUnitaryRep { index: usize, residual: f64 },

    #[error("representation is not closed under composition (product of {0} and {1})")]
    NotAGroup(usize, usize),

    #[error("random POVM normalizer stayed singular after {attempts} draws")]
    SingularNormalizer { attempts: usize },

    #[error("state {0} is not diagonal in the standard basis")]
    NotDiagonal(usize),

    #[error("exhaustive grid too large ({0})")]
    ProblemTooLarge(String),

    #[error("linear program failed: {0}")]
    LinearProgram(String),
}

pub type Result<T> = std::result::Result<T, Error>;
