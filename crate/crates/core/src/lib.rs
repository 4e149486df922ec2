//! Optimal discrimination of finite sets of quantum states.
//!
//! Three criteria are supported:
//!
//! - **Bayesian**: minimize the expected cost Σᵢ aᵢ Σⱼ wᵢⱼ Tr[ρᵢ Pⱼ] for a
//!   given prior ([`bayes`]).
//! - **Minimax**: minimize the worst-case cost maxᵢ Σⱼ wᵢⱼ Tr[ρᵢ Pⱼ] with no
//!   prior, via the least favorable prior ([`minimax`]).
//! - **Unambiguous**: never err on linearly independent pure states, and
//!   maximize the smallest success probability ([`unambiguous`]).
//!
//! Every minimum-error answer comes with a dual certificate: a Hermitian Y
//! with Y ≤ Σᵢ wᵢⱼ μᵢ ρᵢ for all j, so that Tr[Y] is a checkable lower bound
//! on the optimal risk. The [`oracle`] module gives independent brute-force
//! bounds used to cross-check the solvers.

pub mod bayes;
pub mod error;
pub mod herm;
pub mod minimax;
pub mod oracle;
pub mod problem;
pub mod random;
pub mod unambiguous;

pub use bayes::{bayes_risk_n, check_certificate, helstrom_two_state, BayesSolution, DualCertificate};
pub use error::{Error, Result};
pub use herm::{
    eig_hermitian, signed_parts, support_projector, trace_norm, Complex64, ComplexMatrix,
    ComplexVector, DensityMatrix, HermitianOperator, Povm, SpectralDecomposition,
};
pub use minimax::{
    covariantize, equalization_profile, minimax_covariant, minimax_n, minimax_two_state,
    EqualizationProfile, MinimaxSolution,
};
pub use oracle::{brute_force_minimax, diagonal_exhaustive, sample_povm, OracleReport};
pub use problem::{DiscriminationProblem, PriorDistribution, Tolerances, WeightMatrix};
pub use unambiguous::{
    dual_basis, refine, unambiguous_minimax, uniqueness_test, DualBasis, PureStateSet,
    UnambiguousSolution,
};
