//! Minimax discrimination: minimize maxᵢ Σⱼ wᵢⱼ Tr[ρᵢ Pⱼ] without a prior.
//!
//! The minimax value equals the Bayes risk at the least favorable prior, and
//! an optimal measurement is a Bayes-optimal one (or a mixture of them) whose
//! per-state risks are equal on the support of that prior.

mod covariant;
mod game;
mod n_state;
mod two_state;

pub use covariant::{covariantize, minimax_covariant, minimax_covariant_with};
pub use n_state::minimax_n;
pub use two_state::{
    equalization_profile, minimax_two_state, minimax_two_state_with, EqualizationProfile,
};

use crate::bayes::DualCertificate;
use crate::herm::Povm;
use crate::problem::PriorDistribution;

#[derive(Clone, Debug)]
pub struct MinimaxSolution {
    pub povm: Povm,
    /// maxᵢ of `per_state_risk`.
    pub risk: f64,
    pub worst_prior: PriorDistribution,
    /// Certificate of the Bayes problem at `worst_prior`.
    pub certificate: DualCertificate,
    /// Σⱼ wᵢⱼ Tr[ρᵢ Pⱼ] for each state.
    pub per_state_risk: Vec<f64>,
    pub equalized: bool,
    /// States over which `equalized` was judged.
    pub equalization_support: Vec<usize>,
    /// `Some(false)` when another optimal measurement is known to exist;
    /// `None` when uniqueness was not decided.
    pub unique: Option<bool>,
    /// risk − certificate.bound.
    pub sandwich_width: f64,
    /// risk − best certified bound found on the prior grid, before
    /// refinement.
    pub grid_sandwich_width: Option<f64>,
    /// Bayes subproblems solved (or bisection steps for two states).
    pub iterations: usize,
}

impl MinimaxSolution {
    /// Success probabilities Tr[ρᵢ Pᵢ] assuming error weights.
    pub fn success_from_error_risk(&self) -> Vec<f64> {
        self.per_state_risk.iter().map(|r| 1.0 - r).collect()
    }
}
