//! Problem, solution and report documents.
//!
//! Complex numbers are `[re, im]` pairs; a matrix is a list of rows.

use anyhow::{bail, ensure, Context, Result};
use qdisc::{
    Complex64, ComplexMatrix, ComplexVector, DensityMatrix, DiscriminationProblem, HermitianOperator, Povm,
    PriorDistribution, PureStateSet, Tolerances, WeightMatrix,
};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";

pub type Complex = [f64; 2];
pub type Matrix = Vec<Vec<Complex>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Bayes,
    Minimax,
    Unambiguous,
    Covariant,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum State {
    Matrix(Matrix),
    Vector(Vec<Complex>),
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equalization_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simplex_grid_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
}

impl ToleranceOverrides {
    pub fn apply(&self, base: Tolerances) -> Tolerances {
        Tolerances {
            kernel_tol: self.kernel_tol.unwrap_or(base.kernel_tol),
            gap_tol: self.gap_tol.unwrap_or(base.gap_tol),
            equalization_tol: self.equalization_tol.unwrap_or(base.equalization_tol),
            simplex_grid_step: self.simplex_grid_step.or(base.simplex_grid_step),
            max_iterations: self.max_iterations.unwrap_or(base.max_iterations),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema_version: String,
    pub mode: Mode,
    pub states: Vec<State>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Vec<Matrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub y: Matrix,
    pub prior: Vec<f64>,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefinedDoc {
    pub povm: Vec<Matrix>,
    pub success_per_state: Vec<f64>,
    pub endpoint_is_canonical: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleDoc {
    pub schema_version: String,
    pub primal_bound: f64,
    pub dual_bound: f64,
    pub sandwich_width: f64,
    pub samples: usize,
    pub seed: u64,
    pub grid_step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_povm: Option<Vec<Matrix>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub schema_version: String,
    pub mode: Mode,
    /// False when the solver stopped short of its tolerance.
    pub converged: bool,
    pub povm: Vec<Matrix>,
    pub success_per_state: Vec<f64>,
    /// Bayes risk at `prior` (bayes) or worst-case risk (minimax, covariant).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub risk: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_state_risk: Option<Vec<f64>>,
    /// The given prior (bayes) or the least favorable one (minimax, covariant).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateDoc>,
    /// risk − certificate bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equalized: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equalization_support: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unique: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refined: Option<RefinedDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleDoc>,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents always serialize")
}

fn complex(z: &Complex) -> Complex64 {
    Complex64::new(z[0], z[1])
}

pub fn matrix_from_doc(m: &Matrix) -> Result<ComplexMatrix> {
    let d = m.len();
    ensure!(d > 0, "empty matrix");
    for (r, row) in m.iter().enumerate() {
        ensure!(row.len() == d, "matrix row {r} has {} entries, expected {d}", row.len());
    }
    Ok(ComplexMatrix::from_fn(d, d, |i, j| complex(&m[i][j])))
}

pub fn matrix_to_doc(m: &ComplexMatrix) -> Matrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn vector_from_doc(v: &[Complex]) -> ComplexVector {
    ComplexVector::from_iterator(v.len(), v.iter().map(complex))
}

pub fn povm_to_doc(povm: &Povm) -> Vec<Matrix> {
    povm.elements().iter().map(|p| matrix_to_doc(p.matrix())).collect()
}

pub fn operators_from_doc(elements: &[Matrix]) -> Result<Vec<HermitianOperator>> {
    elements
        .iter()
        .enumerate()
        .map(|(k, m)| HermitianOperator::new(matrix_from_doc(m)?).with_context(|| format!("element {k}")))
        .collect()
}

fn density(state: &State, index: usize) -> Result<DensityMatrix> {
    let rho = match state {
        State::Matrix(m) => DensityMatrix::from_matrix(matrix_from_doc(m)?),
        State::Vector(v) => DensityMatrix::pure(&vector_from_doc(v)),
    };
    rho.with_context(|| format!("state {index}"))
}

/// A problem file turned into solver inputs.
pub enum Problem {
    Discrimination {
        problem: DiscriminationProblem,
        prior: Option<PriorDistribution>,
    },
    Unambiguous(PureStateSet),
    Covariant {
        seed: DensityMatrix,
        group: Vec<ComplexMatrix>,
        /// The orbit Uᵢ ρ₀ Uᵢ† with error weights.
        problem: DiscriminationProblem,
    },
}

impl ProblemFile {
    pub fn to_problem(&self, tolerances: Tolerances) -> Result<Problem> {
        ensure!(
            self.schema_version == SCHEMA_VERSION,
            "unsupported schema_version {:?}, expected {SCHEMA_VERSION:?}",
            self.schema_version
        );
        if self.prior.is_some() && self.mode != Mode::Bayes {
            bail!("prior is only allowed in bayes mode");
        }
        if self.group.is_some() && self.mode != Mode::Covariant {
            bail!("group is only allowed in covariant mode");
        }
        if self.weights.is_some() && !matches!(self.mode, Mode::Bayes | Mode::Minimax) {
            bail!("weights are only allowed in bayes and minimax modes");
        }
        match self.mode {
            Mode::Bayes | Mode::Minimax => {
                let states = self
                    .states
                    .iter()
                    .enumerate()
                    .map(|(i, s)| density(s, i))
                    .collect::<Result<Vec<_>>>()?;
                let n = states.len();
                let weights = match &self.weights {
                    Some(rows) => WeightMatrix::new(rows.clone())?,
                    None => WeightMatrix::error_weights(n),
                };
                let problem = DiscriminationProblem::new(states, weights, tolerances)?;
                let prior = match (&self.prior, self.mode) {
                    (Some(p), _) => Some(PriorDistribution::new(p.clone())?),
                    (None, Mode::Bayes) => Some(PriorDistribution::uniform(n)),
                    (None, _) => None,
                };
                if let Some(p) = &prior {
                    problem.check_prior(p)?;
                }
                Ok(Problem::Discrimination { problem, prior })
            }
            Mode::Unambiguous => {
                let vectors = self
                    .states
                    .iter()
                    .enumerate()
                    .map(|(i, s)| match s {
                        State::Vector(v) => Ok(vector_from_doc(v)),
                        State::Matrix(_) => bail!("state {i}: unambiguous mode takes pure-state vectors"),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Problem::Unambiguous(PureStateSet::new(vectors)?))
            }
            Mode::Covariant => {
                ensure!(
                    self.states.len() == 1,
                    "covariant mode takes exactly one seed state, got {}",
                    self.states.len()
                );
                let seed = density(&self.states[0], 0)?;
                let group = self
                    .group
                    .as_ref()
                    .context("covariant mode needs a group")?
                    .iter()
                    .map(matrix_from_doc)
                    .collect::<Result<Vec<_>>>()?;
                let orbit = group.iter().map(|u| seed.conjugate_by(u)).collect();
                let problem = DiscriminationProblem::new(orbit, WeightMatrix::error_weights(group.len()), tolerances)?;
                Ok(Problem::Covariant { seed, group, problem })
            }
        }
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances.clone().unwrap_or_default().apply(Tolerances::default())
    }
}
