//! Minimax unambiguous discrimination of linearly independent pure states.
//!
//! Unambiguity forces Pᵢ = κᵢ|ωᵢ⟩⟨ωᵢ| with {ωᵢ} the dual basis of the states,
//! and the inconclusive element is P_{N+1} = I − Σᵢ Pᵢ.

use nalgebra::Cholesky;

use crate::error::{Error, Result};
use crate::herm::{eig_hermitian, Complex64, ComplexMatrix, ComplexVector, HermitianOperator, Povm};

const NORM_TOL: f64 = 1e-12;
const DEFAULT_INDEPENDENCE_TOL: f64 = 1e-8;
const SUPPORT_RELATIVE_TOL: f64 = 1e-9;
const MEMBERSHIP_TOL: f64 = 1e-7;
const FEASIBILITY_TOL: f64 = 1e-12;
const CANONICAL_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct PureStateSet {
    vectors: Vec<ComplexVector>,
    gram: ComplexMatrix,
    independence_tol: f64,
}

impl PureStateSet {
    pub fn new(vectors: Vec<ComplexVector>) -> Result<Self> {
        Self::with_independence_tol(vectors, DEFAULT_INDEPENDENCE_TOL)
    }

    pub fn with_independence_tol(vectors: Vec<ComplexVector>, independence_tol: f64) -> Result<Self> {
        let dim = vectors
            .first()
            .map(|v| v.len())
            .ok_or_else(|| Error::InvalidProblem("no states".into()))?;
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            let norm = v.norm();
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::NotNormalized { index, norm });
            }
        }
        let n = vectors.len();
        let gram = ComplexMatrix::from_fn(n, n, |i, j| vectors[i].dotc(&vectors[j]));
        let min = eig_hermitian(&HermitianOperator::hermitian_part(&gram))
            .eigenvalues
            .last()
            .copied()
            .unwrap_or(0.0);
        if n > dim || min <= independence_tol {
            return Err(Error::LinearlyDependent {
                min_gram_eigenvalue: if n > dim { 0.0 } else { min },
            });
        }
        Ok(Self {
            vectors,
            gram,
            independence_tol,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn vectors(&self) -> &[ComplexVector] {
        &self.vectors
    }

    /// ⟨ψᵢ|ψⱼ⟩.
    pub fn gram(&self) -> &ComplexMatrix {
        &self.gram
    }

    pub fn independence_tol(&self) -> f64 {
        self.independence_tol
    }
}

/// Vectors ωᵢ in the span of the states with ⟨ωᵢ|ψⱼ⟩ = δᵢⱼ.
#[derive(Clone, Debug)]
pub struct DualBasis {
    pub vectors: Vec<ComplexVector>,
}

impl DualBasis {
    /// Σᵢ |ωᵢ⟩⟨ωᵢ|.
    pub fn frame_operator(&self) -> HermitianOperator {
        let outers: Vec<HermitianOperator> = self.vectors.iter().map(HermitianOperator::outer).collect();
        HermitianOperator::linear_combination(self.vectors[0].len(), outers.iter().map(|p| (1.0, p)))
    }
}

#[derive(Clone, Debug)]
pub struct UnambiguousSolution {
    /// N conclusive elements followed by the inconclusive one.
    pub povm: Povm,
    /// The common weight of the optimal κ-uniform measurement.
    pub kappa: f64,
    /// Weight κᵢ of each conclusive element Pᵢ = κᵢ|ωᵢ⟩⟨ωᵢ|.
    pub kappas: Vec<f64>,
    /// ⟨ψᵢ|Pᵢ|ψᵢ⟩ = κᵢ.
    pub success_per_state: Vec<f64>,
    pub unique: bool,
    /// States whose dual vector lies in the support of the inconclusive element.
    pub witnesses: Vec<usize>,
    /// Each refinement round: the index set maximized over and the result.
    pub refinement_trace: Vec<(Vec<usize>, Povm)>,
    /// Whether every κᵢ still equals `kappa`, i.e. the refinement ended at
    /// the κ-uniform measurement.
    pub endpoint_is_canonical: bool,
}

pub fn dual_basis(states: &PureStateSet) -> Result<DualBasis> {
    let chol = Cholesky::new(states.gram.clone()).ok_or(Error::LinearlyDependent {
        min_gram_eigenvalue: 0.0,
    })?;
    let inverse = chol.inverse();
    let n = states.len();
    let vectors = (0..n)
        .map(|i| {
            let mut w = ComplexVector::zeros(states.dim());
            for (j, psi) in states.vectors.iter().enumerate() {
                w += psi * inverse[(j, i)];
            }
            w
        })
        .collect();
    Ok(DualBasis { vectors })
}

fn assemble_povm(dual: &DualBasis, kappas: &[f64]) -> Povm {
    let d = dual.vectors[0].len();
    let mut elements: Vec<HermitianOperator> = dual
        .vectors
        .iter()
        .zip(kappas)
        .map(|(w, &k)| HermitianOperator::outer(w).scale(k))
        .collect();
    let used = HermitianOperator::linear_combination(d, elements.iter().map(|p| (1.0, p)));
    elements.push(&HermitianOperator::identity(d) - &used);
    Povm::new_unchecked(elements).expect("elements share one dimension")
}

fn inconclusive_min_eigenvalue(dual: &DualBasis, kappas: &[f64]) -> f64 {
    let povm = assemble_povm(dual, kappas);
    povm.element(povm.len() - 1).min_eigenvalue()
}

fn witnesses_of(povm: &Povm, dual: &DualBasis, candidates: &[usize]) -> Vec<usize> {
    let rest = povm.element(povm.len() - 1);
    let spec = eig_hermitian(rest);
    let tol = SUPPORT_RELATIVE_TOL * spec.eigenvalues.first().copied().unwrap_or(0.0).abs().max(1.0);
    let support = spec.projector(|x| x > tol);
    candidates
        .iter()
        .copied()
        .filter(|&i| {
            let w = &dual.vectors[i];
            let outside = w - support.matrix() * w;
            outside.norm() <= MEMBERSHIP_TOL * w.norm()
        })
        .collect()
}

fn finish(dual: &DualBasis, kappa: f64, kappas: Vec<f64>, trace: Vec<(Vec<usize>, Povm)>) -> UnambiguousSolution {
    let povm = assemble_povm(dual, &kappas);
    let all: Vec<usize> = (0..kappas.len()).collect();
    let witnesses = witnesses_of(&povm, dual, &all);
    let endpoint_is_canonical = kappas.iter().all(|k| (k - kappa).abs() <= CANONICAL_TOL * kappa.max(1.0));
    UnambiguousSolution {
        povm,
        kappa,
        success_per_state: kappas.clone(),
        kappas,
        unique: witnesses.is_empty(),
        witnesses,
        refinement_trace: trace,
        endpoint_is_canonical,
    }
}

/// The κ-uniform optimal measurement with κ⁻¹ = λmax(Σᵢ|ωᵢ⟩⟨ωᵢ|).
pub fn unambiguous_minimax(states: &PureStateSet) -> Result<UnambiguousSolution> {
    let dual = dual_basis(states)?;
    let kappa = 1.0 / dual.frame_operator().max_eigenvalue();
    Ok(finish(&dual, kappa, vec![kappa; states.len()], Vec::new()))
}

/// Indices i with ωᵢ in the support of the inconclusive element; the
/// solution is unique iff there are none.
pub fn uniqueness_test(solution: &UnambiguousSolution, dual: &DualBasis) -> (bool, Vec<usize>) {
    let all: Vec<usize> = (0..dual.vectors.len()).collect();
    let witnesses = witnesses_of(&solution.povm, dual, &all);
    (witnesses.is_empty(), witnesses)
}

/// Repeatedly maximizes minᵢ∈S ⟨ωᵢ|Pᵢ|ωᵢ⟩ over the witness set S while
/// keeping the inconclusive element positive, then shrinks S to the
/// witnesses that remain.
pub fn refine(solution: &UnambiguousSolution, dual: &DualBasis) -> UnambiguousSolution {
    let norms4: Vec<f64> = dual.vectors.iter().map(|w| w.norm_squared().powi(2)).collect();
    let norms2: Vec<f64> = dual.vectors.iter().map(|w| w.norm_squared()).collect();
    let mut kappas = solution.kappas.clone();
    let mut trace = solution.refinement_trace.clone();
    let (_, mut active) = uniqueness_test(solution, dual);

    while !active.is_empty() {
        let raised = |t: f64, base: &[f64]| -> Vec<f64> {
            let mut k = base.to_vec();
            for &i in &active {
                k[i] = k[i].max(t / norms4[i]);
            }
            k
        };
        let mut lo = active
            .iter()
            .map(|&i| kappas[i] * norms4[i])
            .fold(f64::INFINITY, f64::min);
        let mut hi = active.iter().map(|&i| norms2[i]).fold(f64::INFINITY, f64::min);
        if inconclusive_min_eigenvalue(dual, &raised(hi, &kappas)) >= -FEASIBILITY_TOL {
            lo = hi;
        }
        for _ in 0..200 {
            if hi - lo <= 1e-15 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if inconclusive_min_eigenvalue(dual, &raised(mid, &kappas)) >= -FEASIBILITY_TOL {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        kappas = raised(lo, &kappas);
        let povm = assemble_povm(dual, &kappas);
        trace.push((active.clone(), povm.clone()));

        let mut next = witnesses_of(&povm, dual, &active);
        if next.len() == active.len() {
            // numerically stuck: drop the elements that attain the minimum
            let tight = |i: usize| (kappas[i] * norms4[i] - lo).abs() <= 1e-12 * lo.max(1.0);
            next.retain(|&i| !tight(i));
            if next.len() == active.len() {
                next.clear();
            }
        }
        active = next;
    }
    finish(dual, solution.kappa, kappas, trace)
}

/// Convenience: real amplitudes to a complex vector.
pub fn real_vector(values: &[f64]) -> ComplexVector {
    ComplexVector::from_iterator(values.len(), values.iter().map(|&x| Complex64::new(x, 0.0)))
}
