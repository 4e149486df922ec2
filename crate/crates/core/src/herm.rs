//! Dense complex Hermitian linear algebra.
//!
//! Everything downstream works with [`HermitianOperator`] values: density
//! matrices, POVM elements, dual certificates. Spectral quantities are always
//! consumed through projectors so that the arbitrary basis chosen inside a
//! degenerate eigenspace never leaks into results.

use std::ops::{Add, Mul, Sub};

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Numerical thresholds shared by the validation routines.
pub mod tol {
    /// Allowed ‖M − M†‖ relative to ‖M‖ (max-entry norms).
    pub const HERMITICITY: f64 = 1e-12;
    /// Smallest eigenvalue tolerated for a density matrix.
    pub const DENSITY_EIGENVALUE: f64 = 1e-10;
    pub const DENSITY_TRACE: f64 = 1e-10;
    /// Smallest eigenvalue tolerated for a POVM element.
    pub const POVM_POSITIVITY: f64 = 1e-10;
    /// Allowed ‖Σ P − I‖ for a POVM.
    pub const POVM_COMPLETENESS: f64 = 1e-9;
    /// Relative width of the kernel band used by [`super::signed_parts`].
    pub const KERNEL_RELATIVE: f64 = 1e-9;
    /// Smallest eigenvalue of Σ w μ ρ − Y tolerated in a dual certificate.
    pub const CERTIFICATE_FEASIBILITY: f64 = 1e-8;
    pub const UNITARITY: f64 = 1e-10;
}

/// Largest absolute entry of a matrix.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn check_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// A complex Hermitian matrix. The stored matrix is exactly Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    m: ComplexMatrix,
}

impl HermitianOperator {
    /// Validates hermiticity and stores the exact Hermitian part.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        check_square(&m)?;
        let residual = max_abs(&(&m - m.adjoint()));
        if residual > tol::HERMITICITY * max_abs(&m) {
            return Err(Error::NonHermitian { residual });
        }
        Ok(Self::hermitian_part(&m))
    }

    /// (M + M†)/2, without any check.
    pub fn hermitian_part(m: &ComplexMatrix) -> Self {
        let mut h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        for i in 0..h.nrows() {
            h[(i, i)].im = 0.0;
        }
        Self { m: h }
    }

    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        let m = ComplexMatrix::from_fn(d, d, |i, j| {
            Complex64::new(*rows[i].get(j).unwrap_or(&f64::NAN), 0.0)
        });
        if m.iter().any(|z| z.re.is_nan()) {
            return Err(Error::NotSquare {
                rows: d,
                cols: rows.iter().map(|r| r.len()).min().unwrap_or(0),
            });
        }
        Self::new(m)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: ComplexMatrix::identity(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0)));
        Self {
            m: ComplexMatrix::from_diagonal(&v),
        }
    }

    /// |v⟩⟨v| (no normalization).
    pub fn outer(v: &ComplexVector) -> Self {
        Self::hermitian_part(&(v * v.adjoint()))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.m)
    }

    /// Re Tr[AB]; exact trace of a product of Hermitian matrices.
    pub fn trace_product(&self, other: &HermitianOperator) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                let p = self.m[(i, j)] * other.m[(j, i)];
                acc += p.re;
            }
        }
        acc
    }

    /// ⟨v|A|v⟩.
    pub fn expectation(&self, v: &ComplexVector) -> f64 {
        (v.adjoint() * &self.m * v)[(0, 0)].re
    }

    /// U A U†.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self::hermitian_part(&(u * &self.m * u.adjoint()))
    }

    /// X A X for Hermitian X.
    pub fn sandwich(&self, x: &HermitianOperator) -> Self {
        Self::hermitian_part(&(&x.m * &self.m * &x.m))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            m: &self.m * Complex64::new(s, 0.0),
        }
    }

    pub fn shift(&self, s: f64) -> Self {
        let mut m = self.m.clone();
        for i in 0..self.dim() {
            m[(i, i)].re += s;
        }
        Self { m }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigenvalues(self).last().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        eigenvalues(self).first().copied().unwrap_or(0.0)
    }

    /// Weighted sum Σ cₖ Aₖ of operators of a common dimension.
    pub fn linear_combination<'a, I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (f64, &'a HermitianOperator)>,
    {
        let mut m = ComplexMatrix::zeros(dim, dim);
        for (c, a) in terms {
            if c != 0.0 {
                m += &a.m * Complex64::new(c, 0.0);
            }
        }
        Self { m }
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: Self) -> HermitianOperator {
        HermitianOperator { m: &self.m + &rhs.m }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: Self) -> HermitianOperator {
        HermitianOperator { m: &self.m - &rhs.m }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scale(rhs)
    }
}

/// Eigenvalues sorted descending, eigenvectors as matching columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> ComplexVector {
        self.eigenvectors.column(k).into_owned()
    }

    /// Σ f(λₖ) |vₖ⟩⟨vₖ|.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> HermitianOperator {
        let d = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let s = Complex64::new(f(lambda), 0.0);
            for i in 0..d {
                scaled[(i, k)] *= s;
            }
        }
        HermitianOperator::hermitian_part(&(scaled * self.eigenvectors.adjoint()))
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.map(|x| x)
    }

    /// Projector onto the eigenvectors whose eigenvalue satisfies `keep`.
    pub fn projector<F: Fn(f64) -> bool>(&self, keep: F) -> HermitianOperator {
        self.map(|x| if keep(x) { 1.0 } else { 0.0 })
    }
}

pub fn eig_hermitian(m: &HermitianOperator) -> SpectralDecomposition {
    let d = m.dim();
    let eig = m.m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(d, d, |i, k| eig.eigenvectors[(i, order[k])]);
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Eigenvalues only, descending.
pub fn eigenvalues(m: &HermitianOperator) -> Vec<f64> {
    let mut ev: Vec<f64> = m.m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

pub fn trace_norm(m: &HermitianOperator) -> f64 {
    eigenvalues(m).iter().map(|x| x.abs()).sum()
}

/// Default kernel band for [`signed_parts`]: 1e-9 · max(1, ‖m‖).
pub fn default_kernel_tol(m: &HermitianOperator) -> f64 {
    tol::KERNEL_RELATIVE * m.max_abs().max(1.0)
}

/// Projectors onto the strictly positive part, the kernel band and the
/// strictly negative part of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct SignedParts {
    pub positive: HermitianOperator,
    pub kernel: HermitianOperator,
    pub negative: HermitianOperator,
    /// Rank of `kernel`.
    pub kernel_dim: usize,
}

pub fn signed_parts(m: &HermitianOperator, kernel_tol: f64) -> SignedParts {
    let spec = eig_hermitian(m);
    let kernel_dim = spec
        .eigenvalues
        .iter()
        .filter(|x| x.abs() <= kernel_tol)
        .count();
    SignedParts {
        positive: spec.projector(|x| x > kernel_tol),
        kernel: spec.projector(|x| x.abs() <= kernel_tol),
        negative: spec.projector(|x| x < -kernel_tol),
        kernel_dim,
    }
}

/// Projector onto the span of eigenvectors with eigenvalue above `tol`.
pub fn support_projector(m: &HermitianOperator, tol: f64) -> Result<HermitianOperator> {
    let spec = eig_hermitian(m);
    let min = spec.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -tol {
        return Err(Error::NegativeOperator {
            min_eigenvalue: min,
        });
    }
    Ok(spec.projector(|x| x > tol))
}

/// Number of eigenvalues above `tol`.
pub fn rank(m: &HermitianOperator, tol: f64) -> usize {
    eigenvalues(m).iter().filter(|&&x| x > tol).count()
}

/// A^{1/2} for positive semidefinite A; negative eigenvalues are clipped.
pub fn psd_sqrt(m: &HermitianOperator) -> HermitianOperator {
    eig_hermitian(m).map(|x| x.max(0.0).sqrt())
}

/// A^{-1/2} for positive definite A, or `None` when the smallest eigenvalue
/// is not above `floor`.
pub fn inverse_sqrt(m: &HermitianOperator, floor: f64) -> Option<HermitianOperator> {
    let spec = eig_hermitian(m);
    if spec.eigenvalues.last().copied().unwrap_or(0.0) <= floor {
        return None;
    }
    Some(spec.map(|x| 1.0 / x.sqrt()))
}

/// Lower-triangular L with L L† = A and positive real diagonal, or `None`
/// if A is not positive definite.
pub fn cholesky(m: &HermitianOperator) -> Option<ComplexMatrix> {
    let a = m.matrix();
    let d = a.nrows();
    let mut l = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        let mut pivot = a[(j, j)].re;
        for k in 0..j {
            pivot -= l[(j, k)].norm_sqr();
        }
        if pivot.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return None;
        }
        let root = pivot.sqrt();
        l[(j, j)] = Complex64::new(root, 0.0);
        for i in j + 1..d {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / root;
        }
    }
    Some(l)
}

pub fn is_positive_definite(m: &HermitianOperator) -> bool {
    cholesky(m).is_some()
}

/// A⁻¹ for positive definite A.
pub fn inverse_pd(m: &HermitianOperator) -> Option<HermitianOperator> {
    let l = cholesky(m)?;
    let d = l.nrows();
    let l_inv = l.solve_lower_triangular(&ComplexMatrix::identity(d, d))?;
    Some(HermitianOperator::hermitian_part(&(l_inv.adjoint() * l_inv)))
}

/// Max-entry distance between U U† and the identity.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    let d = u.nrows();
    max_abs(&(u * u.adjoint() - ComplexMatrix::identity(d, d)))
}

/// A trace-one positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let trace = op.trace();
        let min_eigenvalue = op.min_eigenvalue();
        if min_eigenvalue < -tol::DENSITY_EIGENVALUE || (trace - 1.0).abs() > tol::DENSITY_TRACE
        {
            return Err(Error::InvalidDensityMatrix {
                min_eigenvalue,
                trace,
            });
        }
        Ok(Self { op })
    }

    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(m)?)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_diagonal(diag))
    }

    /// |ψ⟩⟨ψ| / ⟨ψ|ψ⟩.
    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        let n2 = psi.norm_squared();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::InvalidDensityMatrix {
                min_eigenvalue: 0.0,
                trace: n2,
            });
        }
        Self::new(HermitianOperator::outer(psi).scale(1.0 / n2))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: HermitianOperator::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    /// U ρ U†.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self {
            op: self.op.conjugate_by(u),
        }
    }

    /// Tr[ρ P].
    pub fn probability(&self, effect: &HermitianOperator) -> f64 {
        self.op.trace_product(effect)
    }
}

/// An ordered list of positive semidefinite operators summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<HermitianOperator>,
    dim: usize,
}

impl Povm {
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let povm = Self::new_unchecked(elements)?;
        let completeness = povm.completeness_residual();
        let min_eigenvalue = povm.min_eigenvalue();
        if completeness > tol::POVM_COMPLETENESS || min_eigenvalue < -tol::POVM_POSITIVITY {
            return Err(Error::InvalidPovm {
                completeness,
                min_eigenvalue,
            });
        }
        Ok(povm)
    }

    /// Only checks shapes; callers take responsibility for the POVM invariants.
    pub fn new_unchecked(elements: Vec<HermitianOperator>) -> Result<Self> {
        let dim = elements
            .first()
            .map(|e| e.dim())
            .ok_or_else(|| Error::InvalidProblem("POVM has no elements".into()))?;
        if let Some(bad) = elements.iter().find(|e| e.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { elements, dim })
    }

    /// Rescales S^{-1/2} Pⱼ S^{-1/2} with S = Σ Pⱼ so that completeness holds
    /// to rounding.
    pub fn normalized(elements: Vec<HermitianOperator>) -> Result<Self> {
        let povm = Self::new_unchecked(elements)?;
        let total = povm.sum();
        let inv = inverse_sqrt(&total, 0.0).ok_or(Error::InvalidPovm {
            completeness: povm.completeness_residual(),
            min_eigenvalue: total.min_eigenvalue(),
        })?;
        Self::new(povm.elements.iter().map(|p| p.sandwich(&inv)).collect())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn element(&self, j: usize) -> &HermitianOperator {
        &self.elements[j]
    }

    pub fn into_elements(self) -> Vec<HermitianOperator> {
        self.elements
    }

    pub fn sum(&self) -> HermitianOperator {
        HermitianOperator::linear_combination(self.dim, self.elements.iter().map(|p| (1.0, p)))
    }

    /// ‖Σ Pⱼ − I‖ (max-entry norm).
    pub fn completeness_residual(&self) -> f64 {
        self.sum().shift(-1.0).max_abs()
    }

    /// Smallest eigenvalue across all elements.
    pub fn min_eigenvalue(&self) -> f64 {
        self.elements
            .iter()
            .map(|p| p.min_eigenvalue())
            .fold(f64::INFINITY, f64::min)
    }

    /// Outcome probabilities Tr[ρ Pⱼ].
    pub fn probabilities(&self, rho: &DensityMatrix) -> Vec<f64> {
        self.elements.iter().map(|p| rho.probability(p)).collect()
    }

    /// Convex combination Σₖ cₖ Povmₖ of POVMs with the same shape.
    pub fn mixture(weights: &[f64], povms: &[&Povm]) -> Result<Self> {
        let first = povms
            .first()
            .ok_or_else(|| Error::InvalidProblem("empty POVM mixture".into()))?;
        let (n, dim) = (first.len(), first.dim());
        for p in povms {
            if p.len() != n || p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
        }
        let elements = (0..n)
            .map(|j| {
                HermitianOperator::linear_combination(
                    dim,
                    weights.iter().zip(povms).map(|(&c, p)| (c, p.element(j))),
                )
            })
            .collect();
        Self::new(elements)
    }
}
