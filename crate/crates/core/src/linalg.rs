//! Finite-dimensional Hermitian linear algebra: operators, states, measurements.
//!
//! Matrices are dense `nalgebra` matrices of `Complex<f64>`. The newtypes in
//! this module carry the validity invariants (Hermitian, positive, unit
//! trace, sub-normalized measurement) so that downstream code never has to
//! re-check them.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;

/// Frobenius-relative Hermiticity tolerance.
pub const EPS_HERM: f64 = 1e-9;
/// Eigenvalues down to `-EPS_EIG` are treated as zero; also the trace tolerance of states.
pub const EPS_EIG: f64 = 1e-10;
/// Eigenvalues below this are outside the support.
pub const EPS_SUPP: f64 = 1e-10;

#[inline]
pub(crate) fn c(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// `-x log2 x` with the `0 log 0 = 0` convention; `x` is clipped to `[0, 1]`.
#[inline]
pub fn entropy_term(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    if x <= 0.0 {
        0.0
    } else {
        -x * libm::log2(x)
    }
}

/// Shannon entropy in bits of a list of weights.
pub fn shannon_entropy(weights: &[f64]) -> f64 {
    weights.iter().map(|&w| entropy_term(w)).sum()
}

fn asymmetry(m: &ComplexMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

fn check_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::InvalidParameter("zero-dimensional operator".into()));
    }
    Ok(m.nrows())
}

/// Real part of `tr(a b)` computed without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Kronecker product of the operators, in list order.
pub fn tensor_product(ops: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = ops.split_first().ok_or(Error::EmptyList)?;
    Ok(rest.iter().fold(first.clone(), |acc, m| acc.kronecker(m)))
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// One-dimensional, diagonal and 2x2 inputs take closed-form paths; this is
/// the hot loop of every entropy evaluation in the rate-region optimizer.
pub(crate) fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.nrows();
    let mut values = if n == 1 {
        alloc::vec![m[(0, 0)].re]
    } else if is_diagonal(m) {
        (0..n).map(|i| m[(i, i)].re).collect()
    } else if n == 2 {
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = m[(0, 1)];
        let half_trace = 0.5 * (a + d);
        let half_gap = 0.5 * (a - d);
        let radius = libm::sqrt(half_gap * half_gap + b.norm_sqr());
        alloc::vec![half_trace - radius, half_trace + radius]
    } else {
        m.clone().symmetric_eigenvalues().iter().copied().collect()
    };
    values.sort_by(f64::total_cmp);
    values
}

fn is_diagonal(m: &ComplexMatrix) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == C64::new(0.0, 0.0)))
}

/// Von Neumann entropy of a matrix assumed to be a state (no validation).
pub(crate) fn entropy_of_state_matrix(m: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(m).into_iter().map(entropy_term).sum()
}

/// Spectral decomposition with eigenvalues ascending and eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_values(|x| x).into_matrix()
    }

    /// Applies `f` to the spectrum: `V diag(f(λ)) V†`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let fx = f(lambda);
            for i in 0..n {
                scaled[(i, j)] *= fx;
            }
        }
        HermitianOperator::from_raw(&scaled * self.vectors.adjoint())
    }
}

/// A Hermitian operator, stored exactly Hermitian (the input's Hermitian part).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let asym = asymmetry(&matrix);
        if asym > EPS_HERM * matrix.norm().max(1.0) {
            return Err(Error::NonHermitian { asymmetry: asym });
        }
        Ok(Self::from_raw(matrix))
    }

    /// Symmetrizes without checking; for matrices Hermitian by construction.
    pub(crate) fn from_raw(matrix: ComplexMatrix) -> Self {
        Self {
            matrix: hermitian_part(&matrix),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        Self {
            matrix: ComplexMatrix::from_fn(n, n, |i, j| if i == j { c(entries[i]) } else { c(0.0) }),
        }
    }

    /// Rank-one projector onto the normalized span of `vector`.
    pub fn projector(vector: &[C64]) -> Result<Self> {
        let norm_sq: f64 = vector.iter().map(|z| z.norm_sqr()).sum();
        if vector.is_empty() || norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(Error::InvalidState {
                reason: "projector vector must be nonzero and finite".into(),
            });
        }
        let n = vector.len();
        let matrix = ComplexMatrix::from_fn(n, n, |i, j| vector[i] * vector[j].conj() / norm_sq);
        Ok(Self::from_raw(matrix))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigensystem(&self) -> Eigensystem {
        hermitian_eigensystem(self)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    fn checked_spectrum(&self) -> Result<Eigensystem> {
        let eig = self.eigensystem();
        if let Some(&lowest) = eig.values.first() {
            if lowest < -EPS_EIG {
                return Err(Error::NegativeOperator { eigenvalue: lowest });
            }
        }
        Ok(eig)
    }

    /// Square root on the support; eigenvalues below `EPS_SUPP` map to zero.
    pub fn sqrt_on_support(&self) -> Result<Self> {
        let eig = self.checked_spectrum()?;
        Ok(eig.map_values(|x| if x < EPS_SUPP { 0.0 } else { libm::sqrt(x) }))
    }

    /// Pseudo-inverse square root: `λ^{-1/2}` on the support, zero elsewhere.
    pub fn inv_sqrt_on_support(&self) -> Result<Self> {
        let eig = self.checked_spectrum()?;
        Ok(eig.map_values(|x| if x < EPS_SUPP { 0.0 } else { 1.0 / libm::sqrt(x) }))
    }

    /// Orthogonal projector onto the span of eigenvectors with eigenvalue at least `EPS_SUPP`.
    pub fn support_projector(&self) -> Self {
        self.eigensystem()
            .map_values(|x| if x < EPS_SUPP { 0.0 } else { 1.0 })
    }

    /// `outer · self · outer`, both Hermitian.
    pub fn sandwich(&self, outer: &HermitianOperator) -> Self {
        Self::from_raw(&outer.matrix * &self.matrix * &outer.matrix)
    }

    pub fn add(&self, other: &HermitianOperator) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &HermitianOperator) -> Self {
        Self {
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.map(|z| z * factor),
        }
    }

    pub fn tensor(&self, other: &HermitianOperator) -> Self {
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }
}

/// Eigen-decomposition of a Hermitian operator, eigenvalues ascending.
pub fn hermitian_eigensystem(op: &HermitianOperator) -> Eigensystem {
    let n = op.dim();
    let decomposition = op.matrix.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| decomposition.eigenvalues[a].total_cmp(&decomposition.eigenvalues[b]));
    let values = order.iter().map(|&i| decomposition.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| decomposition.eigenvectors[(i, order[j])]);
    Eigensystem { values, vectors }
}

/// A density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates with trace tolerance `EPS_EIG`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_trace_band(matrix, 0.0)
    }

    /// Validates and rescales to unit trace when the trace lies within `band` of one.
    ///
    /// Traces already within `1e-12` of one are left untouched, so re-validating
    /// a stored state is bit-stable.
    pub fn with_trace_band(matrix: ComplexMatrix, band: f64) -> Result<Self> {
        let op = HermitianOperator::new(matrix).map_err(|e| Error::InvalidState {
            reason: format!("{e}"),
        })?;
        let eig_min = op.min_eigenvalue();
        if eig_min < -EPS_EIG {
            return Err(Error::InvalidState {
                reason: format!("negative eigenvalue {eig_min:e}"),
            });
        }
        let trace = op.trace();
        let deviation = libm::fabs(trace - 1.0);
        if deviation > EPS_EIG.max(band) || !trace.is_finite() {
            return Err(Error::InvalidState {
                reason: format!("trace {trace} is not 1"),
            });
        }
        let matrix = if deviation > 1e-12 {
            op.matrix.map(|z| z / trace)
        } else {
            op.matrix
        };
        Ok(Self { matrix })
    }

    pub(crate) fn from_raw(matrix: ComplexMatrix) -> Self {
        Self {
            matrix: hermitian_part(&matrix),
        }
    }

    /// Pure state `|ψ⟩⟨ψ|` of the normalized vector.
    pub fn pure(vector: &[C64]) -> Result<Self> {
        HermitianOperator::projector(vector).map(|p| Self { matrix: p.matrix })
    }

    /// Computational basis state `|index⟩⟨index|`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut entries = alloc::vec![0.0; dim];
        entries[index] = 1.0;
        Self::from_raw(HermitianOperator::diagonal(&entries).matrix)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_raw(ComplexMatrix::identity(dim, dim).map(|z| z / dim as f64))
    }

    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::diagonal(probabilities).matrix)
    }

    /// Convex combination `Σ w_i ρ_i`; weights must form a distribution.
    pub fn mixture(weights: &[f64], states: &[&DensityMatrix]) -> Result<Self> {
        let first = states.first().ok_or(Error::EmptyList)?;
        if weights.len() != states.len() {
            return Err(Error::LengthMismatch {
                left: weights.len(),
                right: states.len(),
            });
        }
        let dim = first.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (&w, rho) in weights.iter().zip(states) {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: rho.dim(),
                });
            }
            if w != 0.0 {
                acc += rho.matrix.map(|z| z * w);
            }
        }
        Self::new(acc)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn as_operator(&self) -> HermitianOperator {
        HermitianOperator {
            matrix: self.matrix.clone(),
        }
    }

    pub fn entropy(&self) -> f64 {
        von_neumann_entropy(self)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }
}

/// Von Neumann entropy `-tr ρ log2 ρ` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_state_matrix(&rho.matrix)
}

/// `Re tr(a ρ)`.
pub fn trace_pair(a: &HermitianOperator, rho: &DensityMatrix) -> Result<f64> {
    if a.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: rho.dim(),
        });
    }
    let value = trace_product(&a.matrix, &rho.matrix);
    debug_assert!(libm::fabs(value.im) <= 1e-9, "tr(Aρ) imaginary part {}", value.im);
    Ok(value.re)
}

/// A measurement `(D_1, …, D_N)` with `D_i ≥ 0` and `Σ D_i ≤ 1`.
///
/// The residual `D_0 = 1 - Σ D_i` is kept implicit and counts as an error
/// outcome unless folded into the last element with [`Povm::fold_residual`].
#[derive(Clone, Debug)]
pub struct Povm {
    dim: usize,
    elements: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let dim = elements.first().ok_or(Error::EmptyList)?.dim();
        let mut total = HermitianOperator::zeros(dim);
        for (i, element) in elements.iter().enumerate() {
            if element.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: element.dim(),
                });
            }
            let lowest = element.min_eigenvalue();
            if lowest < -EPS_EIG {
                return Err(Error::InvalidPovm {
                    reason: format!("element {i} has eigenvalue {lowest:e}"),
                });
            }
            total.matrix += &element.matrix;
        }
        let slack = HermitianOperator::identity(dim).sub(&total).min_eigenvalue();
        if slack < -EPS_EIG {
            return Err(Error::InvalidPovm {
                reason: format!("elements sum above identity by {:e}", -slack),
            });
        }
        Ok(Self { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &HermitianOperator {
        &self.elements[i]
    }

    pub fn into_elements(self) -> Vec<HermitianOperator> {
        self.elements
    }

    /// `D_0 = 1 - Σ D_i`.
    pub fn residual(&self) -> HermitianOperator {
        self.elements
            .iter()
            .fold(HermitianOperator::identity(self.dim), |acc, d| acc.sub(d))
    }

    /// Adds `D_0` to the last element, giving a complete measurement.
    pub fn fold_residual(&self) -> Povm {
        let mut elements = self.elements.clone();
        let residual = self.residual();
        if let Some(last) = elements.last_mut() {
            *last = last.add(&residual);
        }
        Povm {
            dim: self.dim,
            elements,
        }
    }

    /// Outcome probabilities `tr(D_i ρ)` and the residual probability `tr(D_0 ρ)`.
    pub fn outcome_probabilities(&self, rho: &DensityMatrix) -> Result<(Vec<f64>, f64)> {
        let probs = self
            .elements
            .iter()
            .map(|d| trace_pair(d, rho))
            .collect::<Result<Vec<f64>>>()?;
        let residual = 1.0 - probs.iter().sum::<f64>();
        Ok((probs, residual))
    }
}
