//! Dense complex operator algebra on a single-particle space, its tensor
//! powers, and the antisymmetric subspace.
//!
//! Tensor-product indices are row-major in the factors: the basis vector
//! `e_{j_1} ⊗ … ⊗ e_{j_n}` has index `Σ_k j_k d^{n-1-k}`, so the first factor
//! is the most significant digit. This matches `DMatrix::kronecker`.

mod algebra;
pub mod io;
mod norms;
mod permutation;
mod propagator;

pub use algebra::{
    antisymmetrizer, embed_pair_by_conjugation, embed_pair_operator, kron, kron_capped,
    lift_one_body, pair_commutator, pair_left_mul, pair_right_mul, partial_trace,
    partial_trace_matrix, permutation_operator, sigma_factorization_defect,
    signed_permutation_sum, tensor_power, transposition_operator,
};
pub use norms::{hermitian_eigenvalues, operator_norm, trace_norm};
pub(crate) use algebra::transposition_deviation;
pub use permutation::Permutation;
pub use propagator::{unitary_propagator, SpectralPropagator};

use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Largest matrix dimension the full-tensor representation may allocate.
pub const DENSE_CAP: usize = 4096;

/// Hermiticity tolerance (operator norm) for anything that is diagonalized.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Which Hilbert space an [`Operator`] acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    /// The single-particle space `C^d`.
    Single { d: usize },
    /// The n-fold tensor power `(C^d)^{⊗n}`.
    Tensor { d: usize, n: usize },
    /// The antisymmetric subspace of `(C^d)^{⊗n}` in the occupation-number basis.
    Antisym { d: usize, n: usize },
}

impl Space {
    pub fn single_dim(&self) -> usize {
        match *self {
            Space::Single { d } | Space::Tensor { d, .. } | Space::Antisym { d, .. } => d,
        }
    }

    /// Number of particles (1 for the single-particle space).
    pub fn particles(&self) -> usize {
        match *self {
            Space::Single { .. } => 1,
            Space::Tensor { n, .. } | Space::Antisym { n, .. } => n,
        }
    }

    /// Matrix dimension, or `None` on overflow.
    pub fn checked_dim(&self) -> Option<usize> {
        match *self {
            Space::Single { d } => Some(d),
            Space::Tensor { d, n } => d.checked_pow(n as u32),
            Space::Antisym { d, n } => binomial(d, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.checked_dim().expect("space dimension overflows usize")
    }

    /// The tensor space with `n` factors of this space's single-particle dimension.
    pub fn tensor(d: usize, n: usize) -> Space {
        if n == 1 {
            Space::Single { d }
        } else {
            Space::Tensor { d, n }
        }
    }

    pub(crate) fn is_product(&self) -> bool {
        !matches!(self, Space::Antisym { .. })
    }
}

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// A dense square complex matrix tagged with the space it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: Space,
    data: CMatrix,
}

impl Operator {
    pub fn new(space: Space, data: CMatrix) -> Result<Self> {
        let dim = space
            .checked_dim()
            .ok_or_else(|| Error::DimensionMismatch(format!("{space:?} overflows")))?;
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "operator matrix must be square, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.nrows() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{space:?} has dimension {dim}, matrix is {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::DimensionMismatch("non-finite matrix entry".into()));
        }
        Ok(Self { space, data })
    }

    /// Skips the finiteness scan; the caller guarantees the shape.
    pub(crate) fn from_parts(space: Space, data: CMatrix) -> Self {
        debug_assert_eq!(data.nrows(), space.dim());
        debug_assert_eq!(data.ncols(), space.dim());
        Self { space, data }
    }

    pub fn identity(space: Space) -> Self {
        let m = space.dim();
        Self::from_parts(space, CMatrix::identity(m, m))
    }

    pub fn zeros(space: Space) -> Self {
        let m = space.dim();
        Self::from_parts(space, CMatrix::zeros(m, m))
    }

    pub fn from_real_diagonal(space: Space, diag: &[f64]) -> Result<Self> {
        let mut m = CMatrix::zeros(diag.len(), diag.len());
        for (k, &x) in diag.iter().enumerate() {
            m[(k, k)] = C64::new(x, 0.0);
        }
        Self::new(space, m)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.space, self.data.adjoint())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_parts(self.space, self.data.map(|z| z * c))
    }

    pub fn trace_norm(&self) -> f64 {
        trace_norm(&self.data)
    }

    pub fn operator_norm(&self) -> f64 {
        operator_norm(&self.data)
    }

    /// `‖A − A*‖` in operator norm.
    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.data)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    fn check_same_space(&self, other: &Operator) -> Result<()> {
        if self.space != other.space {
            return Err(Error::IncompatibleSpaces(format!(
                "{:?} vs {:?}",
                self.space, other.space
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self::from_parts(self.space, &self.data + &other.data))
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self::from_parts(self.space, &self.data - &other.data))
    }

    pub fn mul(&self, other: &Operator) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self::from_parts(self.space, &self.data * &other.data))
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Operator) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self::from_parts(self.space, commutator(&self.data, &other.data)))
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        max_abs_diff(&self.data, &other.data)
    }
}

pub(crate) fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub(crate) fn hermitian_deviation(m: &CMatrix) -> f64 {
    let diff = m - m.adjoint();
    // Frobenius dominates the operator norm; skip the SVD when it is already tiny.
    let frob = diff.norm();
    if frob <= HERMITIAN_TOL * 1e-2 {
        frob
    } else {
        operator_norm(&diff)
    }
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
