use super::{embed::embedding_isometry, slater::SlaterOrbitals, FockBasis};
use crate::random::{dirichlet_weights, SeededRng};
use crate::tensor::{hermitian_deviation, hermitian_eigenvalues, CMatrix, Operator, Space};
use crate::{Error, Result};
use nalgebra::DVector;
use crate::tensor::C64;
use std::sync::Arc;

/// Tolerance for the Hermitian, unit-trace and positivity checks.
pub const DENSITY_TOL: f64 = 1e-10;

/// Checks Hermiticity, unit trace and positivity, each to `tol`.
pub fn validate_density(m: &CMatrix, tol: f64) -> Result<()> {
    let herm = hermitian_deviation(m);
    if herm > tol {
        return Err(Error::NotDensity(format!("Hermitian deviation {herm:.3e}")));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::NotDensity(format!("trace {tr}")));
    }
    if let Some(&min) = hermitian_eigenvalues(m).first() {
        if min < -tol {
            return Err(Error::NotDensity(format!("negative eigenvalue {min:.3e}")));
        }
    }
    Ok(())
}

/// A fermionic N-body density in occupation-number coordinates.
#[derive(Clone, Debug)]
pub struct AntisymDensity {
    basis: Arc<FockBasis>,
    matrix: CMatrix,
}

impl AntisymDensity {
    pub fn new(basis: Arc<FockBasis>, matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(basis, matrix, DENSITY_TOL)
    }

    pub fn with_tolerance(basis: Arc<FockBasis>, matrix: CMatrix, tol: f64) -> Result<Self> {
        if matrix.nrows() != basis.len() || matrix.ncols() != basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "basis has {} states, matrix is {}x{}",
                basis.len(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        validate_density(&matrix, tol)?;
        Ok(Self { basis, matrix })
    }

    pub(crate) fn from_parts(basis: Arc<FockBasis>, matrix: CMatrix) -> Self {
        Self { basis, matrix }
    }

    /// `|ψ⟩⟨ψ|` for normalized amplitudes `ψ`.
    pub fn pure(basis: Arc<FockBasis>, amplitudes: &DVector<C64>) -> Result<Self> {
        let m = amplitudes * amplitudes.adjoint();
        Self::new(basis, m)
    }

    /// `Σ w_k |ψ_k⟩⟨ψ_k|`.
    pub fn mixture(basis: Arc<FockBasis>, components: &[(f64, DVector<C64>)]) -> Result<Self> {
        let dim = basis.len();
        let mut m = CMatrix::zeros(dim, dim);
        for (w, psi) in components {
            m += (psi * psi.adjoint()).map(|z| z * *w);
        }
        Self::new(basis, m)
    }

    /// Reads an `Antisym` operator back, rebuilding its basis.
    pub fn from_operator(op: &Operator) -> Result<Self> {
        let Space::Antisym { d, n } = op.space() else {
            return Err(Error::IncompatibleSpaces(format!(
                "expected an antisymmetric-subspace operator, got {:?}",
                op.space()
            )));
        };
        // Evolved states carry roundoff; accept them at the evolution tolerance.
        Self::with_tolerance(Arc::new(FockBasis::new(d, n)?), op.matrix().clone(), 1e-8)
    }

    pub fn to_operator(&self) -> Operator {
        Operator::from_parts(self.space(), self.matrix.clone())
    }

    pub fn space(&self) -> Space {
        Space::Antisym {
            d: self.basis.modes(),
            n: self.basis.particles(),
        }
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn modes(&self) -> usize {
        self.basis.modes()
    }

    pub fn particles(&self) -> usize {
        self.basis.particles()
    }

    /// The same density as an operator on `(C^d)^{⊗N}`: `W D W*`.
    pub fn embed(&self) -> Result<Operator> {
        let w = embedding_isometry(&self.basis)?;
        let (d, n) = (self.modes(), self.particles());
        Ok(Operator::from_parts(
            Space::tensor(d, n),
            &w * &self.matrix * w.adjoint(),
        ))
    }
}

/// Mixture of `components` random Slater projectors with flat-Dirichlet weights.
pub fn random_fermionic_density(
    basis: &Arc<FockBasis>,
    components: usize,
    rng: &mut SeededRng,
) -> Result<AntisymDensity> {
    let (d, n) = (basis.modes(), basis.particles());
    let weights = dirichlet_weights(components.max(1), rng);
    let mut parts = Vec::with_capacity(weights.len());
    for w in weights {
        let orb = SlaterOrbitals::random(d, n, rng);
        parts.push((w, orb.amplitudes(basis)?));
    }
    AntisymDensity::mixture(Arc::clone(basis), &parts)
}
