use super::{hermitian_deviation, hermitian_part, CMatrix, Operator, C64, HERMITIAN_TOL};
use crate::{Error, Result};
use nalgebra::DVector;

/// Spectral form of `e^{-iHt/ħ}` for a fixed Hermitian `H`.
///
/// The eigendecomposition is computed once; every propagator or conjugation
/// at a later time reuses it.
#[derive(Clone, Debug)]
pub struct SpectralPropagator {
    energies: DVector<f64>,
    eigenvectors: CMatrix,
    hbar: f64,
}

impl SpectralPropagator {
    pub fn new(h: &CMatrix, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::OutOfRange(format!("ħ must be positive, got {hbar}")));
        }
        let deviation = hermitian_deviation(h);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let eig = hermitian_part(h).symmetric_eigen();
        Ok(Self {
            energies: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            hbar,
        })
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    fn phases(&self, t: f64) -> Vec<C64> {
        self.energies
            .iter()
            .map(|&e| C64::from_polar(1.0, -e * t / self.hbar))
            .collect()
    }

    /// `e^{-iHt/ħ}`.
    pub fn unitary(&self, t: f64) -> CMatrix {
        let phases = self.phases(t);
        let mut scaled = self.eigenvectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= phases[k];
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// Maps an operator into the eigenbasis of `H`.
    pub fn to_eigenbasis(&self, x: &CMatrix) -> CMatrix {
        self.eigenvectors.adjoint() * x * &self.eigenvectors
    }

    /// `e^{-iHt/ħ} X e^{iHt/ħ}` for `X` already in the eigenbasis.
    pub fn conjugate_eigenbasis(&self, x_eig: &CMatrix, t: f64) -> CMatrix {
        let phases = self.phases(t);
        let rotated = CMatrix::from_fn(x_eig.nrows(), x_eig.ncols(), |a, b| {
            x_eig[(a, b)] * phases[a] * phases[b].conj()
        });
        &self.eigenvectors * rotated * self.eigenvectors.adjoint()
    }

    /// `e^{-iHt/ħ} X e^{iHt/ħ}`.
    pub fn conjugate(&self, x: &CMatrix, t: f64) -> CMatrix {
        self.conjugate_eigenbasis(&self.to_eigenbasis(x), t)
    }
}

/// `e^{-iHt/ħ}` via eigendecomposition; `H` must be Hermitian to 1e-10.
pub fn unitary_propagator(h: &Operator, t: f64, hbar: f64) -> Result<Operator> {
    let prop = SpectralPropagator::new(h.matrix(), hbar)?;
    Ok(Operator::from_parts(h.space(), prop.unitary(t)))
}
