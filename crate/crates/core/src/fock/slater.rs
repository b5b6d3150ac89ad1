use super::{AntisymDensity, FockBasis};
use crate::random::{random_orthonormal, SeededRng};
use crate::tensor::{max_abs_diff, CMatrix, C64};
use crate::{Error, Result};
use nalgebra::DVector;
use std::sync::Arc;

/// Tolerance on `‖C*C − I‖_max` accepted as orthonormal.
pub const ORTHONORMALITY_TOL: f64 = 1e-8;

/// N orthonormal orbitals in `C^d`, stored as the columns of a `d × N` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SlaterOrbitals {
    coefficients: CMatrix,
}

impl SlaterOrbitals {
    pub fn new(coefficients: CMatrix) -> Result<Self> {
        let (d, n) = coefficients.shape();
        if n == 0 || n > d {
            return Err(Error::InvalidParticleCount { d, n });
        }
        let orbitals = Self { coefficients };
        let deviation = orbitals.gram_deviation();
        if deviation.is_nan() || deviation > ORTHONORMALITY_TOL {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(orbitals)
    }

    pub(crate) fn from_unchecked(coefficients: CMatrix) -> Self {
        Self { coefficients }
    }

    /// The first `n` coordinate vectors `e_0, …, e_{n-1}`.
    pub fn coordinate(d: usize, n: usize) -> Result<Self> {
        if n == 0 || n > d {
            return Err(Error::InvalidParticleCount { d, n });
        }
        Ok(Self {
            coefficients: CMatrix::identity(d, n),
        })
    }

    /// Coordinate vectors for the listed modes, in the given order.
    pub fn from_modes(d: usize, modes: &[usize]) -> Result<Self> {
        let mut c = CMatrix::zeros(d, modes.len());
        for (k, &m) in modes.iter().enumerate() {
            if m >= d {
                return Err(Error::OutOfRange(format!("mode {m} outside 0..{d}")));
            }
            c[(m, k)] = C64::new(1.0, 0.0);
        }
        Self::new(c)
    }

    pub fn random(d: usize, n: usize, rng: &mut SeededRng) -> Self {
        Self {
            coefficients: random_orthonormal(d, n, rng),
        }
    }

    pub fn modes(&self) -> usize {
        self.coefficients.nrows()
    }

    pub fn particles(&self) -> usize {
        self.coefficients.ncols()
    }

    pub fn coefficients(&self) -> &CMatrix {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> CMatrix {
        self.coefficients
    }

    pub fn gram(&self) -> CMatrix {
        self.coefficients.adjoint() * &self.coefficients
    }

    pub fn gram_deviation(&self) -> f64 {
        let n = self.particles();
        max_abs_diff(&self.gram(), &CMatrix::identity(n, n))
    }

    /// `(1/N) Σ_k |ψ_k⟩⟨ψ_k|`.
    pub fn one_body_density(&self) -> CMatrix {
        let n = self.particles() as f64;
        (&self.coefficients * self.coefficients.adjoint()).map(|z| z / n)
    }

    /// Coordinates of `a†_{ψ_1} ⋯ a†_{ψ_N}|0⟩` in `basis`: the minors `det C[S, :]`.
    pub fn amplitudes(&self, basis: &FockBasis) -> Result<DVector<C64>> {
        if basis.modes() != self.modes() || basis.particles() != self.particles() {
            return Err(Error::DimensionMismatch(format!(
                "orbitals (d={}, N={}) vs basis (d={}, N={})",
                self.modes(),
                self.particles(),
                basis.modes(),
                basis.particles()
            )));
        }
        let n = self.particles();
        let amps = (0..basis.len()).map(|k| {
            let rows = basis.occupied(k);
            let sub = CMatrix::from_fn(n, n, |r, c| self.coefficients[(rows[r], c)]);
            sub.determinant()
        });
        Ok(DVector::from_iterator(basis.len(), amps))
    }
}

/// Rank-one projector onto the Slater determinant of `orbitals`.
pub fn slater_density(orbitals: &SlaterOrbitals) -> Result<AntisymDensity> {
    let deviation = orbitals.gram_deviation();
    if deviation > ORTHONORMALITY_TOL {
        return Err(Error::NotOrthonormal { deviation });
    }
    let basis = Arc::new(FockBasis::new(orbitals.modes(), orbitals.particles())?);
    let amps = orbitals.amplitudes(&basis)?;
    AntisymDensity::pure(basis, &amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_unitary, seeded};

    #[test]
    fn coordinate_orbitals_select_one_state() {
        let orb = SlaterOrbitals::coordinate(5, 3).unwrap();
        let rho = slater_density(&orb).unwrap();
        let k = rho.basis().index_of(0b111).unwrap();
        let m = rho.matrix();
        assert_eq!(m[(k, k)], C64::new(1.0, 0.0));
        assert!((m.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_within_span_leaves_density_invariant() {
        let mut rng = seeded(21);
        let orb = SlaterOrbitals::random(6, 3, &mut rng);
        let u = random_unitary(3, &mut rng);
        let rotated = SlaterOrbitals::new(orb.coefficients() * u).unwrap();
        let a = slater_density(&orb).unwrap();
        let b = slater_density(&rotated).unwrap();
        assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-10);
    }

    #[test]
    fn rejects_non_orthonormal() {
        let mut c = CMatrix::identity(4, 2);
        c[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(SlaterOrbitals::new(c), Err(Error::NotOrthonormal { .. })));
        assert!(SlaterOrbitals::coordinate(2, 3).is_err());
        assert!(SlaterOrbitals::from_modes(3, &[0, 0]).is_err());
    }

    #[test]
    fn one_body_density_has_norm_one_over_n() {
        let mut rng = seeded(22);
        let orb = SlaterOrbitals::random(7, 4, &mut rng);
        let f = orb.one_body_density();
        assert!((f.trace().re - 1.0).abs() < 1e-13);
        assert!((crate::tensor::operator_norm(&f) - 0.25).abs() < 1e-12);
    }
}
