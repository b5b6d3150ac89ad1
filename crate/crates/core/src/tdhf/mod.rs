//! The time-dependent Hartree-Fock equation `iħ dF/dt = [L, F] + [V, F₂⁻]_{:1}`.

mod checkpoint;
mod duhamel;
mod integrator;
mod orbital;

pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use duhamel::{duhamel_residual, duhamel_residuals};
pub use integrator::{solve, tdhf_step, IntegratorMeta, TdhfState, MIDPOINT_ITERATIONS, SCHEME};
pub use orbital::{orbital_generator, orbital_rhs, orbital_step, solve_orbitals};

use crate::fock::validate_density;
use crate::nbody::MeanFieldSystem;
use crate::tensor::{
    commutator, partial_trace_matrix, transposition_operator, CMatrix, Operator, Space, C64,
};
use crate::{Error, Result};

/// Tolerance for accepting a one-body density along the flow.
pub const STATE_TOL: f64 = 1e-8;

/// `F₂⁻ = (F ⊗ F)(I − U_(12))`.
pub fn f_minus_two(f: &CMatrix) -> CMatrix {
    let d = f.nrows();
    let ff = f.kronecker(f);
    let swap = transposition_operator(d, 2, 0, 1)
        .expect("d^2 within the dense cap")
        .into_matrix();
    &ff - &ff * swap
}

/// `[V, F₂⁻]_{:1}` assembled from the two-body operator and a partial trace.
pub fn interaction_term(sys: &MeanFieldSystem, f: &CMatrix) -> CMatrix {
    let d = sys.modes();
    let f2 = f_minus_two(f);
    partial_trace_matrix(&commutator(sys.potential().matrix(), &f2), d, d)
}

fn check_single(sys: &MeanFieldSystem, f: &Operator) -> Result<()> {
    if f.space() != (Space::Single { d: sys.modes() }) {
        return Err(Error::IncompatibleSpaces(format!(
            "one-body density must act on Single(d = {}), got {:?}",
            sys.modes(),
            f.space()
        )));
    }
    Ok(())
}

/// `dF/dt = (1/iħ)([L, F] + [V, F₂⁻]_{:1})`.
pub fn tdhf_rhs(sys: &MeanFieldSystem, f: &Operator) -> Result<Operator> {
    check_single(sys, f)?;
    let deviation = f.hermitian_deviation();
    if deviation > STATE_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let tr = f.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(Error::NotDensity(format!("trace {tr}")));
    }
    let m = f.matrix();
    let total = commutator(sys.one_body().matrix(), m) + interaction_term(sys, m);
    let factor = C64::new(0.0, -1.0 / sys.hbar());
    Ok(Operator::from_parts(f.space(), total.map(|z| z * factor)))
}

/// The Hartree-Fock generator `h(F) = L + J(F) − K(F)` with
/// `J_ab = Σ V_{(a,c),(b,e)} F_ec` and `K_ab = Σ V_{(a,c),(e,b)} F_ec`,
/// so that `[h(F), F] = [L, F] + [V, F₂⁻]_{:1}`.
pub fn hf_generator(sys: &MeanFieldSystem, f: &CMatrix) -> CMatrix {
    let d = sys.modes();
    let v = sys.potential().matrix();
    let mut h = sys.one_body().matrix().clone();
    for a in 0..d {
        for b in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..d {
                for e in 0..d {
                    let fec = f[(e, c)];
                    acc += (v[(a * d + c, b * d + e)] - v[(a * d + c, e * d + b)]) * fec;
                }
            }
            h[(a, b)] += acc;
        }
    }
    h
}

/// `E(F) = Tr(L F) + ½ Tr(V F₂⁻)`.
pub fn hf_energy(sys: &MeanFieldSystem, f: &CMatrix) -> f64 {
    let one = (sys.one_body().matrix() * f).trace().re;
    let two = (sys.potential().matrix() * f_minus_two(f)).trace().re;
    one + 0.5 * two
}

/// Validates a one-body density at the flow tolerance.
pub fn validate_one_body(sys: &MeanFieldSystem, f: &Operator) -> Result<()> {
    check_single(sys, f)?;
    validate_density(f.matrix(), STATE_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, seeded};
    use crate::tensor::{max_abs_diff, operator_norm};

    fn system(d: usize, vnorm: f64, seed: u64) -> MeanFieldSystem {
        MeanFieldSystem::random(d, 2, vnorm, 1.0, &mut seeded(seed)).unwrap()
    }

    #[test]
    fn generator_reproduces_the_commutator_form() {
        for d in [2, 3, 5] {
            let sys = system(d, 1.0, 1);
            let f = random_density(d, &mut seeded(2));
            let h = hf_generator(&sys, &f);
            let lhs = commutator(&h, &f);
            let rhs = commutator(sys.one_body().matrix(), &f) + interaction_term(&sys, &f);
            assert!(max_abs_diff(&lhs, &rhs) < 1e-12, "d={d}");
            assert!(operator_norm(&(&h - h.adjoint())) < 1e-12);
        }
    }

    #[test]
    fn pure_state_has_no_interaction() {
        let sys = system(4, 1.0, 3);
        let psi = crate::random::random_orthonormal(4, 1, &mut seeded(4));
        let f = &psi * psi.adjoint();
        assert!(f_minus_two(&f).norm() < 1e-14);
        let op = Operator::new(Space::Single { d: 4 }, f.clone()).unwrap();
        let rhs = tdhf_rhs(&sys, &op).unwrap();
        let free = commutator(sys.one_body().matrix(), &f).map(|z| z * C64::new(0.0, -1.0));
        assert!(max_abs_diff(rhs.matrix(), &free) < 1e-14);
    }

    #[test]
    fn rhs_is_traceless_and_hermitian() {
        let sys = system(4, 1.0, 5);
        let f = random_density(4, &mut seeded(6));
        let op = Operator::new(Space::Single { d: 4 }, f).unwrap();
        let rhs = tdhf_rhs(&sys, &op).unwrap();
        assert!(rhs.trace().norm() < 1e-12);
        let m = rhs.matrix();
        assert!(max_abs_diff(m, &m.adjoint()) < 1e-12);
    }

    #[test]
    fn stationary_when_free_and_commuting() {
        let sys = system(3, 0.0, 7);
        let eig = sys.one_body().matrix().clone().symmetric_eigen();
        let mut f = CMatrix::zeros(3, 3);
        for (k, w) in [0.5, 0.3, 0.2].iter().enumerate() {
            let v = eig.eigenvectors.column(k);
            f += (v * v.adjoint()).map(|z| z * *w);
        }
        let op = Operator::new(Space::Single { d: 3 }, f).unwrap();
        assert!(tdhf_rhs(&sys, &op).unwrap().operator_norm() < 1e-14);
    }

    #[test]
    fn rhs_rejects_non_densities() {
        let sys = system(3, 1.0, 8);
        let op = Operator::identity(Space::Single { d: 3 });
        assert!(tdhf_rhs(&sys, &op).is_err());
    }
}
