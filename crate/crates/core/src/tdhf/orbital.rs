use super::MIDPOINT_ITERATIONS;
use crate::fock::{SlaterOrbitals, ORTHONORMALITY_TOL};
use crate::nbody::MeanFieldSystem;
use crate::tensor::{max_abs_diff, CMatrix, SpectralPropagator, C64};
use crate::{Error, Result};

/// `h = L + J − K` assembled orbital by orbital:
/// `J_ab = (1/N) Σ_l Σ_{c,e} V_{(a,c),(b,e)} ψ̄_l(c) ψ_l(e)` (direct) and
/// `K_ab = (1/N) Σ_l Σ_{c,e} V_{(a,c),(e,b)} ψ̄_l(c) ψ_l(e)` (exchange).
pub fn orbital_generator(sys: &MeanFieldSystem, orbitals: &CMatrix) -> CMatrix {
    let d = sys.modes();
    let n = orbitals.ncols() as f64;
    let v = sys.potential().matrix();
    let mut h = sys.one_body().matrix().clone();
    for psi in orbitals.column_iter() {
        for a in 0..d {
            for b in 0..d {
                let mut direct = C64::new(0.0, 0.0);
                let mut exchange = C64::new(0.0, 0.0);
                for c in 0..d {
                    let pc = psi[c].conj();
                    for e in 0..d {
                        let w = pc * psi[e];
                        direct += v[(a * d + c, b * d + e)] * w;
                        exchange += v[(a * d + c, e * d + b)] * w;
                    }
                }
                h[(a, b)] += (direct - exchange) / n;
            }
        }
    }
    h
}

/// `iħ dψ_k/dt = h ψ_k` for every orbital, as the columns of the result.
pub fn orbital_rhs(sys: &MeanFieldSystem, orbitals: &SlaterOrbitals) -> CMatrix {
    let c = orbitals.coefficients();
    orbital_generator(sys, c) * c
}

fn check_orbitals(sys: &MeanFieldSystem, orbitals: &SlaterOrbitals) -> Result<()> {
    if orbitals.modes() != sys.modes() {
        return Err(Error::DimensionMismatch(format!(
            "orbitals in C^{} for a system on C^{}",
            orbitals.modes(),
            sys.modes()
        )));
    }
    let deviation = orbitals.gram_deviation();
    if deviation > ORTHONORMALITY_TOL {
        return Err(Error::NotOrthonormal { deviation });
    }
    Ok(())
}

/// One step `ψ_k ← e^{-i h_mid dt/ħ} ψ_k` with the midpoint generator found by
/// the same fixed-point iteration as the operator-form integrator.
pub fn orbital_step(
    sys: &MeanFieldSystem,
    orbitals: &SlaterOrbitals,
    dt: f64,
) -> Result<SlaterOrbitals> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidTimeStep(dt));
    }
    check_orbitals(sys, orbitals)?;
    Ok(SlaterOrbitals::from_unchecked(advance(sys, orbitals.coefficients(), dt)))
}

fn advance(sys: &MeanFieldSystem, c: &CMatrix, dt: f64) -> CMatrix {
    let hbar = sys.hbar();
    let propagate = |h: &CMatrix| {
        SpectralPropagator::new(h, hbar)
            .expect("the Hartree-Fock generator is Hermitian")
            .unitary(dt)
            * c
    };
    // J and K are linear in the density, so the generator at the midpoint
    // density is the mean of the generators of the two orbital sets.
    let h_now = orbital_generator(sys, c);
    let mut h = h_now.clone();
    let mut next = propagate(&h);
    for _ in 0..MIDPOINT_ITERATIONS {
        h = (&h_now + orbital_generator(sys, &next)).map(|z| z * 0.5);
        let candidate = propagate(&h);
        let change = max_abs_diff(&candidate, &next);
        next = candidate;
        if change < 1e-15 {
            break;
        }
    }
    next
}

/// Integrates `steps` orbital steps, returning the orbitals at every `every`-th step
/// and the last one.
pub fn solve_orbitals(
    sys: &MeanFieldSystem,
    orbitals: &SlaterOrbitals,
    dt: f64,
    steps: usize,
    every: usize,
) -> Result<Vec<(f64, SlaterOrbitals)>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidTimeStep(dt));
    }
    check_orbitals(sys, orbitals)?;
    let every = every.max(1);
    let mut out = vec![(0.0, orbitals.clone())];
    let mut c = orbitals.coefficients().clone();
    for k in 1..=steps {
        c = advance(sys, &c, dt);
        if k % every == 0 || k == steps {
            out.push((k as f64 * dt, SlaterOrbitals::from_unchecked(c.clone())));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::seeded;
    use crate::tdhf::{hf_generator, solve};
    use crate::tensor::{max_abs_diff, trace_norm, unitary_propagator, Operator, Space};

    fn system(d: usize, n: usize, seed: u64) -> MeanFieldSystem {
        MeanFieldSystem::random(d, n, 1.0, 1.0, &mut seeded(seed)).unwrap()
    }

    #[test]
    fn orbital_generator_matches_density_generator() {
        let sys = system(5, 3, 1);
        let orb = SlaterOrbitals::random(5, 3, &mut seeded(2));
        let f = orb.one_body_density();
        let a = orbital_generator(&sys, orb.coefficients());
        assert!(max_abs_diff(&a, &hf_generator(&sys, &f)) < 1e-13);
    }

    #[test]
    fn single_orbital_feels_only_the_one_body_term() {
        let sys = system(4, 1, 3);
        let orb = SlaterOrbitals::random(4, 1, &mut seeded(4));
        let rhs = orbital_rhs(&sys, &orb);
        let free = sys.one_body().matrix() * orb.coefficients();
        assert!(max_abs_diff(&rhs, &free) < 1e-14);
        let dt = 1e-3;
        let stepped = orbital_step(&sys, &orb, dt).unwrap();
        let u = unitary_propagator(sys.one_body(), dt, 1.0).unwrap().into_matrix();
        let linear = u * orb.coefficients();
        assert!(max_abs_diff(stepped.coefficients(), &linear) < 1e-9);
    }

    #[test]
    fn orbital_and_operator_forms_agree() {
        let sys = system(6, 3, 5);
        let orb = SlaterOrbitals::random(6, 3, &mut seeded(6));
        let f0 = Operator::new(Space::Single { d: 6 }, orb.one_body_density()).unwrap();
        let steps = 200;
        let ops = solve(&sys, &f0, 1e-3, steps, steps, None).unwrap();
        let orbs = solve_orbitals(&sys, &orb, 1e-3, steps, steps).unwrap();
        let (_, last) = orbs.last().unwrap();
        let diff = trace_norm(&(last.one_body_density() - ops.last().unwrap().1.matrix()));
        assert!(diff < 1e-10, "{diff}");
        assert!(last.gram_deviation() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let sys = system(4, 2, 7);
        let orb = SlaterOrbitals::random(4, 2, &mut seeded(8));
        assert!(orbital_step(&sys, &orb, 0.0).is_err());
        let wrong = SlaterOrbitals::random(3, 2, &mut seeded(9));
        assert!(orbital_step(&sys, &wrong, 1e-3).is_err());
    }
}
