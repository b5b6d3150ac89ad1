use super::config::SweepConfig;
use super::sweep::run_convergence_sweep;
use crate::fock::{closure_defect, slater_density, SlaterOrbitals};
use crate::hierarchy::{claim_identity_check, f_minus_n, remainder_r};
use crate::nbody::MeanFieldSystem;
use crate::random::{random_density, seeded};
use crate::tdhf::{solve, solve_orbitals};
use crate::tensor::{hermitian_eigenvalues, sigma_factorization_defect, trace_norm, Operator, Space};
use crate::Result;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    /// Worst deviation found (or worst violation of a bound, clipped at zero).
    pub worst: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passes(&self) -> bool {
        self.worst <= self.tolerance
    }
}

fn check(name: &'static str, tolerance: f64, values: impl IntoIterator<Item = f64>) -> Check {
    Check {
        name,
        worst: values.into_iter().fold(0.0, f64::max),
        tolerance,
    }
}

fn density(d: usize, seed: u64) -> Result<Operator> {
    Operator::new(Space::Single { d }, random_density(d, &mut seeded(seed)))
}

/// Small, fast instances of the structural identities and bounds.
pub fn run_selftest() -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let mut sigma = Vec::new();
    for d in 1..=3 {
        for n in 1..=3 {
            sigma.push(sigma_factorization_defect(d, n)?);
        }
    }
    out.push(check("sigma_factorization", 1e-10, sigma));

    let mut claim = Vec::new();
    let mut r1 = Vec::new();
    let mut remainder_gap = Vec::new();
    for seed in 0..5 {
        for d in 2..=3 {
            let sys = MeanFieldSystem::random(d, 2, 1.0, 1.0, &mut seeded(100 + seed))?;
            let f = density(d, 200 + seed)?;
            for n in 2..=3 {
                claim.push(claim_identity_check(&sys, &f, n)?);
                let bound = 2.0 * (n * (n - 1)) as f64 * sys.pair_norm() * f.operator_norm();
                remainder_gap.push(remainder_r(&sys, &f, n)?.trace_norm() - bound);
            }
            r1.push(remainder_r(&sys, &f, 1)?.matrix().norm());
        }
    }
    out.push(check("swap_contraction", 1e-10, claim));
    out.push(check("remainder_first_order", 0.0, r1));
    out.push(check("remainder", 1e-8, remainder_gap));

    let mut f_minus = Vec::new();
    let mut positivity = Vec::new();
    for seed in 0..10 {
        for (d, n) in [(2, 2), (3, 2), (3, 3), (4, 2)] {
            let fm = f_minus_n(&density(d, 300 + seed)?, n)?;
            f_minus.push(fm.trace_norm() - 1.0);
            positivity.push(-hermitian_eigenvalues(fm.matrix())[0]);
        }
    }
    out.push(check("f_minus_trace", 1e-10, f_minus));
    out.push(check("f_minus_positive", 1e-10, positivity));

    let mut defect = Vec::new();
    for big_n in 2..=5 {
        let rho = slater_density(&SlaterOrbitals::random(6, big_n, &mut seeded(400)))?;
        defect.push((closure_defect(&rho, 2)? - 1.0 / big_n as f64).abs());
    }
    out.push(check("slater_defect", 1e-10, defect));

    let free = SweepConfig {
        d: 4,
        n_list: vec![2, 3],
        vnorm: 0.0,
        t_final: 0.2,
        dt: 1e-2,
        output_every: 5,
        ..Default::default()
    };
    let res = run_convergence_sweep(&free)?;
    out.push(check("free_dynamics", 1e-9, res.rows.iter().map(|r| r.err_tracenorm)));
    out.push(check("dense_oracle", 1e-10, res.oracle.iter().map(|o| o.max_deviation)));

    let sys = MeanFieldSystem::random(4, 2, 1.0, 1.0, &mut seeded(500))?;
    let orbitals = SlaterOrbitals::random(4, 2, &mut seeded(501));
    let f0 = Operator::new(Space::Single { d: 4 }, orbitals.one_body_density())?;
    let ops = solve(&sys, &f0, 1e-2, 50, 10, None)?;
    let orbs = solve_orbitals(&sys, &orbitals, 1e-2, 50, 10)?;
    let gap = ops
        .states()
        .iter()
        .zip(&orbs)
        .map(|(f, (_, o))| trace_norm(&(f.matrix() - o.one_body_density())));
    out.push(check("orbital_equivalence", 1e-7, gap));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        let checks = run_selftest().unwrap();
        assert_eq!(checks.len(), 10);
        for c in &checks {
            assert!(c.passes(), "{c:?}");
        }
    }
}
