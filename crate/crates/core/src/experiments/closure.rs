use super::config::SweepConfig;
use crate::fock::{closure_defect, slater_density, AntisymDensity, FockBasis, SlaterOrbitals};
use crate::random::seeded;
use crate::tensor::factorial;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosureKind {
    Slater,
    /// Equal mixture of the configured Slater state and a random one.
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureRow {
    pub kind: ClosureKind,
    pub particles: usize,
    pub n: usize,
    pub defect: f64,
    /// The value every Slater determinant attains.
    pub slater_value: f64,
}

/// `1 − N! / ((N−n)! N^n)`.
pub fn slater_defect(particles: usize, n: usize) -> f64 {
    let big_n = particles as f64;
    1.0 - factorial(particles) / (factorial(particles - n) * big_n.powi(n as i32))
}

/// Closure defects `δ_n` for `n = 2..=N` of Slater and mixed data.
pub fn closure_table(cfg: &SweepConfig) -> Result<Vec<ClosureRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &big_n in &cfg.n_list {
        let basis = Arc::new(FockBasis::new(cfg.d, big_n)?);
        let orbitals = cfg.initial_orbitals(big_n)?;
        let slater = slater_density(&orbitals)?;
        let other = SlaterOrbitals::random(cfg.d, big_n, &mut seeded(cfg.seed.wrapping_add(3)));
        let mixed = AntisymDensity::mixture(
            basis.clone(),
            &[(0.5, orbitals.amplitudes(&basis)?), (0.5, other.amplitudes(&basis)?)],
        )?;
        for (kind, rho) in [(ClosureKind::Slater, &slater), (ClosureKind::Mixed, &mixed)] {
            for n in 2..=big_n {
                rows.push(ClosureRow {
                    kind,
                    particles: big_n,
                    n,
                    defect: closure_defect(rho, n)?,
                    slater_value: slater_defect(big_n, n),
                });
            }
        }
    }
    Ok(rows)
}

pub fn closure_csv(rows: &[ClosureRow]) -> String {
    let mut s = String::from("kind,N,n,defect,slater_value\n");
    for r in rows {
        let kind = match r.kind {
            ClosureKind::Slater => "slater",
            ClosureKind::Mixed => "mixed",
        };
        writeln!(s, "{kind},{},{},{:.15e},{:.15e}", r.particles, r.n, r.defect, r.slater_value)
            .unwrap();
    }
    s
}
