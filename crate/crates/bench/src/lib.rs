//! Shared fixtures for the criterion benchmarks.

use std::sync::Arc;
use tdhf_core::fock::{random_fermionic_density, AntisymDensity};
use tdhf_core::random::{random_density, seeded};
use tdhf_core::{FockBasis, MeanFieldSystem, Operator, Space};

pub const SEED: u64 = 17;

pub fn system(d: usize, particles: usize) -> MeanFieldSystem {
    MeanFieldSystem::random(d, particles, 1.0, 1.0, &mut seeded(SEED)).expect("valid sizes")
}

pub fn one_body_density(d: usize) -> Operator {
    Operator::new(Space::Single { d }, random_density(d, &mut seeded(SEED + 1))).expect("square")
}

pub fn fermionic_state(d: usize, particles: usize) -> AntisymDensity {
    let basis = Arc::new(FockBasis::new(d, particles).expect("valid sizes"));
    random_fermionic_density(&basis, 3, &mut seeded(SEED + 2)).expect("valid mixture")
}
