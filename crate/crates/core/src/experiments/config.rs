use crate::hierarchy::BoundForm;
use crate::nbody::MeanFieldSystem;
use crate::random::{random_one_body, random_pair_potential, seeded};
use crate::tensor::{binomial, CMatrix, Operator, Space, C64, DENSE_CAP};
use crate::fock::{SlaterOrbitals, MAX_MODES};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Largest occupation-number dimension `C(d, N)` a sweep may diagonalize.
pub const FOCK_DIM_CAP: usize = 4096;

/// Slater initial data for each `N`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialOrbitals {
    /// The first `N` coordinate vectors.
    #[default]
    Coordinate,
    /// `N` Haar-random orthonormal orbitals from `initial_seed`.
    Random,
}

/// Parameters of the convergence sweep and the bound audit. Read from a flat
/// JSON object; missing keys take their defaults, unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub d: usize,
    pub n_list: Vec<usize>,
    pub t_final: f64,
    pub dt: f64,
    pub hbar: f64,
    /// Seed of the pair potential.
    pub seed: u64,
    /// Operator norm of the pair potential.
    pub vnorm: f64,
    /// Seed of the one-body operator; defaults to `seed + 1`.
    pub one_body_seed: Option<u64>,
    /// Explicit one-body matrix as rows of `[re, im]` pairs; overrides `one_body_seed`.
    pub one_body: Option<Vec<Vec<[f64; 2]>>>,
    pub initial: InitialOrbitals,
    /// Seed of random initial orbitals; defaults to `seed + 2`.
    pub initial_seed: Option<u64>,
    /// Record every `output_every`-th step (and the last).
    pub output_every: usize,
    /// Compare against the full tensor-power evolution. `None` enables it for `d ≤ 4, N ≤ 3`.
    pub dense_oracle: Option<bool>,
    /// Truncation order of the a-priori bound.
    pub m: usize,
    pub bound_form: BoundForm,
    pub out: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            d: 8,
            n_list: (2..=6).collect(),
            t_final: 0.5,
            dt: 1e-3,
            hbar: 1.0,
            seed: 1,
            vnorm: 1.0,
            one_body_seed: None,
            one_body: None,
            initial: InitialOrbitals::Coordinate,
            initial_seed: None,
            output_every: 50,
            dense_oracle: None,
            m: 3,
            bound_form: BoundForm::Binomial,
            out: PathBuf::from("results"),
        }
    }
}

impl SweepConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn max_particles(&self) -> usize {
        self.n_list.iter().copied().max().unwrap_or(0)
    }

    pub fn dense_oracle_enabled(&self) -> bool {
        self.dense_oracle
            .unwrap_or(self.d <= 4 && self.max_particles() <= 3)
    }

    /// Number of steps of size `dt` reaching `t_final`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.d == 0 || self.d > MAX_MODES {
            return bad(format!("d must be in 1..={MAX_MODES}, got {}", self.d));
        }
        if self.n_list.is_empty() {
            return bad("n_list is empty".into());
        }
        for &n in &self.n_list {
            if n < 2 || n > self.d {
                return bad(format!("every N must satisfy 2 ≤ N ≤ d = {}, got {n}", self.d));
            }
            match binomial(self.d, n) {
                Some(dim) if dim <= FOCK_DIM_CAP => {}
                _ => return bad(format!("C({}, {n}) exceeds {FOCK_DIM_CAP}", self.d)),
            }
        }
        let mut sorted = self.n_list.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.n_list.len() {
            return bad("n_list has repeated entries".into());
        }
        for (name, x) in [("t_final", self.t_final), ("dt", self.dt), ("hbar", self.hbar)] {
            if !(x > 0.0 && x.is_finite()) {
                return bad(format!("{name} must be positive, got {x}"));
            }
        }
        if self.dt > self.t_final {
            return bad(format!("dt = {} exceeds t_final = {}", self.dt, self.t_final));
        }
        let steps = self.steps();
        if ((steps as f64) * self.dt - self.t_final).abs() > 1e-9 * self.t_final {
            return bad(format!(
                "t_final = {} is not a multiple of dt = {}",
                self.t_final, self.dt
            ));
        }
        if !(self.vnorm >= 0.0 && self.vnorm.is_finite()) {
            return bad(format!("vnorm must be non-negative, got {}", self.vnorm));
        }
        if self.output_every == 0 {
            return bad("output_every must be at least 1".into());
        }
        if let Some(rows) = &self.one_body {
            if rows.len() != self.d || rows.iter().any(|r| r.len() != self.d) {
                return bad(format!("one_body must be a {0}×{0} matrix", self.d));
            }
            self.one_body_operator()?;
        }
        if self.dense_oracle_enabled() {
            match self.d.checked_pow(self.max_particles() as u32) {
                Some(dim) if dim <= DENSE_CAP => {}
                _ => {
                    return bad(format!(
                        "dense oracle needs d^N ≤ {DENSE_CAP}, got d = {}, N = {}",
                        self.d,
                        self.max_particles()
                    ))
                }
            }
        }
        Ok(())
    }

    pub fn one_body_operator(&self) -> Result<Operator> {
        match &self.one_body {
            Some(rows) => {
                let data: Vec<C64> = rows.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
                let m = CMatrix::from_row_slice(self.d, self.d, &data);
                let op = Operator::new(Space::Single { d: self.d }, m)
                    .map_err(|e| Error::Config(format!("one_body: {e}")))?;
                if !op.is_hermitian(crate::tensor::HERMITIAN_TOL) {
                    return Err(Error::Config("one_body is not Hermitian".into()));
                }
                Ok(op)
            }
            None => Ok(random_one_body(
                self.d,
                &mut seeded(self.one_body_seed.unwrap_or(self.seed.wrapping_add(1))),
            )),
        }
    }

    pub fn potential(&self) -> Result<Operator> {
        random_pair_potential(self.d, self.vnorm, &mut seeded(self.seed))
    }

    pub fn system(&self, particles: usize) -> Result<MeanFieldSystem> {
        MeanFieldSystem::new(particles, self.one_body_operator()?, self.potential()?, self.hbar)
    }

    pub fn initial_orbitals(&self, particles: usize) -> Result<SlaterOrbitals> {
        match self.initial {
            InitialOrbitals::Coordinate => SlaterOrbitals::coordinate(self.d, particles),
            InitialOrbitals::Random => {
                let seed = self.initial_seed.unwrap_or(self.seed.wrapping_add(2));
                // One stream per N keeps each sweep point independent of the others.
                let mut rng = seeded(seed ^ ((particles as u64) << 32));
                Ok(SlaterOrbitals::random(self.d, particles, &mut rng))
            }
        }
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_partial_files() {
        let c = SweepConfig::from_json_str("{}").unwrap();
        assert_eq!(c, SweepConfig::default());
        c.validate().unwrap();
        assert!(!c.dense_oracle_enabled());
        assert_eq!(c.steps(), 500);

        let c = SweepConfig::from_json_str(r#"{"d": 4, "n_list": [2, 3], "initial": "random"}"#)
            .unwrap();
        assert!(c.dense_oracle_enabled());
        assert_eq!(c.initial, InitialOrbitals::Random);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(SweepConfig::from_json_str(r#"{"dim": 4}"#).is_err());
        let bad = [
            r#"{"n_list": [9]}"#,
            r#"{"n_list": [1, 2]}"#,
            r#"{"n_list": []}"#,
            r#"{"n_list": [2, 2]}"#,
            r#"{"dt": 0}"#,
            r#"{"dt": 0.3}"#,
            r#"{"t_final": 0.5, "dt": 0.3}"#,
            r#"{"hbar": -1}"#,
            r#"{"vnorm": -1}"#,
            r#"{"output_every": 0}"#,
            r#"{"dense_oracle": true}"#,
            r#"{"d": 2, "n_list": [2], "one_body": [[[1, 0]]]}"#,
            r#"{"d": 2, "n_list": [2], "one_body": [[[1, 0], [0, 1]], [[0, 0], [1, 0]]]}"#,
        ];
        for text in bad {
            let c = SweepConfig::from_json_str(text).unwrap();
            assert!(matches!(c.validate(), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn explicit_one_body_and_hash() {
        let c = SweepConfig::from_json_str(
            r#"{"d": 2, "n_list": [2], "one_body": [[[1, 0], [0, 1]], [[0, -1], [-1, 0]]]}"#,
        )
        .unwrap();
        c.validate().unwrap();
        let l = c.one_body_operator().unwrap();
        assert_eq!(l.matrix()[(0, 1)], C64::new(0.0, 1.0));
        let other = SweepConfig { seed: 2, ..c.clone() };
        assert_eq!(c.hash(), c.clone().hash());
        assert_ne!(c.hash(), other.hash());
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn random_initial_orbitals_are_per_particle_number() {
        let c = SweepConfig { initial: InitialOrbitals::Random, ..Default::default() };
        let a = c.initial_orbitals(3).unwrap();
        assert_eq!(a.coefficients(), c.initial_orbitals(3).unwrap().coefficients());
        assert!(a.gram_deviation() < 1e-12);
        assert_eq!(c.initial_orbitals(4).unwrap().particles(), 4);
    }
}
