//! The mean-field N-body Hamiltonian and exact von Neumann evolution.

use crate::fock::{
    apply_ladder_string, compressed_marginal, embedded_marginal, one_body_reduced,
    two_body_reduced, validate_density, AntisymDensity, FockBasis, Ladder,
};
use crate::random::{random_one_body, random_pair_potential, SeededRng};
use crate::tensor::{
    embed_pair_operator, hermitian_deviation, lift_one_body, pair_commutator,
    partial_trace_matrix, trace_norm, CMatrix, Operator, SpectralPropagator, Space, C64,
    HERMITIAN_TOL,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Tolerance for accepting an initial N-body density.
pub const INITIAL_DENSITY_TOL: f64 = 1e-8;

/// One-body generator `L`, pair potential `V` and particle number `N`.
#[derive(Clone, Debug)]
pub struct MeanFieldSystem {
    particles: usize,
    one_body: Operator,
    potential: Operator,
    hbar: f64,
}

/// Which matrix representation of the N-body space to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    /// The full tensor power `(C^d)^{⊗N}`.
    Dense,
    /// The antisymmetric subspace in the occupation-number basis.
    Antisym,
}

impl MeanFieldSystem {
    pub fn new(particles: usize, one_body: Operator, potential: Operator, hbar: f64) -> Result<Self> {
        let Space::Single { d } = one_body.space() else {
            return Err(Error::IncompatibleSpaces(format!(
                "L must act on the single-particle space, got {:?}",
                one_body.space()
            )));
        };
        if potential.space() != (Space::Tensor { d, n: 2 }) {
            return Err(Error::IncompatibleSpaces(format!(
                "V must act on Tensor(d = {d}, 2), got {:?}",
                potential.space()
            )));
        }
        if particles == 0 || particles > d {
            return Err(Error::InvalidParticleCount { d, n: particles });
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::OutOfRange(format!("ħ must be positive, got {hbar}")));
        }
        for m in [one_body.matrix(), potential.matrix()] {
            let deviation = hermitian_deviation(m);
            if deviation > HERMITIAN_TOL {
                return Err(Error::NotHermitian { deviation });
            }
        }
        let deviation = crate::tensor::transposition_deviation(potential.matrix(), d);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotTranspositionSymmetric { deviation });
        }
        Ok(Self {
            particles,
            one_body,
            potential,
            hbar,
        })
    }

    /// Unit-norm random `L` followed by a random `V` of norm `vnorm`, from one stream.
    pub fn random(
        d: usize,
        particles: usize,
        vnorm: f64,
        hbar: f64,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        let l = random_one_body(d, rng);
        let v = random_pair_potential(d, vnorm, rng)?;
        Self::new(particles, l, v, hbar)
    }

    /// The same `L`, `V` and `ħ` with a different particle number.
    pub fn with_particles(&self, particles: usize) -> Result<Self> {
        if particles == 0 || particles > self.modes() {
            return Err(Error::InvalidParticleCount {
                d: self.modes(),
                n: particles,
            });
        }
        Ok(Self {
            particles,
            ..self.clone()
        })
    }

    /// The same system with `V` replaced by `α V`.
    pub fn with_potential_scale(&self, alpha: f64) -> Self {
        Self {
            potential: self.potential.scale(alpha),
            ..self.clone()
        }
    }

    pub fn modes(&self) -> usize {
        self.one_body.dim()
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn one_body(&self) -> &Operator {
        &self.one_body
    }

    pub fn potential(&self) -> &Operator {
        &self.potential
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `‖V‖`.
    pub fn pair_norm(&self) -> f64 {
        self.potential.operator_norm()
    }

    pub fn space(&self, repr: Representation) -> Space {
        let (d, n) = (self.modes(), self.particles);
        match repr {
            Representation::Dense => Space::tensor(d, n),
            Representation::Antisym => Space::Antisym { d, n },
        }
    }

    /// `H_N = Σ_j L_j + (1/N) Σ_{i<j} V_ij`.
    pub fn hamiltonian(&self, repr: Representation) -> Result<Operator> {
        match repr {
            Representation::Dense => self.dense_hamiltonian(),
            Representation::Antisym => self.fock_hamiltonian(),
        }
    }

    fn dense_hamiltonian(&self) -> Result<Operator> {
        let n = self.particles;
        let space = self.space(Representation::Dense);
        if n == 1 {
            return Ok(self.one_body.clone());
        }
        let mut h = Operator::zeros(space);
        for j in 0..n {
            h = h.add(&lift_one_body(&self.one_body, j, n)?)?;
        }
        let coupling = 1.0 / n as f64;
        for i in 0..n {
            for j in i + 1..n {
                h = h.add(&embed_pair_operator(&self.potential, i, j, n)?.scale(coupling))?;
            }
        }
        Ok(h)
    }

    /// `Σ L_ab a†_a a_b + (1/2N) Σ V_{(a,b),(c,e)} a†_a a†_b a_e a_c`.
    fn fock_hamiltonian(&self) -> Result<Operator> {
        let d = self.modes();
        let n = self.particles;
        let basis = FockBasis::new(d, n)?;
        let l = self.one_body.matrix();
        let v = self.potential.matrix();
        let coupling = 1.0 / (2.0 * n as f64);
        let mut h = CMatrix::zeros(basis.len(), basis.len());
        for (col, &bits) in basis.states().iter().enumerate() {
            let occ = crate::fock::occupied_modes(bits);
            for &b in &occ {
                for a in 0..d {
                    let coeff = l[(a, b)];
                    if coeff == C64::new(0.0, 0.0) {
                        continue;
                    }
                    if let Some((s, out)) =
                        apply_ladder_string(&[Ladder::Create(a), Ladder::Annihilate(b)], bits)
                    {
                        let row = basis.index_of(out).expect("number conserving");
                        h[(row, col)] += coeff * s;
                    }
                }
            }
            for &c in &occ {
                for &e in &occ {
                    if c == e {
                        continue;
                    }
                    for a in 0..d {
                        for b in 0..d {
                            if a == b {
                                continue;
                            }
                            let coeff = v[(a * d + b, c * d + e)];
                            if coeff == C64::new(0.0, 0.0) {
                                continue;
                            }
                            let ops = [
                                Ladder::Create(a),
                                Ladder::Create(b),
                                Ladder::Annihilate(e),
                                Ladder::Annihilate(c),
                            ];
                            if let Some((s, out)) = apply_ladder_string(&ops, bits) {
                                let row = basis.index_of(out).expect("number conserving");
                                h[(row, col)] += coeff * (s * coupling);
                            }
                        }
                    }
                }
            }
        }
        Ok(Operator::from_parts(Space::Antisym { d, n }, h))
    }
}

/// Run metadata attached to every trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub particles: usize,
    pub modes: usize,
    pub dt: f64,
    pub hbar: f64,
    pub seed: Option<u64>,
    pub scheme: String,
}

/// Time-stamped snapshots of a density operator.
#[derive(Clone, Debug)]
pub struct Trajectory {
    meta: TrajectoryMeta,
    times: Vec<f64>,
    states: Vec<Operator>,
}

impl Trajectory {
    pub fn new(meta: TrajectoryMeta) -> Self {
        Self {
            meta,
            times: Vec::new(),
            states: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, state: Operator) {
        self.times.push(t);
        self.states.push(state);
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Operator] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &Operator)> {
        Some((*self.times.last()?, self.states.last()?))
    }

    /// The common spacing of the time grid, if it is uniform to `1e-9` relative.
    pub fn uniform_step(&self) -> Result<f64> {
        if self.times.len() < 2 {
            return Err(Error::TooFewSamples(self.times.len()));
        }
        let h = self.times[1] - self.times[0];
        if h <= 0.0 {
            return Err(Error::GridMismatch("time grid is not increasing".into()));
        }
        for w in self.times.windows(2) {
            if ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0) {
                return Err(Error::GridMismatch(format!(
                    "non-uniform spacing {} vs {h}",
                    w[1] - w[0]
                )));
            }
        }
        Ok(h)
    }

    /// Checks that `other` is sampled at the same times.
    pub fn check_same_grid(&self, other: &Trajectory) -> Result<()> {
        if self.times.len() != other.times.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples vs {}",
                self.times.len(),
                other.times.len()
            )));
        }
        for (a, b) in self.times.iter().zip(&other.times) {
            if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                return Err(Error::GridMismatch(format!("t = {a} vs t = {b}")));
            }
        }
        Ok(())
    }

    /// Index of the sample at time `t`.
    pub fn index_of_time(&self, t: f64) -> Result<usize> {
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= 1e-9 * t.abs().max(1.0))
            .ok_or_else(|| Error::GridMismatch(format!("no sample at t = {t}")))
    }
}

/// Exact propagation `e^{-iHt/ħ} D_0 e^{iHt/ħ}` from one eigendecomposition of `H`.
#[derive(Clone, Debug)]
pub struct ExactFlow {
    space: Space,
    propagator: SpectralPropagator,
    initial_eig: CMatrix,
    initial: Operator,
}

impl ExactFlow {
    /// The representation is taken from the space of `d0`.
    pub fn new(sys: &MeanFieldSystem, d0: &Operator) -> Result<Self> {
        let repr = match d0.space() {
            Space::Antisym { .. } => Representation::Antisym,
            _ => Representation::Dense,
        };
        let expected = sys.space(repr);
        if d0.space() != expected {
            return Err(Error::IncompatibleSpaces(format!(
                "initial state on {:?}, system lives on {expected:?}",
                d0.space()
            )));
        }
        validate_density(d0.matrix(), INITIAL_DENSITY_TOL)?;
        let h = sys.hamiltonian(repr)?;
        let propagator = SpectralPropagator::new(h.matrix(), sys.hbar())?;
        let initial_eig = propagator.to_eigenbasis(d0.matrix());
        Ok(Self {
            space: expected,
            propagator,
            initial_eig,
            initial: d0.clone(),
        })
    }

    pub fn state(&self, t: f64) -> Operator {
        if t == 0.0 {
            return self.initial.clone();
        }
        Operator::from_parts(
            self.space,
            self.propagator.conjugate_eigenbasis(&self.initial_eig, t),
        )
    }

    /// Samples at `t_k = k·dt` for `k = 0, every, 2·every, …, steps`.
    pub fn trajectory(&self, meta: TrajectoryMeta, steps: usize, every: usize) -> Trajectory {
        let dt = meta.dt;
        let mut traj = Trajectory::new(meta);
        for k in (0..=steps).filter(|k| k % every.max(1) == 0 || *k == steps) {
            let t = k as f64 * dt;
            traj.push(t, self.state(t));
        }
        traj
    }
}

/// `e^{-iH_N t/ħ} D_0 e^{iH_N t/ħ}`.
pub fn evolve_exact(sys: &MeanFieldSystem, d0: &Operator, t: f64) -> Result<Operator> {
    Ok(ExactFlow::new(sys, d0)?.state(t))
}

/// `D_{:n}` on `(C^d)^{⊗n}` of an N-body state in either representation.
pub fn marginal(state: &Operator, n: usize) -> Result<Operator> {
    match state.space() {
        Space::Antisym { d, n: big_n } => {
            let rho = antisym_view(state, d, big_n)?;
            match n {
                1 => Ok(Operator::from_parts(Space::Single { d }, one_body_reduced(&rho))),
                2 => Ok(Operator::from_parts(
                    Space::Tensor { d, n: 2 },
                    two_body_reduced(&rho)?,
                )),
                _ => embedded_marginal(&rho, n),
            }
        }
        Space::Tensor { n: big_n, .. } if n == big_n => Ok(state.clone()),
        Space::Single { .. } if n == 1 => Ok(state.clone()),
        _ => crate::tensor::partial_trace(state, n),
    }
}

/// `W_n* D_{:n} W_n` in the occupation-number basis of `n` particles.
pub fn compressed_state_marginal(state: &Operator, n: usize) -> Result<CMatrix> {
    let Space::Antisym { d, n: big_n } = state.space() else {
        return Err(Error::IncompatibleSpaces(
            "compressed marginals need an antisymmetric-subspace state".into(),
        ));
    };
    compressed_marginal(&antisym_view(state, d, big_n)?, n)
}

fn antisym_view(state: &Operator, d: usize, n: usize) -> Result<AntisymDensity> {
    Ok(AntisymDensity::from_parts(
        Arc::new(FockBasis::new(d, n)?),
        state.matrix().clone(),
    ))
}

/// `Σ_{j<n} [L_j, X]` on `(C^d)^{⊗n}`.
pub fn one_body_commutator(l: &Operator, n: usize, x: &CMatrix) -> Result<CMatrix> {
    let mut k = Operator::zeros(Space::tensor(l.dim(), n));
    for j in 0..n {
        k = k.add(&lift_one_body(l, j, n)?)?;
    }
    Ok(crate::tensor::commutator(k.matrix(), x))
}

/// `Σ_{i<j<n} [V_ij, X]` on `(C^d)^{⊗n}`.
pub fn interaction_commutator(v: &CMatrix, d: usize, n: usize, x: &CMatrix) -> CMatrix {
    let mut acc = CMatrix::zeros(x.nrows(), x.ncols());
    for i in 0..n {
        for j in i + 1..n {
            acc += pair_commutator(v, d, n, i, j, x);
        }
    }
    acc
}

/// `Σ_{i<n} [V_{i,n}, X]_{:n}` for `X` on `n + 1` factors (zero-based slots).
pub fn coupling_commutator(v: &CMatrix, d: usize, n: usize, x_next: &CMatrix) -> CMatrix {
    let mut acc = CMatrix::zeros(x_next.nrows(), x_next.ncols());
    for i in 0..n {
        acc += pair_commutator(v, d, n + 1, i, n, x_next);
    }
    partial_trace_matrix(&acc, d.pow(n as u32), d)
}

/// Right-hand side of the equation for `iħ dD_{:n}/dt` given `D_{:n}` and `D_{:n+1}`.
pub fn hierarchy_rhs(
    sys: &MeanFieldSystem,
    n: usize,
    d_n: &CMatrix,
    d_next: &CMatrix,
) -> Result<CMatrix> {
    let d = sys.modes();
    let big_n = sys.particles() as f64;
    let v = sys.potential().matrix();
    let mut rhs = one_body_commutator(sys.one_body(), n, d_n)?;
    rhs += interaction_commutator(v, d, n, d_n).map(|z| z / big_n);
    rhs += coupling_commutator(v, d, n, d_next).map(|z| z * ((big_n - n as f64) / big_n));
    Ok(rhs)
}

/// `max_k ‖iħ (D_{:n}(t_{k+1}) − D_{:n}(t_{k−1}))/(2Δt) − RHS(t_k)‖_tr` over interior samples.
pub fn hierarchy_residual(sys: &MeanFieldSystem, traj: &Trajectory, n: usize) -> Result<f64> {
    if traj.len() < 3 {
        return Err(Error::TooFewSamples(traj.len()));
    }
    if n == 0 || n >= sys.particles() {
        return Err(Error::OutOfRange(format!(
            "hierarchy order n = {n} needs 1 ≤ n < N = {}",
            sys.particles()
        )));
    }
    let dt = traj.uniform_step()?;
    let hbar = sys.hbar();
    let marginals: Vec<CMatrix> = traj
        .states()
        .iter()
        .map(|s| marginal(s, n).map(Operator::into_matrix))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for k in 1..traj.len() - 1 {
        let next = marginal(&traj.states()[k], n + 1)?.into_matrix();
        let rhs = hierarchy_rhs(sys, n, &marginals[k], &next)?;
        let derivative = (&marginals[k + 1] - &marginals[k - 1]).map(|z| z * C64::new(0.0, hbar / (2.0 * dt)));
        worst = worst.max(trace_norm(&(derivative - rhs)));
    }
    Ok(worst)
}
