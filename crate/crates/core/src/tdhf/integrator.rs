use super::{hf_generator, validate_one_body};
use crate::nbody::{MeanFieldSystem, Trajectory, TrajectoryMeta};
use crate::tensor::{max_abs_diff, CMatrix, Operator, SpectralPropagator};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Identifier of the default scheme, recorded in trajectory metadata.
pub const SCHEME: &str = "frozen-midpoint-conjugation";

/// Fixed-point refinements of the midpoint generator per step.
pub const MIDPOINT_ITERATIONS: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorMeta {
    pub dt: f64,
    pub scheme: String,
    pub steps: u64,
}

/// A one-body density at time `t` together with the integrator history.
#[derive(Clone, Debug)]
pub struct TdhfState {
    f: Operator,
    t: f64,
    meta: IntegratorMeta,
}

impl TdhfState {
    pub fn new(sys: &MeanFieldSystem, f: Operator, dt: f64) -> Result<Self> {
        check_dt(dt)?;
        validate_one_body(sys, &f)?;
        Ok(Self {
            f,
            t: 0.0,
            meta: IntegratorMeta {
                dt,
                scheme: SCHEME.into(),
                steps: 0,
            },
        })
    }

    pub fn density(&self) -> &Operator {
        &self.f
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn meta(&self) -> &IntegratorMeta {
        &self.meta
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidTimeStep(dt));
    }
    Ok(())
}

fn conjugate(h: &CMatrix, x: &CMatrix, dt: f64, hbar: f64) -> CMatrix {
    let u = SpectralPropagator::new(h, hbar)
        .expect("the Hartree-Fock generator is Hermitian")
        .unitary(dt);
    &u * x * u.adjoint()
}

/// The midpoint generator `h((F_n + F_{n+1})/2)` where `F_{n+1}` is obtained by
/// conjugating with the generator itself, found by fixed-point iteration from
/// the explicit predictor. `advance` maps a generator to the candidate `F_{n+1}`.
fn midpoint_generator<A>(sys: &MeanFieldSystem, f: &CMatrix, advance: A) -> CMatrix
where
    A: Fn(&CMatrix) -> CMatrix,
{
    let mut h = hf_generator(sys, f);
    let mut next = advance(&h);
    for _ in 0..MIDPOINT_ITERATIONS {
        h = hf_generator(sys, &(f + &next).map(|z| z * 0.5));
        let candidate = advance(&h);
        let change = max_abs_diff(&candidate, &next);
        next = candidate;
        if change < 1e-15 {
            break;
        }
    }
    h
}

/// One step `F ← e^{-i h_mid dt/ħ} F e^{i h_mid dt/ħ}`.
pub fn tdhf_step(sys: &MeanFieldSystem, state: &TdhfState, dt: f64) -> Result<TdhfState> {
    check_dt(dt)?;
    let hbar = sys.hbar();
    let f = state.f.matrix();
    let h = midpoint_generator(sys, f, |h| conjugate(h, f, dt, hbar));
    let next = conjugate(&h, f, dt, hbar);
    Ok(TdhfState {
        f: Operator::from_parts(state.f.space(), next),
        t: state.t + dt,
        meta: IntegratorMeta {
            dt,
            scheme: SCHEME.into(),
            steps: state.meta.steps + 1,
        },
    })
}

/// Integrates `steps` steps of size `dt`, keeping every `every`-th state and the last.
pub fn solve(
    sys: &MeanFieldSystem,
    f0: &Operator,
    dt: f64,
    steps: usize,
    every: usize,
    seed: Option<u64>,
) -> Result<Trajectory> {
    let mut state = TdhfState::new(sys, f0.clone(), dt)?;
    let mut traj = Trajectory::new(TrajectoryMeta {
        particles: sys.particles(),
        modes: sys.modes(),
        dt,
        hbar: sys.hbar(),
        seed,
        scheme: SCHEME.into(),
    });
    let every = every.max(1);
    traj.push(0.0, state.f.clone());
    for k in 1..=steps {
        state = tdhf_step(sys, &state, dt)?;
        if k % every == 0 || k == steps {
            // Grid times are k·dt, not the accumulated sum.
            traj.push(k as f64 * dt, state.f.clone());
        }
    }
    Ok(traj)
}
