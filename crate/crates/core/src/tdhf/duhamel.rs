use super::interaction_term;
use crate::nbody::{MeanFieldSystem, Trajectory};
use crate::tensor::{trace_norm, CMatrix, SpectralPropagator, Space, C64};
use crate::{Error, Result};

/// `∫_0^{t_k} Y` for every grid index `k`: composite Simpson where the interval
/// count is even, Simpson plus a closing 3/8 panel where it is odd, and the
/// trapezoid for the single first interval.
fn cumulative_integrals(samples: &[CMatrix], h: f64) -> Vec<CMatrix> {
    let zero = CMatrix::zeros(samples[0].nrows(), samples[0].ncols());
    let simpson = |upto: usize| -> CMatrix {
        let mut acc = zero.clone();
        for j in (0..upto).step_by(2) {
            acc += &samples[j] + samples[j + 1].map(|z| z * 4.0) + &samples[j + 2];
        }
        acc.map(|z| z * (h / 3.0))
    };
    (0..samples.len())
        .map(|k| match k {
            0 => zero.clone(),
            1 => (&samples[0] + &samples[1]).map(|z| z * (h / 2.0)),
            k if k % 2 == 0 => simpson(k),
            k => {
                let tail = (&samples[k - 3]
                    + samples[k - 2].map(|z| z * 3.0)
                    + samples[k - 1].map(|z| z * 3.0)
                    + &samples[k])
                    .map(|z| z * (3.0 * h / 8.0));
                simpson(k - 3) + tail
            }
        })
        .collect()
}

/// Trace-norm defect of the integral (mild) form at every sample:
/// `‖F(t) − G(t)F(0)G(t)* + (i/ħ)∫_0^t G(t−s)[V, F₂⁻(s)]_{:1}G(t−s)* ds‖_tr`
/// with `G(t) = e^{-itL/ħ}`. Evaluated in the interaction picture, where it
/// has the same trace norm.
pub fn duhamel_residuals(sys: &MeanFieldSystem, traj: &Trajectory) -> Result<Vec<f64>> {
    if traj.len() < 3 {
        return Err(Error::TooFewSamples(traj.len()));
    }
    let h = traj.uniform_step()?;
    let d = sys.modes();
    if let Some(bad) = traj.states().iter().find(|s| s.space() != (Space::Single { d })) {
        return Err(Error::IncompatibleSpaces(format!(
            "TDHF trajectory holds {:?}",
            bad.space()
        )));
    }
    let hbar = sys.hbar();
    let free = SpectralPropagator::new(sys.one_body().matrix(), hbar)?;
    let to_interaction = |x: &CMatrix, t: f64| free.conjugate(x, -t);
    let times = traj.times();
    let states = traj.states();
    let integrands: Vec<CMatrix> = states
        .iter()
        .zip(times)
        .map(|(s, &t)| to_interaction(&interaction_term(sys, s.matrix()), t))
        .collect();
    let integrals = cumulative_integrals(&integrands, h);
    let f0 = states[0].matrix();
    let factor = C64::new(0.0, 1.0 / hbar);
    Ok(states
        .iter()
        .zip(times)
        .zip(&integrals)
        .map(|((s, &t), q)| {
            let defect = to_interaction(s.matrix(), t) - f0 + q.map(|z| z * factor);
            trace_norm(&defect)
        })
        .collect())
}

/// The largest of [`duhamel_residuals`].
pub fn duhamel_residual(sys: &MeanFieldSystem, traj: &Trajectory) -> Result<f64> {
    Ok(duhamel_residuals(sys, traj)?.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, seeded};
    use crate::tdhf::solve;
    use crate::tensor::Operator;

    #[test]
    fn quadrature_is_exact_on_cubics() {
        let h = 0.1;
        let samples: Vec<CMatrix> = (0..8)
            .map(|k| {
                let t = k as f64 * h;
                CMatrix::from_element(1, 1, C64::new(t * t * t - t, 0.0))
            })
            .collect();
        let q = cumulative_integrals(&samples, h);
        for (k, qk) in q.iter().enumerate().skip(2) {
            let t = k as f64 * h;
            let exact = t.powi(4) / 4.0 - t * t / 2.0;
            assert!((qk[(0, 0)].re - exact).abs() < 1e-14, "k={k}");
        }
    }

    fn setup(vnorm: f64, seed: u64) -> (MeanFieldSystem, Operator) {
        let mut rng = seeded(seed);
        let sys = MeanFieldSystem::random(4, 2, vnorm, 1.0, &mut rng).unwrap();
        let f = Operator::new(Space::Single { d: 4 }, random_density(4, &mut rng)).unwrap();
        (sys, f)
    }

    #[test]
    fn free_flow_satisfies_the_identity() {
        let (sys, f) = setup(0.0, 1);
        let traj = solve(&sys, &f, 0.01, 50, 1, None).unwrap();
        assert!(duhamel_residual(&sys, &traj).unwrap() < 1e-10);
    }

    #[test]
    fn residual_is_second_order() {
        let (sys, f) = setup(1.0, 2);
        let coarse = solve(&sys, &f, 0.02, 50, 1, None).unwrap();
        let fine = solve(&sys, &f, 0.01, 100, 1, None).unwrap();
        let ratio = duhamel_residual(&sys, &coarse).unwrap() / duhamel_residual(&sys, &fine).unwrap();
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn too_short_trajectories_are_rejected() {
        let (sys, f) = setup(1.0, 3);
        let traj = solve(&sys, &f, 0.01, 1, 1, None).unwrap();
        assert!(matches!(duhamel_residual(&sys, &traj), Err(Error::TooFewSamples(2))));
    }
}
