use super::config::SweepConfig;
use super::write_atomic;
use crate::fock::{closure_defect, slater_density, AntisymDensity, FockBasis};
use crate::hierarchy::{apriori_bound, difference_norm, scaled_time, MARGIN_TOL};
use crate::nbody::{marginal, ExactFlow, MeanFieldSystem, Trajectory, TrajectoryMeta};
use crate::tdhf::solve;
use crate::tensor::{max_abs_diff, trace_norm, Operator};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::sync::Arc;

/// Version of the sweep CSV layout.
pub const SWEEP_CSV_VERSION: u32 = 1;
pub const SWEEP_CSV_HEADER: &str = "N,t,err_tracenorm,defect2,opnorm_D1,T_scaled,bound,margin";

/// Exact and TDHF trajectories for one particle number.
pub struct SweepPoint {
    pub system: MeanFieldSystem,
    pub exact: Trajectory,
    pub tdhf: Trajectory,
    /// `‖E_{N,1+k}(0)‖_tr` for `k = 0..=m`, with `m ≤ N − 2`.
    pub initial_differences: Vec<f64>,
    pub f0_norm: f64,
}

impl SweepPoint {
    pub fn compute(cfg: &SweepConfig, particles: usize) -> Result<Self> {
        let system = cfg.system(particles)?;
        let orbitals = cfg.initial_orbitals(particles)?;
        let d0 = slater_density(&orbitals)?.to_operator();
        let f0 = marginal(&d0, 1)?;
        let meta = TrajectoryMeta {
            particles,
            modes: cfg.d,
            dt: cfg.dt,
            hbar: cfg.hbar,
            seed: Some(cfg.seed),
            scheme: "spectral".into(),
        };
        let steps = cfg.steps();
        let exact = ExactFlow::new(&system, &d0)?.trajectory(meta, steps, cfg.output_every);
        let tdhf = solve(&system, &f0, cfg.dt, steps, cfg.output_every, Some(cfg.seed))?;
        let m = cfg.m.min(particles - 2);
        let initial_differences = (0..=m)
            .map(|k| difference_norm(&d0, &f0, 1 + k))
            .collect::<Result<_>>()?;
        Ok(Self {
            f0_norm: f0.operator_norm(),
            system,
            exact,
            tdhf,
            initial_differences,
        })
    }

    pub fn particles(&self) -> usize {
        self.system.particles()
    }

    /// The a-priori bound on `‖E_{N,1}(t)‖_tr`, or `None` when `T ≥ 1`.
    pub fn bound_at(&self, cfg: &SweepConfig, t: f64) -> Result<Option<f64>> {
        let t_scaled = scaled_time(self.system.pair_norm(), t, self.system.hbar());
        match apriori_bound(
            self.particles(),
            1,
            self.initial_differences.len() - 1,
            t_scaled,
            &self.initial_differences,
            self.f0_norm,
            cfg.bound_form,
            None,
        ) {
            Ok(b) => Ok(Some(b)),
            Err(Error::BoundInapplicable(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

pub(crate) fn antisym_density(state: &Operator) -> Result<AntisymDensity> {
    let sp = state.space();
    let basis = Arc::new(FockBasis::new(sp.single_dim(), sp.particles())?);
    Ok(AntisymDensity::from_parts(basis, state.matrix().clone()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub particles: usize,
    pub t: f64,
    pub err_tracenorm: f64,
    pub defect2: f64,
    pub opnorm_d1: f64,
    pub t_scaled: f64,
    pub bound: Option<f64>,
}

impl SweepRow {
    pub fn margin(&self) -> Option<f64> {
        self.bound.map(|b| b - self.err_tracenorm)
    }
}

/// Largest entrywise deviation between the one-body marginals of the
/// occupation-number and full tensor-power evolutions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub particles: usize,
    pub max_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub oracle: Vec<OracleCheck>,
}

/// Agreement required between the two representations of the exact flow.
pub const ORACLE_TOL: f64 = 1e-10;

impl SweepResult {
    /// `(N, error)` at the sample closest to `t`, ordered by `N`.
    pub fn errors_at(&self, t: f64) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = Vec::new();
        for row in &self.rows {
            if (row.t - t).abs() <= 1e-9 * t.abs().max(1.0) {
                out.push((row.particles, row.err_tracenorm));
            }
        }
        out
    }

    pub fn final_time(&self) -> f64 {
        self.rows.iter().map(|r| r.t).fold(0.0, f64::max)
    }

    /// Rows whose margin is below `−MARGIN_TOL`.
    pub fn violations(&self) -> Vec<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.margin().is_some_and(|m| m < -MARGIN_TOL))
            .collect()
    }

    pub fn passes(&self) -> bool {
        self.violations().is_empty() && self.oracle.iter().all(|o| o.max_deviation <= ORACLE_TOL)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{SWEEP_CSV_HEADER}").unwrap();
        for r in &self.rows {
            let (bound, margin) = match (r.bound, r.margin()) {
                (Some(b), Some(m)) => (format!("{b:.15e}"), format!("{m:.15e}")),
                _ => ("inapplicable".into(), "inapplicable".into()),
            };
            writeln!(
                s,
                "{},{},{:.15e},{:.15e},{:.15e},{:.15e},{},{}",
                r.particles, r.t, r.err_tracenorm, r.defect2, r.opnorm_d1, r.t_scaled, bound, margin
            )
            .unwrap();
        }
        s
    }
}

fn sweep_rows(cfg: &SweepConfig, point: &SweepPoint) -> Result<Vec<SweepRow>> {
    let sys = &point.system;
    point
        .exact
        .times()
        .iter()
        .zip(point.exact.states().iter().zip(point.tdhf.states()))
        .map(|(&t, (state, f))| {
            let rho = antisym_density(state)?;
            let d1 = marginal(state, 1)?;
            Ok(SweepRow {
                particles: sys.particles(),
                t,
                err_tracenorm: trace_norm(&(d1.matrix() - f.matrix())),
                defect2: closure_defect(&rho, 2)?,
                opnorm_d1: d1.operator_norm(),
                t_scaled: scaled_time(sys.pair_norm(), t, sys.hbar()),
                bound: point.bound_at(cfg, t)?,
            })
        })
        .collect()
}

fn oracle_check(cfg: &SweepConfig, point: &SweepPoint) -> Result<OracleCheck> {
    let particles = point.particles();
    let orbitals = cfg.initial_orbitals(particles)?;
    let dense0 = slater_density(&orbitals)?.embed()?;
    let flow = ExactFlow::new(&point.system, &dense0)?;
    let mut worst: f64 = 0.0;
    for (&t, state) in point.exact.times().iter().zip(point.exact.states()) {
        let dense = marginal(&flow.state(t), 1)?;
        worst = worst.max(max_abs_diff(dense.matrix(), marginal(state, 1)?.matrix()));
    }
    Ok(OracleCheck {
        particles,
        max_deviation: worst,
    })
}

/// Runs every `N` of the configuration in parallel and returns rows sorted by `(N, t)`.
pub fn run_convergence_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let oracle_on = cfg.dense_oracle_enabled();
    let per_point: Vec<(Vec<SweepRow>, Option<OracleCheck>)> = cfg
        .n_list
        .par_iter()
        .map(|&n| {
            let point = SweepPoint::compute(cfg, n)?;
            let rows = sweep_rows(cfg, &point)?;
            let oracle = if oracle_on { Some(oracle_check(cfg, &point)?) } else { None };
            Ok((rows, oracle))
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<SweepRow> = Vec::new();
    let mut oracle = Vec::new();
    for (r, o) in per_point {
        rows.extend(r);
        oracle.extend(o);
    }
    rows.sort_by(|a, b| a.particles.cmp(&b.particles).then(a.t.total_cmp(&b.t)));
    oracle.sort_by_key(|o| o.particles);
    Ok(SweepResult { rows, oracle })
}

/// Writes `sweep.csv` and `sweep_manifest.json` into `cfg.out`.
pub fn write_sweep(cfg: &SweepConfig, result: &SweepResult) -> Result<()> {
    std::fs::create_dir_all(&cfg.out)?;
    write_atomic(&cfg.out.join("sweep.csv"), result.to_csv().as_bytes())?;
    let manifest = super::Manifest::new(cfg, "sweep", &["sweep.csv"], result.passes())
        .with_extra(serde_json::json!({
            "csv_version": SWEEP_CSV_VERSION,
            "oracle": result.oracle,
        }));
    manifest.write(&cfg.out.join("sweep_manifest.json"))
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
