use super::config::SweepConfig;
use super::sweep::{antisym_density, SweepPoint};
use super::write_atomic;
use crate::fock::{closure_defect, compressed_f_minus};
use crate::hierarchy::{
    error_term, remainder_r, write_reports_csv, BoundContext, BoundReport,
};
use crate::nbody::marginal;
use crate::tensor::trace_norm;
use crate::Result;
use rayon::prelude::*;

/// Largest `d^{n+1}` for which the audit evaluates `R_n` and `𝓔_n` densely.
pub const AUDIT_DENSE_CAP: usize = 1024;

/// Highest hierarchy order audited.
pub const AUDIT_MAX_ORDER: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct AuditResult {
    pub reports: Vec<BoundReport>,
}

impl AuditResult {
    pub fn failures(&self) -> Vec<&BoundReport> {
        self.reports.iter().filter(|r| !r.passes()).collect()
    }

    pub fn passes(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn count(&self, quantity: &str) -> usize {
        self.reports.iter().filter(|r| r.quantity == quantity).count()
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        write_reports_csv(&mut buf, &self.reports).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

fn dense_ok(d: usize, n: usize) -> bool {
    d.checked_pow(n as u32 + 1).is_some_and(|dim| dim <= AUDIT_DENSE_CAP)
}

fn point_reports(cfg: &SweepConfig, point: &SweepPoint) -> Result<Vec<BoundReport>> {
    let sys = &point.system;
    let big_n = sys.particles();
    let d = sys.modes();
    let vnorm = sys.pair_norm();
    let mut out = Vec::new();
    let times = point.exact.times();
    for (k, &t) in times.iter().enumerate() {
        let state = &point.exact.states()[k];
        let f = &point.tdhf.states()[k];
        let ctx = |n: usize| BoundContext {
            particles: big_n,
            n,
            t,
            vnorm,
            f0_norm: point.f0_norm,
        };

        let d1 = marginal(state, 1)?;
        let defect = closure_defect(&antisym_density(state)?, 2)?;
        out.push(BoundReport::new("one_body_norm", d1.operator_norm().powi(2), Some(defect), ctx(1)));

        for n in 1..=AUDIT_MAX_ORDER.min(big_n) {
            let measured = trace_norm(&compressed_f_minus(f.matrix(), n)?);
            out.push(BoundReport::new("f_minus_trace", measured, Some(1.0), ctx(n)));
        }

        let f_norm = f.operator_norm();
        for n in 2..=AUDIT_MAX_ORDER {
            if dense_ok(d, n) {
                let measured = remainder_r(sys, f, n)?.trace_norm();
                let bound = 2.0 * (n * (n - 1)) as f64 * vnorm * f_norm;
                out.push(BoundReport::new("remainder", measured, Some(bound), ctx(n)));
            }
        }

        for n in 1..=AUDIT_MAX_ORDER.min(big_n - 1) {
            if dense_ok(d, n) {
                let measured = error_term(sys, state, n)?.trace_norm();
                let bound = 3.0 * (n * n) as f64 * vnorm / big_n as f64;
                out.push(BoundReport::new("error_term", measured, Some(bound), ctx(n)));
            }
        }

        let measured = trace_norm(&(d1.matrix() - f.matrix()));
        out.push(BoundReport::new("apriori", measured, point.bound_at(cfg, t)?, ctx(1)));
    }
    Ok(out)
}

/// One report per `(quantity, N, n, t)`, sorted in that order.
pub fn run_bound_audit(cfg: &SweepConfig) -> Result<AuditResult> {
    cfg.validate()?;
    let per_point: Vec<Vec<BoundReport>> = cfg
        .n_list
        .par_iter()
        .map(|&n| point_reports(cfg, &SweepPoint::compute(cfg, n)?))
        .collect::<Result<_>>()?;
    let mut reports: Vec<BoundReport> = per_point.into_iter().flatten().collect();
    reports.sort_by(|a, b| {
        a.quantity
            .cmp(&b.quantity)
            .then(a.context.particles.cmp(&b.context.particles))
            .then(a.context.n.cmp(&b.context.n))
            .then(a.context.t.total_cmp(&b.context.t))
    });
    Ok(AuditResult { reports })
}

/// Writes `audit.csv` and `audit_manifest.json` into `cfg.out`.
pub fn write_audit(cfg: &SweepConfig, result: &AuditResult) -> Result<()> {
    std::fs::create_dir_all(&cfg.out)?;
    write_atomic(&cfg.out.join("audit.csv"), result.to_csv().as_bytes())?;
    let failures = result.failures().len();
    super::Manifest::new(cfg, "audit", &["audit.csv"], result.passes())
        .with_extra(serde_json::json!({ "reports": result.reports.len(), "failures": failures }))
        .write(&cfg.out.join("audit_manifest.json"))
}
