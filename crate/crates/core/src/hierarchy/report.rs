use crate::Result;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// A report passes when `bound − measured ≥ −MARGIN_TOL`.
pub const MARGIN_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundContext {
    pub particles: usize,
    pub n: usize,
    pub t: f64,
    pub vnorm: f64,
    pub f0_norm: f64,
}

/// A measured quantity next to its analytic bound. `bound` is `None` when the
/// bound does not apply (for instance scaled time `T ≥ 1`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub quantity: String,
    pub measured: f64,
    pub bound: Option<f64>,
    pub context: BoundContext,
}

impl BoundReport {
    pub fn new(quantity: &str, measured: f64, bound: Option<f64>, context: BoundContext) -> Self {
        Self {
            quantity: quantity.into(),
            measured,
            bound,
            context,
        }
    }

    pub fn margin(&self) -> Option<f64> {
        self.bound.map(|b| b - self.measured)
    }

    /// Inapplicable rows never fail.
    pub fn passes(&self) -> bool {
        self.margin().is_none_or(|m| m >= -MARGIN_TOL)
    }
}

/// CSV with columns `quantity,N,n,t,measured,bound,margin`.
pub fn write_reports_csv<W: Write>(mut out: W, reports: &[BoundReport]) -> Result<()> {
    writeln!(out, "quantity,N,n,t,measured,bound,margin")?;
    for r in reports {
        let c = &r.context;
        let (bound, margin) = match (r.bound, r.margin()) {
            (Some(b), Some(m)) => (format!("{b:.12e}"), format!("{m:.12e}")),
            _ => ("inapplicable".to_string(), "inapplicable".to_string()),
        };
        writeln!(
            out,
            "{},{},{},{},{:.12e},{},{}",
            r.quantity, c.particles, c.n, c.t, r.measured, bound, margin
        )?;
    }
    Ok(())
}
