//! Configuration, the convergence sweep, the bound audit, closure tables and
//! the self-test, with CSV and JSON output.

mod audit;
mod closure;
mod config;
mod selftest;
mod sweep;

pub use audit::{run_bound_audit, write_audit, AuditResult, AUDIT_DENSE_CAP, AUDIT_MAX_ORDER};
pub use closure::{closure_csv, closure_table, slater_defect, ClosureKind, ClosureRow};
pub use config::{InitialOrbitals, SweepConfig, FOCK_DIM_CAP};
pub use selftest::{run_selftest, Check};
pub use sweep::{
    log_log_slope, run_convergence_sweep, write_sweep, OracleCheck, SweepPoint, SweepResult,
    SweepRow, ORACLE_TOL, SWEEP_CSV_HEADER, SWEEP_CSV_VERSION,
};

use crate::Result;
use serde::Serialize;
use std::path::Path;

/// Code version recorded in every manifest.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Run manifest tying output files to the configuration that produced them.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub kind: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub files: Vec<String>,
    pub passed: bool,
    pub config: SweepConfig,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub extra: serde_json::Value,
}

impl Manifest {
    pub fn new(cfg: &SweepConfig, kind: &str, files: &[&str], passed: bool) -> Self {
        Self {
            kind: kind.into(),
            version: VERSION.into(),
            config_hash: cfg.hash(),
            seed: cfg.seed,
            files: files.iter().map(|f| f.to_string()).collect(),
            passed,
            config: cfg.clone(),
            extra: serde_json::Value::Null,
        }
    }

    pub fn with_extra(mut self, extra: serde_json::Value) -> Self {
        self.extra = extra;
        self
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_atomic(path, text.as_bytes())
    }
}

/// Writes through a sibling temporary file so readers never see partial output.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
