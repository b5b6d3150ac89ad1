use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use tdhf_core::experiments::{
    closure_csv, closure_table, log_log_slope, run_bound_audit, run_convergence_sweep,
    run_selftest, write_audit, write_sweep, SweepConfig,
};
use tdhf_core::Error;

/// Exact N-body versus time-dependent Hartree-Fock experiments.
///
/// Settings come from the defaults, then the `--config` file, then flags;
/// later sources win.
#[derive(Parser, Debug)]
#[command(name = "tdhf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare the exact one-body marginal with TDHF for each particle number.
    Sweep(ConfigArgs),
    /// Evaluate every bound along the sweep trajectories.
    Audit(ConfigArgs),
    /// Closure defects of Slater and mixed states.
    Closure(ConfigArgs),
    /// Fast structural and property checks.
    Selftest,
}

#[derive(Args, Debug, Default)]
struct ConfigArgs {
    /// Flat JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Single-particle dimension d.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    nmin: Option<usize>,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    tfinal: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Operator norm of the pair potential.
    #[arg(long)]
    vnorm: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also evolve in the full tensor-power space and compare.
    #[arg(long)]
    dense_oracle: bool,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<SweepConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => SweepConfig::from_file(path)?,
            None => SweepConfig::default(),
        };
        if let Some(d) = self.dim {
            cfg.d = d;
        }
        if self.nmin.is_some() || self.nmax.is_some() {
            let lo = self.nmin.unwrap_or_else(|| cfg.n_list.iter().copied().min().unwrap_or(2));
            let hi = self.nmax.unwrap_or_else(|| cfg.max_particles());
            if lo > hi {
                return Err(Error::Config(format!("--nmin {lo} exceeds --nmax {hi}")));
            }
            cfg.n_list = (lo..=hi).collect();
        }
        if let Some(t) = self.tfinal {
            cfg.t_final = t;
        }
        if let Some(dt) = self.dt {
            cfg.dt = dt;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(v) = self.vnorm {
            cfg.vnorm = v;
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        if self.dense_oracle {
            cfg.dense_oracle = Some(true);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn sweep(args: &ConfigArgs) -> Result<bool, Error> {
    let cfg = args.resolve()?;
    let res = run_convergence_sweep(&cfg)?;
    write_sweep(&cfg, &res)?;
    let t = res.final_time();
    let errors = res.errors_at(t);
    for (n, e) in &errors {
        println!("N = {n}: ‖D1 − F‖_tr = {e:.6e} at t = {t}");
    }
    let positive: Vec<(f64, f64)> = errors
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|&(n, e)| (n as f64, e))
        .collect();
    if positive.len() >= 2 {
        println!("log-log slope: {:.3}", log_log_slope(&positive));
    }
    for o in &res.oracle {
        println!("dense oracle N = {}: max deviation {:.3e}", o.particles, o.max_deviation);
    }
    for r in res.violations() {
        eprintln!("bound violated: N = {}, t = {}, margin {:?}", r.particles, r.t, r.margin());
    }
    println!("wrote {}", cfg.out.join("sweep.csv").display());
    Ok(res.passes())
}

fn audit(args: &ConfigArgs) -> Result<bool, Error> {
    let cfg = args.resolve()?;
    let res = run_bound_audit(&cfg)?;
    write_audit(&cfg, &res)?;
    for q in ["apriori", "error_term", "one_body_norm", "f_minus_trace", "remainder"] {
        let rows: Vec<_> = res.reports.iter().filter(|r| r.quantity == q).collect();
        let worst = rows.iter().filter_map(|r| r.margin()).fold(f64::INFINITY, f64::min);
        let inapplicable = rows.iter().filter(|r| r.bound.is_none()).count();
        println!("{q}: {} rows, min margin {worst:.3e}, {inapplicable} inapplicable", rows.len());
    }
    for r in res.failures() {
        eprintln!(
            "FAIL {} N = {} n = {} t = {}: measured {:.6e} > bound {:?}",
            r.quantity, r.context.particles, r.context.n, r.context.t, r.measured, r.bound
        );
    }
    println!("wrote {}", cfg.out.join("audit.csv").display());
    Ok(res.passes())
}

fn closure(args: &ConfigArgs) -> Result<bool, Error> {
    let cfg = args.resolve()?;
    let rows = closure_table(&cfg)?;
    let csv = closure_csv(&rows);
    std::fs::create_dir_all(&cfg.out)?;
    std::fs::write(cfg.out.join("closure.csv"), &csv)?;
    print!("{csv}");
    Ok(true)
}

fn selftest() -> Result<bool, Error> {
    let mut ok = true;
    for c in run_selftest()? {
        let status = if c.passes() { "PASS" } else { "FAIL" };
        println!("{status} {:<22} worst {:.3e} (tolerance {:.0e})", c.name, c.worst, c.tolerance);
        ok &= c.passes();
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Audit(a) => audit(a),
        Command::Closure(a) => closure(a),
        Command::Selftest => selftest(),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
