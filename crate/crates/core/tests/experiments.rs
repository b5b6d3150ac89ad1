use tdhf_core::experiments::{
    run_bound_audit, run_convergence_sweep, write_audit, write_sweep, SweepConfig,
};

fn config(out: &std::path::Path) -> SweepConfig {
    SweepConfig {
        d: 5,
        n_list: vec![2, 3, 4],
        t_final: 0.2,
        dt: 1e-2,
        output_every: 5,
        out: out.to_path_buf(),
        ..Default::default()
    }
}

#[test]
fn outputs_are_identical_across_thread_counts() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for (dir, threads) in dirs.iter().zip([1, 4]) {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let cfg = config(dir.path());
        pool.install(|| {
            write_sweep(&cfg, &run_convergence_sweep(&cfg).unwrap()).unwrap();
            write_audit(&cfg, &run_bound_audit(&cfg).unwrap()).unwrap();
        });
    }
    for file in ["sweep.csv", "audit.csv"] {
        let a = std::fs::read(dirs[0].path().join(file)).unwrap();
        let b = std::fs::read(dirs[1].path().join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
}

#[test]
fn manifests_identify_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let res = run_convergence_sweep(&cfg).unwrap();
    write_sweep(&cfg, &res).unwrap();
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("sweep_manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["config_hash"], cfg.hash());
    assert_eq!(manifest["seed"], 1);
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest["passed"], true);
    let rows = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 3 * 5);
}
