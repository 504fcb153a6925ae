use std::process::Command as Proc;

use gaussfermi::experiment::{run, to_csv, Axis, Command, ExperimentConfig, Purity, RunRecord, StateSpec, SweepSpec};

fn bin() -> Proc {
    Proc::new(env!("CARGO_BIN_EXE_gaussfermi"))
}

fn tomo_config() -> ExperimentConfig {
    let mut c = ExperimentConfig::new(Command::TomoMixed, 4);
    c.eps = Some(0.2);
    c.delta = 0.1;
    c.trials = 50;
    c.seed = 7;
    c.state_spec = StateSpec::RandomGaussian { purity: Purity::Mixed };
    c
}

#[test]
fn tomo_mixed_run_meets_success_rate() {
    let rec = run(&tomo_config()).unwrap();
    assert_eq!(rec.results.len(), 50);
    assert!(rec.aggregate.success_fraction.unwrap() >= 0.9);
}

#[test]
fn verify_bounds_has_no_violations() {
    let mut c = ExperimentConfig::new(Command::VerifyBounds, 3);
    c.trials = 500;
    c.seed = 1;
    let rec = run(&c).unwrap();
    assert_eq!(rec.aggregate.success_fraction, Some(1.0));
    assert!(rec.results.iter().all(|r| r.detail["violations"] == 0));
}

#[test]
fn reruns_are_identical_across_pool_sizes() {
    let c = tomo_config();
    let a = run(&c).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| run(&c).unwrap());
    assert_eq!(serde_json::to_string(&a.results).unwrap(), serde_json::to_string(&b.results).unwrap());
}

#[test]
fn single_point_sweep_has_no_slope() {
    let mut c = ExperimentConfig::new(Command::Sweep, 3);
    c.trials = 4;
    c.state_spec = StateSpec::RandomGaussian { purity: Purity::Mixed };
    c.sweep = Some(SweepSpec { base: Command::Estimate, axis: Axis::Shots, points: vec![1000.0] });
    let rec = run(&c).unwrap();
    let sw = rec.sweep.unwrap();
    assert_eq!(sw.points.len(), 1);
    assert_eq!(sw.slope, None);
}

#[test]
fn shot_sweep_slope_is_near_minus_half() {
    let mut c = ExperimentConfig::new(Command::Sweep, 3);
    c.trials = 40;
    c.seed = 11;
    c.state_spec = StateSpec::RandomGaussian { purity: Purity::Mixed };
    c.sweep = Some(SweepSpec { base: Command::Estimate, axis: Axis::Shots, points: vec![1e3, 4e3, 1.6e4, 6.4e4] });
    let slope = run(&c).unwrap().sweep.unwrap().slope.unwrap();
    assert!((-0.6..=-0.4).contains(&slope), "slope {slope}");
}

#[test]
fn eps_sweep_on_mixed_tomography_succeeds_everywhere() {
    let mut c = ExperimentConfig::new(Command::Sweep, 3);
    c.trials = 20;
    c.state_spec = StateSpec::RandomGaussian { purity: Purity::Mixed };
    c.sweep = Some(SweepSpec { base: Command::TomoMixed, axis: Axis::Eps, points: vec![0.4, 0.2, 0.1] });
    for p in run(&c).unwrap().sweep.unwrap().points {
        assert!(p.aggregate.success_fraction.unwrap() >= 0.9, "eps {}", p.value);
    }
}

#[test]
fn csv_has_fixed_columns() {
    let mut c = ExperimentConfig::new(Command::Estimate, 2);
    c.eps = Some(0.3);
    c.trials = 3;
    let text = to_csv(&run(&c).unwrap()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("trial,verdict_or_error,shots,seed_stream,error"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn cli_writes_json_into_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["--command", "estimate", "--modes", "2", "--eps", "0.3", "--trials", "2", "--seed", "5"])
        .env("GAUSSFERMI_OUT_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("estimate-5.json")).unwrap();
    let rec: RunRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(rec.results.len(), 2);
    // The config echo alone reproduces the run.
    let again = run(&rec.config).unwrap();
    assert_eq!(again.results, rec.results);
}

#[test]
fn cli_reads_toml_and_lets_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "command = \"estimate\"\nmodes = 2\neps = 0.3\ntrials = 5\nformat = \"csv\"\n\n[state_spec]\nkind = \"product\"\nlambdas = [0.5, -0.5]\n",
    )
    .unwrap();
    let out = dir.path().join("out.csv");
    let status = bin()
        .arg("--config")
        .arg(&cfg)
        .args(["--trials", "2", "--out-path"])
        .arg(&out)
        .env_remove("GAUSSFERMI_OUT_DIR")
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(std::fs::read_to_string(out).unwrap().lines().count(), 3);
}

#[test]
fn cli_exit_codes() {
    let code = |args: &[&str]| bin().args(args).env_remove("GAUSSFERMI_OUT_DIR").output().unwrap().status.code();
    assert_eq!(code(&["--command", "test-pure", "--modes", "4", "--eps-a", "0.1", "--eps-b", "0.2"]), Some(2));
    assert_eq!(code(&["--command", "tomo-mixed", "--modes", "4"]), Some(2));
    assert_eq!(code(&["--command", "estimate", "--modes", "4", "--eps", "0.0001", "--shot-cap", "1000"]), Some(3));
    assert_eq!(code(&["--command", "verify-bounds", "--modes", "2"]), Some(0));
}
