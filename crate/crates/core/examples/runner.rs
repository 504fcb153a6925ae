//! The config-driven runner used as a library: a TOML config, one run and one shot sweep.

use gaussfermi::experiment::{run, to_csv, Axis, Command, ExperimentConfig, SweepSpec};

const CONFIG: &str = r#"
command = "tomo-mixed"
modes = 4
eps = 0.2
delta = 0.1
trials = 20
seed = 7
scheme = "commuting"

[state_spec]
kind = "random_gaussian"
purity = "mixed"
"#;

fn main() -> gaussfermi::Result<()> {
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    let rec = run(&cfg)?;
    println!("tomo-mixed: {:?}", rec.aggregate);

    let mut sweep = cfg.clone();
    sweep.command = Command::Sweep;
    sweep.sweep = Some(SweepSpec { base: Command::Estimate, axis: Axis::Shots, points: vec![1e3, 4e3, 1.6e4, 6.4e4] });
    let rec = run(&sweep)?;
    let sw = rec.sweep.as_ref().expect("sweep record");
    for p in &sw.points {
        println!("shots {:>6}: median error {:.4}", p.value, p.aggregate.median_error.unwrap_or(f64::NAN));
    }
    println!("log-log slope {:?}", sw.slope);
    print!("{}", to_csv(&rec)?.lines().take(3).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}
