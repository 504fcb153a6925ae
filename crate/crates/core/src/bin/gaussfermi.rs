//! Config-driven experiment runner.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gaussfermi::algorithms::{GaussianSet, Noise};
use gaussfermi::experiment::{
    exit_code, resolve_out_path, run, to_csv, write_record, Axis, Command, ExperimentConfig, Format, StateSpec,
    SweepSpec,
};
use gaussfermi::sampler::Scheme;
use gaussfermi::{Error, Result};

/// Run seeded experiments on fermionic Gaussian states.
///
/// Flags override fields of the `--config` TOML file. Without an output
/// path or directory the record is printed to stdout.
#[derive(Parser, Debug)]
#[command(name = "gaussfermi", version)]
struct Args {
    /// TOML file with ExperimentConfig fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Default directory for output files.
    #[arg(long, env = "GAUSSFERMI_OUT_DIR")]
    out_dir: Option<PathBuf>,

    #[arg(long)]
    command: Option<Command>,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    rank_exponent: Option<usize>,
    #[arg(long)]
    eps_a: Option<f64>,
    #[arg(long)]
    eps_b: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// pauli_pairs, commuting or exact.
    #[arg(long)]
    scheme: Option<Scheme>,
    /// vacuum, ghz3, product:0.1,0.5, random_gaussian:pure|mixed, dense_fixture:PATH.
    #[arg(long)]
    state_spec: Option<StateSpec>,
    #[arg(long)]
    out_path: Option<PathBuf>,
    /// json or csv.
    #[arg(long)]
    format: Option<Format>,
    /// pure_set, mixed_set or rank_set.
    #[arg(long)]
    gaussian_set: Option<GaussianSet>,
    /// Shots per measurement setting, replacing the eps-derived budget.
    #[arg(long)]
    shots: Option<u64>,
    /// depolarizing:P or trace_perturbation:S.
    #[arg(long)]
    noise: Option<Noise>,
    #[arg(long)]
    shot_cap: Option<u64>,
    /// Expected verdict, e.g. CaseA.
    #[arg(long)]
    expected: Option<String>,
    /// Command run at each sweep point.
    #[arg(long)]
    sweep_base: Option<Command>,
    /// shots, eps or modes.
    #[arg(long)]
    sweep_axis: Option<Axis>,
    #[arg(long, value_delimiter = ',')]
    sweep_points: Option<Vec<f64>>,
}

fn build_config(a: Args) -> Result<(ExperimentConfig, Option<PathBuf>)> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::from_toml(&std::fs::read_to_string(p)?)?,
        None => {
            let command = a.command.ok_or_else(|| Error::Validation("--command or --config is required".into()))?;
            let modes = a.modes.ok_or_else(|| Error::Validation("--modes is required".into()))?;
            ExperimentConfig::new(command, modes)
        }
    };
    macro_rules! set {
        ($($f:ident),*) => { $( if let Some(v) = a.$f { cfg.$f = v; } )* };
    }
    macro_rules! set_opt {
        ($($f:ident),*) => { $( if a.$f.is_some() { cfg.$f = a.$f; } )* };
    }
    set!(command, modes, eps_a, delta, trials, seed, scheme, state_spec, format, shot_cap);
    set_opt!(rank_exponent, eps_b, eps, out_path, gaussian_set, shots, noise, expected);
    if a.sweep_base.is_some() || a.sweep_axis.is_some() || a.sweep_points.is_some() {
        let prev = cfg.sweep.take();
        let base = a.sweep_base.or(prev.as_ref().map(|s| s.base));
        let axis = a.sweep_axis.or(prev.as_ref().map(|s| s.axis));
        let points = a.sweep_points.or(prev.map(|s| s.points));
        match (base, axis, points) {
            (Some(base), Some(axis), Some(points)) => cfg.sweep = Some(SweepSpec { base, axis, points }),
            _ => return Err(Error::Validation("a sweep needs a base, an axis and points".into())),
        }
    }
    Ok((cfg, a.out_dir))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = build_config(args).and_then(|(cfg, dir)| {
        let rec = run(&cfg)?;
        match resolve_out_path(&cfg, dir.as_deref()) {
            Some(path) => {
                write_record(&rec, &path, cfg.format)?;
                eprintln!("wrote {}", path.display());
            }
            None => match cfg.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&rec)?),
                Format::Csv => print!("{}", to_csv(&rec)?),
            },
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
