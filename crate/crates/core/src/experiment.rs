//! Seeded, config-driven batch runs.
//!
//! An [`ExperimentConfig`] names a command, the input state and the accuracy
//! parameters; [`run`] executes `trials` independent repetitions (in parallel,
//! merged by trial index) and returns a [`RunRecord`] that can be written as
//! JSON or CSV. Trial `t` draws all of its randomness from
//! `RngStream { seed, trial: t, .. }`, so outcomes do not depend on the thread count.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algorithms::{
    learn_mixed_from_estimate, learn_pure_from_estimate, reduce_identity_testing, robustness_experiment,
    test_bounded_rank, test_pure, tomograph_mixed, tomograph_pure, GaussianSet, Noise, TestConfig, MAX_LOCAL_MODES,
};
use crate::dense::{gaussian_to_dense, trace_distance, DenseState, MAX_DENSE_MODES};
use crate::error::{Error, Result};
use crate::gaussian::{distance_bounds, DistanceMode, GaussianState};
use crate::random;
use crate::sampler::{Estimator, RngStream, Scheme, StateSource, DEFAULT_SHOT_CAP};
use crate::skewlin::{skew_norm, Schatten};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Slack allowed when checking the distance-bound sandwich.
pub const BOUND_TOL: f64 = 1e-9;
/// Mode cap for commands that only touch correlation matrices.
pub const MAX_ESTIMATE_MODES: usize = 20;

fn parse_enum<T: DeserializeOwned>(s: &str, what: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(s.trim().to_string()))
        .map_err(|_| Error::Parse(format!("unknown {what} {s:?}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyBounds,
    Estimate,
    TestPure,
    TestRank,
    ReduceId,
    TomoPure,
    TomoMixed,
    Robustness,
    Sweep,
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_enum(s, "command")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_enum(s, "format")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Purity {
    Pure,
    Mixed,
}

/// Input state of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Vacuum,
    /// `⊗_j (I + λ_j Z_j)/2`.
    Product { lambdas: Vec<f64> },
    /// A fresh Haar-rotated Gaussian state per trial.
    RandomGaussian { purity: Purity },
    /// Dense matrix in the text format of [`DenseState::to_text`].
    DenseFixture { path: PathBuf },
    /// `(|000⟩ + |111⟩)/√2`.
    Ghz3,
}

impl FromStr for StateSpec {
    type Err = Error;
    /// `vacuum`, `ghz3`, `product:0.1,0.5`, `random_gaussian:pure`, `dense_fixture:path`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = s.split_once(':').map_or((s, None), |(h, a)| (h, Some(a)));
        match (head.trim(), arg) {
            ("vacuum", None) => Ok(StateSpec::Vacuum),
            ("ghz3", None) => Ok(StateSpec::Ghz3),
            ("product", Some(a)) => {
                let lambdas = a
                    .split(',')
                    .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("product entry {x:?}: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                Ok(StateSpec::Product { lambdas })
            }
            ("random_gaussian", Some(a)) => Ok(StateSpec::RandomGaussian { purity: parse_enum(a, "purity")? }),
            ("dense_fixture", Some(a)) => Ok(StateSpec::DenseFixture { path: PathBuf::from(a) }),
            _ => Err(Error::Parse(format!("unknown state spec {s:?}"))),
        }
    }
}

impl FromStr for Noise {
    type Err = Error;
    /// `depolarizing:0.05` or `trace_perturbation:0.01`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, v) = s.split_once(':').ok_or_else(|| Error::Parse(format!("noise {s:?} lacks a strength")))?;
        let v: f64 = v.trim().parse().map_err(|e| Error::Parse(format!("noise strength: {e}")))?;
        match kind.trim() {
            "depolarizing" => Ok(Noise::Depolarizing(v)),
            "trace_perturbation" => Ok(Noise::TracePerturbation(v)),
            _ => Err(Error::Parse(format!("unknown noise {kind:?}"))),
        }
    }
}

impl FromStr for GaussianSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_enum(s, "gaussian set")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Shots per measurement setting.
    Shots,
    Eps,
    Modes,
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_enum(s, "sweep axis")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: Command,
    pub axis: Axis,
    pub points: Vec<f64>,
}

fn default_delta() -> f64 {
    0.1
}
fn default_trials() -> u64 {
    1
}
fn default_scheme() -> Scheme {
    Scheme::Commuting
}
fn default_state() -> StateSpec {
    StateSpec::Vacuum
}
fn default_cap() -> u64 {
    DEFAULT_SHOT_CAP
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub modes: usize,
    #[serde(default)]
    pub rank_exponent: Option<usize>,
    #[serde(default)]
    pub eps_a: f64,
    #[serde(default)]
    pub eps_b: Option<f64>,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default = "default_state")]
    pub state_spec: StateSpec,
    #[serde(default)]
    pub out_path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Defaults to `mixed_set` for `test-pure` and `rank_set` for `test-rank`.
    #[serde(default)]
    pub gaussian_set: Option<GaussianSet>,
    /// Explicit shots per setting, overriding the budget derived from `eps`.
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default)]
    pub noise: Option<Noise>,
    #[serde(default = "default_cap")]
    pub shot_cap: u64,
    /// Expected verdict string; sets per-trial success for test commands.
    #[serde(default)]
    pub expected: Option<String>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

impl ExperimentConfig {
    pub fn new(command: Command, modes: usize) -> Self {
        ExperimentConfig {
            command,
            modes,
            rank_exponent: None,
            eps_a: 0.0,
            eps_b: None,
            eps: None,
            delta: default_delta(),
            trials: 1,
            seed: 0,
            scheme: Scheme::Commuting,
            state_spec: StateSpec::Vacuum,
            out_path: None,
            format: Format::Json,
            gaussian_set: None,
            shots: None,
            noise: None,
            shot_cap: DEFAULT_SHOT_CAP,
            expected: None,
            sweep: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    fn need(v: Option<f64>, name: &str) -> Result<f64> {
        v.ok_or_else(|| Error::Validation(format!("{name} is required for this command")))
    }

    pub fn test_config(&self) -> Result<TestConfig> {
        let (set, r) = match self.command {
            Command::TestPure => (self.gaussian_set.unwrap_or(GaussianSet::MixedSet), 0),
            Command::TestRank => (
                self.gaussian_set.unwrap_or(GaussianSet::RankSet),
                self.rank_exponent.ok_or_else(|| Error::Validation("rank_exponent is required for test-rank".into()))?,
            ),
            _ => return Err(Error::Validation("not a test command".into())),
        };
        Ok(TestConfig::new(self.eps_a, Self::need(self.eps_b, "eps_b")?, self.delta, r, set))
    }

    /// Checks every field against the preconditions of the command. Runs no sampling.
    pub fn validate(&self) -> Result<()> {
        let n = self.modes;
        if self.command == Command::Sweep {
            let sw = self.sweep.as_ref().ok_or_else(|| Error::Validation("sweep needs a [sweep] table".into()))?;
            if sw.base == Command::Sweep {
                return Err(Error::Validation("a sweep cannot sweep sweeps".into()));
            }
            if sw.points.is_empty() {
                return Err(Error::Validation("sweep points are empty".into()));
            }
            for &p in &sw.points {
                self.at_point(sw, p)?.validate()?;
            }
            return Ok(());
        }
        let cap = match self.command {
            Command::Estimate => MAX_ESTIMATE_MODES,
            Command::ReduceId => MAX_LOCAL_MODES,
            _ => MAX_DENSE_MODES,
        };
        if n == 0 || n > cap {
            return Err(Error::Validation(format!("modes = {n} outside [1, {cap}] for {:?}", self.command)));
        }
        if self.trials == 0 || self.trials > 1_000_000 {
            return Err(Error::Validation(format!("trials = {} outside [1, 10^6]", self.trials)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Validation(format!("delta = {} outside (0,1)", self.delta)));
        }
        if self.shots == Some(0) {
            return Err(Error::Validation("shots must be positive".into()));
        }
        if let Some(e) = self.eps {
            if !(e > 0.0 && e < 1.0) && self.command != Command::Estimate {
                return Err(Error::Validation(format!("eps = {e} outside (0,1)")));
            }
            if !(e > 0.0 && e <= 2.0) {
                return Err(Error::Validation(format!("eps = {e} outside (0,2]")));
            }
        }
        match &self.state_spec {
            StateSpec::Product { lambdas } => {
                if lambdas.len() != n {
                    return Err(Error::Validation(format!("{} product parameters for {n} modes", lambdas.len())));
                }
                GaussianState::product_state(lambdas).map_err(|e| Error::Validation(e.to_string()))?;
            }
            StateSpec::Ghz3 if n != 3 => return Err(Error::Validation("ghz3 has 3 modes".into())),
            StateSpec::DenseFixture { path } => {
                let d = load_fixture(path)?;
                if d.modes() != n {
                    return Err(Error::Validation(format!("fixture has {} modes, config says {n}", d.modes())));
                }
            }
            _ => {}
        }
        match self.command {
            Command::Estimate => {
                if self.shots.is_none() && self.scheme != Scheme::Exact {
                    Self::need(self.eps, "eps (or shots)")?;
                }
            }
            Command::TestPure => {
                self.test_config()?.pure_thresholds(n)?;
            }
            Command::TestRank => {
                self.test_config()?.rank_thresholds(n)?;
            }
            Command::ReduceId | Command::TomoPure | Command::TomoMixed => {
                if self.shots.is_none() {
                    Self::need(self.eps, "eps")?;
                }
            }
            Command::Robustness => {
                Self::need(self.eps, "eps")?;
                self.noise.ok_or_else(|| Error::Validation("robustness needs a noise model".into()))?;
                if matches!(self.state_spec, StateSpec::DenseFixture { .. } | StateSpec::Ghz3) {
                    return Err(Error::Validation("robustness needs a Gaussian base state".into()));
                }
            }
            Command::VerifyBounds | Command::Sweep => {}
        }
        if self.command == Command::TomoPure
            && matches!(self.state_spec, StateSpec::RandomGaussian { purity: Purity::Mixed })
        {
            return Err(Error::Validation("tomo-pure needs a pure input".into()));
        }
        Ok(())
    }

    /// The base config of a sweep with the axis variable set to `value`.
    pub fn at_point(&self, sw: &SweepSpec, value: f64) -> Result<ExperimentConfig> {
        let mut c = self.clone();
        c.command = sw.base;
        c.sweep = None;
        match sw.axis {
            Axis::Shots => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(Error::Validation(format!("shots point {value} is not a positive integer")));
                }
                c.shots = Some(value as u64);
            }
            Axis::Eps => c.eps = Some(value),
            Axis::Modes => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(Error::Validation(format!("modes point {value} is not a positive integer")));
                }
                c.modes = value as usize;
            }
        }
        Ok(c)
    }

    fn estimator(&self) -> Estimator {
        Estimator { scheme: self.scheme, shot_cap: self.shot_cap }
    }
}

fn load_fixture(path: &Path) -> Result<DenseState> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Validation(format!("cannot read fixture {}: {e}", path.display())))?;
    DenseState::from_text(&text)
}

/// The state prepared for one trial.
struct Prepared {
    source: StateSource,
    gaussian: Option<GaussianState>,
}

fn prepare(cfg: &ExperimentConfig, stream: RngStream) -> Result<Prepared> {
    let n = cfg.modes;
    let g = match &cfg.state_spec {
        StateSpec::Vacuum => GaussianState::vacuum(n)?,
        StateSpec::Product { lambdas } => GaussianState::product_state(lambdas)?,
        StateSpec::RandomGaussian { purity } => {
            let mut rng = stream.child(1000).rng();
            GaussianState::from_correlation(random::correlation(n, *purity == Purity::Pure, &mut rng))?
        }
        StateSpec::DenseFixture { path } => {
            return Ok(Prepared { source: StateSource::Dense(load_fixture(path)?), gaussian: None })
        }
        StateSpec::Ghz3 => return Ok(Prepared { source: StateSource::Dense(DenseState::ghz3()), gaussian: None }),
    };
    Ok(Prepared { source: StateSource::ExactGaussian(g.clone()), gaussian: Some(g) })
}

/// One repetition of a command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: u64,
    pub verdict_or_error: String,
    pub shots: u64,
    /// `seed:trial`.
    pub seed_stream: String,
    /// Command-specific error metric (estimation or dense trace-distance error).
    pub error: Option<f64>,
    pub success: Option<bool>,
    pub detail: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: u64,
    pub success_fraction: Option<f64>,
    pub median_error: Option<f64>,
    pub total_shots: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub results: Vec<TrialOutcome>,
    pub aggregate: Aggregate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub axis: Axis,
    pub points: Vec<SweepPoint>,
    /// Least-squares slope of `ln(median error)` against `ln(value)`; absent below two usable points.
    pub slope: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub version: String,
    pub config: ExperimentConfig,
    pub results: Vec<TrialOutcome>,
    pub aggregate: Aggregate,
    pub sweep: Option<SweepRecord>,
    pub wall_time_s: f64,
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

fn dense_error(learned: &GaussianState, src: &StateSource) -> Result<f64> {
    trace_distance(&gaussian_to_dense(learned)?, &src.to_dense()?)
}

fn run_trial(cfg: &ExperimentConfig, trial: u64) -> Result<TrialOutcome> {
    let stream = RngStream::new(cfg.seed).with_trial(trial);
    let mut out = TrialOutcome {
        trial,
        verdict_or_error: String::new(),
        shots: 0,
        seed_stream: format!("{}:{}", cfg.seed, trial),
        error: None,
        success: None,
        detail: serde_json::Value::Null,
    };
    let est = cfg.estimator();
    let expect = |v: &str| cfg.expected.as_ref().map(|e| e == v);
    match cfg.command {
        Command::VerifyBounds => {
            let (checks, violations) = verify_bounds_trial(cfg.modes, stream)?;
            out.verdict_or_error = if violations == 0 { "ok".into() } else { "violation".into() };
            out.success = Some(violations == 0);
            out.detail = serde_json::json!({ "checks": checks, "violations": violations });
        }
        Command::Estimate => {
            let p = prepare(cfg, stream)?;
            let g = match cfg.shots {
                Some(s) => est.estimate_with_shots(&p.source, s, stream.child(1))?,
                None => est.estimate(&p.source, cfg.eps.unwrap_or(1.0), cfg.delta, stream.child(1))?,
            };
            let err = skew_norm(&g.gamma_hat.checked_sub(&p.source.exact_gamma()?)?, Schatten::Inf);
            out.verdict_or_error = "estimated".into();
            out.shots = g.shots_used;
            out.error = Some(err);
            out.success = cfg.eps.map(|e| err <= e);
            out.detail = serde_json::json!({ "lemma_bound": g.lemma_bound, "eps_stat": g.eps_stat });
        }
        Command::TestPure | Command::TestRank => {
            let p = prepare(cfg, stream)?;
            let tc = cfg.test_config()?;
            let v = if cfg.command == Command::TestPure {
                test_pure(&p.source, &tc, &est, stream.child(1))?
            } else {
                test_bounded_rank(&p.source, &tc, &est, stream.child(1))?
            };
            out.verdict_or_error = format!("{:?}", v.verdict);
            out.shots = v.shots_used;
            out.success = expect(&out.verdict_or_error);
            out.detail = to_value(&v);
        }
        Command::ReduceId => {
            let p = prepare(cfg, stream)?;
            let eps = cfg.eps.expect("validated");
            let r = reduce_identity_testing(&p.source, eps, cfg.delta, &est, stream.child(1))?;
            out.verdict_or_error = format!("{:?}", r.verdict);
            out.shots = r.shots_used;
            out.success = expect(&out.verdict_or_error);
            out.detail = to_value(&r);
        }
        Command::TomoPure | Command::TomoMixed => {
            let p = prepare(cfg, stream)?;
            let pure = cfg.command == Command::TomoPure;
            let (learned, shots, detail) = match cfg.shots {
                Some(s) => {
                    let g = est.estimate_with_shots(&p.source, s, stream.child(1))?;
                    let l = if pure { learn_pure_from_estimate(&g.gamma_hat)? } else { learn_mixed_from_estimate(&g.gamma_hat)? };
                    (l, g.shots_used, serde_json::Value::Null)
                }
                None => {
                    let eps = cfg.eps.expect("validated");
                    let rep = if pure {
                        tomograph_pure(&p.source, eps, cfg.delta, &est, stream.child(1))?
                    } else {
                        tomograph_mixed(&p.source, eps, cfg.delta, &est, stream.child(1))?
                    };
                    let d = serde_json::json!({ "eps_stat": rep.eps_stat, "conservative_budget": rep.conservative_budget });
                    (rep.learned, rep.shots_used, d)
                }
            };
            let err = dense_error(&learned, &p.source)?;
            out.verdict_or_error = "learned".into();
            out.shots = shots;
            out.error = Some(err);
            out.success = cfg.eps.map(|e| err <= e);
            out.detail = detail;
        }
        Command::Robustness => {
            let p = prepare(cfg, stream)?;
            let base = p.gaussian.expect("validated Gaussian base");
            let eps = cfg.eps.expect("validated");
            match robustness_experiment(&base, cfg.noise.expect("validated"), eps, cfg.delta, &est, stream.child(1)) {
                Ok(rec) => {
                    out.verdict_or_error = "learned".into();
                    out.shots = rec.shots_used;
                    out.error = Some(rec.dense_error);
                    out.success = Some(rec.dense_error <= eps);
                    out.detail = serde_json::json!({
                        "promise": rec.promise,
                        "promise_value": rec.promise_value,
                        "d_nongauss": rec.d_nongauss,
                        "inner_eps": rec.inner_eps,
                    });
                }
                Err(Error::PromiseNotCertified { value, limit }) => {
                    out.verdict_or_error = "out_of_contract".into();
                    out.detail = serde_json::json!({ "promise_value": value, "limit": limit });
                }
                Err(e) => return Err(e),
            }
        }
        Command::Sweep => unreachable!("sweeps are expanded before trials run"),
    }
    Ok(out)
}

/// Draws two pure and two mixed Gaussian states and checks the distance
/// sandwich for every applicable pairing. Returns `(checks, violations)`.
fn verify_bounds_trial(n: usize, stream: RngStream) -> Result<(u32, u32)> {
    let mut rng = stream.child(1).rng();
    let mut states = Vec::new();
    for pure in [true, true, false, false] {
        let s = GaussianState::from_correlation(random::correlation(n, pure, &mut rng))?;
        let d = gaussian_to_dense(&s)?;
        states.push((s, d));
    }
    let pairs = [
        (0, 1, DistanceMode::PurePure),
        (0, 1, DistanceMode::MixedMixed),
        (2, 3, DistanceMode::MixedMixed),
        (0, 2, DistanceMode::PureVsAny),
        (1, 3, DistanceMode::MixedMixed),
    ];
    let mut violations = 0;
    for &(i, j, mode) in &pairs {
        let dist = trace_distance(&states[i].1, &states[j].1)?;
        let b = distance_bounds(states[i].0.corr(), states[j].0.corr(), mode)?;
        let uppers = [Some(b.ub_mixed), b.ub_pure, b.ub_pure_vs_any];
        let bad = dist < b.lb_infty - BOUND_TOL || uppers.iter().flatten().any(|&u| dist > u + BOUND_TOL);
        violations += bad as u32;
    }
    Ok((pairs.len() as u32, violations))
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

pub fn aggregate(results: &[TrialOutcome]) -> Aggregate {
    let judged: Vec<bool> = results.iter().filter_map(|r| r.success).collect();
    Aggregate {
        trials: results.len() as u64,
        success_fraction: (!judged.is_empty())
            .then(|| judged.iter().filter(|&&s| s).count() as f64 / judged.len() as f64),
        median_error: median(results.iter().filter_map(|r| r.error).collect()),
        total_shots: results.iter().map(|r| r.shots).fold(0u64, u64::saturating_add),
    }
}

/// Least-squares slope of `ln y` against `ln x` over points with `x, y > 0`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<TrialOutcome>> {
    (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect()
}

/// Validates and executes the config. Nothing is written.
pub fn run(cfg: &ExperimentConfig) -> Result<RunRecord> {
    cfg.validate()?;
    let start = Instant::now();
    let (results, sweep_rec) = if cfg.command == Command::Sweep {
        let sw = cfg.sweep.as_ref().expect("validated");
        let rec = sweep(cfg, sw)?;
        (Vec::new(), Some(rec))
    } else {
        (run_trials(cfg)?, None)
    };
    let aggregate = match &sweep_rec {
        Some(s) => aggregate(&s.points.iter().flat_map(|p| p.results.clone()).collect::<Vec<_>>()),
        None => aggregate(&results),
    };
    Ok(RunRecord {
        version: VERSION.to_string(),
        config: cfg.clone(),
        results,
        aggregate,
        sweep: sweep_rec,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// One sub-run per point of `sw`, plus the log-log slope of median error against the axis value.
pub fn sweep(base: &ExperimentConfig, sw: &SweepSpec) -> Result<SweepRecord> {
    let mut points = Vec::with_capacity(sw.points.len());
    for &value in &sw.points {
        let c = base.at_point(sw, value)?;
        c.validate()?;
        let results = run_trials(&c)?;
        let aggregate = aggregate(&results);
        points.push(SweepPoint { value, results, aggregate });
    }
    let xy: Vec<(f64, f64)> =
        points.iter().filter_map(|p| p.aggregate.median_error.map(|m| (p.value, m))).collect();
    Ok(SweepRecord { axis: sw.axis, points, slope: log_log_slope(&xy) })
}

/// CSV with columns `trial, verdict_or_error, shots, seed_stream, error`;
/// sweeps get a leading `point` column.
pub fn to_csv(rec: &RunRecord) -> Result<String> {
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let mut rows: Vec<(Option<f64>, &TrialOutcome)> = Vec::new();
    match &rec.sweep {
        Some(s) => rows.extend(s.points.iter().flat_map(|p| p.results.iter().map(move |r| (Some(p.value), r)))),
        None => rows.extend(rec.results.iter().map(|r| (None, r))),
    }
    let mut header = vec!["trial", "verdict_or_error", "shots", "seed_stream", "error"];
    if rec.sweep.is_some() {
        header.insert(0, "point");
    }
    w.write_record(&header).map_err(csv_err)?;
    for (point, r) in rows {
        let mut fields = vec![
            r.trial.to_string(),
            r.verdict_or_error.clone(),
            r.shots.to_string(),
            r.seed_stream.clone(),
            r.error.map(|e| e.to_string()).unwrap_or_default(),
        ];
        if let Some(p) = point {
            fields.insert(0, p.to_string());
        }
        w.write_record(&fields).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_record(rec: &RunRecord, path: &Path, format: Format) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let text = match format {
        Format::Json => serde_json::to_string_pretty(rec)? + "\n",
        Format::Csv => to_csv(rec)?,
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Where a run's output goes: `out_path` (relative paths resolved against
/// `out_dir`), or `out_dir/<command>-<seed>.<ext>` when only a directory is known.
pub fn resolve_out_path(cfg: &ExperimentConfig, out_dir: Option<&Path>) -> Option<PathBuf> {
    match (&cfg.out_path, out_dir) {
        (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
        (Some(p), _) => Some(p.clone()),
        (None, Some(d)) => {
            let cmd = serde_json::to_value(cfg.command).ok()?.as_str()?.to_string();
            let ext = match cfg.format {
                Format::Json => "json",
                Format::Csv => "csv",
            };
            Some(d.join(format!("{cmd}-{}.{ext}", cfg.seed)))
        }
        (None, None) => None,
    }
}

/// Process exit status for a failed run: 3 for a shot budget over the cap,
/// 1 for I/O failures, 2 for everything caught by validation.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetOverflow { .. } => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}
