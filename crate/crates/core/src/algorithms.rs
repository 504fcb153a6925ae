//! Property testing and tomography of Gaussian states from measurement samples.
//!
//! Every routine draws its samples through a [`StateSource`] and an
//! [`Estimator`], so the same code runs on exact Gaussian states, dense
//! non-Gaussian states and noisy wrappers, and with `Scheme::Exact` it runs
//! without sampling noise at all.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{
    clip_to_state, correlation_matrix, gaussian_to_dense, gaussianification, trace_distance, DenseState,
};
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::sampler::{commuting_budget, Estimator, GammaEstimate, RngStream, Scheme, StateSource};
use crate::skewlin::{normal_form, skew_norm, NormalForm, Schatten, SkewMatrix};

/// Largest number of modes handled by local full tomography.
pub const MAX_LOCAL_MODES: usize = 6;
/// Fraction of an open upper bound used when a threshold must lie strictly below it.
pub const STRICT_SLACK: f64 = 0.9;
/// Default factor by which ε_T exceeds `ε_stat + (2ε_A)^{1/(r+1)}` for a low-rank input.
pub const DEFAULT_LOW_RANK_FACTOR: f64 = 1.1;

/// Which set of Gaussian states the test is relative to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussianSet {
    /// Pure Gaussian states; the input may be arbitrary.
    PureSet,
    /// All Gaussian states; the input is promised pure (pure test) or of rank at most `2^r` (rank test).
    MixedSet,
    /// Gaussian states of rank at most `2^r`; the input may be arbitrary.
    RankSet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub eps_a: f64,
    pub eps_b: f64,
    pub delta: f64,
    #[serde(default)]
    pub r: usize,
    pub gaussian_set: GaussianSet,
    /// Multiplier for ε_T in the low-rank-input rank test.
    #[serde(default = "default_low_rank_factor")]
    pub low_rank_factor: f64,
}

fn default_low_rank_factor() -> f64 {
    DEFAULT_LOW_RANK_FACTOR
}

impl TestConfig {
    pub fn new(eps_a: f64, eps_b: f64, delta: f64, r: usize, gaussian_set: GaussianSet) -> Self {
        TestConfig { eps_a, eps_b, delta, r, gaussian_set, low_rank_factor: DEFAULT_LOW_RANK_FACTOR }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps_a >= 0.0 && self.eps_b > self.eps_a) {
            return Err(Error::Validation(format!("need eps_b > eps_a >= 0, got {} and {}", self.eps_b, self.eps_a)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Validation(format!("delta {} outside (0,1)", self.delta)));
        }
        if !(self.low_rank_factor > 1.0) {
            return Err(Error::Validation(format!("low_rank_factor {} must exceed 1", self.low_rank_factor)));
        }
        Ok(())
    }

    /// Thresholds of the pure-state test on `n` modes.
    pub fn pure_thresholds(&self, n: usize) -> Result<Thresholds> {
        self.validate()?;
        let nf = n as f64;
        let (ea, eb) = (self.eps_a, self.eps_b);
        let b = eb * eb / (2.0 * nf);
        match self.gaussian_set {
            GaussianSet::MixedSet => {
                let need = 2.0 * (nf * ea).sqrt();
                if !(eb > need) {
                    return Err(Error::InfeasibleThresholds(format!("eps_b {eb} <= 2 sqrt(n eps_a) = {need}")));
                }
                Ok(Thresholds {
                    eps_stat: STRICT_SLACK * 0.5 * (b - 2.0 * ea),
                    eps_t: 0.5 * (b + 2.0 * ea),
                    eps_tom: None,
                    eps_t2: None,
                })
            }
            GaussianSet::PureSet => {
                let need = (2.0 * nf * ea).sqrt();
                if !(eb > need) {
                    return Err(Error::InfeasibleThresholds(format!("eps_b {eb} <= sqrt(2 n eps_a) = {need}")));
                }
                Ok(Thresholds { eps_stat: 0.25 * (b - ea), eps_t: 0.5 * (b + ea), eps_tom: None, eps_t2: None })
            }
            GaussianSet::RankSet => Err(Error::Validation("the pure test takes pure_set or mixed_set".into())),
        }
    }

    /// Thresholds of the bounded-rank test on `n` modes.
    pub fn rank_thresholds(&self, n: usize) -> Result<Thresholds> {
        self.validate()?;
        let r = self.r;
        if r > n {
            return Err(Error::RankExponentOutOfRange { r, max: n });
        }
        if r == n {
            return Err(Error::InfeasibleThresholds("n - r = 0 leaves no modes to certify as pure".into()));
        }
        let (nf, nr) = (n as f64, (n - r) as f64);
        let (ea, eb) = (self.eps_a, self.eps_b);
        let b = eb * eb / (32.0 * nr);
        let linear = 2.0 * (nf + 1.0) * ea;
        let eps_tom = STRICT_SLACK * (eb / 2.0 - (nf + 1.0) * ea) / (nf + 2.0);
        let eps_t2 = (nf + 1.0) / (nf + 2.0) * (eb / 2.0 + ea);
        match self.gaussian_set {
            GaussianSet::RankSet => {
                let need = (32.0 * nr * ea).sqrt().max(linear);
                if !(eb > need) {
                    return Err(Error::InfeasibleThresholds(format!("eps_b {eb} <= {need}")));
                }
                Ok(Thresholds {
                    eps_stat: STRICT_SLACK * 0.5 * (b - ea),
                    eps_t: eb * eb / (64.0 * nr) + 0.5 * ea,
                    eps_tom: Some(eps_tom),
                    eps_t2: Some(eps_t2),
                })
            }
            GaussianSet::MixedSet => {
                let a = (2.0 * ea).powf(1.0 / (r as f64 + 1.0));
                let need = (32.0 * nr * a).sqrt().max(linear);
                if !(eb > need) {
                    return Err(Error::InfeasibleThresholds(format!("eps_b {eb} <= {need}")));
                }
                let eps_stat = STRICT_SLACK * 0.5 * (b - a);
                let eps_t = self.low_rank_factor * (eps_stat + a);
                if eps_t + eps_stat > b {
                    return Err(Error::InfeasibleThresholds(format!(
                        "eps_t + eps_stat = {} exceeds eps_b^2/(32(n-r)) = {b}",
                        eps_t + eps_stat
                    )));
                }
                if eps_t + eps_stat >= 0.5 {
                    return Err(Error::InfeasibleThresholds(format!("eps_t + eps_stat = {} >= 1/2", eps_t + eps_stat)));
                }
                Ok(Thresholds { eps_stat, eps_t, eps_tom: Some(eps_tom), eps_t2: Some(eps_t2) })
            }
            GaussianSet::PureSet => Err(Error::Validation("the rank test takes rank_set or mixed_set".into())),
        }
    }
}

/// Accuracy parameters derived from a [`TestConfig`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub eps_stat: f64,
    pub eps_t: f64,
    pub eps_tom: Option<f64>,
    pub eps_t2: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    CaseA,
    CaseB,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    EigenvalueStage,
    TomographyStage,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    /// λ̂_min for the pure test, λ̂_{r+1} for the rank test.
    pub lambda_hat_relevant: f64,
    /// ε_T at the eigenvalue stage, ε_{T,2} at the tomography stage.
    pub threshold: f64,
    pub stage: Stage,
    /// `‖ρ̂'_r − σ(Γ̂_r)‖₁` when the tomography stage ran.
    pub local_distance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestVerdict {
    pub verdict: Verdict,
    pub evidence: Evidence,
    pub shots_used: u64,
    pub thresholds: Thresholds,
}

fn estimate(est: &Estimator, src: &StateSource, eps_stat: f64, delta: f64, stream: RngStream) -> Result<GammaEstimate> {
    est.estimate(src, eps_stat.min(2.0), delta, stream)
}

/// Tests whether the source is close to (Case A) or far from (Case B) the Gaussian set.
pub fn test_pure(src: &StateSource, cfg: &TestConfig, est: &Estimator, stream: RngStream) -> Result<TestVerdict> {
    let th = cfg.pure_thresholds(src.modes())?;
    let g = estimate(est, src, th.eps_stat, cfg.delta, stream.child(1))?;
    let lmin = normal_form(&g.gamma_hat)?.lambdas[0];
    let verdict = if lmin >= 1.0 - th.eps_t { Verdict::CaseA } else { Verdict::CaseB };
    Ok(TestVerdict {
        verdict,
        evidence: Evidence {
            lambda_hat_relevant: lmin,
            threshold: th.eps_t,
            stage: Stage::EigenvalueStage,
            local_distance: None,
        },
        shots_used: g.shots_used,
        thresholds: th,
    })
}

/// Tests against Gaussian states of rank at most `2^r` (or, for a low-rank
/// input, all Gaussian states): an eigenvalue check on `λ̂_{r+1}`, then full
/// tomography of the `r` least pure modes after rotating by `Ô`.
pub fn test_bounded_rank(src: &StateSource, cfg: &TestConfig, est: &Estimator, stream: RngStream) -> Result<TestVerdict> {
    let n = src.modes();
    let th = cfg.rank_thresholds(n)?;
    let r = cfg.r;
    if r > MAX_LOCAL_MODES {
        return Err(Error::TooManyLocalModes { r, max: MAX_LOCAL_MODES });
    }
    let g = estimate(est, src, th.eps_stat, cfg.delta / 2.0, stream.child(1))?;
    let nf = normal_form(&g.gamma_hat)?;
    let lam = nf.lambdas[r];
    let mut shots = g.shots_used;
    if lam <= 1.0 - th.eps_t {
        return Ok(TestVerdict {
            verdict: Verdict::CaseB,
            evidence: Evidence {
                lambda_hat_relevant: lam,
                threshold: th.eps_t,
                stage: Stage::EigenvalueStage,
                local_distance: None,
            },
            shots_used: shots,
            thresholds: th,
        });
    }
    let eps_t2 = th.eps_t2.expect("rank thresholds carry eps_t2");
    // Every state of zero modes is Gaussian.
    let dist = if r == 0 {
        0.0
    } else {
        let rotated = src.rotated(&nf.q.transpose())?;
        let eps_tom = th.eps_tom.expect("rank thresholds carry eps_tom");
        let tom = local_full_tomography(&rotated, r, eps_tom, cfg.delta / 2.0, est, stream.child(2))?;
        shots += tom.shots_used;
        local_gaussian_distance(&tom.state)?
    };
    Ok(TestVerdict {
        verdict: if dist > eps_t2 { Verdict::CaseB } else { Verdict::CaseA },
        evidence: Evidence {
            lambda_hat_relevant: lam,
            threshold: eps_t2,
            stage: Stage::TomographyStage,
            local_distance: Some(dist),
        },
        shots_used: shots,
        thresholds: th,
    })
}

/// `‖ρ − σ(Γ(ρ))‖₁`, the distance of a dense state to the Gaussian state with its correlations.
pub fn local_gaussian_distance(rho: &DenseState) -> Result<f64> {
    let sigma = gaussian_to_dense(&clip_to_state(&correlation_matrix(rho)?)?)?;
    trace_distance(rho, &sigma)
}

/// Result of local full tomography.
#[derive(Clone, Debug)]
pub struct LocalTomography {
    pub state: DenseState,
    pub shots_used: u64,
    pub per_setting: u64,
}

/// Shots per Pauli setting for `r`-mode tomography: `N' = ⌈2/ε'² ln(2(4^r−1)/δ)⌉`
/// with `ε' = eps_tom/(2·2^r)`. There are `3^r` settings.
pub fn local_tomography_budget(r: usize, eps_tom: f64, delta: f64) -> (u64, u64) {
    let ep = eps_tom / (2.0 * (1u64 << r) as f64);
    let paulis = ((1u64 << (2 * r)) - 1) as f64;
    let per = (2.0 / (ep * ep) * (2.0 * paulis / delta).ln()).ceil();
    let per = if per >= u64::MAX as f64 { u64::MAX } else { per as u64 };
    (per.max(1), 3u64.pow(r as u32))
}

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

/// Single-qubit Pauli: 0 = I, 1 = X, 2 = Y, 3 = Z.
fn pauli(k: usize) -> [[Complex64; 2]; 2] {
    match k {
        0 => [[C1, C0], [C0, C1]],
        1 => [[C0, C1], [C1, C0]],
        2 => [[C0, -CI], [CI, C0]],
        _ => [[C1, C0], [C0, -C1]],
    }
}

/// Basis change taking a measurement of `Z` to a measurement of X (1), Y (2) or Z (3).
fn basis_change(k: usize) -> DMatrix<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match k {
        1 => DMatrix::from_row_slice(2, 2, &[C1 * h, C1 * h, C1 * h, -C1 * h]),
        // H S†
        2 => DMatrix::from_row_slice(2, 2, &[C1 * h, -CI * h, C1 * h, CI * h]),
        _ => DMatrix::identity(2, 2),
    }
}

/// Pauli operator `⊗_k σ_{p[k]}`, qubit 0 leftmost.
fn pauli_string(p: &[usize]) -> DMatrix<Complex64> {
    let r = p.len();
    let d = 1usize << r;
    DMatrix::from_fn(d, d, |a, b| {
        let mut v = C1;
        for (k, &pk) in p.iter().enumerate() {
            let shift = r - 1 - k;
            v *= pauli(pk)[(a >> shift) & 1][(b >> shift) & 1];
        }
        v
    })
}

fn digits(mut x: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for k in (0..len).rev() {
        out[k] = x % base;
        x /= base;
    }
    out
}

/// Projects a Hermitian unit-trace matrix onto density matrices by clipping
/// negative eigenvalues and renormalizing.
fn project_to_state(m: &DMatrix<Complex64>) -> Result<DenseState> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let e = h.symmetric_eigen();
    let vals: Vec<f64> = e.eigenvalues.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = vals.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidState("tomography estimate has no positive part".into()));
    }
    let diag = DVector::from_iterator(vals.len(), vals.iter().map(|v| Complex64::new(v / total, 0.0)));
    DenseState::new(&e.eigenvectors * DMatrix::from_diagonal(&diag) * e.eigenvectors.adjoint())
}

/// Pauli tomography of the reduced state on the first `r` modes: each of the
/// `3^r` local settings is measured `N'` times, every Pauli expectation is read
/// from its setting (identity factors read as `Z`), and the linear-inversion
/// estimate is projected onto density matrices.
pub fn local_full_tomography(
    src: &StateSource,
    r: usize,
    eps_tom: f64,
    delta: f64,
    est: &Estimator,
    stream: RngStream,
) -> Result<LocalTomography> {
    if r > MAX_LOCAL_MODES {
        return Err(Error::TooManyLocalModes { r, max: MAX_LOCAL_MODES });
    }
    if r == 0 || r > src.modes() {
        return Err(Error::Validation(format!("cannot tomograph {r} of {} modes", src.modes())));
    }
    if !(eps_tom > 0.0 && eps_tom < 2.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Validation(format!("eps_tom {eps_tom} or delta {delta} out of range")));
    }
    let reduced = src.reduced_dense(r)?;
    if est.scheme == Scheme::Exact {
        return Ok(LocalTomography { state: reduced, shots_used: 0, per_setting: 0 });
    }
    let (per, settings) = local_tomography_budget(r, eps_tom, delta);
    let total = per as u128 * settings as u128;
    if total > est.shot_cap as u128 {
        return Err(Error::BudgetOverflow { required: total, cap: est.shot_cap });
    }
    let d = 1usize << r;
    // Outcome distributions per setting, setting digits 0,1,2 = X,Y,Z.
    let mut hist: Vec<Vec<u64>> = Vec::with_capacity(settings as usize);
    for s in 0..settings as usize {
        let sd = digits(s, 3, r);
        let mut v = DMatrix::from_element(1, 1, C1);
        for &k in &sd {
            v = v.kronecker(&basis_change(k + 1));
        }
        let turned = DenseState::new(&v * reduced.matrix() * v.adjoint())?;
        let counts = StateSource::Dense(turned).sample_counts(per, &mut stream.child(s as u64).rng());
        let mut h = vec![0u64; d];
        for (&x, &c) in &counts.map {
            h[x as usize] = c;
        }
        hist.push(h);
    }
    let mut rho = DMatrix::<Complex64>::identity(d, d) / Complex64::new(d as f64, 0.0);
    for p in 1..d * d {
        let pd = digits(p, 4, r);
        let setting = pd.iter().fold(0usize, |acc, &k| acc * 3 + if k == 0 { 2 } else { k - 1 });
        let mut mask = 0usize;
        for (k, &pk) in pd.iter().enumerate() {
            if pk != 0 {
                mask |= 1 << (r - 1 - k);
            }
        }
        let h = &hist[setting];
        let mut s: i128 = 0;
        for (x, &c) in h.iter().enumerate() {
            if (x & mask).count_ones() % 2 == 1 {
                s -= c as i128;
            } else {
                s += c as i128;
            }
        }
        let mean = (s as f64 / per as f64).clamp(-1.0, 1.0);
        rho += pauli_string(&pd) * Complex64::new(mean / d as f64, 0.0);
    }
    Ok(LocalTomography { state: project_to_state(&rho)?, shots_used: (total) as u64, per_setting: per })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdentityVerdict {
    MaximallyMixed,
    FarFromMaximallyMixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub verdict: IdentityVerdict,
    pub gamma_norm: f64,
    /// `ε/(3n)`.
    pub threshold: f64,
    /// `‖ρ̂ − σ(Γ(ρ̂))‖₁` from the full-tomography Gaussian test, when it ran.
    pub local_distance: Option<f64>,
    pub shots_used: u64,
}

/// Decides whether the source is `I/2^n` or `eps`-far from it: reject when
/// `‖Γ̂‖_∞ > ε/(3n)` (Γ̂ estimated at `ε/(6n)`), otherwise run a Gaussianity
/// test with `ε_B = eps`, `ε_A = 0` and map its answer back.
///
/// The Gaussianity test here tomographs all `n` modes and compares the
/// estimate with the Gaussian state of its own correlations against
/// `ε_{T,2} = (n+1)/(n+2)·ε/2`, at tomography accuracy `0.9·ε/(2(n+2))`.
pub fn reduce_identity_testing(
    src: &StateSource,
    eps: f64,
    delta: f64,
    est: &Estimator,
    stream: RngStream,
) -> Result<ReductionReport> {
    if !(eps > 0.0 && eps <= 2.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Validation(format!("eps {eps} or delta {delta} out of range")));
    }
    let n = src.modes();
    let nf = n as f64;
    let threshold = eps / (3.0 * nf);
    let g = est.estimate(src, threshold / 2.0, delta / 2.0, stream.child(1))?;
    let gamma_norm = skew_norm(&g.gamma_hat, Schatten::Inf);
    if gamma_norm > threshold {
        return Ok(ReductionReport {
            verdict: IdentityVerdict::FarFromMaximallyMixed,
            gamma_norm,
            threshold,
            local_distance: None,
            shots_used: g.shots_used,
        });
    }
    if n > MAX_LOCAL_MODES {
        return Err(Error::TooManyLocalModes { r: n, max: MAX_LOCAL_MODES });
    }
    let eps_tom = STRICT_SLACK * (eps / 2.0) / (nf + 2.0);
    let eps_t2 = (nf + 1.0) / (nf + 2.0) * eps / 2.0;
    let tom = local_full_tomography(src, n, eps_tom, delta / 2.0, est, stream.child(2))?;
    let dist = local_gaussian_distance(&tom.state)?;
    Ok(ReductionReport {
        verdict: if dist > eps_t2 { IdentityVerdict::FarFromMaximallyMixed } else { IdentityVerdict::MaximallyMixed },
        gamma_norm,
        threshold,
        local_distance: Some(dist),
        shots_used: g.shots_used + tom.shots_used,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographyReport {
    pub learned: GaussianState,
    pub shots_used: u64,
    pub target_eps: f64,
    pub target_delta: f64,
    pub eps_stat: f64,
    pub scheme: Scheme,
    /// For the pure learner: `⌈32 n³/ε² log(4n²/δ)⌉`, the larger constant also
    /// quoted for the same guarantee. The run itself uses the constant 8.
    pub conservative_budget: Option<f64>,
}

fn check_eps_delta(eps: f64, delta: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Validation(format!("eps {eps} and delta {delta} must lie in (0,1)")));
    }
    Ok(())
}

/// The pure Gaussian state `U_Ô|0^n⟩` for the normal form of `gamma_hat`.
pub fn learn_pure_from_estimate(gamma_hat: &SkewMatrix) -> Result<GaussianState> {
    let NormalForm { q, lambdas, .. } = normal_form(gamma_hat)?;
    GaussianState::from_normal_form(q, vec![1.0; lambdas.len()])
}

/// The Gaussian state with `gamma_hat`'s normal form and every `λ̂ > 1` set to 1.
pub fn learn_mixed_from_estimate(gamma_hat: &SkewMatrix) -> Result<GaussianState> {
    clip_to_state(gamma_hat)
}

/// Learns a pure Gaussian state from `⌈8n³/ε² log(4n²/δ)⌉` shots (commuting scheme).
pub fn tomograph_pure(src: &StateSource, eps: f64, delta: f64, est: &Estimator, stream: RngStream) -> Result<TomographyReport> {
    check_eps_delta(eps, delta)?;
    let n = src.modes() as f64;
    let g = est.estimate(src, eps, delta, stream)?;
    Ok(TomographyReport {
        learned: learn_pure_from_estimate(&g.gamma_hat)?,
        shots_used: g.shots_used,
        target_eps: eps,
        target_delta: delta,
        eps_stat: eps,
        scheme: g.scheme,
        conservative_budget: Some((32.0 * n.powi(3) / (eps * eps) * (4.0 * n * n / delta).ln()).ceil()),
    })
}

/// Learns a Gaussian state from `⌈16n⁴/ε² log(4n²/δ)⌉` shots: Γ̂ at accuracy
/// `ε/√(2n)`, then its normal form with eigenvalues clipped to `[0,1]`.
pub fn tomograph_mixed(src: &StateSource, eps: f64, delta: f64, est: &Estimator, stream: RngStream) -> Result<TomographyReport> {
    check_eps_delta(eps, delta)?;
    let eps_stat = eps / (2.0 * src.modes() as f64).sqrt();
    let g = est.estimate(src, eps_stat, delta, stream)?;
    Ok(TomographyReport {
        learned: learn_mixed_from_estimate(&g.gamma_hat)?,
        shots_used: g.shots_used,
        target_eps: eps,
        target_delta: delta,
        eps_stat,
        scheme: g.scheme,
        conservative_budget: None,
    })
}

/// Total shots of [`tomograph_mixed`] under the commuting scheme's accounting.
pub fn mixed_tomography_shots(n: usize, eps: f64, delta: f64) -> f64 {
    commuting_budget(n, eps / (2.0 * n as f64).sqrt(), delta).lemma_bound
}

/// Perturbation applied to a Gaussian state before learning it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "strength")]
pub enum Noise {
    /// `(1−s) ρ + s |χ⟩⟨χ|` with `|χ⟩ = (|0…0⟩ + |1…1⟩)/√2`.
    TracePerturbation(f64),
    /// `(1−p) ρ + p I/2^n`.
    Depolarizing(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromiseKind {
    /// Within `ε/(3n)` of a Gaussian state in trace distance.
    TraceDistance,
    /// Relative entropy of non-Gaussianity at most `ε²`.
    RelativeEntropy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessRecord {
    pub learned: GaussianState,
    /// `‖ρ̂ − ρ‖₁` against the noisy state.
    pub dense_error: f64,
    /// `min(‖ρ − G(ρ)‖₁, ‖ρ − ρ_base‖₁)`, an upper bound on the distance to the Gaussian set.
    pub promise_value: f64,
    pub d_nongauss: f64,
    pub promise: PromiseKind,
    /// Accuracy the learner was run at.
    pub inner_eps: f64,
    pub shots_used: u64,
}

/// The noisy source for `base` and its dense matrix.
pub fn noisy_source(base: &GaussianState, noise: Noise) -> Result<(StateSource, DenseState)> {
    let exact = gaussian_to_dense(base)?;
    match noise {
        Noise::Depolarizing(p) => {
            let src = StateSource::noisy(StateSource::ExactGaussian(base.clone()), p)?;
            Ok((src, exact.depolarize(p)))
        }
        Noise::TracePerturbation(s) => {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::Validation(format!("perturbation strength {s} outside [0,1]")));
            }
            let n = base.modes();
            let mut psi = DVector::zeros(1 << n);
            psi[0] = C1;
            psi[(1 << n) - 1] = C1;
            let chi = DenseState::from_pure(&psi)?;
            let rho = DenseState::mixture(&[(1.0 - s, exact), (s, chi)])?;
            Ok((StateSource::Dense(rho.clone()), rho))
        }
    }
}

/// Learns a perturbed Gaussian state with the mixed-state learner at accuracy
/// `ε/3` and reports the dense error against the perturbed state. The input
/// must be certified to satisfy the trace-distance or the relative-entropy
/// promise; otherwise `PromiseNotCertified` is returned.
pub fn robustness_experiment(
    base: &GaussianState,
    noise: Noise,
    eps: f64,
    delta: f64,
    est: &Estimator,
    stream: RngStream,
) -> Result<RobustnessRecord> {
    check_eps_delta(eps, delta)?;
    let (src, rho) = noisy_source(base, noise)?;
    let n = base.modes() as f64;
    let gauss = gaussianification(&rho)?;
    let exact = gaussian_to_dense(base)?;
    let promise_value = trace_distance(&rho, &gauss.dense)?.min(trace_distance(&rho, &exact)?);
    let limit = eps / (3.0 * n);
    let promise = if promise_value <= limit {
        PromiseKind::TraceDistance
    } else if gauss.d_nongauss <= eps * eps {
        PromiseKind::RelativeEntropy
    } else {
        return Err(Error::PromiseNotCertified { value: promise_value, limit });
    };
    let inner_eps = eps / 3.0;
    let rep = tomograph_mixed(&src, inner_eps, delta, est, stream)?;
    let dense_error = trace_distance(&gaussian_to_dense(&rep.learned)?, &rho)?;
    Ok(RobustnessRecord {
        learned: rep.learned,
        dense_error,
        promise_value,
        d_nongauss: gauss.d_nongauss,
        promise,
        inner_eps,
        shots_used: rep.shots_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::majoranas;

    fn exact() -> Estimator {
        Estimator::new(Scheme::Exact)
    }

    #[test]
    fn pure_thresholds_follow_the_formulas() {
        let cfg = TestConfig::new(0.01, 0.9, 0.05, 0, GaussianSet::MixedSet);
        let th = cfg.pure_thresholds(4).unwrap();
        assert_eq!(th.eps_t, 0.5 * (0.81 / 8.0 + 0.02));
        assert_eq!(th.eps_stat, 0.9 * 0.5 * (0.81 / 8.0 - 0.02));
        let cfg = TestConfig { gaussian_set: GaussianSet::PureSet, ..cfg };
        let th = cfg.pure_thresholds(4).unwrap();
        assert_eq!(th.eps_t, 0.5 * (0.81 / 8.0 + 0.01));
        assert_eq!(th.eps_stat, 0.25 * (0.81 / 8.0 - 0.01));
    }

    #[test]
    fn infeasible_configs_are_rejected() {
        let cfg = TestConfig::new(0.1, 0.2, 0.05, 0, GaussianSet::MixedSet);
        assert!(matches!(cfg.pure_thresholds(4), Err(Error::InfeasibleThresholds(_))));
        let cfg = TestConfig::new(0.0, 0.5, 0.05, 4, GaussianSet::RankSet);
        assert!(matches!(cfg.rank_thresholds(4), Err(Error::InfeasibleThresholds(_))));
        let cfg = TestConfig::new(0.0, 0.5, 0.05, 5, GaussianSet::RankSet);
        assert!(matches!(cfg.rank_thresholds(4), Err(Error::RankExponentOutOfRange { .. })));
        let cfg = TestConfig::new(0.2, 0.1, 0.05, 0, GaussianSet::MixedSet);
        assert!(matches!(cfg.pure_thresholds(4), Err(Error::Validation(_))));
    }

    #[test]
    fn rank_thresholds_follow_the_formulas() {
        let cfg = TestConfig::new(0.001, 0.9, 0.1, 1, GaussianSet::RankSet);
        let th = cfg.rank_thresholds(4).unwrap();
        assert_eq!(th.eps_t, 0.81 / 192.0 + 0.0005);
        assert_eq!(th.eps_stat, 0.9 * 0.5 * (0.81 / 96.0 - 0.001));
        assert_eq!(th.eps_tom, Some(0.9 * (0.45 - 5.0 * 0.001) / 6.0));
        assert_eq!(th.eps_t2, Some(5.0 / 6.0 * (0.45 + 0.001)));
        let low = TestConfig { gaussian_set: GaussianSet::MixedSet, eps_a: 0.0, ..cfg };
        let th = low.rank_thresholds(4).unwrap();
        assert_eq!(th.eps_t, 1.1 * th.eps_stat);
    }

    #[test]
    fn exact_scheme_pure_test() {
        let cfg = TestConfig::new(0.0, 0.9, 0.05, 0, GaussianSet::MixedSet);
        let vac = StateSource::ExactGaussian(GaussianState::vacuum(4).unwrap());
        let v = test_pure(&vac, &cfg, &exact(), RngStream::new(0)).unwrap();
        assert_eq!((v.verdict, v.shots_used), (Verdict::CaseA, 0));
        let ghz = StateSource::Dense(DenseState::ghz3());
        let v = test_pure(&ghz, &cfg, &exact(), RngStream::new(0)).unwrap();
        assert_eq!(v.verdict, Verdict::CaseB);
    }

    #[test]
    fn local_tomography_of_simple_states() {
        let est = Estimator::new(Scheme::Commuting);
        let vac = StateSource::ExactGaussian(GaussianState::vacuum(2).unwrap());
        let t = local_full_tomography(&vac, 1, 0.1, 0.05, &est, RngStream::new(1)).unwrap();
        assert!(trace_distance(&t.state, &DenseState::basis_state(&[false]).unwrap()).unwrap() <= 0.1);
        let mm = StateSource::ExactGaussian(GaussianState::maximally_mixed(3).unwrap());
        let t = local_full_tomography(&mm, 2, 0.1, 0.05, &est, RngStream::new(2)).unwrap();
        assert!(trace_distance(&t.state, &DenseState::maximally_mixed(2).unwrap()).unwrap() <= 0.1);
        assert_eq!(t.shots_used, 9 * t.per_setting);
        assert!(matches!(
            local_full_tomography(&mm, 7, 0.1, 0.05, &est, RngStream::new(2)),
            Err(Error::TooManyLocalModes { .. })
        ));
    }

    #[test]
    fn pauli_strings_are_consistent_with_majoranas() {
        // X on qubit 0 is γ_0 and Y on qubit 0 is γ_1.
        let gam = majoranas(2).unwrap();
        assert_eq!(pauli_string(&[1, 0]), gam.gamma(0).to_dense());
        assert_eq!(pauli_string(&[2, 0]), gam.gamma(1).to_dense());
        for k in 1..=3 {
            let v = basis_change(k);
            let back = v.adjoint() * pauli_string(&[3]) * &v;
            assert!((back - pauli_string(&[k])).norm() < 1e-12);
        }
    }

    #[test]
    fn clipping_sets_overshoot_to_one() {
        let g = SkewMatrix::block_diag(&[0.4, 1.03]).unwrap();
        let s = learn_mixed_from_estimate(&g).unwrap();
        assert_eq!(s.lambdas(), &[0.4, 1.0]);
    }

    #[test]
    fn exact_scheme_tomography_is_exact() {
        let s = GaussianState::product_state(&[0.3, -0.7, 0.9]).unwrap();
        let src = StateSource::ExactGaussian(s.clone());
        let rep = tomograph_mixed(&src, 0.2, 0.1, &exact(), RngStream::new(0)).unwrap();
        let err = trace_distance(&gaussian_to_dense(&rep.learned).unwrap(), &gaussian_to_dense(&s).unwrap()).unwrap();
        assert!(err < 1e-8);
    }

    #[test]
    fn reduction_on_exact_sources() {
        let mm = StateSource::ExactGaussian(GaussianState::maximally_mixed(3).unwrap());
        let r = reduce_identity_testing(&mm, 1.0, 0.1, &exact(), RngStream::new(0)).unwrap();
        assert_eq!(r.verdict, IdentityVerdict::MaximallyMixed);
        let vac = StateSource::ExactGaussian(GaussianState::vacuum(3).unwrap());
        let r = reduce_identity_testing(&vac, 1.0, 0.1, &exact(), RngStream::new(0)).unwrap();
        assert_eq!(r.verdict, IdentityVerdict::FarFromMaximallyMixed);
        let capped = Estimator { scheme: Scheme::Commuting, shot_cap: 1_000 };
        assert!(matches!(
            reduce_identity_testing(&mm, 1.0, 0.1, &capped, RngStream::new(0)),
            Err(Error::BudgetOverflow { .. })
        ));
    }

    #[test]
    fn robustness_without_noise_is_plain_tomography() {
        let s = GaussianState::product_state(&[0.3, 0.8]).unwrap();
        let rec = robustness_experiment(&s, Noise::Depolarizing(0.0), 0.3, 0.1, &exact(), RngStream::new(0)).unwrap();
        assert!(rec.dense_error < 1e-8 && rec.promise_value < 1e-9);
        let far = robustness_experiment(&s, Noise::TracePerturbation(0.5), 0.3, 0.1, &exact(), RngStream::new(0));
        assert!(matches!(far, Err(Error::PromiseNotCertified { .. })));
    }
}
