//! Measurement simulation and correlation-matrix estimation.
//!
//! Sampling is count based: a request for `N` shots returns a histogram drawn
//! from the exact multinomial distribution, so the cost does not grow with `N`.
//! Gaussian sources are sampled mode by mode with the post-measurement update
//! of Γ, dense sources from the diagonal of the (rotated) density matrix.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::{correlation_matrix, gaussian_to_dense, DenseState};
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::skewlin::SkewMatrix;

/// Largest total shot count a single estimate may request.
pub const DEFAULT_SHOT_CAP: u64 = 1_000_000_000_000;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key of a deterministic random stream: master seed, trial and a task path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub trial: u64,
    pub task: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream { seed, trial: 0, task: 0 }
    }

    pub fn with_trial(self, trial: u64) -> Self {
        RngStream { trial, ..self }
    }

    /// Derives the stream for sub-task `label` of this stream.
    pub fn child(self, label: u64) -> Self {
        RngStream { task: splitmix(self.task ^ splitmix(label.wrapping_add(1))), ..self }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(splitmix(self.seed ^ splitmix(self.trial)));
        r.set_stream(self.task);
        r
    }
}

/// Histogram of computational-basis outcomes. Mode `k` is bit `n-1-k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub n: usize,
    pub map: BTreeMap<u64, u64>,
}

impl Counts {
    pub fn total(&self) -> u64 {
        self.map.values().sum()
    }

    pub fn bit(&self, outcome: u64, mode: usize) -> bool {
        (outcome >> (self.n - 1 - mode)) & 1 == 1
    }

    /// Empirical `⟨Z_mode⟩`.
    pub fn z_mean(&self, mode: usize) -> f64 {
        let mut s: i128 = 0;
        for (&x, &c) in &self.map {
            s += if self.bit(x, mode) { -(c as i128) } else { c as i128 };
        }
        s as f64 / self.total() as f64
    }

    fn add(&mut self, outcome: u64, c: u64) {
        if c > 0 {
            *self.map.entry(outcome).or_insert(0) += c;
        }
    }

    fn merge(&mut self, other: Counts) {
        for (x, c) in other.map {
            self.add(x, c);
        }
    }
}

fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("valid binomial").sample(rng)
}

/// Where measurement outcomes come from.
#[derive(Clone, Debug)]
pub enum StateSource {
    ExactGaussian(GaussianState),
    Dense(DenseState),
    /// `(1-p) ρ + p I/2^n` for the inner state `ρ`.
    Noisy { inner: Box<StateSource>, p: f64 },
}

impl StateSource {
    pub fn noisy(inner: StateSource, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Validation(format!("depolarizing strength {p} outside [0,1]")));
        }
        Ok(StateSource::Noisy { inner: Box::new(inner), p })
    }

    pub fn modes(&self) -> usize {
        match self {
            StateSource::ExactGaussian(g) => g.modes(),
            StateSource::Dense(d) => d.modes(),
            StateSource::Noisy { inner, .. } => inner.modes(),
        }
    }

    /// The true correlation matrix.
    pub fn exact_gamma(&self) -> Result<SkewMatrix> {
        match self {
            StateSource::ExactGaussian(g) => Ok(g.corr().clone()),
            StateSource::Dense(d) => correlation_matrix(d),
            StateSource::Noisy { inner, p } => Ok(&inner.exact_gamma()? * (1.0 - p)),
        }
    }

    /// Full density matrix (small `n` only).
    pub fn to_dense(&self) -> Result<DenseState> {
        match self {
            StateSource::ExactGaussian(g) => gaussian_to_dense(g),
            StateSource::Dense(d) => Ok(d.clone()),
            StateSource::Noisy { inner, p } => Ok(inner.to_dense()?.depolarize(*p)),
        }
    }

    /// Reduced density matrix of the first `r` modes.
    pub fn reduced_dense(&self, r: usize) -> Result<DenseState> {
        match self {
            StateSource::ExactGaussian(g) => {
                let idx: Vec<usize> = (0..2 * r).collect();
                let sub = SkewMatrix::from_upper_of(&g.corr().restrict(&idx)?)?;
                gaussian_to_dense(&GaussianState::from_correlation(sub)?)
            }
            StateSource::Dense(d) => d.reduce_to_first(r),
            StateSource::Noisy { inner, p } => Ok(inner.reduced_dense(r)?.depolarize(*p)),
        }
    }

    /// The source after the Gaussian unitary `U_q`.
    pub fn rotated(&self, q: &DMatrix<f64>) -> Result<Self> {
        Ok(match self {
            StateSource::ExactGaussian(g) => StateSource::ExactGaussian(g.rotate(q)?),
            StateSource::Dense(d) => StateSource::Dense(d.rotate(q)?),
            StateSource::Noisy { inner, p } => StateSource::Noisy { inner: Box::new(inner.rotated(q)?), p: *p },
        })
    }

    /// `shots` computational-basis outcomes as a histogram.
    pub fn sample_counts<R: Rng + ?Sized>(&self, shots: u64, rng: &mut R) -> Counts {
        let n = self.modes();
        let mut out = Counts { n, map: BTreeMap::new() };
        match self {
            StateSource::ExactGaussian(g) => {
                let m = g.corr().to_dense();
                gaussian_branch(m, 0, shots, 0, &mut out, rng);
            }
            StateSource::Dense(d) => {
                let probs = d.probabilities();
                let total: f64 = probs.iter().sum();
                let mut left = shots;
                let mut mass = total;
                for (x, &p) in probs.iter().enumerate() {
                    if left == 0 {
                        break;
                    }
                    let k = if x + 1 == probs.len() { left } else { binomial(left, (p / mass).min(1.0), rng) };
                    out.add(x as u64, k);
                    left -= k;
                    mass -= p;
                }
            }
            StateSource::Noisy { inner, p } => {
                let k = binomial(shots, *p, rng);
                uniform_branch(n, 0, k, 0, &mut out, rng);
                out.merge(inner.sample_counts(shots - k, rng));
            }
        }
        out
    }
}

/// Measures mode `mode` of the Gaussian state with correlation matrix `g` and
/// recurses on both outcomes. Outcome `s = ±1` for `Z = s` has probability
/// `(1 + s Γ_pq)/2` with `(p,q) = (2m, 2m+1)`, after which the remaining block becomes
/// `Γ_ab + s (Γ_pb Γ_qa − Γ_pa Γ_qb)/(1 + s Γ_pq)`.
fn gaussian_branch<R: Rng + ?Sized>(g: DMatrix<f64>, mode: usize, shots: u64, prefix: u64, out: &mut Counts, rng: &mut R) {
    if shots == 0 {
        return;
    }
    let n = out.n;
    if mode == n {
        out.add(prefix, shots);
        return;
    }
    let (p, q) = (2 * mode, 2 * mode + 1);
    let gpq = g[(p, q)].clamp(-1.0, 1.0);
    let k0 = binomial(shots, 0.5 * (1.0 + gpq), rng);
    for (s, count, bit) in [(1.0, k0, 0u64), (-1.0, shots - k0, 1u64)] {
        if count == 0 {
            continue;
        }
        let denom = 1.0 + s * gpq;
        let mut next = g.clone();
        if denom > 1e-300 {
            for a in q + 1..2 * n {
                for b in q + 1..2 * n {
                    next[(a, b)] = g[(a, b)] + s * (g[(p, b)] * g[(q, a)] - g[(p, a)] * g[(q, b)]) / denom;
                }
            }
        }
        gaussian_branch(next, mode + 1, count, (prefix << 1) | bit, out, rng);
    }
}

fn uniform_branch<R: Rng + ?Sized>(n: usize, mode: usize, shots: u64, prefix: u64, out: &mut Counts, rng: &mut R) {
    if shots == 0 {
        return;
    }
    if mode == n {
        out.add(prefix, shots);
        return;
    }
    let k0 = binomial(shots, 0.5, rng);
    uniform_branch(n, mode + 1, k0, prefix << 1, out, rng);
    uniform_branch(n, mode + 1, shots - k0, (prefix << 1) | 1, out, rng);
}

/// `shots` i.i.d. outcomes in random order.
pub fn sample_z_basis(src: &StateSource, shots: u64, stream: RngStream) -> Vec<u64> {
    let mut rng = stream.rng();
    let counts = src.sample_counts(shots, &mut rng);
    let mut v: Vec<u64> = Vec::with_capacity(shots as usize);
    for (&x, &c) in &counts.map {
        v.extend(std::iter::repeat_n(x, c as usize));
    }
    v.shuffle(&mut rng);
    v
}

/// Formats an outcome as a bit string, mode 0 first.
pub fn bitstring(outcome: u64, n: usize) -> String {
    (0..n).map(|k| if (outcome >> (n - 1 - k)) & 1 == 1 { '1' } else { '0' }).collect()
}

/// A perfect matching of the `2n` Majorana indices.
pub type Matching = Vec<(usize, usize)>;

/// The `2n − 1` perfect matchings of a round-robin 1-factorization of `K_{2n}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingPlan {
    pub n: usize,
    pub matchings: Vec<Matching>,
}

pub fn matchings(n: usize) -> MatchingPlan {
    assert!(n >= 1, "at least one mode");
    let d = 2 * n;
    let k = d - 1;
    let mut out = Vec::with_capacity(k);
    for r in 0..k {
        let mut m: Matching = vec![(r.min(k), r.max(k))];
        for i in 1..n {
            let a = (r + i) % k;
            let b = (r + k - i) % k;
            m.push((a.min(b), a.max(b)));
        }
        m.sort();
        out.push(m);
    }
    MatchingPlan { n, matchings: out }
}

/// Signed permutation taking pair `i = (j,k)` of a matching to positions `(2i, 2i+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchingRotation {
    pub q: DMatrix<f64>,
    /// `⟨Z_i⟩` on the rotated state equals `signs[i] · Γ_{jk}`.
    pub signs: Vec<f64>,
}

/// Builds the rotation for one matching. `det q = +1` always; when the pair
/// placement is an odd permutation the last pair's row is negated and its
/// readout sign recorded.
pub fn matching_rotation(m: &[(usize, usize)], n: usize) -> Result<MatchingRotation> {
    let d = 2 * n;
    if m.len() != n {
        return Err(Error::InvalidMatching(format!("{} pairs for {n} modes", m.len())));
    }
    let mut seen = vec![false; d];
    for &(j, k) in m {
        if j >= k || k >= d || seen[j] || seen[k] {
            return Err(Error::InvalidMatching(format!("bad pair ({j},{k})")));
        }
        seen[j] = true;
        seen[k] = true;
    }
    let mut perm = Vec::with_capacity(d);
    let mut q = DMatrix::zeros(d, d);
    for (i, &(j, k)) in m.iter().enumerate() {
        q[(2 * i, j)] = 1.0;
        q[(2 * i + 1, k)] = 1.0;
        perm.push(j);
        perm.push(k);
    }
    let mut signs = vec![1.0; n];
    if permutation_parity(&perm) {
        q.row_mut(d - 1).neg_mut();
        signs[n - 1] = -1.0;
    }
    Ok(MatchingRotation { q, signs })
}

/// True for odd permutations.
fn permutation_parity(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    let mut odd = false;
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        if len % 2 == 0 {
            odd = !odd;
        }
    }
    odd
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    PauliPairs,
    Commuting,
    Exact,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::PauliPairs => "pauli_pairs",
            Scheme::Commuting => "commuting",
            Scheme::Exact => "exact",
        })
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pauli_pairs" | "pauli-pairs" => Ok(Scheme::PauliPairs),
            "commuting" => Ok(Scheme::Commuting),
            "exact" => Ok(Scheme::Exact),
            _ => Err(Error::Validation(format!("unknown scheme {s:?}"))),
        }
    }
}

/// Shot accounting for one estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotBudget {
    /// Shots per measurement setting (per pair or per matching).
    pub per_setting: u64,
    pub settings: u64,
    /// `per_setting · settings`.
    pub total: u128,
    /// The closed-form bound quoted for the scheme.
    pub lemma_bound: f64,
}

/// Budget of the commuting scheme: the closed-form total `⌈8n³/ε² ln(4n²/δ)⌉`
/// spread evenly over the `2n − 1` matchings.
pub fn commuting_budget(n: usize, eps: f64, delta: f64) -> ShotBudget {
    let nf = n as f64;
    let lemma = 8.0 * nf.powi(3) / (eps * eps) * (4.0 * nf * nf / delta).ln();
    let settings = (2 * n - 1) as u64;
    let per = (lemma.ceil() / settings as f64).ceil();
    let per_setting = if per >= u64::MAX as f64 { u64::MAX } else { (per as u64).max(1) };
    ShotBudget { per_setting, settings, total: per_setting as u128 * settings as u128, lemma_bound: lemma.ceil() }
}

/// Budget of the pair-by-pair scheme: `N' = ⌈2/ε'² ln(2M/δ)⌉` per entry with
/// `ε' = ε/(2n)` and `M = n(2n−1)`; also reports `16n⁴/ε² ln(n²/δ)`.
pub fn pauli_pairs_budget(n: usize, eps: f64, delta: f64) -> ShotBudget {
    let nf = n as f64;
    let m = n * (2 * n - 1);
    let ep = eps / (2.0 * nf);
    let per = (2.0 / (ep * ep) * (2.0 * m as f64 / delta).ln()).ceil();
    let per_setting = if per >= u64::MAX as f64 { u64::MAX } else { (per as u64).max(1) };
    ShotBudget {
        per_setting,
        settings: m as u64,
        total: per_setting as u128 * m as u128,
        lemma_bound: 16.0 * nf.powi(4) / (eps * eps) * (nf * nf / delta).ln(),
    }
}

/// An estimate of Γ and how it was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    pub gamma_hat: SkewMatrix,
    pub shots_used: u64,
    pub scheme: Scheme,
    /// Target accuracy and failure probability, absent for explicit shot counts.
    pub eps_stat: Option<f64>,
    pub delta: Option<f64>,
    pub lemma_bound: Option<f64>,
    pub stream: RngStream,
}

impl GammaEstimate {
    /// Matrix text format preceded by a `#` metadata header.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# scheme={} shots={} eps={} delta={} seed={} trial={} task={}",
            self.scheme,
            self.shots_used,
            opt(self.eps_stat),
            opt(self.delta), self.stream.seed, self.stream.trial, self.stream.task
        );
        s.push_str(&self.gamma_hat.to_text());
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let header = text
            .lines()
            .find(|l| l.trim_start().starts_with('#'))
            .ok_or_else(|| Error::Parse("missing metadata header".into()))?;
        let mut kv = BTreeMap::new();
        for tok in header.trim_start_matches(['#', ' ']).split_whitespace() {
            if let Some((k, v)) = tok.split_once('=') {
                kv.insert(k.to_string(), v.to_string());
            }
        }
        let get = |k: &str| kv.get(k).cloned().ok_or_else(|| Error::Parse(format!("header lacks {k}")));
        let num = |k: &str| -> Result<Option<f64>> {
            let v = get(k)?;
            if v == "none" {
                return Ok(None);
            }
            v.parse().map(Some).map_err(|e| Error::Parse(format!("{k}: {e}")))
        };
        let int = |k: &str| -> Result<u64> { get(k)?.parse().map_err(|e| Error::Parse(format!("{k}: {e}"))) };
        Ok(GammaEstimate {
            gamma_hat: SkewMatrix::from_text(text)?,
            shots_used: int("shots")?,
            scheme: get("scheme")?.parse()?,
            eps_stat: num("eps")?,
            delta: num("delta")?,
            lemma_bound: None,
            stream: RngStream { seed: int("seed")?, trial: int("trial")?, task: int("task")? },
        })
    }
}

/// Correlation-matrix estimation with a shot cap.
#[derive(Clone, Copy, Debug)]
pub struct Estimator {
    pub scheme: Scheme,
    pub shot_cap: u64,
}

impl Estimator {
    pub fn new(scheme: Scheme) -> Self {
        Estimator { scheme, shot_cap: DEFAULT_SHOT_CAP }
    }

    pub fn budget(&self, n: usize, eps_stat: f64, delta: f64) -> Option<ShotBudget> {
        match self.scheme {
            Scheme::Exact => None,
            Scheme::Commuting => Some(commuting_budget(n, eps_stat, delta)),
            Scheme::PauliPairs => Some(pauli_pairs_budget(n, eps_stat, delta)),
        }
    }

    /// Estimate at the budget the scheme prescribes for `(eps_stat, delta)`.
    pub fn estimate(&self, src: &StateSource, eps_stat: f64, delta: f64, stream: RngStream) -> Result<GammaEstimate> {
        if !(eps_stat > 0.0 && eps_stat <= 2.0) {
            return Err(Error::Validation(format!("eps_stat {eps_stat} outside (0,2]")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Validation(format!("delta {delta} outside (0,1)")));
        }
        let n = src.modes();
        let Some(b) = self.budget(n, eps_stat, delta) else {
            return exact_estimate(src, Some(delta), stream);
        };
        if b.total > self.shot_cap as u128 {
            return Err(Error::BudgetOverflow { required: b.total, cap: self.shot_cap });
        }
        let mut est = self.estimate_with_shots(src, b.per_setting, stream)?;
        est.eps_stat = Some(eps_stat);
        est.delta = Some(delta);
        est.lemma_bound = Some(b.lemma_bound);
        Ok(est)
    }

    /// Estimate with an explicit number of shots per measurement setting.
    pub fn estimate_with_shots(&self, src: &StateSource, per_setting: u64, stream: RngStream) -> Result<GammaEstimate> {
        let n = src.modes();
        if self.scheme == Scheme::Exact {
            return exact_estimate(src, None, stream);
        }
        if per_setting == 0 {
            return Err(Error::Validation("zero shots per setting".into()));
        }
        let plan = matchings(n);
        let per_matching: Vec<Result<(Vec<((usize, usize), f64)>, u64)>> = plan
            .matchings
            .par_iter()
            .enumerate()
            .map(|(mi, m)| {
                let rot = matching_rotation(m, n)?;
                let rotated = src.rotated(&rot.q)?;
                let task = stream.child(mi as u64);
                let mut entries = Vec::with_capacity(n);
                let mut used = 0u64;
                match self.scheme {
                    Scheme::Commuting => {
                        let counts = rotated.sample_counts(per_setting, &mut task.rng());
                        for (i, &pair) in m.iter().enumerate() {
                            entries.push((pair, rot.signs[i] * counts.z_mean(i)));
                        }
                        used += per_setting;
                    }
                    Scheme::PauliPairs => {
                        for (i, &pair) in m.iter().enumerate() {
                            let counts = rotated.sample_counts(per_setting, &mut task.child(i as u64).rng());
                            entries.push((pair, rot.signs[i] * counts.z_mean(i)));
                            used += per_setting;
                        }
                    }
                    Scheme::Exact => unreachable!(),
                }
                Ok((entries, used))
            })
            .collect();
        let mut g = SkewMatrix::zeros(2 * n)?;
        let mut shots = 0u64;
        for r in per_matching {
            let (entries, used) = r?;
            shots += used;
            for ((j, k), v) in entries {
                g.set(j, k, v.clamp(-1.0, 1.0));
            }
        }
        Ok(GammaEstimate {
            gamma_hat: g,
            shots_used: shots,
            scheme: self.scheme,
            eps_stat: None,
            delta: None,
            lemma_bound: None,
            stream,
        })
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

fn exact_estimate(src: &StateSource, delta: Option<f64>, stream: RngStream) -> Result<GammaEstimate> {
    Ok(GammaEstimate {
        gamma_hat: src.exact_gamma()?,
        shots_used: 0,
        scheme: Scheme::Exact,
        eps_stat: Some(0.0),
        delta,
        lemma_bound: Some(0.0),
        stream,
    })
}

pub fn estimate_gamma(
    src: &StateSource,
    eps_stat: f64,
    delta: f64,
    scheme: Scheme,
    stream: RngStream,
) -> Result<GammaEstimate> {
    Estimator::new(scheme).estimate(src, eps_stat, delta, stream)
}

/// One measured shot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub trial: u64,
    pub matching_index: usize,
    pub bitstring: String,
}

/// Raw shots of the commuting scheme, `shots` per matching.
pub fn record_shots(src: &StateSource, shots: u64, stream: RngStream) -> Result<Vec<ShotRecord>> {
    let n = src.modes();
    let mut out = Vec::new();
    for (mi, m) in matchings(n).matchings.iter().enumerate() {
        let rot = matching_rotation(m, n)?;
        let rotated = src.rotated(&rot.q)?;
        for x in sample_z_basis(&rotated, shots, stream.child(mi as u64)) {
            out.push(ShotRecord { trial: stream.trial, matching_index: mi, bitstring: bitstring(x, n) });
        }
    }
    Ok(out)
}

pub fn write_jsonl<W: Write>(records: &[ShotRecord], mut w: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl(text: &str) -> Result<Vec<ShotRecord>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(|l| Ok(serde_json::from_str(l)?)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_matching_plans() {
        let p = matchings(2);
        assert_eq!(p.matchings.len(), 3);
        let mut all: Vec<Matching> = p.matchings.clone();
        all.sort();
        assert_eq!(all, vec![vec![(0, 1), (2, 3)], vec![(0, 2), (1, 3)], vec![(0, 3), (1, 2)]]);
        let p3 = matchings(3);
        assert_eq!(p3.matchings.len(), 5);
        assert!(p3.matchings.iter().all(|m| m.len() == 3));
    }

    #[test]
    fn identity_matching_gives_identity() {
        let r = matching_rotation(&[(0, 1), (2, 3), (4, 5)], 3).unwrap();
        assert_eq!(r.q, DMatrix::identity(6, 6));
        assert_eq!(r.signs, vec![1.0; 3]);
    }

    #[test]
    fn crossed_matching_places_entries() {
        let mut g = SkewMatrix::zeros(4).unwrap();
        for (j, k, v) in [(0, 1, 0.1), (0, 2, 0.2), (0, 3, 0.3), (1, 2, 0.4), (1, 3, 0.5), (2, 3, 0.6)] {
            g.set(j, k, v);
        }
        let m = [(0, 2), (1, 3)];
        let r = matching_rotation(&m, 2).unwrap();
        assert_eq!(r.q.clone().lu().determinant(), 1.0);
        assert_eq!(r.q.transpose() * &r.q, DMatrix::identity(4, 4));
        let c = g.conjugate(&r.q).unwrap();
        assert_eq!(r.signs[0] * c.get(0, 1), 0.2);
        assert_eq!(r.signs[1] * c.get(2, 3), 0.5);
    }

    #[test]
    fn invalid_matchings_rejected() {
        assert!(matches!(matching_rotation(&[(0, 1), (1, 2)], 2), Err(Error::InvalidMatching(_))));
        assert!(matches!(matching_rotation(&[(0, 1)], 2), Err(Error::InvalidMatching(_))));
        assert!(matches!(matching_rotation(&[(1, 0), (2, 3)], 2), Err(Error::InvalidMatching(_))));
    }

    #[test]
    fn vacuum_samples_are_all_zero() {
        let src = StateSource::ExactGaussian(GaussianState::vacuum(3).unwrap());
        assert!(sample_z_basis(&src, 500, RngStream::new(1)).iter().all(|&x| x == 0));
    }

    #[test]
    fn budgets() {
        let b = commuting_budget(3, 0.2, 0.1);
        let lemma = (8.0 * 27.0 / 0.04 * (36.0f64 / 0.1).ln()).ceil();
        assert_eq!(b.lemma_bound, lemma);
        assert_eq!(b.settings, 5);
        assert_eq!(b.per_setting, (lemma / 5.0).ceil() as u64);
        let p = pauli_pairs_budget(2, 0.5, 0.1);
        assert_eq!(p.settings, 6);
        assert_eq!(p.per_setting, (2.0 / (0.125f64 * 0.125) * (12.0f64 / 0.1).ln()).ceil() as u64);
    }

    #[test]
    fn budget_cap_is_enforced() {
        let src = StateSource::ExactGaussian(GaussianState::vacuum(3).unwrap());
        let est = Estimator { scheme: Scheme::Commuting, shot_cap: 1000 };
        assert!(matches!(est.estimate(&src, 0.2, 0.1, RngStream::new(0)), Err(Error::BudgetOverflow { .. })));
    }

    #[test]
    fn exact_scheme_returns_gamma() {
        let s = GaussianState::product_state(&[0.3, -0.6]).unwrap();
        let src = StateSource::ExactGaussian(s.clone());
        let e = estimate_gamma(&src, 0.1, 0.1, Scheme::Exact, RngStream::new(0)).unwrap();
        assert_eq!(&e.gamma_hat, s.corr());
        assert_eq!((e.shots_used, e.eps_stat), (0, Some(0.0)));
    }

    #[test]
    fn estimate_text_round_trip() {
        let src = StateSource::ExactGaussian(GaussianState::product_state(&[0.3, -0.6]).unwrap());
        let e = Estimator::new(Scheme::Commuting).estimate_with_shots(&src, 100, RngStream::new(5)).unwrap();
        let back = GammaEstimate::from_text(&e.to_text()).unwrap();
        assert_eq!(back.gamma_hat, e.gamma_hat);
        assert_eq!(back.shots_used, e.shots_used);
        assert_eq!(back.stream, e.stream);
    }

    #[test]
    fn shot_records_round_trip() {
        let src = StateSource::ExactGaussian(GaussianState::product_state(&[0.0, 1.0]).unwrap());
        let recs = record_shots(&src, 4, RngStream::new(9).with_trial(2)).unwrap();
        assert_eq!(recs.len(), 12);
        let mut buf = Vec::new();
        write_jsonl(&recs, &mut buf).unwrap();
        assert_eq!(read_jsonl(std::str::from_utf8(&buf).unwrap()).unwrap(), recs);
        assert!(recs.iter().all(|r| r.trial == 2 && r.bitstring.len() == 2));
    }
}
