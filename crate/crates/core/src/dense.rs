//! Brute-force Jordan–Wigner simulation.
//!
//! Mode `k` (zero-based) is qubit `k`, stored at bit `n-1-k` of a basis index, so
//! qubit 0 is the leftmost tensor factor. Majoranas are
//! `γ_{2k} = Z_0⋯Z_{k-1} X_k` and `γ_{2k+1} = Z_0⋯Z_{k-1} Y_k`.
//!
//! Everything here is exponential in `n` and exists to check the polynomial
//! routines elsewhere in the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, PnpCorrelation};
use crate::skewlin::{check_orthogonal, SkewMatrix};

pub const MAX_DENSE_MODES: usize = 10;
pub const MAX_SPARSE_MODES: usize = 12;
/// Eigenvalues at or below this are treated as outside the support.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Weight of the first argument on the second's null space that makes the
/// relative entropy infinite.
pub const SUPPORT_LEAK_TOL: f64 = 1e-10;

type CMat = DMatrix<Complex64>;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

fn phase(k: u8) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// A signed permutation with phases: `P|y⟩ = i^{k(y)} |y ⊕ flip⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseOp {
    flip: usize,
    phases: Vec<u8>,
}

impl PhaseOp {
    pub fn identity(n: usize) -> Self {
        PhaseOp { flip: 0, phases: vec![0; 1 << n] }
    }

    pub fn size(&self) -> usize {
        self.phases.len()
    }

    /// `self · other`.
    pub fn mul(&self, other: &PhaseOp) -> PhaseOp {
        let phases = (0..self.size())
            .map(|y| (other.phases[y] + self.phases[y ^ other.flip]) & 3)
            .collect();
        PhaseOp { flip: self.flip ^ other.flip, phases }
    }

    /// `P · m`.
    pub fn apply_left(&self, m: &CMat) -> CMat {
        let d = self.size();
        CMat::from_fn(d, m.ncols(), |x, c| {
            let y = x ^ self.flip;
            phase(self.phases[y]) * m[(y, c)]
        })
    }

    /// `m · P`.
    pub fn apply_right(&self, m: &CMat) -> CMat {
        let d = self.size();
        CMat::from_fn(m.nrows(), d, |r, y| m[(r, y ^ self.flip)] * phase(self.phases[y]))
    }

    /// `Tr(P ρ)`.
    pub fn trace_with(&self, rho: &CMat) -> Complex64 {
        (0..self.size()).map(|y| phase(self.phases[y]) * rho[(y, y ^ self.flip)]).sum()
    }

    pub fn to_dense(&self) -> CMat {
        let d = self.size();
        let mut m = CMat::zeros(d, d);
        for y in 0..d {
            m[(y ^ self.flip, y)] = phase(self.phases[y]);
        }
        m
    }
}

/// The `2n` Jordan–Wigner Majorana operators.
#[derive(Clone, Debug)]
pub struct MajoranaSet {
    n: usize,
    gammas: Vec<PhaseOp>,
}

impl MajoranaSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_SPARSE_MODES {
            return Err(Error::TooManyModes { n, max: MAX_SPARSE_MODES });
        }
        let size = 1usize << n;
        let mut gammas = Vec::with_capacity(2 * n);
        for k in 0..n {
            let bit = n - 1 - k;
            let before = !((1usize << (bit + 1)) - 1) & (size - 1);
            let zsign = |y: usize| if (y & before).count_ones() % 2 == 1 { 2u8 } else { 0u8 };
            let x: Vec<u8> = (0..size).map(zsign).collect();
            let yv: Vec<u8> = (0..size)
                .map(|y| (zsign(y) + if (y >> bit) & 1 == 0 { 1 } else { 3 }) & 3)
                .collect();
            gammas.push(PhaseOp { flip: 1 << bit, phases: x });
            gammas.push(PhaseOp { flip: 1 << bit, phases: yv });
        }
        Ok(MajoranaSet { n, gammas })
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn gamma(&self, mu: usize) -> &PhaseOp {
        &self.gammas[mu]
    }

    pub fn all(&self) -> &[PhaseOp] {
        &self.gammas
    }

    /// `γ_{s_0} γ_{s_1} ⋯` in the given order.
    pub fn product(&self, s: &[usize]) -> PhaseOp {
        s.iter().fold(PhaseOp::identity(self.n), |acc, &mu| acc.mul(&self.gammas[mu]))
    }
}

pub fn majoranas(n: usize) -> Result<MajoranaSet> {
    MajoranaSet::new(n)
}

/// A density matrix on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    rho: CMat,
}

fn modes_of_dim(d: usize) -> Result<usize> {
    if d < 2 || !d.is_power_of_two() {
        return Err(Error::InvalidState(format!("dimension {d} is not a power of two")));
    }
    let n = d.trailing_zeros() as usize;
    if n > MAX_DENSE_MODES {
        return Err(Error::TooManyModes { n, max: MAX_DENSE_MODES });
    }
    Ok(n)
}

fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

impl DenseState {
    /// Validates Hermiticity and unit trace (1e-10) and positivity (-1e-9).
    pub fn new(rho: CMat) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::DimensionMismatch { expected: rho.nrows(), found: rho.ncols() });
        }
        let n = modes_of_dim(rho.nrows())?;
        let herm = (&rho - rho.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if herm > 1e-10 {
            return Err(Error::NotHermitian(herm));
        }
        let tr = rho.trace();
        if (tr - C1).norm() > 1e-10 {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let rho = hermitian_part(&rho);
        let min = rho.clone().symmetric_eigenvalues().iter().fold(f64::INFINITY, |m, &v| m.min(v));
        if min < -1e-9 {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(DenseState { n, rho })
    }

    /// Skips validation; for matrices that are density matrices by construction.
    fn trusted(n: usize, rho: CMat) -> Self {
        DenseState { n, rho: hermitian_part(&rho) }
    }

    /// `|ψ⟩⟨ψ|` after normalizing `psi`.
    pub fn from_pure(psi: &DVector<Complex64>) -> Result<Self> {
        let n = modes_of_dim(psi.len())?;
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = psi / Complex64::new(norm, 0.0);
        Ok(Self::trusted(n, &v * v.adjoint()))
    }

    /// Computational basis state; `bits[k]` is the occupation of mode `k`.
    pub fn basis_state(bits: &[bool]) -> Result<Self> {
        let n = bits.len();
        let mut psi = DVector::zeros(1 << n);
        psi[basis_index(bits)] = C1;
        Self::from_pure(&psi)
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DENSE_MODES {
            return Err(Error::TooManyModes { n, max: MAX_DENSE_MODES });
        }
        let d = 1 << n;
        Ok(Self::trusted(n, CMat::identity(d, d) / Complex64::new(d as f64, 0.0)))
    }

    /// `(|000⟩ + |111⟩)/√2`.
    pub fn ghz3() -> Self {
        let mut psi = DVector::zeros(8);
        psi[0] = C1;
        psi[7] = C1;
        Self::from_pure(&psi).expect("valid vector")
    }

    /// `(1-p) ρ + p I/2^n`.
    pub fn depolarize(&self, p: f64) -> Self {
        let d = self.rho.nrows();
        let mix = CMat::identity(d, d) * Complex64::new(p / d as f64, 0.0);
        Self::trusted(self.n, &self.rho * Complex64::new(1.0 - p, 0.0) + mix)
    }

    /// Convex combination `Σ w_i ρ_i` (weights are normalized).
    pub fn mixture(parts: &[(f64, DenseState)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        let mut rho = CMat::zeros(first.1.rho.nrows(), first.1.rho.ncols());
        for (w, s) in parts {
            if s.n != first.1.n {
                return Err(Error::DimensionMismatch { expected: first.1.n, found: s.n });
            }
            rho += &s.rho * Complex64::new(w / total, 0.0);
        }
        Self::new(rho)
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.rho
    }

    /// Diagonal of ρ, clipped at 0.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.rho.nrows()).map(|i| self.rho[(i, i)].re.max(0.0)).collect()
    }

    pub fn expectation(&self, op: &PhaseOp) -> Complex64 {
        op.trace_with(&self.rho)
    }

    /// Reduced state on the first `r` modes.
    pub fn reduce_to_first(&self, r: usize) -> Result<Self> {
        if r == 0 || r > self.n {
            return Err(Error::InvalidState(format!("cannot keep {r} of {} modes", self.n)));
        }
        let m = self.n - r;
        let dr = 1usize << r;
        let out = CMat::from_fn(dr, dr, |a, b| {
            (0..1usize << m).map(|l| self.rho[((a << m) | l, (b << m) | l)]).sum()
        });
        Ok(Self::trusted(r, out))
    }

    /// `U_q ρ U_q†`.
    pub fn rotate(&self, q: &DMatrix<f64>) -> Result<Self> {
        check_orthogonal(q, 2 * self.n)?;
        let plan = GivensPlan::new(q);
        let gam = majoranas(self.n)?;
        Ok(Self::trusted(self.n, plan.conjugate(&self.rho, &gam)))
    }

    /// Debug dump: `n`, then `2^n` rows of `re im` pairs.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for r in 0..self.rho.nrows() {
            let row: Vec<String> =
                (0..self.rho.ncols()).map(|c| format!("{:e} {:e}", self.rho[(r, c)].re, self.rho[(r, c)].im)).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty state file".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad mode count: {e}")))?;
        if n == 0 || n > MAX_DENSE_MODES {
            return Err(Error::TooManyModes { n, max: MAX_DENSE_MODES });
        }
        let d = 1usize << n;
        let mut rho = CMat::zeros(d, d);
        for r in 0..d {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing row {}", r + 1)))?;
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("row {}: {e}", r + 1))))
                .collect::<Result<_>>()?;
            if vals.len() != 2 * d {
                return Err(Error::Parse(format!("row {} has {} numbers, expected {}", r + 1, vals.len(), 2 * d)));
            }
            for c in 0..d {
                rho[(r, c)] = Complex64::new(vals[2 * c], vals[2 * c + 1]);
            }
        }
        Self::new(rho)
    }
}

/// Basis index of an occupation pattern (mode 0 is the most significant bit).
pub fn basis_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

/// `Γ_{jk} = -(i/2) Tr([γ_j, γ_k] ρ)`.
pub fn correlation_matrix(rho: &DenseState) -> Result<SkewMatrix> {
    let gam = majoranas(rho.n)?;
    let d = 2 * rho.n;
    let mut g = SkewMatrix::zeros(d)?;
    for j in 0..d {
        for k in j + 1..d {
            let e = gam.gamma(j).mul(gam.gamma(k)).trace_with(&rho.rho);
            // -i·e; the real part of e must vanish.
            if e.re.abs() > 1e-10 {
                return Err(Error::NonNegligibleImaginaryPart(e.re.abs()));
            }
            g.set(j, k, e.im);
        }
    }
    Ok(g)
}

/// Plane rotations whose product, optionally followed by `γ_{2n-1}`, realizes `U_q`.
struct GivensPlan {
    /// `(a, b, θ)`: the factor `cos(θ/2) + sin(θ/2) γ_a γ_b`, applied in list order from the left.
    rotations: Vec<(usize, usize, f64)>,
    reflect: bool,
}

impl GivensPlan {
    /// Factors `q`. For `det q = -1`, `q = q'·F` with `F = diag(-1,…,-1,1)`,
    /// which `γ_{2n-1}` realizes. `q' ∈ SO(2n)` is reduced to the identity by
    /// left Givens rotations `G_m⋯G_1 q' = I`, so `q' = G_1ᵀ⋯G_mᵀ`.
    fn new(q: &DMatrix<f64>) -> Self {
        let d = q.nrows();
        let det = q.clone().lu().determinant();
        let reflect = det < 0.0;
        let mut w = q.clone();
        if reflect {
            for c in 0..d - 1 {
                w.column_mut(c).neg_mut();
            }
        }
        let mut rotations = Vec::new();
        for c in 0..d {
            for r in (c + 1..d).rev() {
                let (x, y) = (w[(r - 1, c)], w[(r, c)]);
                // A negative pivot with nothing below it still needs a half turn.
                if y == 0.0 && (r - 1 != c || x >= 0.0) {
                    continue;
                }
                let theta = y.atan2(x);
                let (s, co) = theta.sin_cos();
                for k in 0..d {
                    let (a, b) = (w[(r - 1, k)], w[(r, k)]);
                    w[(r - 1, k)] = co * a + s * b;
                    w[(r, k)] = -s * a + co * b;
                }
                // Gᵀ is the rotation by -θ in the same plane.
                rotations.push((r - 1, r, -theta));
            }
        }
        GivensPlan { rotations, reflect }
    }

    /// `U ρ U†`.
    fn conjugate(&self, rho: &CMat, gam: &MajoranaSet) -> CMat {
        let d = 2 * gam.modes();
        let mut out = rho.clone();
        if self.reflect {
            let g = gam.gamma(d - 1);
            out = g.apply_right(&g.apply_left(&out));
        }
        for &(a, b, theta) in self.rotations.iter().rev() {
            let (s, c) = (0.5 * theta).sin_cos();
            if s.abs() < 1e-300 {
                continue;
            }
            let p = gam.gamma(a).mul(gam.gamma(b));
            let pr = p.apply_left(&out);
            let rp = p.apply_right(&out);
            let prp = p.apply_right(&pr);
            out = &out * Complex64::new(c * c, 0.0) + (pr - rp) * Complex64::new(c * s, 0.0)
                - prp * Complex64::new(s * s, 0.0);
        }
        out
    }

    fn unitary(&self, gam: &MajoranaSet) -> CMat {
        let size = 1usize << gam.modes();
        let d = 2 * gam.modes();
        let mut u = if self.reflect { gam.gamma(d - 1).to_dense() } else { CMat::identity(size, size) };
        for &(a, b, theta) in self.rotations.iter().rev() {
            let (s, c) = (0.5 * theta).sin_cos();
            let p = gam.gamma(a).mul(gam.gamma(b));
            u = &u * Complex64::new(c, 0.0) + p.apply_left(&u) * Complex64::new(s, 0.0);
        }
        u
    }
}

/// The unitary `U_q` with `U_q† γ_μ U_q = Σ_ν q_{μν} γ_ν`.
pub fn gaussian_unitary(q: &DMatrix<f64>) -> Result<CMat> {
    let d = q.nrows();
    if d == 0 || d % 2 == 1 {
        return Err(Error::OddDimension(d));
    }
    check_orthogonal(q, d)?;
    let n = d / 2;
    if n > MAX_DENSE_MODES {
        return Err(Error::TooManyModes { n, max: MAX_DENSE_MODES });
    }
    Ok(GivensPlan::new(q).unitary(&majoranas(n)?))
}

/// `max_μ ‖U†γ_μU − Σ_ν q_{μν}γ_ν‖_F`, an upper bound on the operator-norm defect.
pub fn adjoint_action_error(u: &CMat, q: &DMatrix<f64>) -> Result<f64> {
    let n = q.nrows() / 2;
    let gam = majoranas(n)?;
    let mut worst: f64 = 0.0;
    for mu in 0..2 * n {
        let lhs = u.adjoint() * gam.gamma(mu).apply_left(u);
        let mut rhs = CMat::zeros(u.nrows(), u.ncols());
        for nu in 0..2 * n {
            if q[(mu, nu)] != 0.0 {
                rhs += gam.gamma(nu).to_dense() * Complex64::new(q[(mu, nu)], 0.0);
            }
        }
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// `U_Q (⊗_j (I + λ_j Z_j)/2) U_Q†` from the cached normal form.
pub fn gaussian_to_dense(s: &GaussianState) -> Result<DenseState> {
    let n = s.modes();
    if n > MAX_DENSE_MODES {
        return Err(Error::TooManyModes { n, max: MAX_DENSE_MODES });
    }
    let size = 1usize << n;
    let lambdas = s.lambdas();
    let mut rho0 = CMat::zeros(size, size);
    for x in 0..size {
        let p: f64 = (0..n)
            .map(|k| {
                let bit = (x >> (n - 1 - k)) & 1;
                0.5 * (1.0 + if bit == 0 { lambdas[k] } else { -lambdas[k] })
            })
            .product();
        rho0[(x, x)] = Complex64::new(p, 0.0);
    }
    let plan = GivensPlan::new(&s.normal_form().q);
    Ok(DenseState::trusted(n, plan.conjugate(&rho0, &majoranas(n)?)))
}

fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let e = hermitian_part(m).symmetric_eigen();
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

/// `‖a − b‖₁`.
pub fn trace_distance(a: &DenseState, b: &DenseState) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { expected: a.n, found: b.n });
    }
    let diff = &a.rho - &b.rho;
    let v: f64 = hermitian_part(&diff).symmetric_eigenvalues().iter().map(|x| x.abs()).sum();
    Ok(v.clamp(0.0, 2.0))
}

/// Square root of a density matrix; eigenvalues at rounding level are dropped
/// so that pure states have exactly rank-one roots.
fn psd_sqrt(m: &CMat) -> CMat {
    let (vals, vecs) = hermitian_eigen(m);
    let cut = 64.0 * f64::EPSILON;
    let roots = DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| Complex64::new(if v > cut { v.sqrt() } else { 0.0 }, 0.0)),
    );
    &vecs * CMat::from_diagonal(&roots) * vecs.adjoint()
}

/// `(Tr √(√b a √b))² = ‖√a √b‖₁²`.
pub fn fidelity(a: &DenseState, b: &DenseState) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { expected: a.n, found: b.n });
    }
    let m = psd_sqrt(&a.rho) * psd_sqrt(&b.rho);
    let tr: f64 = m.singular_values().iter().sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}

/// `S(a‖b) = Tr a log₂ a − Tr a log₂ b`; `f64::INFINITY` when `a` has weight
/// outside the support of `b`.
pub fn relative_entropy(a: &DenseState, b: &DenseState) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { expected: a.n, found: b.n });
    }
    let ent: f64 = hermitian_part(&a.rho)
        .symmetric_eigenvalues()
        .iter()
        .filter(|&&p| p > SUPPORT_TOL)
        .map(|&p| p * p.log2())
        .sum();
    let (vals, vecs) = hermitian_eigen(&b.rho);
    let mut cross = 0.0;
    for (k, &q) in vals.iter().enumerate() {
        let w = vecs.column(k);
        let weight = (w.adjoint() * &a.rho * w)[(0, 0)].re;
        if q <= SUPPORT_TOL {
            if weight > SUPPORT_LEAK_TOL {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += weight * q.log2();
    }
    Ok((ent - cross).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateMetrics {
    pub trace_dist: f64,
    pub fidelity: f64,
    pub relative_entropy: f64,
}

pub fn state_metrics(a: &DenseState, b: &DenseState) -> Result<StateMetrics> {
    Ok(StateMetrics {
        trace_dist: trace_distance(a, b)?,
        fidelity: fidelity(a, b)?,
        relative_entropy: relative_entropy(a, b)?,
    })
}

/// The Gaussian state sharing `rho`'s correlation matrix and `S(ρ‖G(ρ))`.
#[derive(Clone, Debug)]
pub struct Gaussianification {
    pub g: GaussianState,
    pub dense: DenseState,
    pub d_nongauss: f64,
}

pub fn gaussianification(rho: &DenseState) -> Result<Gaussianification> {
    let g = clip_to_state(&correlation_matrix(rho)?)?;
    let dense = gaussian_to_dense(&g)?;
    let d_nongauss = relative_entropy(rho, &dense)?;
    Ok(Gaussianification { g, dense, d_nongauss })
}

/// The Gaussian state with the normal form of `g` and eigenvalues clipped into `[0,1]`.
pub fn clip_to_state(g: &SkewMatrix) -> Result<GaussianState> {
    let nf = crate::skewlin::normal_form(g)?;
    let lambdas = nf.lambdas.iter().map(|l| l.clamp(0.0, 1.0)).collect();
    GaussianState::from_normal_form(nf.q, lambdas)
}

/// `∂_α ρ(Γ + αX)|₀ = −(i/8) Σ_{ab} X_{ab} [γ_a, {γ_b, ρ(Γ)}]`.
pub fn gaussian_derivative(gamma: &SkewMatrix, x: &SkewMatrix) -> Result<CMat> {
    if gamma.dim() != x.dim() {
        return Err(Error::DimensionMismatch { expected: gamma.dim(), found: x.dim() });
    }
    let rho = gaussian_to_dense(&GaussianState::from_correlation(gamma.clone())?)?;
    let gam = majoranas(rho.n)?;
    let d = gamma.dim();
    let size = 1usize << rho.n;
    let mut out = CMat::zeros(size, size);
    for b in 0..d {
        let gb = gam.gamma(b);
        let anti = gb.apply_left(&rho.rho) + gb.apply_right(&rho.rho);
        for a in 0..d {
            let xab = x.get(a, b);
            if xab == 0.0 {
                continue;
            }
            let ga = gam.gamma(a);
            out += (ga.apply_left(&anti) - ga.apply_right(&anti)) * Complex64::new(xab, 0.0);
        }
    }
    Ok(out * Complex64::new(0.0, -0.125))
}

/// `C_{jk} = Tr(a_j† a_k ρ)` with `a_j = (γ_{2j} + iγ_{2j+1})/2`.
pub fn pnp_correlation(rho: &DenseState) -> Result<PnpCorrelation> {
    let gam = majoranas(rho.n)?;
    let e = |a: usize, b: usize| -> Complex64 {
        if a == b {
            C1
        } else {
            gam.gamma(a).mul(gam.gamma(b)).trace_with(&rho.rho)
        }
    };
    let i = Complex64::new(0.0, 1.0);
    let n = rho.n;
    let mut c = CMat::from_fn(n, n, |j, k| {
        (e(2 * j, 2 * k) + i * e(2 * j, 2 * k + 1) - i * e(2 * j + 1, 2 * k) + e(2 * j + 1, 2 * k + 1)) * 0.25
    });
    c = hermitian_part(&c);
    PnpCorrelation::new(c)
}

/// Zero matrix helper for tests and callers comparing operators.
pub fn zeros(size: usize) -> CMat {
    CMat::from_element(size, size, C0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> CMat {
        CMat::from_row_slice(2, 2, &[C0, C1, C1, C0])
    }
    fn pauli_y() -> CMat {
        let i = Complex64::new(0.0, 1.0);
        CMat::from_row_slice(2, 2, &[C0, -i, i, C0])
    }
    fn pauli_z() -> CMat {
        CMat::from_row_slice(2, 2, &[C1, C0, C0, -C1])
    }

    #[test]
    fn single_mode_majoranas_are_x_and_y() {
        let g = majoranas(1).unwrap();
        assert_eq!(g.gamma(0).to_dense(), pauli_x());
        assert_eq!(g.gamma(1).to_dense(), pauli_y());
    }

    #[test]
    fn second_mode_carries_a_z_string() {
        let g = majoranas(2).unwrap();
        assert_eq!(g.gamma(2).to_dense(), pauli_z().kronecker(&pauli_x()));
        assert_eq!(g.gamma(3).to_dense(), pauli_z().kronecker(&pauli_y()));
    }

    #[test]
    fn anticommutation_is_exact() {
        for n in 1..=4 {
            let g = majoranas(n).unwrap();
            let id = PhaseOp::identity(n);
            for a in 0..2 * n {
                for b in 0..2 * n {
                    let ab = g.gamma(a).mul(g.gamma(b));
                    let ba = g.gamma(b).mul(g.gamma(a));
                    if a == b {
                        assert_eq!(ab, id);
                    } else {
                        // γ_aγ_b = -γ_bγ_a: same flip, phases differ by i².
                        assert_eq!(ab.flip, ba.flip);
                        assert!(ab.phases.iter().zip(&ba.phases).all(|(x, y)| (x + 2) & 3 == *y));
                    }
                }
            }
        }
        assert!(matches!(majoranas(13), Err(Error::TooManyModes { .. })));
        assert!(matches!(majoranas(0), Err(Error::TooManyModes { .. })));
    }

    #[test]
    fn basis_state_correlations() {
        let vac = DenseState::basis_state(&[false, false, false]).unwrap();
        assert_eq!(correlation_matrix(&vac).unwrap(), SkewMatrix::canonical(3).unwrap());
        let x = DenseState::basis_state(&[true, false, true]).unwrap();
        assert_eq!(correlation_matrix(&x).unwrap(), SkewMatrix::block_diag(&[-1.0, 1.0, -1.0]).unwrap());
        let mm = DenseState::maximally_mixed(2).unwrap();
        assert_eq!(correlation_matrix(&mm).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn identity_and_plane_rotation_unitaries() {
        let u = gaussian_unitary(&DMatrix::identity(4, 4)).unwrap();
        assert!((u - CMat::identity(4, 4)).norm() < 1e-14);
        let th: f64 = 0.37;
        let mut q = DMatrix::identity(2, 2);
        q[(0, 0)] = th.cos();
        q[(0, 1)] = th.sin();
        q[(1, 0)] = -th.sin();
        q[(1, 1)] = th.cos();
        let u = gaussian_unitary(&q).unwrap();
        let lhs = u.adjoint() * pauli_x() * &u;
        let rhs = pauli_x() * Complex64::new(th.cos(), 0.0) + pauli_y() * Complex64::new(th.sin(), 0.0);
        assert!((lhs - rhs).norm() < 1e-14);
        assert!(matches!(gaussian_unitary(&(DMatrix::identity(2, 2) * 2.0)), Err(Error::NotOrthogonal(_))));
    }

    #[test]
    fn product_state_densities() {
        let v = gaussian_to_dense(&GaussianState::vacuum(2).unwrap()).unwrap();
        let mut e = zeros(4);
        e[(0, 0)] = C1;
        assert_eq!(v.matrix(), &e);
        let m = gaussian_to_dense(&GaussianState::maximally_mixed(2).unwrap()).unwrap();
        assert!((m.matrix() - CMat::identity(4, 4) * Complex64::new(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn metrics_on_simple_pairs() {
        let a = DenseState::basis_state(&[false]).unwrap();
        let b = DenseState::basis_state(&[true]).unwrap();
        let same = state_metrics(&a, &a).unwrap();
        assert!(same.trace_dist < 1e-15 && (same.fidelity - 1.0).abs() < 1e-12 && same.relative_entropy < 1e-12);
        let m = state_metrics(&a, &b).unwrap();
        assert!((m.trace_dist - 2.0).abs() < 1e-14);
        assert!(m.fidelity < 1e-14);
        assert!(m.relative_entropy.is_infinite());
        let c = DenseState::basis_state(&[true, false]).unwrap();
        assert!(matches!(state_metrics(&a, &c), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn pnp_examples() {
        let vac = DenseState::basis_state(&[false, false]).unwrap();
        assert!(pnp_correlation(&vac).unwrap().matrix().norm() < 1e-15);
        let one = DenseState::basis_state(&[true]).unwrap();
        let c = pnp_correlation(&one).unwrap();
        assert!((c.matrix()[(0, 0)] - C1).norm() < 1e-15);
    }

    #[test]
    fn dense_text_round_trip() {
        let s = DenseState::ghz3().depolarize(0.2);
        let back = DenseState::from_text(&s.to_text()).unwrap();
        assert!((back.matrix() - s.matrix()).norm() < 1e-15);
        assert!(DenseState::from_text("1\n1 0 0 0\n0 0 0 0\n").is_ok());
        assert!(matches!(DenseState::from_text("1\n2 0 0 0\n0 0 -1 0\n"), Err(Error::InvalidState(_))));
    }

    #[test]
    fn partial_trace_of_product() {
        let s = DenseState::basis_state(&[true, false, true]).unwrap();
        let r = s.reduce_to_first(1).unwrap();
        assert!((r.matrix()[(1, 1)] - C1).norm() < 1e-15);
    }
}
