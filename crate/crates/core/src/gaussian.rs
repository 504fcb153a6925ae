//! Gaussian states as correlation matrices.
//!
//! Construction and validation, rotations by `U_Q`, Wick expectations,
//! parity, overlaps, purification, the particle-number-preserving picture and
//! the trace-distance, fidelity and non-Gaussianity bounds that only need
//! correlation matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::skewlin::{
    check_orthogonal, norm_of_values, normal_form, pfaffian, restricted_pfaffian, singular_values,
    NormalForm, Schatten, SkewMatrix,
};

/// Input overshoot of normal eigenvalues above 1 that is clamped rather than rejected.
pub const LAMBDA_INPUT_SLACK: f64 = 1e-6;
/// Purity tolerance on the smallest normal eigenvalue.
pub const PURITY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    corr: SkewMatrix,
    nf: NormalForm,
}

impl GaussianState {
    /// Validates `g` as a correlation matrix: every normal eigenvalue must be
    /// at most `1 + LAMBDA_INPUT_SLACK`. Overshoot within the slack is clamped
    /// and `corr` is rebuilt from the clamped normal form.
    pub fn from_correlation(g: SkewMatrix) -> Result<Self> {
        let mut nf = normal_form(&g)?;
        let top = nf.lambdas.last().copied().unwrap_or(0.0);
        if !(top <= 1.0 + LAMBDA_INPUT_SLACK) {
            return Err(Error::NotAValidCorrelationMatrix(top));
        }
        if top > 1.0 {
            nf.lambdas.iter_mut().for_each(|l| *l = l.min(1.0));
            let corr = nf.reconstruct();
            return Ok(GaussianState { corr, nf });
        }
        Ok(GaussianState { corr: g, nf })
    }

    /// Builds the state `U_Q (⊗_j (I + λ_j Z_j)/2) U_Q†` from `q` and `λ ∈ [0,1]`.
    pub fn from_normal_form(q: DMatrix<f64>, lambdas: Vec<f64>) -> Result<Self> {
        check_orthogonal(&q, 2 * lambdas.len())?;
        if let Some(&bad) = lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(Error::NotAValidCorrelationMatrix(bad));
        }
        let mut order: Vec<usize> = (0..lambdas.len()).collect();
        order.sort_by(|&a, &b| lambdas[a].total_cmp(&lambdas[b]).then(a.cmp(&b)));
        let d = q.nrows();
        let mut sq = DMatrix::zeros(d, d);
        for (new, &old) in order.iter().enumerate() {
            sq.set_column(2 * new, &q.column(2 * old));
            sq.set_column(2 * new + 1, &q.column(2 * old + 1));
        }
        let det = sq.clone().lu().determinant();
        let nf = NormalForm {
            q: sq,
            lambdas: order.iter().map(|&i| lambdas[i]).collect(),
            det_sign: if det < 0.0 { -1 } else { 1 },
        };
        Ok(GaussianState { corr: nf.reconstruct(), nf })
    }

    /// `⊗_j (I + λ_j Z_j)/2`, i.e. `Γ = ⊕ λ_j [[0,1],[-1,0]]`.
    pub fn product_state(lambdas: &[f64]) -> Result<Self> {
        if let Some(&bad) = lambdas.iter().find(|l| !(-1.0..=1.0).contains(*l)) {
            return Err(Error::LambdaOutOfRange(bad));
        }
        Self::from_correlation(SkewMatrix::block_diag(lambdas)?)
    }

    pub fn vacuum(n: usize) -> Result<Self> {
        Self::product_state(&vec![1.0; n])
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        Self::product_state(&vec![0.0; n])
    }

    pub fn corr(&self) -> &SkewMatrix {
        &self.corr
    }

    pub fn normal_form(&self) -> &NormalForm {
        &self.nf
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.nf.lambdas
    }

    pub fn modes(&self) -> usize {
        self.corr.modes()
    }

    pub fn is_pure(&self) -> bool {
        self.nf.lambdas.first().is_some_and(|&l| l >= 1.0 - PURITY_TOL)
    }

    /// The state `U_Q ρ U_Q†`, whose correlation matrix is `q Γ qᵀ`.
    pub fn rotate(&self, q: &DMatrix<f64>) -> Result<Self> {
        check_orthogonal(q, self.corr.dim())?;
        let corr = self.corr.conjugate(q)?;
        let nq = q * &self.nf.q;
        let det = nq.clone().lu().determinant();
        let nf = NormalForm { q: nq, lambdas: self.nf.lambdas.clone(), det_sign: if det < 0.0 { -1 } else { 1 } };
        Ok(GaussianState { corr, nf })
    }

    /// `Tr(γ_S ρ) = i^{|S|/2} Pf(Γ|_S)` for a strictly increasing index list `S`.
    pub fn wick_expectation(&self, subset: &[usize]) -> Result<Complex64> {
        if subset.len() % 2 == 1 {
            return Err(Error::OddSubset(subset.len()));
        }
        let pf = restricted_pfaffian(&self.corr, subset)?;
        Ok(i_pow(subset.len() / 2) * pf)
    }

    /// `Tr(Z^{⊗n} ρ) = Pf(Γ)`.
    pub fn parity(&self) -> f64 {
        pfaffian(&self.corr)
    }

    /// Number of normal eigenvalues below `1 - tol`; the rank of ρ is `2^m`.
    pub fn rank_exponent(&self, tol: f64) -> usize {
        self.nf.lambdas.iter().filter(|&&l| l < 1.0 - tol).count()
    }

    /// Pure `2n`-mode state whose first `n` modes carry this state.
    pub fn purify(&self) -> Result<Self> {
        let d = self.corr.dim();
        let g = self.corr.to_dense();
        let m = DMatrix::<f64>::identity(d, d) + &g * &g;
        let m = (&m + m.transpose()) * 0.5;
        let eig = m.symmetric_eigen();
        let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
        let s = &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose();
        let mut big = DMatrix::zeros(2 * d, 2 * d);
        big.view_mut((0, 0), (d, d)).copy_from(&g);
        big.view_mut((0, d), (d, d)).copy_from(&s);
        big.view_mut((d, 0), (d, d)).copy_from(&(-&s));
        big.view_mut((d, d), (d, d)).copy_from(&(-&g));
        Self::from_correlation(SkewMatrix::from_upper_of(&big)?)
    }

    pub fn to_record(&self) -> GaussianRecord {
        GaussianRecord { n: self.modes(), upper: self.corr.upper().to_vec() }
    }

    pub fn from_record(r: &GaussianRecord) -> Result<Self> {
        Self::from_correlation(SkewMatrix::from_upper(2 * r.n, r.upper.clone())?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("plain record")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_record(&serde_json::from_str(text)?)
    }
}

impl Serialize for GaussianState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaussianState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = GaussianRecord::deserialize(d)?;
        GaussianState::from_record(&rec).map_err(serde::de::Error::custom)
    }
}

/// Serialized form of a [`GaussianState`]: mode count and the strict upper
/// triangle of Γ in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianRecord {
    pub n: usize,
    pub upper: Vec<f64>,
}

pub(crate) fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `|⟨ψ1|ψ2⟩|² = |Pf((Γ1 + Γ2)/2)|` for pure states.
pub fn overlap_pure(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    for s in [s1, s2] {
        if !s.is_pure() {
            return Err(Error::NotPure(s.lambdas()[0]));
        }
    }
    if s1.modes() != s2.modes() {
        return Err(Error::DimensionMismatch { expected: s1.corr().dim(), found: s2.corr().dim() });
    }
    let mean = &(s1.corr() + s2.corr()) * 0.5;
    Ok(pfaffian(&mean).abs().clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    PurePure,
    MixedMixed,
    PureVsAny,
}

/// Trace-distance bounds (norm convention `‖ρ-σ‖₁ ∈ [0,2]`) and fidelity
/// lower bounds computed from `ΔΓ = Γ1 - Γ2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub lb_infty: f64,
    pub ub_pure: Option<f64>,
    pub ub_mixed: f64,
    pub ub_pure_vs_any: Option<f64>,
    pub fid_lb_sq: f64,
    pub fid_lb_linear: f64,
    pub fid_lb_frobenius: f64,
    /// Unclamped `(‖ΔΓ‖₁, ‖ΔΓ‖₂, ‖ΔΓ‖_∞)`.
    pub delta_norms: [f64; 3],
}

fn is_pure_corr(g: &SkewMatrix) -> Result<(bool, f64)> {
    let nf = normal_form(g)?;
    let lmin = nf.lambdas[0];
    Ok((lmin >= 1.0 - PURITY_TOL, lmin))
}

pub fn distance_bounds(g1: &SkewMatrix, g2: &SkewMatrix, mode: DistanceMode) -> Result<BoundsReport> {
    let diff = g1.checked_sub(g2)?;
    match mode {
        DistanceMode::PurePure => {
            for g in [g1, g2] {
                let (pure, l) = is_pure_corr(g)?;
                if !pure {
                    return Err(Error::NotPure(l));
                }
            }
        }
        DistanceMode::PureVsAny => {
            let (pure, l) = is_pure_corr(g1)?;
            if !pure {
                return Err(Error::NotPure(l));
            }
        }
        DistanceMode::MixedMixed => {}
    }
    let sv = singular_values(&diff.to_dense());
    let n1 = norm_of_values(&sv, Schatten::One);
    let n2 = norm_of_values(&sv, Schatten::Two);
    let ninf = norm_of_values(&sv, Schatten::Inf);
    let dist = |x: f64| x.clamp(0.0, 2.0);
    let fid = |x: f64| x.clamp(0.0, 1.0);
    let ub_pure = match mode {
        DistanceMode::PurePure if ninf >= 2.0 - 1e-9 => Some(2.0),
        DistanceMode::PurePure => Some(dist(0.5 * n2)),
        _ => None,
    };
    let ub_pure_vs_any = (mode == DistanceMode::PureVsAny).then(|| dist(n1.sqrt()));
    Ok(BoundsReport {
        lb_infty: dist(ninf),
        ub_pure,
        ub_mixed: dist(0.5 * n1),
        ub_pure_vs_any,
        fid_lb_sq: fid((1.0 - 0.25 * n1).max(0.0).powi(2)),
        fid_lb_linear: fid(1.0 - 0.5 * n1),
        fid_lb_frobenius: fid(1.0 - 0.25 * n1 - 0.125 * n2 * n2),
        delta_norms: [n1, n2, ninf],
    })
}

/// Lower bounds on the distance to Gaussian sets and the upper bound to the
/// pure Gaussian set, from the normal eigenvalues of Γ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonGaussReport {
    pub r: usize,
    /// Distance lower bound to Gaussian states of rank at most `2^r`.
    pub lb_rank_set: f64,
    /// Distance lower bound to all Gaussian states, valid when `rank(ρ) ≤ 2^r`.
    pub lb_all_gaussian: f64,
    pub ub_pure_set: f64,
}

pub fn nongaussianity_bounds(g: &SkewMatrix, r: usize) -> Result<NonGaussReport> {
    let n = g.modes();
    if r + 1 > n {
        return Err(Error::RankExponentOutOfRange { r, max: n - 1 });
    }
    let lambdas: Vec<f64> = normal_form(g)?.lambdas.iter().map(|l| l.clamp(0.0, 1.0)).collect();
    let gap = 1.0 - lambdas[r];
    let rp = (r + 1) as f64;
    let lb_all = gap.powi(r as i32 + 1) / (1.0 + rp * gap.powi(r as i32));
    let ub = (2.0 * lambdas.iter().map(|l| 1.0 - l).sum::<f64>()).sqrt();
    Ok(NonGaussReport {
        r,
        lb_rank_set: gap.clamp(0.0, 1.0),
        lb_all_gaussian: lb_all.clamp(0.0, 2.0),
        ub_pure_set: ub,
    })
}

/// `C_{jk} = Tr(a_j† a_k ρ)` for a particle-number-preserving state.
#[derive(Clone, Debug, PartialEq)]
pub struct PnpCorrelation {
    c: DMatrix<Complex64>,
}

impl PnpCorrelation {
    /// Validates Hermiticity (1e-12) and occupations in `[0,1]` (1e-9).
    pub fn new(c: DMatrix<Complex64>) -> Result<Self> {
        if c.nrows() != c.ncols() || c.nrows() == 0 {
            return Err(Error::DimensionMismatch { expected: c.nrows(), found: c.ncols() });
        }
        let herm = (&c - c.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if herm > 1e-12 {
            return Err(Error::NotHermitian(herm));
        }
        for d in occupations(&c) {
            if !(-1e-9..=1.0 + 1e-9).contains(&d) {
                return Err(Error::OccupationOutOfRange(d));
            }
        }
        Ok(PnpCorrelation { c })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.c
    }

    pub fn modes(&self) -> usize {
        self.c.nrows()
    }

    /// Eigenvalues `D_j` of `C`, ascending.
    pub fn occupations(&self) -> Vec<f64> {
        occupations(&self.c)
    }
}

fn occupations(c: &DMatrix<Complex64>) -> Vec<f64> {
    let h = (c + c.adjoint()) * Complex64::new(0.5, 0.0);
    let mut d: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    d.sort_by(f64::total_cmp);
    d
}

/// `Γ = (I - 2 Re C) ⊗ iY + (2 Im C) ⊗ I` with `iY = [[0,1],[-1,0]]`.
pub fn pnp_to_gamma(c: &PnpCorrelation) -> SkewMatrix {
    let n = c.modes();
    let mut g = SkewMatrix::zeros(2 * n).expect("n >= 1");
    for j in 0..n {
        for k in 0..n {
            let z = c.c[(j, k)];
            let re = if j == k { 1.0 } else { 0.0 } - 2.0 * z.re;
            let im = 2.0 * z.im;
            // block (j,k): re·[[0,1],[-1,0]] + im·I
            if j < k {
                g.set(2 * j, 2 * k, im);
                g.set(2 * j, 2 * k + 1, re);
                g.set(2 * j + 1, 2 * k, -re);
                g.set(2 * j + 1, 2 * k + 1, im);
            } else if j == k {
                g.set(2 * j, 2 * j + 1, re);
            }
        }
    }
    g
}

pub fn complex_singular_values(a: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// `4 · 2^{1/p} · ‖C_Δ‖_p`, an upper bound on `‖Γ(ρ) - Γ(σ)‖_p`.
pub fn pnp_norm_transfer(c_delta: &DMatrix<Complex64>, p: Schatten) -> f64 {
    let norm = norm_of_values(&complex_singular_values(c_delta), p);
    4.0 * 2f64.powf(1.0 / p.exponent()) * norm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_and_mixed_construction() {
        let v = GaussianState::from_correlation(SkewMatrix::canonical(2).unwrap()).unwrap();
        assert!(v.is_pure());
        assert_eq!(v.corr(), &SkewMatrix::canonical(2).unwrap());
        let m = GaussianState::from_correlation(SkewMatrix::zeros(4).unwrap()).unwrap();
        assert_eq!(m.lambdas(), &[0.0, 0.0]);
        let bad = &SkewMatrix::canonical(2).unwrap() * 1.5;
        assert!(matches!(GaussianState::from_correlation(bad), Err(Error::NotAValidCorrelationMatrix(_))));
    }

    #[test]
    fn slight_overshoot_is_clamped() {
        let g = &SkewMatrix::canonical(2).unwrap() * (1.0 + 5e-7);
        let s = GaussianState::from_correlation(g).unwrap();
        assert!(s.lambdas().iter().all(|&l| l == 1.0));
        assert!((s.corr().get(0, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_states() {
        assert_eq!(GaussianState::product_state(&[1.0, 1.0, 1.0]).unwrap().corr(), &SkewMatrix::canonical(3).unwrap());
        assert_eq!(GaussianState::product_state(&[0.0]).unwrap().corr().max_abs(), 0.0);
        let one = GaussianState::product_state(&[-1.0]).unwrap();
        assert_eq!(one.corr().get(0, 1), -1.0);
        assert!(one.is_pure());
        assert!(matches!(GaussianState::product_state(&[1.2]), Err(Error::LambdaOutOfRange(_))));
    }

    #[test]
    fn rotation_by_identity_and_errors() {
        let s = GaussianState::product_state(&[0.3, 0.8]).unwrap();
        let same = s.rotate(&DMatrix::identity(4, 4)).unwrap();
        assert_eq!(same.corr(), s.corr());
        assert!(matches!(s.rotate(&DMatrix::identity(6, 6)), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(s.rotate(&(DMatrix::identity(4, 4) * 1.1)), Err(Error::NotOrthogonal(_))));
    }

    #[test]
    fn wick_examples() {
        let s = GaussianState::product_state(&[0.4, 0.7]).unwrap();
        let z = s.wick_expectation(&[0, 1]).unwrap();
        assert!((z - Complex64::new(0.0, 0.4)).norm() < 1e-15);
        assert_eq!(s.wick_expectation(&[]).unwrap(), Complex64::new(1.0, 0.0));
        assert!(matches!(s.wick_expectation(&[0]), Err(Error::OddSubset(1))));
    }

    #[test]
    fn parity_examples() {
        assert_eq!(GaussianState::vacuum(3).unwrap().parity(), 1.0);
        assert_eq!(GaussianState::product_state(&[-1.0, 1.0]).unwrap().parity(), -1.0);
        assert_eq!(GaussianState::maximally_mixed(2).unwrap().parity(), 0.0);
    }

    #[test]
    fn overlap_examples() {
        let v = GaussianState::vacuum(2).unwrap();
        assert!((overlap_pure(&v, &v).unwrap() - 1.0).abs() < 1e-15);
        let zero = GaussianState::product_state(&[1.0]).unwrap();
        let one = GaussianState::product_state(&[-1.0]).unwrap();
        assert_eq!(overlap_pure(&zero, &one).unwrap(), 0.0);
        let mixed = GaussianState::product_state(&[0.5]).unwrap();
        assert!(matches!(overlap_pure(&zero, &mixed), Err(Error::NotPure(_))));
    }

    #[test]
    fn single_mode_bounds() {
        let a = SkewMatrix::block_diag(&[0.3]).unwrap();
        let b = SkewMatrix::block_diag(&[0.8]).unwrap();
        let r = distance_bounds(&a, &b, DistanceMode::MixedMixed).unwrap();
        assert!((r.lb_infty - 0.5).abs() < 1e-12);
        assert!((r.ub_mixed - 0.5).abs() < 1e-12);
        assert_eq!(r.ub_pure, None);
        assert!(matches!(distance_bounds(&a, &b, DistanceMode::PurePure), Err(Error::NotPure(_))));
    }

    #[test]
    fn identical_inputs_give_trivial_bounds() {
        let a = SkewMatrix::canonical(2).unwrap();
        let r = distance_bounds(&a, &a, DistanceMode::PurePure).unwrap();
        assert_eq!((r.lb_infty, r.ub_mixed, r.ub_pure), (0.0, 0.0, Some(0.0)));
        assert_eq!((r.fid_lb_sq, r.fid_lb_linear, r.fid_lb_frobenius), (1.0, 1.0, 1.0));
        let z = SkewMatrix::zeros(6).unwrap();
        assert!(matches!(distance_bounds(&a, &z, DistanceMode::MixedMixed), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn orthogonal_pure_states_hit_the_two_branch() {
        let a = SkewMatrix::block_diag(&[1.0, 1.0]).unwrap();
        let b = SkewMatrix::block_diag(&[-1.0, 1.0]).unwrap();
        let r = distance_bounds(&a, &b, DistanceMode::PurePure).unwrap();
        assert_eq!(r.ub_pure, Some(2.0));
    }

    #[test]
    fn nongaussianity_examples() {
        let pure = SkewMatrix::canonical(3).unwrap();
        let r = nongaussianity_bounds(&pure, 1).unwrap();
        assert_eq!((r.lb_rank_set, r.lb_all_gaussian, r.ub_pure_set), (0.0, 0.0, 0.0));
        let half = SkewMatrix::block_diag(&[0.5, 1.0]).unwrap();
        let r = nongaussianity_bounds(&half, 0).unwrap();
        assert!((r.lb_rank_set - 0.5).abs() < 1e-12);
        assert!((r.lb_all_gaussian - 0.25).abs() < 1e-12);
        assert!(matches!(nongaussianity_bounds(&half, 2), Err(Error::RankExponentOutOfRange { .. })));
    }

    #[test]
    fn purification_examples() {
        let v = GaussianState::vacuum(2).unwrap().purify().unwrap();
        let l = SkewMatrix::canonical(2).unwrap().to_dense();
        let mut expect = DMatrix::zeros(8, 8);
        expect.view_mut((0, 0), (4, 4)).copy_from(&l);
        expect.view_mut((4, 4), (4, 4)).copy_from(&(-&l));
        assert!((v.corr().to_dense() - expect).amax() < 1e-12);

        let m = GaussianState::maximally_mixed(2).unwrap().purify().unwrap();
        let g = m.corr().to_dense();
        let mut expect = DMatrix::zeros(8, 8);
        expect.view_mut((0, 4), (4, 4)).copy_from(&DMatrix::identity(4, 4));
        expect.view_mut((4, 0), (4, 4)).copy_from(&(-DMatrix::<f64>::identity(4, 4)));
        assert!((&g - expect).amax() < 1e-12);
        assert!(m.is_pure());
    }

    #[test]
    fn rank_exponent_examples() {
        assert_eq!(GaussianState::vacuum(3).unwrap().rank_exponent(1e-6), 0);
        assert_eq!(GaussianState::maximally_mixed(4).unwrap().rank_exponent(1e-6), 4);
        assert_eq!(GaussianState::product_state(&[1.0, 0.5, 1.0]).unwrap().rank_exponent(1e-6), 1);
    }

    #[test]
    fn pnp_examples() {
        let filled = PnpCorrelation::new(DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0))).unwrap();
        assert_eq!(pnp_to_gamma(&filled), SkewMatrix::block_diag(&[-1.0]).unwrap());
        let empty = PnpCorrelation::new(DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(pnp_to_gamma(&empty), SkewMatrix::canonical(3).unwrap());
        let mut bad = DMatrix::zeros(2, 2);
        bad[(0, 1)] = Complex64::new(0.0, 0.3);
        assert!(matches!(PnpCorrelation::new(bad), Err(Error::NotHermitian(_))));
        let over = DMatrix::from_element(1, 1, Complex64::new(1.5, 0.0));
        assert!(matches!(PnpCorrelation::new(over), Err(Error::OccupationOutOfRange(_))));
    }

    #[test]
    fn pnp_norm_transfer_examples() {
        assert_eq!(pnp_norm_transfer(&DMatrix::zeros(2, 2), Schatten::One), 0.0);
        let mut c = DMatrix::zeros(2, 2);
        c[(0, 0)] = Complex64::new(0.25, 0.0);
        assert!((pnp_norm_transfer(&c, Schatten::Inf) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let s = GaussianState::product_state(&[0.1, -0.7]).unwrap().rotate(&crate::random::orthogonal(4, &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3))).unwrap();
        let back = GaussianState::from_json(&s.to_json()).unwrap();
        assert_eq!(back.corr(), s.corr());
    }
}
