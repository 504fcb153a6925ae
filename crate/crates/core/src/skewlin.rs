//! Real antisymmetric matrices.
//!
//! [`SkewMatrix`] stores only its strict upper triangle, so antisymmetry and the
//! zero diagonal hold exactly. On top of it sit the Pfaffian, the normal form
//! `A = Q (⊕ λ_j [[0,1],[-1,0]]) Qᵀ`, Schatten and Ky Fan norms, and the text
//! format used for fixtures.
//!
//! Indices are zero-based throughout the API.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute antisymmetry tolerance applied when reading dense input.
pub const ANTISYM_TOL: f64 = 1e-12;
/// Orthogonality tolerance (operator norm of `QᵀQ - I`).
pub const ORTHO_TOL: f64 = 1e-10;
/// Normal eigenvalues closer than this to zero are reported as exactly zero.
pub const LAMBDA_ZERO_CLAMP: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkewMatrix {
    dim: usize,
    upper: Vec<f64>,
}

#[inline]
fn tri_index(dim: usize, j: usize, k: usize) -> usize {
    debug_assert!(j < k && k < dim);
    j * dim - j * (j + 1) / 2 + (k - j - 1)
}

impl SkewMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 || dim % 2 == 1 {
            return Err(Error::OddDimension(dim));
        }
        Ok(SkewMatrix { dim, upper: vec![0.0; dim * (dim - 1) / 2] })
    }

    /// Builds from a flat strict upper triangle in row-major order.
    pub fn from_upper(dim: usize, upper: Vec<f64>) -> Result<Self> {
        let mut s = Self::zeros(dim)?;
        if upper.len() != s.upper.len() {
            return Err(Error::DimensionMismatch { expected: s.upper.len(), found: upper.len() });
        }
        s.upper = upper;
        Ok(s)
    }

    /// Takes the strict upper triangle of `m`; the lower triangle is ignored.
    pub fn from_upper_of(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let mut s = Self::zeros(m.nrows())?;
        for j in 0..s.dim {
            for k in j + 1..s.dim {
                s.upper[tri_index(s.dim, j, k)] = m[(j, k)];
            }
        }
        Ok(s)
    }

    /// Antisymmetrizes `(m - mᵀ)/2`. Use for matrices that are skew up to rounding.
    pub fn from_dense_projected(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let mut s = Self::zeros(m.nrows())?;
        for j in 0..s.dim {
            for k in j + 1..s.dim {
                s.upper[tri_index(s.dim, j, k)] = 0.5 * (m[(j, k)] - m[(k, j)]);
            }
        }
        Ok(s)
    }

    /// Rejects `m` unless it is antisymmetric with zero diagonal within `tol`.
    pub fn from_dense_checked(m: &DMatrix<f64>, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let d = m.nrows();
        let mut worst: f64 = 0.0;
        for j in 0..d {
            worst = worst.max(m[(j, j)].abs());
            for k in j + 1..d {
                worst = worst.max((m[(j, k)] + m[(k, j)]).abs());
            }
        }
        if worst > tol {
            return Err(Error::NotAntisymmetric(worst));
        }
        Self::from_upper_of(m)
    }

    /// `⊕_j λ_j [[0,1],[-1,0]]`.
    pub fn block_diag(lambdas: &[f64]) -> Result<Self> {
        let mut s = Self::zeros(2 * lambdas.len())?;
        for (j, &l) in lambdas.iter().enumerate() {
            s.set(2 * j, 2 * j + 1, l);
        }
        Ok(s)
    }

    /// The vacuum correlation matrix Λ on `n` modes.
    pub fn canonical(n: usize) -> Result<Self> {
        Self::block_diag(&vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> usize {
        self.dim / 2
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        assert!(j < self.dim && k < self.dim, "index out of range");
        match j.cmp(&k) {
            std::cmp::Ordering::Less => self.upper[tri_index(self.dim, j, k)],
            std::cmp::Ordering::Greater => -self.upper[tri_index(self.dim, k, j)],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    /// Sets entry `(j,k)` and implicitly `(k,j)`. Panics when `j == k`.
    pub fn set(&mut self, j: usize, k: usize, v: f64) {
        assert!(j < self.dim && k < self.dim && j != k, "invalid skew entry ({j},{k})");
        if j < k {
            self.upper[tri_index(self.dim, j, k)] = v;
        } else {
            self.upper[tri_index(self.dim, k, j)] = -v;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dim;
        let mut m = DMatrix::zeros(d, d);
        for j in 0..d {
            for k in j + 1..d {
                let v = self.upper[tri_index(d, j, k)];
                m[(j, k)] = v;
                m[(k, j)] = -v;
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.upper.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        SkewMatrix { dim: self.dim, upper: self.upper.iter().map(|&v| f(v)).collect() }
    }

    /// `q · self · qᵀ`, re-projected onto the antisymmetric subspace.
    pub fn conjugate(&self, q: &DMatrix<f64>) -> Result<Self> {
        if q.nrows() != self.dim || q.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: q.nrows() });
        }
        Self::from_dense_projected(&(q * self.to_dense() * q.transpose()))
    }

    /// Principal submatrix on the sorted index list `s`.
    pub fn restrict(&self, s: &[usize]) -> Result<DMatrix<f64>> {
        check_subset(s, self.dim)?;
        Ok(DMatrix::from_fn(s.len(), s.len(), |a, b| self.get(s[a], s[b])))
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        SkewMatrix {
            dim: self.dim,
            upper: self.upper.iter().zip(&other.upper).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(self.zip(other, |a, b| a - b))
    }

    /// Writes the fixture text format: `dim` on the first line, then `dim` rows.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.dim);
        for j in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|k| format!("{:e}", self.get(j, k))).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    /// Parses the fixture text format. Lines starting with `#` are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let dim: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad dimension: {e}")))?;
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing row {}", j + 1)))?;
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("row {}: {e}", j + 1))))
                .collect::<Result<_>>()?;
            if vals.len() != dim {
                return Err(Error::Parse(format!("row {} has {} entries, expected {dim}", j + 1, vals.len())));
            }
            for (k, v) in vals.into_iter().enumerate() {
                m[(j, k)] = v;
            }
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing rows after matrix".into()));
        }
        Self::from_dense_checked(&m, ANTISYM_TOL)
    }
}

impl Add for &SkewMatrix {
    type Output = SkewMatrix;
    fn add(self, rhs: &SkewMatrix) -> SkewMatrix {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &SkewMatrix {
    type Output = SkewMatrix;
    fn sub(self, rhs: &SkewMatrix) -> SkewMatrix {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &SkewMatrix {
    type Output = SkewMatrix;
    fn mul(self, rhs: f64) -> SkewMatrix {
        self.map(|v| v * rhs)
    }
}

fn check_subset(s: &[usize], dim: usize) -> Result<()> {
    for (i, &x) in s.iter().enumerate() {
        if x >= dim || (i > 0 && s[i - 1] >= x) {
            return Err(Error::IndexOutOfRange { index: x, dim });
        }
    }
    Ok(())
}

/// Pfaffian by Parlett–Reid elimination with partial pivoting. `m` must be
/// antisymmetric; odd dimensions give 0 and the empty matrix gives 1.
pub fn pfaffian_dense(mut m: DMatrix<f64>) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 1.0;
    }
    if n % 2 == 1 {
        return 0.0;
    }
    let mut pf = 1.0;
    let mut tau = vec![0.0; n];
    let mut col = vec![0.0; n];
    for k in (0..n - 1).step_by(2) {
        let mut kp = k + 1;
        let mut best = m[(k + 1, k)].abs();
        for i in k + 2..n {
            if m[(i, k)].abs() > best {
                best = m[(i, k)].abs();
                kp = i;
            }
        }
        if kp != k + 1 {
            m.swap_rows(k + 1, kp);
            m.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let piv = m[(k, k + 1)];
        if piv == 0.0 {
            return 0.0;
        }
        pf *= piv;
        if k + 2 < n {
            for i in k + 2..n {
                tau[i] = m[(k, i)] / piv;
                col[i] = m[(i, k + 1)];
            }
            for i in k + 2..n {
                for j in k + 2..n {
                    m[(i, j)] += tau[i] * col[j] - col[i] * tau[j];
                }
            }
        }
    }
    pf
}

pub fn pfaffian(a: &SkewMatrix) -> f64 {
    pfaffian_dense(a.to_dense())
}

/// Pfaffian of the principal submatrix on the strictly increasing index list `s`.
pub fn restricted_pfaffian(a: &SkewMatrix, s: &[usize]) -> Result<f64> {
    if s.len() % 2 == 1 {
        return Err(Error::OddRestriction(s.len()));
    }
    Ok(pfaffian_dense(a.restrict(s)?))
}

/// `a = q · blocks(λ) · qᵀ` with `λ` sorted ascending and non-negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalForm {
    pub q: DMatrix<f64>,
    pub lambdas: Vec<f64>,
    pub det_sign: i8,
}

impl NormalForm {
    pub fn blocks(&self) -> SkewMatrix {
        SkewMatrix::block_diag(&self.lambdas).expect("normal form has at least one mode")
    }

    pub fn reconstruct(&self) -> SkewMatrix {
        SkewMatrix::from_dense_projected(&(&self.q * self.blocks().to_dense() * self.q.transpose()))
            .expect("square even matrix")
    }
}

/// Orthonormalizes `v` against `basis` (two Gram–Schmidt passes). Returns
/// `None` when the residual norm drops below `min_norm`.
fn orthonormalize(v: &mut Vec<f64>, basis: &[Vec<f64>], min_norm: f64) -> Option<()> {
    let start: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _ in 0..2 {
        for b in basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
    }
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= min_norm * start.max(1.0) {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Some(())
}

pub fn normal_form(a: &SkewMatrix) -> Result<NormalForm> {
    let d = a.dim();
    let n = d / 2;
    let am = a.to_dense();
    let scale = a.max_abs();
    if scale == 0.0 {
        return Ok(NormalForm { q: DMatrix::identity(d, d), lambdas: vec![0.0; n], det_sign: 1 });
    }

    // iA is Hermitian with spectrum ±λ_j. An eigenvector x + iy at +λ gives
    // A x = λ y and A y = -λ x, i.e. the real pair (y, x) spans one block.
    let h = am.map(|v| Complex64::new(0.0, v));
    let eig = nalgebra::SymmetricEigen::try_new(h, 1e-15, 10_000).ok_or(Error::ConvergenceFailure)?;
    let tol = 64.0 * f64::EPSILON * scale * (d as f64);

    let mut positive: Vec<usize> = (0..d).filter(|&i| eig.eigenvalues[i] > tol).collect();
    positive.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    positive.truncate(n);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    for &i in &positive {
        let v = eig.eigenvectors.column(i);
        let mut y: Vec<f64> = v.iter().map(|c| c.im).collect();
        let mut x: Vec<f64> = v.iter().map(|c| c.re).collect();
        let snapshot = basis.len();
        if orthonormalize(&mut y, &basis, 1e-6).is_some() {
            basis.push(y);
            if orthonormalize(&mut x, &basis, 1e-6).is_some() {
                basis.push(x);
                continue;
            }
        }
        basis.truncate(snapshot);
    }

    // Kernel directions: real and imaginary parts of near-null eigenvectors,
    // then the standard basis as a fallback.
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for i in 0..d {
        if eig.eigenvalues[i].abs() <= tol {
            let v = eig.eigenvectors.column(i);
            candidates.push(v.iter().map(|c| c.re).collect());
            candidates.push(v.iter().map(|c| c.im).collect());
        }
    }
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        candidates.push(e);
    }
    for mut c in candidates {
        if basis.len() == d {
            break;
        }
        if orthonormalize(&mut c, &basis, 1e-6).is_some() {
            basis.push(c);
        }
    }
    if basis.len() != d {
        return Err(Error::ConvergenceFailure);
    }

    let mut q = DMatrix::from_fn(d, d, |r, c| basis[c][r]);
    let b = q.transpose() * &am * &q;
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(n);
    for j in 0..n {
        let mut l = b[(2 * j, 2 * j + 1)];
        if l < 0.0 {
            q.swap_columns(2 * j, 2 * j + 1);
            l = -l;
        }
        if l < LAMBDA_ZERO_CLAMP {
            l = 0.0;
        }
        blocks.push((l, j));
    }
    blocks.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let mut sorted_q = DMatrix::zeros(d, d);
    for (new, &(_, old)) in blocks.iter().enumerate() {
        sorted_q.set_column(2 * new, &q.column(2 * old));
        sorted_q.set_column(2 * new + 1, &q.column(2 * old + 1));
    }
    let det = sorted_q.clone().lu().determinant();
    Ok(NormalForm {
        q: sorted_q,
        lambdas: blocks.into_iter().map(|(l, _)| l).collect(),
        det_sign: if det < 0.0 { -1 } else { 1 },
    })
}

/// Supported Schatten exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Schatten {
    One,
    Two,
    Inf,
}

impl Schatten {
    pub fn exponent(self) -> f64 {
        match self {
            Schatten::One => 1.0,
            Schatten::Two => 2.0,
            Schatten::Inf => f64::INFINITY,
        }
    }
}

impl TryFrom<f64> for Schatten {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        if p == 1.0 {
            Ok(Schatten::One)
        } else if p == 2.0 {
            Ok(Schatten::Two)
        } else if p == f64::INFINITY {
            Ok(Schatten::Inf)
        } else {
            Err(Error::UnsupportedP(p))
        }
    }
}

pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

pub fn norm_of_values(s: &[f64], p: Schatten) -> f64 {
    match p {
        Schatten::One => s.iter().sum(),
        Schatten::Two => s.iter().map(|x| x * x).sum::<f64>().sqrt(),
        Schatten::Inf => s.iter().fold(0.0, |m, &x| m.max(x)),
    }
}

pub fn schatten_norm(a: &DMatrix<f64>, p: Schatten) -> f64 {
    match p {
        Schatten::Two => a.norm(),
        _ => norm_of_values(&singular_values(a), p),
    }
}

/// Same as [`schatten_norm`] for skew input, via the normal eigenvalues.
pub fn skew_norm(a: &SkewMatrix, p: Schatten) -> f64 {
    match p {
        Schatten::Two => a.upper().iter().map(|v| 2.0 * v * v).sum::<f64>().sqrt(),
        _ => schatten_norm(&a.to_dense(), p),
    }
}

pub fn ky_fan_norm(a: &DMatrix<f64>, r: usize) -> Result<f64> {
    let dim = a.nrows().min(a.ncols());
    if r > dim {
        return Err(Error::RankTooLarge { r, dim });
    }
    Ok(singular_values(a).iter().take(r).sum())
}

/// `max_k |λ_k(a) - λ_k(b)|` over ascending normal eigenvalues.
pub fn normal_eigenvalue_gap(a: &SkewMatrix, b: &SkewMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let la = normal_form(a)?.lambdas;
    let lb = normal_form(b)?.lambdas;
    Ok(la.iter().zip(&lb).fold(0.0, |m, (x, y)| m.max((x - y).abs())))
}

/// Operator norm of `qᵀq - I`.
pub fn orthogonality_defect(q: &DMatrix<f64>) -> f64 {
    let d = q.nrows();
    let e = q.transpose() * q - DMatrix::<f64>::identity(d, d);
    schatten_norm(&e, Schatten::Inf)
}

pub fn check_orthogonal(q: &DMatrix<f64>, dim: usize) -> Result<()> {
    if q.nrows() != dim || q.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: q.nrows() });
    }
    let defect = orthogonality_defect(q);
    if defect > ORTHO_TOL || !defect.is_finite() {
        return Err(Error::NotOrthogonal(defect));
    }
    Ok(())
}
