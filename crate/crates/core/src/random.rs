//! Random matrices and states for tests, examples and experiments.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::skewlin::SkewMatrix;

/// Haar-random orthogonal matrix via QR of a Gaussian matrix with sign fixing.
pub fn orthogonal<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..dim {
        if r[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    q
}

/// Haar-random orthogonal matrix with the requested determinant sign.
pub fn orthogonal_with_det<R: Rng + ?Sized>(dim: usize, det_sign: i8, rng: &mut R) -> DMatrix<f64> {
    let mut q = orthogonal(dim, rng);
    let det = q.clone().lu().determinant();
    if (det < 0.0) != (det_sign < 0) {
        q.column_mut(dim - 1).neg_mut();
    }
    q
}

/// Skew matrix with independent standard normal upper entries.
pub fn skew<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> SkewMatrix {
    let upper = (0..dim * (dim - 1) / 2).map(|_| StandardNormal.sample(rng)).collect();
    SkewMatrix::from_upper(dim, upper).expect("even dimension")
}

/// Normal eigenvalues for a random state: all ones when `pure`, else uniform in [0,1].
pub fn lambdas<R: Rng + ?Sized>(n: usize, pure: bool, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| if pure { 1.0 } else { rng.random::<f64>() }).collect()
}

/// `O · blocks(λ) · Oᵀ` for Haar-random `O`.
pub fn correlation<R: Rng + ?Sized>(n: usize, pure: bool, rng: &mut R) -> SkewMatrix {
    let l = lambdas(n, pure, rng);
    let o = orthogonal(2 * n, rng);
    SkewMatrix::block_diag(&l).expect("n >= 1").conjugate(&o).expect("matching dims")
}
