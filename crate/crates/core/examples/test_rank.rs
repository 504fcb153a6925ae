//! The bounded-rank test: a rank-2 Gaussian state passes, a parity-odd superposition fails at the tomography stage.

use gaussfermi::algorithms::{test_bounded_rank, GaussianSet, TestConfig};
use gaussfermi::dense::DenseState;
use gaussfermi::gaussian::GaussianState;
use gaussfermi::random;
use gaussfermi::sampler::{Estimator, RngStream, Scheme, StateSource};
use gaussfermi::skewlin::SkewMatrix;
use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gaussfermi::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 4;
    let cfg = TestConfig::new(0.0, 0.9, 0.05, 1, GaussianSet::RankSet);
    println!("thresholds {:?}", cfg.rank_thresholds(n)?);
    let est = Estimator::new(Scheme::Commuting);

    let g = SkewMatrix::block_diag(&[0.3, 1.0, 1.0, 1.0])?.conjugate(&random::orthogonal(2 * n, &mut rng))?;
    let low_rank = StateSource::ExactGaussian(GaussianState::from_correlation(g)?);

    let mut psi = DVector::zeros(1 << n);
    psi[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    psi[1 << (n - 1)] = psi[0];
    let odd = StateSource::Dense(DenseState::from_pure(&psi)?.rotate(&random::orthogonal(2 * n, &mut rng))?);

    for (name, src) in [("rank-2 gaussian", low_rank), ("parity superposition", odd)] {
        let v = test_bounded_rank(&src, &cfg, &est, RngStream::new(6))?;
        println!("{name}: {:?} at {:?}, local distance {:?}", v.verdict, v.evidence.stage, v.evidence.local_distance);
    }
    Ok(())
}
