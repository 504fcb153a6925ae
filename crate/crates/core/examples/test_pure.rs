//! Gaussianity testing of pure states: a Gaussian input and a rotated cat state.

use gaussfermi::algorithms::{test_pure, GaussianSet, TestConfig};
use gaussfermi::dense::DenseState;
use gaussfermi::gaussian::GaussianState;
use gaussfermi::random;
use gaussfermi::sampler::{Estimator, RngStream, Scheme, StateSource};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gaussfermi::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 4;
    let cfg = TestConfig::new(0.0, 0.45, 0.05, 0, GaussianSet::MixedSet);
    let est = Estimator::new(Scheme::Commuting);

    let gaussian = StateSource::ExactGaussian(GaussianState::from_correlation(random::correlation(n, true, &mut rng))?);
    let mut psi = DVector::zeros(1 << n);
    psi[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    psi[(1 << n) - 1] = psi[0];
    let cat = StateSource::Dense(DenseState::from_pure(&psi)?.rotate(&random::orthogonal(2 * n, &mut rng))?);

    for (name, src) in [("gaussian", gaussian), ("cat", cat)] {
        let v = test_pure(&src, &cfg, &est, RngStream::new(5))?;
        println!(
            "{name}: {:?}, λ̂_min = {:.4}, threshold {:.4}, {} shots",
            v.verdict, v.evidence.lambda_hat_relevant, v.evidence.threshold, v.shots_used
        );
    }
    Ok(())
}
