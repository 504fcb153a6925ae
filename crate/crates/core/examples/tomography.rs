//! Pure and mixed Gaussian tomography with dense-verified errors.

use gaussfermi::algorithms::{tomograph_mixed, tomograph_pure};
use gaussfermi::dense::{gaussian_to_dense, trace_distance};
use gaussfermi::gaussian::GaussianState;
use gaussfermi::random;
use gaussfermi::sampler::{Estimator, RngStream, Scheme, StateSource};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gaussfermi::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let est = Estimator::new(Scheme::Commuting);
    let (eps, delta) = (0.2, 0.1);

    let mixed = GaussianState::from_correlation(random::correlation(4, false, &mut rng))?;
    let rep = tomograph_mixed(&StateSource::ExactGaussian(mixed.clone()), eps, delta, &est, RngStream::new(8))?;
    let err = trace_distance(&gaussian_to_dense(&rep.learned)?, &gaussian_to_dense(&mixed)?)?;
    println!("mixed: {} shots, error {err:.4} (target {eps})", rep.shots_used);

    let pure = GaussianState::from_correlation(random::correlation(4, true, &mut rng))?;
    let rep = tomograph_pure(&StateSource::ExactGaussian(pure.clone()), eps, delta, &est, RngStream::new(9))?;
    let err = trace_distance(&gaussian_to_dense(&rep.learned)?, &gaussian_to_dense(&pure)?)?;
    println!(
        "pure: {} shots (conservative budget {:?}), error {err:.4}",
        rep.shots_used, rep.conservative_budget
    );
    println!("{}", rep.learned.to_json());
    Ok(())
}
