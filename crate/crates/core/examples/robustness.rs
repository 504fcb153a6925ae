//! Learning slightly non-Gaussian inputs: depolarizing noise and a cat-state admixture.

use gaussfermi::algorithms::{robustness_experiment, Noise};
use gaussfermi::gaussian::GaussianState;
use gaussfermi::random;
use gaussfermi::sampler::{Estimator, RngStream, Scheme};
use gaussfermi::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gaussfermi::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let base = GaussianState::from_correlation(random::correlation(3, true, &mut rng))?;
    let est = Estimator::new(Scheme::Commuting);
    for noise in [Noise::Depolarizing(0.01), Noise::Depolarizing(0.05), Noise::TracePerturbation(0.01), Noise::TracePerturbation(0.5)] {
        match robustness_experiment(&base, noise, 0.3, 0.1, &est, RngStream::new(9)) {
            Ok(r) => println!(
                "{noise:?}: {:?} promise ({:.4}), d_nongauss {:.4}, error {:.4}",
                r.promise, r.promise_value, r.d_nongauss, r.dense_error
            ),
            Err(Error::PromiseNotCertified { value, limit }) => {
                println!("{noise:?}: outside the promise ({value:.3} > {limit:.3})")
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
