//! Identity testing through the Gaussianity test: maximally mixed vs vacuum.

use gaussfermi::algorithms::reduce_identity_testing;
use gaussfermi::gaussian::GaussianState;
use gaussfermi::sampler::{Estimator, RngStream, Scheme, StateSource};

fn main() -> gaussfermi::Result<()> {
    let est = Estimator::new(Scheme::Commuting);
    for (name, s) in [("maximally mixed", GaussianState::maximally_mixed(3)?), ("vacuum", GaussianState::vacuum(3)?)] {
        let r = reduce_identity_testing(&StateSource::ExactGaussian(s), 0.5, 0.05, &est, RngStream::new(7))?;
        println!(
            "{name}: {:?} (‖Γ̂‖∞ = {:.4} vs {:.4}, local distance {:?}, {} shots)",
            r.verdict, r.gamma_norm, r.threshold, r.local_distance, r.shots_used
        );
    }
    Ok(())
}
