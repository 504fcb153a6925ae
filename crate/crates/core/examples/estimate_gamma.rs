//! Correlation-matrix estimation with both measurement schemes, plus raw shot records.

use gaussfermi::gaussian::GaussianState;
use gaussfermi::random;
use gaussfermi::sampler::{record_shots, write_jsonl, Estimator, RngStream, Scheme, StateSource};
use gaussfermi::skewlin::{skew_norm, Schatten};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gaussfermi::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = GaussianState::from_correlation(random::correlation(3, false, &mut rng))?;
    let src = StateSource::ExactGaussian(s.clone());
    for scheme in [Scheme::Commuting, Scheme::PauliPairs] {
        let est = Estimator::new(scheme);
        let b = est.budget(3, 0.1, 0.05).expect("sampling scheme");
        let g = est.estimate(&src, 0.1, 0.05, RngStream::new(4))?;
        let err = skew_norm(&g.gamma_hat.checked_sub(s.corr())?, Schatten::Inf);
        println!("{scheme}: {} settings × {} shots, sup error {err:.4}", b.settings, b.per_setting);
    }
    let shots = record_shots(&src, 3, RngStream::new(5))?;
    write_jsonl(&shots[..4], std::io::stdout())?;
    Ok(())
}
