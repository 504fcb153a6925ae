//! Wick expectations, parity and pure-state overlaps, checked against the dense simulation.

use gaussfermi::dense::{fidelity, gaussian_to_dense, majoranas};
use gaussfermi::gaussian::{overlap_pure, GaussianState};
use gaussfermi::random;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gaussfermi::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 3;
    let a = GaussianState::from_correlation(random::correlation(n, true, &mut rng))?;
    let b = GaussianState::from_correlation(random::correlation(n, true, &mut rng))?;
    let (da, db) = (gaussian_to_dense(&a)?, gaussian_to_dense(&b)?);

    let s = [0, 1, 3, 4];
    let wick = a.wick_expectation(&s)?;
    let dense = da.expectation(&majoranas(n)?.product(&s));
    println!("Tr(γ_S ρ) for S = {s:?}: Wick {wick:.6}, dense {dense:.6}");
    println!("parities {:+.3} {:+.3}", a.parity(), b.parity());
    println!("|⟨a|b⟩|² = {:.6} (dense fidelity {:.6})", overlap_pure(&a, &b)?, fidelity(&da, &db)?);
    Ok(())
}
