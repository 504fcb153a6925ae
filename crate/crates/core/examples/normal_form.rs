//! Pfaffians, normal forms and Schatten norms of a random skew matrix.

use gaussfermi::random;
use gaussfermi::skewlin::{normal_form, pfaffian, skew_norm, Schatten};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gaussfermi::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random::skew(6, &mut rng);
    let pf = pfaffian(&a);
    println!("Pf(A) = {pf:.6}, Pf² = {:.6}, det = {:.6}", pf * pf, a.to_dense().determinant());

    let nf = normal_form(&a)?;
    println!("normal eigenvalues {:?}", nf.lambdas);
    println!("reconstruction error {:.2e}", nf.reconstruct().checked_sub(&a)?.max_abs());
    for p in [Schatten::One, Schatten::Two, Schatten::Inf] {
        println!("‖A‖_{p:?} = {:.4}", skew_norm(&a, p));
    }
    print!("{}", a.to_text());
    Ok(())
}
