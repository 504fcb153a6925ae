//! Particle-number-preserving states: from the one-body matrix C to Γ and its norm transfer.

use gaussfermi::gaussian::{pnp_norm_transfer, pnp_to_gamma, PnpCorrelation};
use gaussfermi::skewlin::{normal_form, skew_norm, Schatten};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn main() -> gaussfermi::Result<()> {
    let c1 = PnpCorrelation::new(DMatrix::from_diagonal(&nalgebra::dvector![0.9, 0.2].map(|x| Complex64::new(x, 0.0))))?;
    let c2 = PnpCorrelation::new(DMatrix::from_row_slice(2, 2, &[
        Complex64::new(0.5, 0.0), Complex64::new(0.1, 0.2),
        Complex64::new(0.1, -0.2), Complex64::new(0.4, 0.0),
    ]))?;
    println!("occupations {:?} -> normal eigenvalues {:?}", c1.occupations(), normal_form(&pnp_to_gamma(&c1))?.lambdas);
    let dg = pnp_to_gamma(&c1).checked_sub(&pnp_to_gamma(&c2))?;
    let dc = c1.matrix() - c2.matrix();
    for p in [Schatten::One, Schatten::Two, Schatten::Inf] {
        println!("{p:?}: ‖ΔΓ‖ = {:.4}, transferred bound {:.4}", skew_norm(&dg, p), pnp_norm_transfer(&dc, p));
    }
    Ok(())
}
