//! The dense simulation on a non-Gaussian state: correlations, Gaussianification, non-Gaussianity bounds.

use gaussfermi::dense::{correlation_matrix, gaussianification, state_metrics, DenseState};
use gaussfermi::gaussian::nongaussianity_bounds;

fn main() -> gaussfermi::Result<()> {
    let ghz = DenseState::ghz3();
    let g = correlation_matrix(&ghz)?;
    let gauss = gaussianification(&ghz)?;
    let m = state_metrics(&ghz, &gauss.dense)?;
    println!("Γ(GHZ) normal eigenvalues {:?}", gauss.g.lambdas());
    println!("‖ρ − G(ρ)‖₁ = {:.4}, fidelity {:.4}, S(ρ‖G(ρ)) = {:.4}", m.trace_dist, m.fidelity, gauss.d_nongauss);
    for r in 0..3 {
        let b = nongaussianity_bounds(&g, r)?;
        println!("r = {r}: rank-set bound {:.3}, all-Gaussian bound {:.3}", b.lb_rank_set, b.lb_all_gaussian);
    }
    print!("{}", ghz.to_text());
    Ok(())
}
