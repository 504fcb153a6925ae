//! Trace-distance bounds from correlation matrices next to exact dense distances.

use gaussfermi::dense::{gaussian_to_dense, trace_distance};
use gaussfermi::gaussian::{distance_bounds, DistanceMode, GaussianState};
use gaussfermi::random;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gaussfermi::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (pa, pb, mode) in [
        (true, true, DistanceMode::PurePure),
        (true, false, DistanceMode::PureVsAny),
        (false, false, DistanceMode::MixedMixed),
    ] {
        let a = GaussianState::from_correlation(random::correlation(3, pa, &mut rng))?;
        let b = GaussianState::from_correlation(random::correlation(3, pb, &mut rng))?;
        let d = trace_distance(&gaussian_to_dense(&a)?, &gaussian_to_dense(&b)?)?;
        let r = distance_bounds(a.corr(), b.corr(), mode)?;
        println!(
            "{mode:?}: {:.4} <= {d:.4} <= {:.4}  pure {:?}  pure-vs-any {:?}",
            r.lb_infty, r.ub_mixed, r.ub_pure, r.ub_pure_vs_any
        );
    }
    Ok(())
}
