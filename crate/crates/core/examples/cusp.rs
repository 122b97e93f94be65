//! The cusp |x₁| < x₂³: the trace of x₂^(-3/4) is square-integrable
//! against μ_θ while ∫(γu)²/ℓ dμ_θ diverges.

use dirtrace::fields::cusp_pow;
use dirtrace::geometry::{Direction, Domain};
use dirtrace::quadrature::QuadratureSpec;
use dirtrace::trace::{divergence_sentinel, trace_field};

fn main() -> dirtrace::Result<()> {
    let u = cusp_pow(0.75);
    let tf = trace_field(
        &u,
        &Domain::Cusp,
        Direction::e1(),
        &QuadratureSpec::with_ny(4096),
    )?;
    let r = tf.integrate(|s| s.value * s.value);
    println!("∫(γu)² dμ = {:.6} ± {:.1e} (exact 0.8)", r.value, r.error);
    let deltas = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];
    for row in divergence_sentinel(
        &u,
        &Domain::Cusp,
        Direction::e1(),
        &deltas,
        &QuadratureSpec::with_ny(1024),
    )? {
        let exact = 2.0 * (row.delta.powf(-0.5) - 1.0);
        println!(
            "δ = {:.0e}: {:.4} (exact {exact:.4}), growth {:?}",
            row.delta, row.value, row.growth
        );
    }
    Ok(())
}
