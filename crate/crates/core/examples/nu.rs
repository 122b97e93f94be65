//! Slice averages ν_n on the cone union and the increment bound.

use dirtrace::calculus::nu_sequence;
use dirtrace::fields::parse_field;
use dirtrace::geometry::Domain;
use dirtrace::quadrature::QuadratureSpec;

fn main() -> dirtrace::Result<()> {
    let spec = QuadratureSpec::with_ny(256);
    for name in ["one", "x1", "x1x2"] {
        let s = nu_sequence(&parse_field(name)?, &Domain::ConeUnionCantor, 12, &spec)?;
        println!(
            "{name}: ‖u‖_H¹ = {:.6}, ν̄ ∈ [{:.6}, {:.6}]",
            s.h1_norm,
            s.limit - s.radius,
            s.limit + s.radius
        );
        for (n, (i, b)) in s.increments.iter().zip(&s.bounds).enumerate().step_by(3) {
            println!(
                "  n = {n:2}: ν_n = {:.10}, |Δ| = {i:.2e} ≤ {b:.2e}",
                s.values[n]
            );
        }
    }
    Ok(())
}
