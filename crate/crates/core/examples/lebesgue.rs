//! The directional Lebesgue rate ∫(γ_θu - u_{θ,ε})² dμ_θ ≤ ε·diam·‖∂_θu‖².

use dirtrace::fields::parse_field;
use dirtrace::geometry::{Direction, Domain};
use dirtrace::quadrature::QuadratureSpec;
use dirtrace::trace::lebesgue_rate;

fn main() -> dirtrace::Result<()> {
    let u = parse_field("x1x2")?;
    let eps = [0.1, 0.03, 0.01, 0.003, 0.001];
    for theta in [Direction::e1(), Direction::from_angle(0.6)] {
        println!("θ = {:.3}", theta.angle());
        for r in lebesgue_rate(
            &u,
            &Domain::unit_square(),
            theta,
            &eps,
            &QuadratureSpec::with_ny(512),
        )? {
            println!(
                "  ε = {:<6} {:.4e} ≤ {:.4e}",
                r.eps, r.check.lhs, r.check.rhs
            );
        }
    }
    Ok(())
}
