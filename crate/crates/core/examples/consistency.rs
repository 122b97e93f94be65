//! Omnidirectional consistency: a smooth field is not refuted, the slit
//! field disagrees across the crack.

use dirtrace::fields::parse_field;
use dirtrace::geometry::{Direction, Domain};
use dirtrace::quadrature::QuadratureSpec;
use dirtrace::trace::omnidirectional_consistency;

fn main() -> dirtrace::Result<()> {
    let spec = QuadratureSpec::with_ny(256);
    let dirs = Direction::family(8);
    for (field, d) in [
        ("x1x2", Domain::unit_square()),
        ("crack_2d", Domain::crack_2d()),
    ] {
        let r = omnidirectional_consistency(
            &parse_field(field)?,
            &d,
            &dirs,
            &Default::default(),
            &spec,
        )?;
        println!(
            "{field} on {}: {:?} ({}), disagreement mass {:.3e}",
            d.kind(),
            r.verdict,
            r.status,
            r.disagreement_mass
        );
        for w in r.witnesses.iter().take(4) {
            println!(
                "  z = ({:.3}, {:.4}): γ_θu = {:+.6} (θ = {:.3}) vs {:+.6} (θ' = {:.3})",
                w.z[0],
                w.z[1],
                w.value,
                w.theta.angle(),
                w.other_value,
                w.other.angle()
            );
        }
    }
    Ok(())
}
