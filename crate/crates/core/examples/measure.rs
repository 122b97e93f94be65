//! Atom clouds of the directional measure on the unit square and the cusp,
//! with their total mass against the domain area.

use dirtrace::geometry::{Direction, Domain};
use dirtrace::measure::mu_atoms;
use dirtrace::quadrature::QuadratureSpec;

fn main() -> dirtrace::Result<()> {
    let spec = QuadratureSpec::with_ny(1024);
    for d in [Domain::unit_square(), Domain::Cusp, Domain::crack_2d()] {
        println!("{} (area {})", d.kind(), d.volume().unwrap_or(f64::NAN));
        for theta in Direction::family(4) {
            let mu = mu_atoms(&d, theta, &spec)?;
            let m = mu.total_mass();
            println!(
                "  θ = ({:+.3}, {:+.3}): {:6} atoms, mass {:.12} ± {:.1e}",
                theta.components()[0],
                theta.components()[1],
                mu.atoms.len(),
                m.value,
                m.error
            );
        }
    }
    Ok(())
}
