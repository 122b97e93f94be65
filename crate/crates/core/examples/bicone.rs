//! The bicone: sign(x₂) has gap ν_N - ν_N∘ψ = 2 at every level, yet its
//! directional traces agree wherever two directions meet.

use dirtrace::calculus::bicone_gap;
use dirtrace::fields::parse_field;
use dirtrace::geometry::{Direction, Domain};
use dirtrace::quadrature::QuadratureSpec;
use dirtrace::trace::omnidirectional_consistency;

fn main() -> dirtrace::Result<()> {
    let u = parse_field("sign_y")?;
    let spec = QuadratureSpec::default();
    for n in 0..=8 {
        println!("N = {n}: gap {}", bicone_gap(&u, n, &spec)?);
    }
    let r = omnidirectional_consistency(
        &u,
        &Domain::Bicone,
        &Direction::family(8),
        &Default::default(),
        &QuadratureSpec::with_ny(256),
    )?;
    println!(
        "consistency: {:?}, disagreement mass {:.1e}; {}",
        r.verdict, r.disagreement_mass, r.status
    );
    Ok(())
}
