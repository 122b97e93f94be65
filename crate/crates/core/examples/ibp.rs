//! Chord-paired integration by parts: the golden value 5/6 on the square
//! and the identity on fractal domains.

use dirtrace::calculus::ibp_check;
use dirtrace::fields::parse_field;
use dirtrace::geometry::{Direction, Domain};
use dirtrace::quadrature::QuadratureSpec;

fn main() -> dirtrace::Result<()> {
    let (u, v) = (parse_field("x1x2")?, parse_field("x1px2")?);
    let r = ibp_check(
        &u,
        &v,
        &Domain::unit_square(),
        Direction::e1(),
        &QuadratureSpec::with_ny(4096),
    )?;
    println!(
        "square, θ = e1: lhs {:.12}, rhs {:.12}, exact {:.12}",
        r.lhs,
        r.rhs,
        5.0 / 6.0
    );
    let spec = QuadratureSpec::with_ny(256);
    for d in [Domain::Cusp, Domain::ConeUnionCantor, Domain::Bicone] {
        for theta in Direction::family(4) {
            let r = ibp_check(&u, &v, &d, theta, &spec)?;
            println!(
                "{:>17} θ = {:.3}: lhs {:+.9}, rhs {:+.9}, residual {:.1e} (error {:.1e})",
                d.kind(),
                theta.angle(),
                r.lhs,
                r.rhs,
                r.residual,
                r.err_lhs + r.err_rhs
            );
        }
    }
    Ok(())
}
