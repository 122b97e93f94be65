//! Two candidate solutions on the bicone, y and sign(y), against interior
//! bump tests.

use dirtrace::calculus::{l2_distance, test_bumps, variational_residual};
use dirtrace::fields::parse_field;
use dirtrace::geometry::Domain;
use dirtrace::quadrature::QuadratureSpec;

fn main() -> dirtrace::Result<()> {
    let spec = QuadratureSpec::with_ny(256);
    let tests = test_bumps(&Domain::Bicone);
    for name in ["x2", "sign_y"] {
        let r = variational_residual(&parse_field(name)?, &Domain::Bicone, &tests, &spec)?;
        println!(
            "{name}: {} tests, max residual {:.2e}, holds {}",
            tests.len(),
            r.max_residual,
            r.holds
        );
    }
    let d = l2_distance(
        &parse_field("x2")?,
        &parse_field("sign_y")?,
        &Domain::Bicone,
        &spec,
    )?;
    println!("‖y - sign(y)‖_L² = {d:.6}");
    Ok(())
}
