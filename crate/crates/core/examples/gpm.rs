//! The boundary operators G± and the form ⟨G₊u, G₊v⟩ - ⟨G₋u, G₋v⟩.

use dirtrace::calculus::{g_pm, gpm_identity};
use dirtrace::fields::parse_field;
use dirtrace::geometry::{Direction, Domain};
use dirtrace::quadrature::QuadratureSpec;

fn main() -> dirtrace::Result<()> {
    let spec = QuadratureSpec::with_ny(256);
    let (u, v) = (parse_field("sinmix")?, parse_field("expmix")?);
    let d = Domain::Cusp;
    let theta = Direction::from_angle(1.1);
    let samples = g_pm(&u, &d, theta, &spec)?;
    for s in samples.iter().step_by(samples.len() / 5) {
        println!(
            "z = ({:+.4}, {:.4}), ℓ = {:.4}: G₊u = {:+.6}, G₋u = {:+.6}",
            s.z[0], s.z[1], s.ell, s.g_plus, s.g_minus
        );
    }
    let r = gpm_identity(&u, &v, &d, theta, &spec)?;
    println!(
        "volume side {:.10}, G± form {:.10}, residual {:.1e}, error estimate {:.1e}, within tolerance {}",
        r.lhs,
        r.rhs,
        r.residual,
        r.err_lhs + r.err_rhs,
        r.within_tolerance()
    );
    Ok(())
}
