//! Directional traces of a smooth field and the trace inequalities.

use dirtrace::fields::parse_field;
use dirtrace::geometry::{Direction, Domain};
use dirtrace::quadrature::QuadratureSpec;
use dirtrace::trace::{directional_trace, trace_inequalities};

fn main() -> dirtrace::Result<()> {
    let u = parse_field("sinmix")?;
    let square = Domain::unit_square();
    let spec = QuadratureSpec::with_ny(512);
    for z in [[1.0, 0.25], [1.0, 0.5], [1.0, 0.75]] {
        let t = directional_trace(&u, &square, Direction::e1(), z, &spec)?;
        println!("γ_e1 u{z:?} = {t:.12}, u{z:?} = {:.12}", u.eval(z));
    }
    for d in [square, Domain::Cusp, Domain::Bicone] {
        let r = trace_inequalities(&u, &d, Direction::from_angle(0.4), &spec)?;
        for c in [&r.trace_bound, &r.pair_sum_bound, &r.pair_diff_bound] {
            println!(
                "{:>8} {:>9}: {:.6} ≤ {:.6} (slack {:.3})",
                d.kind(),
                c.name,
                c.lhs,
                c.rhs,
                c.slack
            );
        }
    }
    Ok(())
}
