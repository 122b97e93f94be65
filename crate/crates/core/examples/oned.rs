//! One dimension: membership at isolated points and continuous
//! approximation on a Cantor complement.

use dirtrace::fields::parse_field;
use dirtrace::geometry::Domain;
use dirtrace::oned::{continuous_approximation_1d, h1tr_membership_1d, IntervalUnionFunction};

fn main() -> dirtrace::Result<()> {
    let crack = IntervalUnionFunction::crack_example();
    let m = h1tr_membership_1d(&crack, 1e-9);
    for w in m.witnesses() {
        println!(
            "crack: {} at z = {}, traces {} (left) vs {} (right)",
            m.verdict(),
            w.z,
            w.left,
            w.right
        );
    }
    let Domain::IntervalUnion(omega) = Domain::cantor_complement(0.25, 6)? else {
        unreachable!("interval union")
    };
    let u = IntervalUnionFunction::from_field(&parse_field("sinmix")?, omega);
    for n in [4, 6, 8, 10] {
        let a = continuous_approximation_1d(&u, n, None)?;
        println!(
            "n = {n:2}: {} components kept, ‖v_n - u‖_H¹ = {:.4e}, unselected measure {:.2e}",
            a.v.selected.len(),
            a.distance,
            a.unselected_measure
        );
    }
    Ok(())
}
