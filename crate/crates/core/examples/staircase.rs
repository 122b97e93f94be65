//! The generalized staircase on the middle-third gaps and its Cauchy rate.

use dirtrace::fractal::{CantorSpec, Staircase};

fn main() -> dirtrace::Result<()> {
    let c = CantorSpec::middle_third(10)?;
    let seq = Staircase::sequence(c.gaps(), 0.0, 1.0, 10)?;
    for (p, w) in seq.windows(2).enumerate() {
        println!(
            "p = {p:2}: sup|f_(p+1) - f_p| = {:.3e} ≤ {:.3e}",
            w[0].sup_distance(&w[1]),
            0.5f64.powi(p as i32 + 1)
        );
    }
    let f = seq.last().expect("staircases");
    for t in [0.0, 0.1, 1.0 / 3.0, 0.5, 2.0 / 3.0, 0.9, 1.0] {
        println!("f({t:.4}) = {:.6}", f.eval(t));
    }
    Ok(())
}
