//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dirtrace::calculus::{
    bicone_gap, gpm_identity, ibp_check, l2_distance, nu_n, nu_sequence, test_bumps,
    variational_residual, IbpReport,
};
use dirtrace::fields::{cusp_pow, parse_field, FieldLibrary, ScalarField, SMOOTH_PAIRS};
use dirtrace::fractal::cantor::{CantorScheme, CantorSpec};
use dirtrace::fractal::staircase::Staircase;
use dirtrace::geometry::{Direction, Domain};
use dirtrace::measure::{
    lipschitz_density_check, mu_atoms, mu_reflection_check, BoundaryPredicate,
};
use dirtrace::oned::{continuous_approximation_1d, h1tr_membership_1d, IntervalUnionFunction};
use dirtrace::quadrature::QuadratureSpec;
use dirtrace::trace::{
    divergence_sentinel, lebesgue_rate, omnidirectional_consistency, trace_field,
    trace_inequalities, Verdict,
};
use dirtrace::Error;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const TIME_LIMIT_S: f64 = 60.0;
const MATRIX_NY: usize = 256;

fn err(e: Error) -> String {
    e.to_string()
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn field(name: &str) -> ScalarField {
    parse_field(name).expect("built-in field")
}

fn matrix_domains() -> Vec<Domain> {
    vec![
        Domain::unit_square(),
        Domain::Cusp,
        Domain::ConeUnionCantor,
        Domain::Bicone,
    ]
}

/// Runs an identity over domains × 16 directions × smooth pairs and
/// reports the worst `residual / (3·error)`.
fn identity_matrix<F>(check: F) -> Outcome
where
    F: Fn(
        &ScalarField,
        &ScalarField,
        &Domain,
        Direction,
        &QuadratureSpec,
    ) -> dirtrace::Result<IbpReport>,
{
    let spec = QuadratureSpec::with_ny(MATRIX_NY);
    let (mut runs, mut failures, mut worst) = (0, Vec::new(), 0.0_f64);
    for d in matrix_domains() {
        for theta in Direction::family(16) {
            for (u, v) in SMOOTH_PAIRS {
                let r = check(&field(u), &field(v), &d, theta, &spec).map_err(err)?;
                runs += 1;
                let budget = 3.0 * (r.err_lhs + r.err_rhs);
                if budget > 0.0 {
                    worst = worst.max(r.residual / budget);
                }
                if !r.within_tolerance() {
                    failures.push(format!(
                        "{} {u}·{v} θ={:.3}: {:.3e}",
                        d.kind(),
                        theta.angle(),
                        r.residual
                    ));
                }
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{runs} runs, worst residual/(3·err) = {worst:.3}, failures: {}",
            if failures.is_empty() {
                "none".into()
            } else {
                failures.join("; ")
            }
        ),
    )
}

fn c01_ibp() -> Outcome {
    let spec = QuadratureSpec::with_ny(4096);
    let r = ibp_check(
        &field("x1x2"),
        &field("x1px2"),
        &Domain::unit_square(),
        Direction::e1(),
        &spec,
    )
    .map_err(err)?;
    let exact = 5.0 / 6.0;
    let golden =
        (r.lhs - exact).abs() <= 1e-6 && (r.rhs - exact).abs() <= 1e-6 && r.residual <= 1e-6;
    let head = format!(
        "golden lhs = {:.12}, rhs = {:.12}, residual = {:.2e}",
        r.lhs, r.rhs, r.residual
    );
    if !golden {
        return Err(head);
    }
    identity_matrix(ibp_check)
        .map(|m| format!("{head}; {m}"))
        .map_err(|m| format!("{head}; {m}"))
}

fn c02_lipschitz_density() -> Outcome {
    let Domain::Polygon(square) = Domain::unit_square() else {
        unreachable!()
    };
    let spec = QuadratureSpec::default();
    let (mut edge, mut mass) = (0.0_f64, 0.0_f64);
    for theta in Direction::family(16) {
        edge = edge.max(
            lipschitz_density_check(&square, theta, &spec)
                .map_err(err)?
                .max_discrepancy,
        );
        let m = mu_atoms(&Domain::unit_square(), theta, &spec)
            .map_err(err)?
            .total_mass();
        mass = mass.max((m.value - 1.0).abs());
    }
    verdict(
        edge <= 1e-6 && mass <= 1e-10,
        format!("max per-edge discrepancy {edge:.2e}, max |μ_θ(∂Ω) - 1| = {mass:.2e} over 16 directions"),
    )
}

fn c03_cantor_measures() -> Outcome {
    let spec = QuadratureSpec::default();
    let plus = Direction::line(true);
    let mut misplaced = 0;
    for level in [3, 6, 9] {
        let gaps = CantorSpec::new(0.25, level, CantorScheme::Rho)
            .map_err(err)?
            .sorted_gaps();
        let d = Domain::cantor_complement(0.25, level).map_err(err)?;
        let mu = mu_atoms(&d, plus, &spec).map_err(err)?;
        if mu.atoms.len() != gaps.len() {
            misplaced += gaps.len().abs_diff(mu.atoms.len());
        }
        for (a, (c, dd)) in mu.atoms.iter().zip(&gaps) {
            if a.z.coords[0] != *dd || a.weight != dd - c {
                misplaced += 1;
            }
        }
    }
    let d = Domain::cantor_complement(0.25, 12).map_err(err)?;
    let mass = mu_atoms(&d, plus, &spec).map_err(err)?.total_mass().value;
    verdict(
        misplaced == 0 && (mass - 0.5).abs() <= 1e-3,
        format!("atoms at d_m with weight d_m - c_m (levels 3, 6, 9; {misplaced} mismatches), mass at L=12 = {mass:.6}"),
    )
}

fn c04_cusp() -> Outcome {
    let u = cusp_pow(0.75);
    let tf = trace_field(
        &u,
        &Domain::Cusp,
        Direction::e1(),
        &QuadratureSpec::with_ny(4096),
    )
    .map_err(err)?;
    let norm = tf.integrate(|s| s.value * s.value);
    let rows = divergence_sentinel(
        &u,
        &Domain::Cusp,
        Direction::e1(),
        &[1e-2, 1e-3, 1e-4],
        &QuadratureSpec::with_ny(1024),
    )
    .map_err(err)?;
    let growth: Vec<f64> = rows.iter().filter_map(|r| r.growth).collect();
    let grows = growth.len() == 2 && growth.iter().all(|g| *g >= 3.0);
    verdict(
        (norm.value - 0.8).abs() <= 1e-3 && grows,
        format!(
            "∫(γu)² dμ = {:.6} (exact 0.8), sentinel {:?}, growth {:?}",
            norm.value,
            rows.iter()
                .map(|r| format!("{:.3}", r.value))
                .collect::<Vec<_>>(),
            growth.iter().map(|g| format!("{g:.3}")).collect::<Vec<_>>()
        ),
    )
}

fn c05_lebesgue() -> Outcome {
    let spec = QuadratureSpec::with_ny(512);
    let u = field("x1x2");
    let mut bad = Vec::new();
    let mut e1_values = Vec::new();
    for theta in Direction::family(16) {
        let rows = lebesgue_rate(
            &u,
            &Domain::unit_square(),
            theta,
            &[0.1, 0.01, 0.001],
            &spec,
        )
        .map_err(err)?;
        let holds = rows.iter().all(|r| r.check.holds);
        let decreasing = rows.windows(2).all(|w| w[1].check.lhs < w[0].check.lhs);
        if !(holds && decreasing) {
            bad.push(format!("θ={:.3}", theta.angle()));
        }
        if theta == Direction::e1() {
            e1_values = rows
                .iter()
                .map(|r| format!("{:.3e}≤{:.3e}", r.check.lhs, r.check.rhs))
                .collect();
        }
    }
    verdict(
        bad.is_empty(),
        format!("16 directions, θ=e1 rows {e1_values:?}, failing: {bad:?}"),
    )
}

fn c06_trace_inequalities() -> Outcome {
    let spec = QuadratureSpec::with_ny(MATRIX_NY);
    let (mut runs, mut failures, mut min_rel) = (0, Vec::new(), f64::INFINITY);
    for d in matrix_domains() {
        for theta in Direction::family(16) {
            for u in FieldLibrary::smooth() {
                let r = trace_inequalities(&u, &d, theta, &spec).map_err(err)?;
                runs += 1;
                for c in [&r.trace_bound, &r.pair_sum_bound, &r.pair_diff_bound] {
                    if c.rhs > 0.0 {
                        min_rel = min_rel.min(c.slack / c.rhs);
                    }
                }
                if !r.all_hold() {
                    failures.push(format!("{} {} θ={:.3}", d.kind(), u.label(), theta.angle()));
                }
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!("{runs} runs × 3 bounds, min relative slack {min_rel:.3}, failures: {failures:?}"),
    )
}

fn c07_nu() -> Outcome {
    let spec = QuadratureSpec::with_ny(MATRIX_NY);
    let mut notes = Vec::new();
    let mut ok = true;
    for name in ["one", "x1", "x1x2"] {
        let s = nu_sequence(&field(name), &Domain::ConeUnionCantor, 12, &spec).map_err(err)?;
        ok &= s.bounds_hold;
        let worst = s
            .increments
            .iter()
            .zip(&s.bounds)
            .map(|(i, b)| i / b)
            .fold(0.0_f64, f64::max);
        notes.push(format!(
            "{name}: max increment/bound {worst:.3}, ν̄ ∈ {:.6} ± {:.3}",
            s.limit, s.radius
        ));
    }
    let mut dev = 0.0_f64;
    for n in 0..=12 {
        dev = dev.max((nu_n(&field("one"), n, false, &spec).map_err(err)? - 1.0).abs());
    }
    ok &= dev <= 4.0 * f64::EPSILON;
    notes.push(format!("max |ν_n(1) - 1| = {dev:.1e}"));
    verdict(ok, notes.join("; "))
}

fn c08_bicone() -> Outcome {
    let spec = QuadratureSpec::default();
    let u = field("sign_y");
    let mut dev = 0.0_f64;
    for n in 0..=8 {
        dev = dev.max((bicone_gap(&u, n, &spec).map_err(err)? - 2.0).abs());
    }
    let r = omnidirectional_consistency(
        &u,
        &Domain::Bicone,
        &Direction::family(16),
        &Default::default(),
        &QuadratureSpec::with_ny(MATRIX_NY),
    )
    .map_err(err)?;
    verdict(
        dev <= 1e-9 && r.verdict == Verdict::In && r.disagreement_mass <= 1e-6,
        format!(
            "max |gap - 2| = {dev:.1e} for N = 0..8, consistency {:?} with disagreement mass {:.1e}",
            r.verdict, r.disagreement_mass
        ),
    )
}

fn c09_cracks() -> Outcome {
    let m = h1tr_membership_1d(&IntervalUnionFunction::crack_example(), 1e-9);
    let w: Vec<_> = m.witnesses().collect();
    let one_d = !m.member
        && w.len() == 1
        && w[0].z == 1.0
        && (w[0].left - 1.0).abs() <= 1e-8
        && w[0].right.abs() <= 1e-8;
    let r = omnidirectional_consistency(
        &field("crack_2d"),
        &Domain::crack_2d(),
        &Direction::family(16),
        &Default::default(),
        &QuadratureSpec::with_ny(MATRIX_NY),
    )
    .map_err(err)?;
    let mut worst = 0.0_f64;
    let mut off_slit = 0;
    for w in &r.witnesses {
        let s = w.z[1];
        if (w.z[0] - 0.5).abs() > 1e-12 || !(0.0..=1.0).contains(&s) {
            off_slit += 1;
            continue;
        }
        // Directions with a positive first component reach the slit from the left.
        let side = |theta: Direction, v: f64| {
            if theta.components()[0] > 0.0 {
                v + s
            } else {
                v - s
            }
        };
        worst = worst
            .max(side(w.theta, w.value).abs())
            .max(side(w.other, w.other_value).abs());
    }
    let two_d =
        r.verdict == Verdict::Out && !r.witnesses.is_empty() && off_slit == 0 && worst <= 1e-8;
    verdict(
        one_d && two_d,
        format!(
            "1D: {} at z=1 with traces {:?}; 2D: {:?}, {} witnesses on the slit, max |value ∓ s| = {worst:.1e}",
            m.verdict(),
            w.iter().map(|w| (w.left, w.right)).collect::<Vec<_>>(),
            r.verdict,
            r.witnesses.len() - off_slit,
        ),
    )
}

fn c10_staircase() -> Outcome {
    let spec = CantorSpec::new(1.0 / 3.0, 12, CantorScheme::Third).map_err(err)?;
    let seq = Staircase::sequence(spec.gaps(), 0.0, 1.0, 13).map_err(err)?;
    let ends = seq.iter().all(|f| f.eval(0.0) == 0.0 && f.eval(1.0) == 1.0);
    let n = 100_000;
    let monotone = seq.iter().all(|f| {
        let mut prev = f.eval(0.0);
        (1..=n).all(|k| {
            let v = f.eval(k as f64 / n as f64);
            let ok = v >= prev;
            prev = v;
            ok
        })
    });
    let mut ratio = 0.0_f64;
    for p in 0..=12 {
        ratio = ratio.max(seq[p].sup_distance(&seq[p + 1]) / 0.5f64.powi(p as i32 + 1));
    }
    verdict(
        ends && monotone && ratio <= 1.0,
        format!("endpoints exact: {ends}, monotone on 1e5 samples: {monotone}, max sup|f_(p+1) - f_p|/2^(-1-p) = {ratio:.3}"),
    )
}

fn random_predicate(rng: &mut ChaCha8Rng, lo: [f64; 2], hi: [f64; 2]) -> BoundaryPredicate {
    let point = |rng: &mut ChaCha8Rng| [rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1])];
    match rng.gen_range(0..3) {
        0 => {
            let (a, b) = (point(rng), point(rng));
            BoundaryPredicate::Box {
                lo: [a[0].min(b[0]), a[1].min(b[1])],
                hi: [a[0].max(b[0]), a[1].max(b[1])],
            }
        }
        1 => {
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let normal = [phi.cos(), phi.sin()];
            let p = point(rng);
            BoundaryPredicate::HalfPlane {
                normal,
                offset: normal[0] * p[0] + normal[1] * p[1],
            }
        }
        _ => {
            let left = Box::new(random_predicate(rng, lo, hi));
            let right = Box::new(BoundaryPredicate::Not {
                inner: Box::new(random_predicate(rng, lo, hi)),
            });
            BoundaryPredicate::And { left, right }
        }
    }
}

fn c11_reflection() -> Outcome {
    let spec = QuadratureSpec::with_ny(1024);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut runs, mut failures, mut worst) = (0, Vec::new(), 0.0_f64);
    for d in [Domain::unit_square(), Domain::Cusp] {
        let (lo, hi) = d.bbox();
        for k in 0..20 {
            let a = random_predicate(&mut rng, lo, hi);
            for theta in Direction::family(8) {
                let (m, p) = mu_reflection_check(&d, theta, &a, &spec).map_err(err)?;
                runs += 1;
                let diff = (m.value - p.value).abs();
                let budget = 2.0 * (m.error + p.error) + 1e-12;
                worst = worst.max(diff / budget);
                if diff > budget {
                    failures.push(format!(
                        "{} predicate {k} θ={:.3}: {diff:.2e}",
                        d.kind(),
                        theta.angle()
                    ));
                }
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!("{runs} runs, worst |Δ|/(2·err) = {worst:.3}, failures: {failures:?}"),
    )
}

fn c12_oned() -> Outcome {
    let omega = match Domain::cantor_complement(0.25, 6).map_err(err)? {
        Domain::IntervalUnion(iv) => iv,
        _ => unreachable!(),
    };
    let mut notes = Vec::new();
    let mut ok = true;
    for name in ["sinmix", "expmix"] {
        let u = IntervalUnionFunction::from_field(&field(name), omega.clone());
        let d: Vec<f64> = [4, 6, 8, 10]
            .iter()
            .map(|&n| continuous_approximation_1d(&u, n, None).map(|a| a.distance))
            .collect::<dirtrace::Result<_>>()
            .map_err(err)?;
        ok &= d.windows(2).all(|w| w[1] < w[0]);
        notes.push(format!(
            "{name}: {:?}",
            d.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>()
        ));
    }
    let crack = IntervalUnionFunction::crack_example();
    let rejected = matches!(
        continuous_approximation_1d(&crack, 4, None),
        Err(Error::NotInH1tr(_))
    );
    ok &= rejected;
    notes.push(format!("crack rejected: {rejected}"));
    verdict(ok, notes.join("; "))
}

fn c13_gpm() -> Outcome {
    identity_matrix(gpm_identity)
}

fn c14_variational() -> Outcome {
    let spec = QuadratureSpec::with_ny(MATRIX_NY);
    let tests = test_bumps(&Domain::Bicone);
    let mut notes = vec![format!("{} bumps", tests.len())];
    let mut ok = tests.len() == 16;
    for name in ["x2", "sign_y"] {
        let r = variational_residual(&field(name), &Domain::Bicone, &tests, &spec).map_err(err)?;
        ok &= r.holds;
        notes.push(format!("{name}: max residual {:.2e}", r.max_residual));
    }
    let gap = l2_distance(&field("x2"), &field("sign_y"), &Domain::Bicone, &spec).map_err(err)?;
    ok &= gap > 0.1;
    notes.push(format!("‖y - sign(y)‖_L² = {gap:.4}"));
    verdict(ok, notes.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 14] = [
        ("integration by parts", c01_ibp),
        ("Lipschitz density", c02_lipschitz_density),
        ("Cantor measures", c03_cantor_measures),
        ("cusp trace norm and divergence sentinel", c04_cusp),
        ("Lebesgue rate", c05_lebesgue),
        ("trace inequalities", c06_trace_inequalities),
        ("nu_n convergence", c07_nu),
        ("bicone counterexample", c08_bicone),
        ("crack detection", c09_cracks),
        ("staircase", c10_staircase),
        ("reflection identity", c11_reflection),
        ("1D approximation", c12_oned),
        ("G± identity", c13_gpm),
        ("variational verification", c14_variational),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(d) if secs > TIME_LIMIT_S => Err(format!("{d}; exceeded {TIME_LIMIT_S} s")),
            other => other,
        };
        match outcome {
            Ok(d) => println!("PASS {:>2} {name} ({secs:.1} s): {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1} s): {d}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
