//! Command-line front end: parses a run configuration, executes one
//! experiment and writes JSON and CSV reports.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 when a checked
//! invariant fails beyond tolerance. Failures print a JSON diagnostic on
//! stderr.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::calculus::{bicone_gap, ibp_check, nu_sequence, slice_height};
use crate::error::{Error, Result};
use crate::fields::{norm_theta, parse_field};
use crate::fractal::{parse_named_domain, CantorScheme, CantorSpec, Staircase};
use crate::geometry::spec::domain_from_file;
use crate::geometry::{Direction, Domain};
use crate::measure::{lipschitz_density_check, mu_atoms};
use crate::oned::{
    continuous_approximation_1d, h1tr_membership_1d, isolated_points, tail_norms,
    IntervalUnionFunction,
};
use crate::quadrature::QuadratureSpec;
use crate::trace::{
    lebesgue_rate, omnidirectional_consistency, trace_field, trace_inequalities, ConsistencyOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "dirtrace",
    version,
    about = "Directional traces and directional boundary measures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by all subcommands.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Named domain (`square`, `cusp`, `omega_C`, `bicone`, `crack_2d`,
    /// `cantor_1d:rho=0.25,level=6`, ...) or a JSON domain file.
    #[arg(long, default_value = "square")]
    pub domain: String,
    /// Number of sampled directions.
    #[arg(long, default_value_t = 16)]
    pub directions: usize,
    /// Index into the direction table; all directions when omitted.
    #[arg(long)]
    pub theta: Option<usize>,
    /// Direction angle in radians; overrides `--theta`.
    #[arg(long, allow_hyphen_values = true)]
    pub angle: Option<f64>,
    #[arg(long, default_value_t = 1024)]
    pub ny: usize,
    #[arg(long, default_value_t = 8)]
    pub gauss: usize,
    #[arg(long, default_value_t = 200_000)]
    pub mc_samples: usize,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Directory for CSV and JSON artifacts. Not part of the configuration
    /// hash, so reruns into different directories give identical files.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Absolute slack added to every invariant check.
    #[arg(long, default_value_t = 0.0)]
    pub tolerance: f64,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
pub enum Command {
    /// Atom clouds of the directional measures and their mass table.
    Measure {
        #[command(flatten)]
        common: Common,
    },
    /// Trace fields and the trace inequalities.
    Trace {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "x1x2")]
        field: String,
    },
    /// Integration-by-parts reports over fields and directions.
    Ibp {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "x1x2")]
        u: String,
        #[arg(long, default_value = "x1px2")]
        v: String,
    },
    /// The ε-sweep of the directional Lebesgue rate.
    Lebesgue {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "x1x2")]
        field: String,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001")]
        eps: Vec<f64>,
    },
    /// Slice averages ν_n and the bicone gap.
    Nu {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "one")]
        field: String,
        #[arg(long, default_value_t = 8)]
        levels: u32,
    },
    /// Breakpoints of the generalized Cantor staircase.
    Staircase {
        #[command(flatten)]
        common: Common,
        /// `third` (middle thirds) or `rho` (centered gaps of ratio ρ).
        #[arg(long, default_value = "third")]
        scheme: String,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        rho: f64,
        /// Cantor construction level.
        #[arg(long, default_value_t = 10)]
        level: u32,
        #[arg(long, default_value_t = 10)]
        pmax: u32,
    },
    /// One-dimensional membership and continuous approximation.
    Oned {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "x1")]
        field: String,
        #[arg(long, value_delimiter = ',', default_value = "4,6,8,10")]
        levels: Vec<u32>,
        /// Truncation level `M`; defaults to `1 + max |u|`.
        #[arg(long)]
        truncation: Option<f64>,
    },
    /// Omnidirectional consistency of the directional traces.
    Consistency {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "x1x2")]
        field: String,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Self::Measure { common }
            | Self::Trace { common, .. }
            | Self::Ibp { common, .. }
            | Self::Lebesgue { common, .. }
            | Self::Nu { common, .. }
            | Self::Staircase { common, .. }
            | Self::Oned { common, .. }
            | Self::Consistency { common, .. } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Self::Measure { .. } => "measure",
            Self::Trace { .. } => "trace",
            Self::Ibp { .. } => "ibp",
            Self::Lebesgue { .. } => "lebesgue",
            Self::Nu { .. } => "nu",
            Self::Staircase { .. } => "staircase",
            Self::Oned { .. } => "oned",
            Self::Consistency { .. } => "consistency",
        }
    }
}

/// SHA-256 of the canonical JSON form of the run configuration.
pub fn config_hash(cmd: &Command) -> String {
    let bytes = serde_json::to_vec(cmd).expect("configuration serializes");
    Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// The outcome of one run: a JSON report, CSV artifacts and whether all
/// checked invariants held.
pub struct Outcome {
    pub report: Value,
    pub artifacts: Vec<(String, Vec<u8>)>,
    pub ok: bool,
}

fn load_domain(spec: &str) -> Result<Domain> {
    let p = Path::new(spec);
    if spec.ends_with(".json") || p.is_file() {
        domain_from_file(p)
    } else {
        parse_named_domain(spec)
    }
}

fn quadrature(c: &Common) -> Result<QuadratureSpec> {
    let q = QuadratureSpec {
        ny: c.ny,
        gauss: c.gauss,
        mc_samples: c.mc_samples,
        seed: c.seed,
        ..QuadratureSpec::default()
    };
    q.validate()?;
    Ok(q)
}

fn directions(c: &Common, domain: &Domain) -> Result<Vec<Direction>> {
    if let Some(a) = c.angle {
        if !a.is_finite() {
            return Err(Error::InvalidDirection(format!("angle {a}")));
        }
        return Ok(vec![if domain.dim() == 1 {
            Direction::line(a.cos() >= 0.0)
        } else {
            Direction::from_angle(a)
        }]);
    }
    if c.directions == 0 {
        return Err(Error::InvalidParameter(
            "--directions must be positive".into(),
        ));
    }
    let table = domain.default_directions(c.directions);
    match c.theta {
        Some(i) => table.get(i).map(|d| vec![*d]).ok_or_else(|| {
            Error::InvalidParameter(format!("--theta {i} outside the table of {}", table.len()))
        }),
        None => Ok(table),
    }
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn run_measure(c: &Common) -> Result<Outcome> {
    let domain = load_domain(&c.domain)?;
    let spec = quadrature(c)?;
    let volume = domain.volume();
    let mut rows = Vec::new();
    let mut artifacts = Vec::new();
    let mut ok = true;
    for (k, theta) in directions(c, &domain)?.into_iter().enumerate() {
        let mu = mu_atoms(&domain, theta, &spec)?;
        let mass = mu.total_mass();
        let holds = volume
            .is_none_or(|v| (mass.value - v).abs() <= 3.0 * mass.error + 1e-10 * v + c.tolerance);
        ok &= holds;
        let mut row = json!({
            "theta": theta,
            "total_mass": mass.value,
            "error": mass.error,
            "flags": mass.flags,
            "atoms": mu.atoms.len(),
            "mass_matches_volume": holds,
        });
        if let Domain::Polygon(p) = &domain {
            let r = lipschitz_density_check(p, theta, &spec)?;
            row["edges"] = serde_json::to_value(&r.edges)?;
            row["edge_max_discrepancy"] = json!(r.max_discrepancy);
        }
        rows.push(row);
        artifacts.push((
            format!("measure_{k:02}.csv"),
            csv_bytes(|b| mu.write_csv(b))?,
        ));
    }
    Ok(Outcome {
        report: json!({ "domain": domain.kind(), "volume": volume, "directions": rows }),
        artifacts,
        ok,
    })
}

fn run_trace(c: &Common, field: &str) -> Result<Outcome> {
    let domain = load_domain(&c.domain)?;
    let spec = quadrature(c)?;
    let u = parse_field(field)?;
    let mut rows = Vec::new();
    let mut artifacts = Vec::new();
    let mut ok = true;
    for (k, theta) in directions(c, &domain)?.into_iter().enumerate() {
        let r = trace_inequalities(&u, &domain, theta, &spec)?;
        let slack_ok = [&r.trace_bound, &r.pair_sum_bound, &r.pair_diff_bound]
            .iter()
            .all(|i| i.holds || i.slack >= -c.tolerance);
        ok &= slack_ok;
        rows.push(serde_json::to_value(&r)?);
        let tf = trace_field(&u, &domain, theta, &spec)?;
        artifacts.push((format!("trace_{k:02}.csv"), csv_bytes(|b| tf.write_csv(b))?));
    }
    Ok(Outcome {
        report: json!({ "domain": domain.kind(), "field": u.label(), "directions": rows }),
        artifacts,
        ok,
    })
}

fn run_ibp(c: &Common, u: &str, v: &str) -> Result<Outcome> {
    let domain = load_domain(&c.domain)?;
    let spec = quadrature(c)?;
    let (u, v) = (parse_field(u)?, parse_field(v)?);
    let mut rows = Vec::new();
    let mut csv = String::from("theta1,theta2,lhs,rhs,residual,err_lhs,err_rhs,flags\n");
    let mut ok = true;
    for theta in directions(c, &domain)? {
        let r = ibp_check(&u, &v, &domain, theta, &spec)?;
        ok &= r.within_tolerance() || r.residual <= c.tolerance;
        let t = theta.components();
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            t[0], t[1], r.lhs, r.rhs, r.residual, r.err_lhs, r.err_rhs, r.flags
        ));
        rows.push(serde_json::to_value(&r)?);
    }
    Ok(Outcome {
        report: json!({ "domain": domain.kind(), "reports": rows }),
        artifacts: vec![("ibp.csv".into(), csv.into_bytes())],
        ok,
    })
}

fn run_lebesgue(c: &Common, field: &str, eps: &[f64]) -> Result<Outcome> {
    if eps.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidParameter(
            "--eps values must be positive".into(),
        ));
    }
    let domain = load_domain(&c.domain)?;
    let spec = quadrature(c)?;
    let u = parse_field(field)?;
    let mut out = Vec::new();
    let mut csv = String::from("theta1,theta2,eps,lhs,lhs_error,rhs,holds\n");
    let mut ok = true;
    for theta in directions(c, &domain)? {
        let rows = lebesgue_rate(&u, &domain, theta, eps, &spec)?;
        let t = theta.components();
        for r in &rows {
            ok &= r.check.holds || r.check.slack >= -c.tolerance;
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                t[0], t[1], r.eps, r.check.lhs, r.check.lhs_error, r.check.rhs, r.check.holds as u8
            ));
        }
        out.push(json!({ "theta": theta, "rows": rows }));
    }
    Ok(Outcome {
        report: json!({ "domain": domain.kind(), "field": u.label(), "directions": out }),
        artifacts: vec![("lebesgue.csv".into(), csv.into_bytes())],
        ok,
    })
}

fn run_nu(c: &Common, field: &str, levels: u32) -> Result<Outcome> {
    if levels > 20 {
        return Err(Error::InvalidLevel(levels));
    }
    let domain = load_domain(&c.domain)?;
    if !matches!(domain, Domain::ConeUnionCantor | Domain::Bicone) {
        return Err(Error::InvalidDomain("nu needs omega_C or bicone".into()));
    }
    let spec = quadrature(c)?;
    let u = parse_field(field)?;
    let seq = nu_sequence(&u, &domain, levels, &spec)?;
    let bicone = matches!(domain, Domain::Bicone);
    let mut csv = String::from("n,y_n,nu,increment,bound,gap\n");
    let mut gaps = Vec::new();
    for n in 0..=levels {
        let gap = if bicone {
            Some(bicone_gap(&u, n, &spec)?)
        } else {
            None
        };
        gaps.push(gap);
        let i = n as usize;
        let fmt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            n,
            slice_height(n),
            seq.values[i],
            fmt(seq.increments.get(i).copied()),
            fmt(seq.bounds.get(i).copied()),
            fmt(gap)
        ));
    }
    Ok(Outcome {
        ok: seq.bounds_hold,
        report: json!({ "domain": domain.kind(), "sequence": seq, "bicone_gap": gaps }),
        artifacts: vec![("nu.csv".into(), csv.into_bytes())],
    })
}

fn run_staircase(c: &Common, scheme: &str, rho: f64, level: u32, pmax: u32) -> Result<Outcome> {
    let scheme = match scheme {
        "third" => CantorScheme::Third,
        "rho" => CantorScheme::Rho,
        other => return Err(Error::UnknownName(format!("scheme '{other}'"))),
    };
    let spec = CantorSpec::new(
        if matches!(scheme, CantorScheme::Third) {
            1.0 / 3.0
        } else {
            rho
        },
        level,
        scheme,
    )?;
    let seq = Staircase::sequence(spec.gaps(), 0.0, 1.0, pmax)?;
    let last = seq.last().expect("p_max + 1 staircases");
    let monotone = last
        .breakpoints
        .windows(2)
        .all(|w| w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
    let ends = last.eval(0.0) == 0.0 && last.eval(1.0) == 1.0;
    let steps: Vec<Value> = seq
        .windows(2)
        .enumerate()
        .map(|(p, w)| {
            let d = w[0].sup_distance(&w[1]);
            let bound = 0.5f64.powi(p as i32 + 1);
            json!({ "p": p, "sup_distance": d, "bound": bound, "holds": d <= bound + c.tolerance })
        })
        .collect();
    let bounds_ok = steps.iter().all(|s| s["holds"] == json!(true));
    Ok(Outcome {
        ok: monotone && ends && bounds_ok,
        report: json!({
            "level": level,
            "p_max": pmax,
            "breakpoints": last.breakpoints.len(),
            "monotone": monotone,
            "endpoints_exact": ends,
            "steps": steps,
        }),
        artifacts: vec![("staircase.csv".into(), csv_bytes(|b| last.write_csv(b))?)],
    })
}

fn run_oned(c: &Common, field: &str, levels: &[u32], truncation: Option<f64>) -> Result<Outcome> {
    let domain = load_domain(&c.domain)?;
    let Domain::IntervalUnion(iv) = &domain else {
        return Err(Error::InvalidDomain(
            "oned needs a one-dimensional domain".into(),
        ));
    };
    let u = if field == "crack_1d" {
        IntervalUnionFunction::crack_example()
    } else {
        IntervalUnionFunction::from_field(&parse_field(field)?, iv.clone())
    };
    let tol = if c.tolerance > 0.0 { c.tolerance } else { 1e-9 };
    let membership = h1tr_membership_1d(&u, tol);
    let (points, _) = isolated_points(iv);
    let mut approx = Vec::new();
    let mut artifacts = Vec::new();
    let mut ok = true;
    if membership.member {
        let mut prev = f64::INFINITY;
        for &n in levels {
            let a = continuous_approximation_1d(&u, n, truncation)?;
            ok &= a.distance <= prev + c.tolerance;
            prev = a.distance;
            approx.push(json!({
                "n": n,
                "distance": a.distance,
                "unselected_measure": a.unselected_measure,
                "selected": a.v.selected.len(),
            }));
            artifacts.push((
                format!("oned_n{n:02}.csv"),
                csv_bytes(|b| a.v.write_csv(b, 1001))?,
            ));
        }
    }
    let tails: Vec<Value> = tail_norms(&u, levels)
        .into_iter()
        .map(|(n, t)| json!({ "n": n, "tail": t }))
        .collect();
    Ok(Outcome {
        report: json!({
            "field": u.label,
            "isolated_points": points,
            "verdict": membership.verdict(),
            "membership": membership,
            "approximation": approx,
            "tail_norms": tails,
        }),
        artifacts,
        ok,
    })
}

fn run_consistency(c: &Common, field: &str) -> Result<Outcome> {
    let domain = load_domain(&c.domain)?;
    let spec = quadrature(c)?;
    let u = parse_field(field)?;
    let dirs = directions(c, &domain)?;
    let opts = ConsistencyOptions {
        tolerance: (c.tolerance > 0.0).then_some(c.tolerance),
        ..Default::default()
    };
    let r = omnidirectional_consistency(&u, &domain, &dirs, &opts, &spec)?;
    let norms: Vec<f64> = dirs
        .iter()
        .map(|&t| norm_theta(&u, &domain, t, &spec).map(|n| n.value))
        .collect::<Result<_>>()?;
    Ok(Outcome {
        report: json!({ "domain": domain.kind(), "report": r, "norm_theta": norms }),
        artifacts: Vec::new(),
        ok: true,
    })
}

/// Runs one subcommand without touching the file system.
pub fn execute(cmd: &Command) -> Result<Outcome> {
    let t = cmd.common().tolerance;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "--tolerance {t} must be finite and non-negative"
        )));
    }
    match cmd {
        Command::Measure { common } => run_measure(common),
        Command::Trace { common, field } => run_trace(common, field),
        Command::Ibp { common, u, v } => run_ibp(common, u, v),
        Command::Lebesgue { common, field, eps } => run_lebesgue(common, field, eps),
        Command::Nu {
            common,
            field,
            levels,
        } => run_nu(common, field, *levels),
        Command::Staircase {
            common,
            scheme,
            rho,
            level,
            pmax,
        } => run_staircase(common, scheme, *rho, *level, *pmax),
        Command::Oned {
            common,
            field,
            levels,
            truncation,
        } => run_oned(common, field, levels, *truncation),
        Command::Consistency { common, field } => run_consistency(common, field),
    }
}

/// The report with the configuration, its hash and the tool version.
pub fn stamped(cmd: &Command, outcome: &Outcome) -> Value {
    json!({
        "tool": "dirtrace",
        "version": env!("CARGO_PKG_VERSION"),
        "config_hash": config_hash(cmd),
        "config": cmd,
        "invariants_hold": outcome.ok,
        "result": outcome.report,
    })
}

fn diagnostic(kind: &str, message: &str) -> String {
    json!({ "error": kind, "message": message }).to_string()
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Io(_) => "io",
        Error::Json(_) => "json",
        Error::Csv(_) => "csv",
        _ => "validation",
    }
}

fn write_artifacts(dir: &Path, report: &Value, artifacts: &[(String, Vec<u8>)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    fs::write(dir.join("report.json"), text)?;
    for (name, bytes) in artifacts {
        fs::write(dir.join(name), bytes)?;
    }
    Ok(())
}

/// Caps the worker pool at `DIRTRACE_THREADS` when set.
fn configure_threads() -> std::result::Result<(), String> {
    match std::env::var("DIRTRACE_THREADS") {
        Ok(v) => {
            let n: usize = v
                .parse()
                .map_err(|_| format!("DIRTRACE_THREADS = '{v}' is not a count"))?;
            if n == 0 {
                return Err("DIRTRACE_THREADS must be positive".into());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| e.to_string())
        }
        Err(_) => Ok(()),
    }
}

/// Parses `args`, runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                print!("{e}");
                return EXIT_OK;
            }
            eprintln!("{}", diagnostic("usage", e.to_string().trim()));
            return EXIT_INVALID;
        }
    };
    if let Err(m) = configure_threads() {
        eprintln!("{}", diagnostic("validation", &m));
        return EXIT_INVALID;
    }
    let cmd = cli.command;
    let outcome = match execute(&cmd) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{}", diagnostic(error_kind(&e), &e.to_string()));
            return EXIT_INVALID;
        }
    };
    let report = stamped(&cmd, &outcome);
    if let Some(dir) = &cmd.common().out {
        if let Err(e) = write_artifacts(dir, &report, &outcome.artifacts) {
            eprintln!("{}", diagnostic(error_kind(&e), &e.to_string()));
            return EXIT_INVALID;
        }
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    if outcome.ok {
        EXIT_OK
    } else {
        eprintln!(
            "{}",
            diagnostic(
                "invariant",
                &format!(
                    "{}: a checked invariant failed beyond tolerance",
                    cmd.name()
                )
            )
        );
        EXIT_VIOLATION
    }
}
