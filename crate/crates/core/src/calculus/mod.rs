//! Chord-paired integration by parts, the `G±` boundary operators, the
//! fractal slice averages `ν_n` and the variational checks on the bicone.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{
    bump, chord_cuts, h1_norm, integrate_fields, l2_norm_sq, slicing, ScalarField,
};
use crate::fractal::cantor::CantorSpec;
use crate::geometry::{Chord, Direction, Domain, Point};
use crate::measure::mu_atoms;
use crate::quadrature::{chord_integral, pairwise_sum, IntegralResult, QuadratureSpec};
use crate::trace::{chord_traces, trace_on_measure, TraceField, TraceSample};

/// Both sides of the chord-paired integration-by-parts identity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IbpReport {
    pub u: String,
    pub v: String,
    pub domain: String,
    pub theta: Direction,
    /// `∫_Ω (u∂_θv + v∂_θu) dx`.
    pub lhs: f64,
    /// `∫ (γ_θu γ_θv - γ_{-θ}u(ẑ) γ_{-θ}v(ẑ)) / ℓ dμ_θ`.
    pub rhs: f64,
    pub residual: f64,
    pub err_lhs: f64,
    pub err_rhs: f64,
    pub flags: usize,
}

impl IbpReport {
    /// Residual within three times the combined error estimate, with a
    /// rounding floor for integrands the quadrature reproduces exactly.
    pub fn within_tolerance(&self) -> bool {
        let floor = 1e-11 * self.lhs.abs().max(self.rhs.abs()).max(1.0);
        self.residual <= 3.0 * (self.err_lhs + self.err_rhs) + floor
    }
}

/// `∫ h(s_u, s_v) dμ_θ` over paired samples of two trace fields on the
/// same atoms, with the two-grid error model.
fn pair_integral<H>(tu: &TraceField, tv: &TraceField, h: H) -> Result<IntegralResult>
where
    H: Fn(&TraceSample, &TraceSample) -> f64 + Sync,
{
    let sum = |a: &[TraceSample], b: &[TraceSample]| -> Result<(f64, f64, f64)> {
        let terms: Vec<(f64, f64)> = a
            .par_iter()
            .zip(b.par_iter())
            .map(|(x, y)| {
                if x.flag || y.flag {
                    (f64::NAN, 0.0)
                } else {
                    (x.weight * h(x, y), x.weight * (x.error + y.error))
                }
            })
            .collect();
        if terms.iter().any(|t| !t.0.is_finite()) {
            return Err(Error::NonIntegrablePairing);
        }
        let v: Vec<f64> = terms.iter().map(|t| t.0).collect();
        let abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
        let err: Vec<f64> = terms.iter().map(|t| t.1).collect();
        Ok((pairwise_sum(&v), pairwise_sum(&abs), pairwise_sum(&err)))
    };
    let (vf, af, ef) = sum(&tu.samples, &tv.samples)?;
    let (vc, _, _) = sum(&tu.coarse, &tv.coarse)?;
    let diff = vf - vc;
    Ok(IntegralResult {
        value: vf,
        error: diff.abs() + 64.0 * f64::EPSILON * af + ef,
        extrapolated: vf + diff / 3.0,
        flags: tu.flags.max(tv.flags),
    })
}

fn volume_side(
    u: &ScalarField,
    v: &ScalarField,
    domain: &Domain,
    theta: Direction,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    let [r] = integrate_fields(domain, slicing(domain), spec, &[u, v], |x| {
        [u.eval(x) * v.deriv(x, theta) + v.eval(x) * u.deriv(x, theta)]
    })?;
    if !r.value.is_finite() {
        return Err(Error::NonIntegrablePairing);
    }
    Ok(r)
}

fn report(
    u: &ScalarField,
    v: &ScalarField,
    domain: &Domain,
    theta: Direction,
    lhs: IntegralResult,
    rhs: IntegralResult,
) -> IbpReport {
    IbpReport {
        u: u.label().to_string(),
        v: v.label().to_string(),
        domain: domain.kind().to_string(),
        theta,
        lhs: lhs.value,
        rhs: rhs.value,
        residual: (lhs.value - rhs.value).abs(),
        err_lhs: lhs.error,
        err_rhs: rhs.error,
        flags: lhs.flags + rhs.flags,
    }
}

fn paired_traces(
    u: &ScalarField,
    v: &ScalarField,
    domain: &Domain,
    theta: Direction,
    spec: &QuadratureSpec,
) -> Result<(TraceField, TraceField)> {
    let mu = mu_atoms(domain, theta, spec)?;
    Ok((
        trace_on_measure(u, domain, &mu, spec),
        trace_on_measure(v, domain, &mu, spec),
    ))
}

/// Evaluates both sides of the integration-by-parts identity in direction
/// `θ`. Both endpoint traces of an atom come from the same chord.
pub fn ibp_check(
    u: &ScalarField,
    v: &ScalarField,
    domain: &Domain,
    theta: Direction,
    spec: &QuadratureSpec,
) -> Result<IbpReport> {
    let lhs = volume_side(u, v, domain, theta, spec)?;
    let (tu, tv) = paired_traces(u, v, domain, theta, spec)?;
    let rhs = pair_integral(&tu, &tv, |a, b| {
        (a.value * b.value - a.opposite_value * b.opposite_value) / a.ell
    })?;
    Ok(report(u, v, domain, theta, lhs, rhs))
}

/// `G₊u` and `G₋u` at one atom.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpmSample {
    pub z: Point,
    pub weight: f64,
    pub ell: f64,
    pub g_plus: f64,
    pub g_minus: f64,
}

/// `G±u(z) = ½(a + b ± (a - b)/ℓ)` with `a = γ_θu(z)`, `b = γ_{-θ}u(ẑ)`.
pub fn gpm_of(s: &TraceSample) -> (f64, f64) {
    let sum = s.value + s.opposite_value;
    let d = (s.value - s.opposite_value) / s.ell;
    (0.5 * (sum + d), 0.5 * (sum - d))
}

/// `G₊u` and `G₋u` over the atom cloud of `μ_θ`.
pub fn g_pm(
    u: &ScalarField,
    domain: &Domain,
    theta: Direction,
    spec: &QuadratureSpec,
) -> Result<Vec<GpmSample>> {
    let mu = mu_atoms(domain, theta, spec)?;
    let tf = trace_on_measure(u, domain, &mu, spec);
    if tf.samples.iter().any(|s| s.flag) {
        return Err(Error::NonIntegrablePairing);
    }
    Ok(tf
        .samples
        .iter()
        .map(|s| {
            let (g_plus, g_minus) = gpm_of(s);
            GpmSample {
                z: s.z.coords,
                weight: s.weight,
                ell: s.ell,
                g_plus,
                g_minus,
            }
        })
        .collect())
}

/// `⟨G₊u, G₊v⟩_{μ_θ} - ⟨G₋u, G₋v⟩_{μ_θ}` against the volume side.
pub fn gpm_identity(
    u: &ScalarField,
    v: &ScalarField,
    domain: &Domain,
    theta: Direction,
    spec: &QuadratureSpec,
) -> Result<IbpReport> {
    let lhs = volume_side(u, v, domain, theta, spec)?;
    let (tu, tv) = paired_traces(u, v, domain, theta, spec)?;
    let rhs = pair_integral(&tu, &tv, |a, b| {
        let (pu, mu) = gpm_of(a);
        let (pv, mv) = gpm_of(b);
        pu * pv - mu * mv
    })?;
    Ok(report(u, v, domain, theta, lhs, rhs))
}

/// The identity with `tr(u)` in place of the directional traces: at each
/// atom end the trace is the mean of `γ_φu` over the directions `φ` of
/// `family` (and `±θ`) from which that point is reached.
pub fn omnidirectional_ibp_check(
    u: &ScalarField,
    v: &ScalarField,
    domain: &Domain,
    theta: Direction,
    family: &[Direction],
    spec: &QuadratureSpec,
) -> Result<IbpReport> {
    let lhs = volume_side(u, v, domain, theta, spec)?;
    let (mut tu, mut tv) = paired_traces(u, v, domain, theta, spec)?;
    let r_match = 1e-9 * domain.diameter();
    let mp = spec.max_panel(domain);
    let others: Vec<Direction> = family
        .iter()
        .copied()
        .filter(|d| *d != theta && *d != theta.neg())
        .collect();
    let tr = |z: Point, own_u: f64, own_v: f64| -> (f64, f64) {
        let (mut su, mut sv, mut n) = (own_u, own_v, 1.0);
        for &d in &others {
            if let Ok(c) = domain.chord_ending_near(z, d, r_match) {
                if let (Ok(a), Ok(b)) =
                    (chord_traces(u, &c, spec, mp), chord_traces(v, &c, spec, mp))
                {
                    su += a.plus;
                    sv += b.plus;
                    n += 1.0;
                }
            }
        }
        (su / n, sv / n)
    };
    let update = |a: &mut [TraceSample], b: &mut [TraceSample]| {
        a.par_iter_mut().zip(b.par_iter_mut()).for_each(|(x, y)| {
            if x.flag || y.flag {
                return;
            }
            let (pu, pv) = tr(x.z.coords, x.value, y.value);
            let (mu, mv) = tr(x.opposite, x.opposite_value, y.opposite_value);
            x.value = pu;
            y.value = pv;
            x.opposite_value = mu;
            y.opposite_value = mv;
        });
    };
    update(&mut tu.samples, &mut tv.samples);
    update(&mut tu.coarse, &mut tv.coarse);
    let rhs = pair_integral(&tu, &tv, |a, b| {
        (a.value * b.value - a.opposite_value * b.opposite_value) / a.ell
    })?;
    Ok(report(u, v, domain, theta, lhs, rhs))
}

/// `ν_0(u), ..., ν_N(u)` with the increment bound and an enclosure of the
/// limit `ν̄(u)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NuSequence {
    pub field: String,
    pub values: Vec<f64>,
    /// `|ν_{n+1} - ν_n|`.
    pub increments: Vec<f64>,
    /// `2^{(1-n)/2}·‖u‖_{H¹}` for each increment.
    pub bounds: Vec<f64>,
    pub h1_norm: f64,
    pub h1_norm_error: f64,
    /// Every increment is within its bound up to quadrature error.
    pub bounds_hold: bool,
    /// `ν̄(u) ∈ [limit - radius, limit + radius]` with `limit = ν_N`.
    pub limit: f64,
    pub radius: f64,
}

/// `y_n = 3^{-n}/2`.
pub fn slice_height(n: u32) -> f64 {
    0.5 * 3f64.powi(-(n as i32))
}

/// The intervals `]a_m - y_n, b_m + y_n[`, `m = 2^n, ..., 2^{n+1}-1`, whose
/// union is the slice of `Ω_C` at height `y_n`.
pub fn slice_intervals(n: u32) -> Result<Vec<(f64, f64)>> {
    if n > 20 {
        return Err(Error::InvalidLevel(n));
    }
    let y = slice_height(n);
    if n == 0 {
        return Ok(vec![(-y, 1.0 + y)]);
    }
    let c = CantorSpec::middle_third(n)?;
    Ok(((1usize << n)..(1usize << (n + 1)))
        .map(|m| {
            let (a, b) = c.interval(m);
            (a - y, b + y)
        })
        .collect())
}

/// `ν_n(u) = 2^{-n} Σ_m (1/|I_m|) ∫_{I_m} u(x, y_n) dx`, or the same at
/// height `-y_n` when `reflect` is set.
pub fn nu_n(u: &ScalarField, n: u32, reflect: bool, spec: &QuadratureSpec) -> Result<f64> {
    let y = if reflect {
        -slice_height(n)
    } else {
        slice_height(n)
    };
    let intervals = slice_intervals(n)?;
    let terms: Vec<f64> = intervals
        .par_iter()
        .map(|&(a, b)| {
            let c = Chord {
                theta: Direction::e1(),
                offset: y,
                alpha: a,
                beta: b,
            };
            let cuts = chord_cuts(&[u], &c);
            let [v] = chord_integral(a, b, &cuts, spec.gauss, b - a, |s| [u.eval(c.point(s))]);
            v / (b - a)
        })
        .collect();
    Ok(pairwise_sum(&terms) / intervals.len() as f64)
}

/// The slice averages up to level `n_max` with the increment bound, the
/// `H¹` norm taken over `domain`.
pub fn nu_sequence(
    u: &ScalarField,
    domain: &Domain,
    n_max: u32,
    spec: &QuadratureSpec,
) -> Result<NuSequence> {
    let values: Vec<f64> = (0..=n_max)
        .map(|n| nu_n(u, n, false, spec))
        .collect::<Result<_>>()?;
    let h1 = h1_norm(u, domain, spec)?;
    let increments: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let bounds: Vec<f64> = (0..increments.len())
        .map(|n| 2f64.powf((1.0 - n as f64) / 2.0) * h1.value)
        .collect();
    let bounds_hold = increments
        .iter()
        .zip(&bounds)
        .enumerate()
        .all(|(n, (i, b))| *i <= b + 2f64.powf((1.0 - n as f64) / 2.0) * h1.error + 1e-12);
    let tail = 2f64.powf((1.0 - n_max as f64) / 2.0) / (1.0 - 0.5f64.sqrt());
    Ok(NuSequence {
        field: u.label().to_string(),
        limit: values[n_max as usize],
        radius: tail * (h1.value + h1.error),
        values,
        increments,
        bounds,
        h1_norm: h1.value,
        h1_norm_error: h1.error,
        bounds_hold,
    })
}

/// `ν_N(u) - ν_N(u∘ψ)` with `ψ(x, y) = (x, -y)`.
pub fn bicone_gap(u: &ScalarField, n: u32, spec: &QuadratureSpec) -> Result<f64> {
    Ok(nu_n(u, n, false, spec)? - nu_n(u, n, true, spec)?)
}

/// Weak residuals `∫ ∇u·∇v dx` of a candidate solution against a test
/// family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VariationalReport {
    pub field: String,
    pub domain: String,
    pub residuals: Vec<f64>,
    pub errors: Vec<f64>,
    pub max_residual: f64,
    /// Every residual is within three times its error estimate (with a
    /// rounding floor).
    pub holds: bool,
}

/// A test function with a box containing its support.
#[derive(Clone)]
pub struct TestFunction {
    pub field: ScalarField,
    pub support: (Point, Point),
}

impl TestFunction {
    pub fn bump(cx: f64, cy: f64, rx: f64, ry: f64) -> Self {
        Self {
            field: bump(cx, cy, rx, ry),
            support: ([cx - rx, cy - ry], [cx + rx, cy + ry]),
        }
    }

    /// Whether the support box lies in `domain`, probed on a 9×9 grid.
    pub fn inside(&self, domain: &Domain) -> bool {
        let (lo, hi) = self.support;
        (0..=8).all(|i| {
            (0..=8).all(|j| {
                let p = [
                    lo[0] + (hi[0] - lo[0]) * i as f64 / 8.0,
                    lo[1] + (hi[1] - lo[1]) * j as f64 / 8.0,
                ];
                domain.contains(p)
            })
        })
    }
}

/// The 16 tensor bumps used as test functions on `domain`. On the bicone
/// they sit in `]0,1[ × ±]½, 1[`, compactly inside the domain and away
/// from `x₂ = 0`; elsewhere they tile the bounding box and are kept only
/// when their support lies inside the domain.
pub fn test_bumps(domain: &Domain) -> Vec<TestFunction> {
    let xs = [0.125, 0.375, 0.625, 0.875];
    let (cx, cy, rx, ry): (Vec<f64>, Vec<f64>, f64, f64) = if matches!(domain, Domain::Bicone) {
        (xs.to_vec(), vec![-0.8, -0.6, 0.6, 0.8], 0.12, 0.08)
    } else {
        let (lo, hi) = domain.bbox();
        let (w, h) = (hi[0] - lo[0], hi[1] - lo[1]);
        (
            xs.iter().map(|t| lo[0] + t * w).collect(),
            xs.iter().map(|t| lo[1] + t * h).collect(),
            0.12 * w,
            0.12 * h,
        )
    };
    cy.iter()
        .flat_map(|&y| cx.iter().map(move |&x| TestFunction::bump(x, y, rx, ry)))
        .filter(|t| t.inside(domain))
        .collect()
}

/// `∫ ∇u·∇v dx` for each test `v`, integrated over the support box of `v`
/// when that box lies in `domain`.
pub fn variational_residual(
    u: &ScalarField,
    domain: &Domain,
    tests: &[TestFunction],
    spec: &QuadratureSpec,
) -> Result<VariationalReport> {
    let mut residuals = Vec::with_capacity(tests.len());
    let mut errors = Vec::with_capacity(tests.len());
    for t in tests {
        let v = &t.field;
        let boxed;
        let region = if t.inside(domain) {
            boxed = Domain::rectangle(t.support.0, t.support.1)?;
            &boxed
        } else {
            domain
        };
        let [r] = integrate_fields(region, slicing(region), spec, &[u, v], |x| {
            let (gu, gv) = (u.grad(x), v.grad(x));
            [gu[0] * gv[0] + gu[1] * gv[1]]
        })?;
        residuals.push(r.value.abs());
        errors.push(r.error);
    }
    let max_residual = residuals.iter().fold(0.0_f64, |a, &b| a.max(b));
    let holds = residuals
        .iter()
        .zip(&errors)
        .all(|(r, e)| *r <= 3.0 * e + 1e-12);
    Ok(VariationalReport {
        field: u.label().to_string(),
        domain: domain.kind().to_string(),
        residuals,
        errors,
        max_residual,
        holds,
    })
}

/// `‖u - v‖_{L²(Ω)}`, used to show that two candidate solutions differ.
pub fn l2_distance(
    u: &ScalarField,
    v: &ScalarField,
    domain: &Domain,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let (uc, vc) = (u.clone(), v.clone());
    let mut sing = u.singularities().to_vec();
    sing.extend_from_slice(v.singularities());
    let d = ScalarField::new(
        "difference",
        move |x| uc.eval(x) - vc.eval(x),
        |_| [0.0, 0.0],
        sing,
    );
    Ok(l2_norm_sq(&d, domain, spec)?.value.max(0.0).sqrt())
}
