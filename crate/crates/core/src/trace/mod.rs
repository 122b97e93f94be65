//! Directional traces by the chord-average formula, directional Lebesgue
//! averages, the inequalities they satisfy, and the omnidirectional
//! consistency probe.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{chord_cuts, deriv_norm_sq, l2_norm_sq, norm_theta_sq, ScalarField};
use crate::geometry::{BoundaryPoint, Chord, ChordSet, Direction, Domain, Point};
use crate::measure::{mu_atoms, Atom, DirectionalMeasure};
use crate::quadrature::{chord_integral, pairwise_sum, Cut, IntegralResult, QuadratureSpec};

/// Both endpoint traces of `u` on one chord.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChordTrace {
    /// `γ_θu` at the plus end.
    pub plus: f64,
    /// `γ_{-θ}u` at the minus end.
    pub minus: f64,
    /// Difference between Gauss orders `q` and `q/2`.
    pub error: f64,
}

fn trace_integrals(
    u: &ScalarField,
    c: &Chord,
    cuts: &[Cut],
    order: usize,
    max_panel: f64,
) -> (f64, f64) {
    let (alpha, theta) = (c.alpha, c.theta);
    let [i_u, i_s, i_d] = chord_integral(c.alpha, c.beta, cuts, order, max_panel, |s| {
        let x = c.point(s);
        let d = u.deriv(x, theta);
        [u.eval(x), (s - alpha) * d, d]
    });
    let l = c.length();
    let plus = (i_u + i_s) / l;
    let minus = (i_u + i_s - l * i_d) / l;
    (plus, minus)
}

/// `a = (1/ℓ)∫(u + (s-α)∂_θu)` and `b = (1/ℓ)∫(u + (s-β)∂_θu)` along the
/// chord.
pub fn chord_traces(
    u: &ScalarField,
    c: &Chord,
    spec: &QuadratureSpec,
    max_panel: f64,
) -> Result<ChordTrace> {
    let cuts = chord_cuts(&[u], c);
    let (plus, minus) = trace_integrals(u, c, &cuts, spec.gauss, max_panel);
    let (p2, m2) = trace_integrals(u, c, &cuts, (spec.gauss / 2).max(2), max_panel);
    if !(plus.is_finite() && minus.is_finite()) {
        return Err(Error::DivergentChordIntegral(c.plus()));
    }
    let error = (plus - p2).abs().max((minus - m2).abs());
    // Orders q and q/2 disagreeing by more than the value itself means the
    // graded quadrature did not resolve the endpoint behavior.
    if error > 1e-2 * (1.0 + plus.abs().max(minus.abs())) {
        return Err(Error::DivergentChordIntegral(c.plus()));
    }
    Ok(ChordTrace { plus, minus, error })
}

/// `γ_θu(z)` for `z` the plus end of a chord in direction `θ`.
pub fn directional_trace(
    u: &ScalarField,
    domain: &Domain,
    theta: Direction,
    z: Point,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let c = domain.chord_ending_at(z, theta)?;
    Ok(chord_traces(u, &c, spec, spec.max_panel(domain))?.plus)
}

/// `u_{θ,ε}(z) = (1/m)∫_0^m u(z - sθ) ds` with `m = min(ε, ℓ)`.
pub fn lebesgue_average(
    u: &ScalarField,
    domain: &Domain,
    theta: Direction,
    z: Point,
    eps: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let c = domain.chord_ending_at(z, theta)?;
    Ok(lebesgue_average_on(
        u,
        &c,
        eps,
        spec,
        spec.max_panel(domain),
    ))
}

fn lebesgue_average_on(
    u: &ScalarField,
    c: &Chord,
    eps: f64,
    spec: &QuadratureSpec,
    max_panel: f64,
) -> f64 {
    let m = eps.min(c.length());
    let lo = c.beta - m;
    let cuts = chord_cuts(&[u], c);
    let [v] = chord_integral(lo, c.beta, &cuts, spec.gauss, max_panel.min(m), |s| {
        [u.eval(c.point(s))]
    });
    v / m
}

/// One atom of `μ_θ` with the traces of `u` at both chord ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub z: BoundaryPoint,
    pub theta: Direction,
    /// `γ_θu(z)`; NaN when flagged.
    pub value: f64,
    pub ell: f64,
    /// `γ_{-θ}u(ẑ)`; NaN when flagged.
    pub opposite_value: f64,
    pub opposite: Point,
    /// `μ_θ` weight of the atom.
    pub weight: f64,
    pub error: f64,
    /// The chord integral did not converge.
    pub flag: bool,
}

/// Traces over the fine and coarse atom clouds of `μ_θ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceField {
    pub theta: Direction,
    pub samples: Vec<TraceSample>,
    pub coarse: Vec<TraceSample>,
    pub flags: usize,
}

fn sample(u: &ScalarField, a: &Atom, spec: &QuadratureSpec, max_panel: f64) -> TraceSample {
    let t = chord_traces(u, &a.chord, spec, max_panel);
    let (value, opposite_value, error, flag) = match t {
        Ok(t) => (t.plus, t.minus, t.error, false),
        Err(_) => (f64::NAN, f64::NAN, f64::INFINITY, true),
    };
    TraceSample {
        z: a.z,
        theta: a.chord.theta,
        value,
        ell: a.ell,
        opposite_value,
        opposite: a.opposite,
        weight: a.weight,
        error,
        flag,
    }
}

/// Traces of `u` at every atom of a measure.
pub fn trace_on_measure(
    u: &ScalarField,
    domain: &Domain,
    mu: &DirectionalMeasure,
    spec: &QuadratureSpec,
) -> TraceField {
    let mp = spec.max_panel(domain);
    let samples: Vec<TraceSample> = mu
        .atoms
        .par_iter()
        .map(|a| sample(u, a, spec, mp))
        .collect();
    let coarse: Vec<TraceSample> = mu
        .coarse
        .par_iter()
        .map(|a| sample(u, a, spec, mp))
        .collect();
    let flags = mu.flags + samples.iter().filter(|s| s.flag).count();
    TraceField {
        theta: mu.theta,
        samples,
        coarse,
        flags,
    }
}

/// One trace sample per atom of `μ_θ`.
pub fn trace_field(
    u: &ScalarField,
    domain: &Domain,
    theta: Direction,
    spec: &QuadratureSpec,
) -> Result<TraceField> {
    let mu = mu_atoms(domain, theta, spec)?;
    Ok(trace_on_measure(u, domain, &mu, spec))
}

fn sum_samples(samples: &[TraceSample], h: &(impl Fn(&TraceSample) -> f64 + Sync)) -> (f64, f64) {
    let v: Vec<f64> = samples
        .par_iter()
        .map(|s| if s.flag { 0.0 } else { s.weight * h(s) })
        .collect();
    let abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    (pairwise_sum(&v), pairwise_sum(&abs))
}

impl TraceField {
    /// `∫ h dμ_θ` over unflagged samples, with the two-grid error model.
    pub fn integrate<H>(&self, h: H) -> IntegralResult
    where
        H: Fn(&TraceSample) -> f64 + Sync,
    {
        let (vf, af) = sum_samples(&self.samples, &h);
        let (vc, _) = sum_samples(&self.coarse, &h);
        let diff = vf - vc;
        let trace_err: f64 = self
            .samples
            .iter()
            .filter(|s| !s.flag)
            .map(|s| s.weight * s.error)
            .sum();
        IntegralResult {
            value: vf,
            error: diff.abs() + 64.0 * f64::EPSILON * af + trace_err,
            extrapolated: vf + diff / 3.0,
            flags: self.flags,
        }
    }

    /// Writes rows `(z1, z2, theta1, theta2, value, ell, opposite_value, flag)`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "z1",
            "z2",
            "theta1",
            "theta2",
            "value",
            "ell",
            "opposite_value",
            "flag",
        ])?;
        for s in &self.samples {
            let t = s.theta.components();
            w.serialize((
                s.z.coords[0],
                s.z.coords[1],
                t[0],
                t[1],
                s.value,
                s.ell,
                s.opposite_value,
                s.flag as u8,
            ))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `lhs ≤ rhs` with its numerical evidence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub lhs_error: f64,
    pub rhs: f64,
    pub rhs_error: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    /// `lhs ≤ rhs` up to the combined error estimates.
    pub holds: bool,
}

impl InequalityCheck {
    pub fn new(name: &str, lhs: IntegralResult, rhs: IntegralResult) -> Self {
        let slack = rhs.value - lhs.value;
        Self {
            name: name.into(),
            lhs: lhs.value,
            lhs_error: lhs.error,
            rhs: rhs.value,
            rhs_error: rhs.error,
            slack,
            holds: slack >= -(lhs.error + rhs.error) - 1e-12 * rhs.value.abs(),
        }
    }
}

fn scale(r: IntegralResult, k: f64) -> IntegralResult {
    IntegralResult {
        value: r.value * k,
        error: r.error * k,
        extrapolated: r.extrapolated * k,
        flags: r.flags,
    }
}

/// The trace bound and both pair bounds for `u` in direction `θ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceInequalities {
    pub field: String,
    pub theta: Direction,
    pub norm_theta_sq: f64,
    /// `∫(γ_θu)² dμ_θ ≤ 2 max(1, diam²) ‖u‖_θ²`.
    pub trace_bound: InequalityCheck,
    /// `∫(γ_θu(z) + γ_{-θ}u(ẑ))² dμ_θ ≤ 4 max(1, diam²) ‖u‖_θ²`.
    pub pair_sum_bound: InequalityCheck,
    /// `∫((γ_θu(z) - γ_{-θ}u(ẑ))/ℓ)² dμ_θ ≤ ‖u‖_θ²`.
    pub pair_diff_bound: InequalityCheck,
}

impl TraceInequalities {
    pub fn all_hold(&self) -> bool {
        self.trace_bound.holds && self.pair_sum_bound.holds && self.pair_diff_bound.holds
    }
}

pub fn trace_inequalities(
    u: &ScalarField,
    domain: &Domain,
    theta: Direction,
    spec: &QuadratureSpec,
) -> Result<TraceInequalities> {
    let tf = trace_field(u, domain, theta, spec)?;
    let n2 = norm_theta_sq(u, domain, theta, spec)?;
    let c = domain.diameter().powi(2).max(1.0);
    let trace = tf.integrate(|s| s.value * s.value);
    let sum = tf.integrate(|s| (s.value + s.opposite_value).powi(2));
    let diff = tf.integrate(|s| ((s.value - s.opposite_value) / s.ell).powi(2));
    Ok(TraceInequalities {
        field: u.label().to_string(),
        theta,
        norm_theta_sq: n2.value,
        trace_bound: InequalityCheck::new("trace", trace, scale(n2, 2.0 * c)),
        pair_sum_bound: InequalityCheck::new("pair_sum", sum, scale(n2, 4.0 * c)),
        pair_diff_bound: InequalityCheck::new("pair_diff", diff, n2),
    })
}

/// One row of the ε-sweep `∫(γ_θu - u_{θ,ε})² dμ_θ ≤ ε·diam·‖∂_θu‖²`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LebesgueRow {
    pub eps: f64,
    pub check: InequalityCheck,
}

pub fn lebesgue_rate(
    u: &ScalarField,
    domain: &Domain,
    theta: Direction,
    eps: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<LebesgueRow>> {
    let tf = trace_field(u, domain, theta, spec)?;
    let d2 = deriv_norm_sq(u, domain, theta, spec)?;
    let mp = spec.max_panel(domain);
    let diam = domain.diameter();
    let mut rows = Vec::with_capacity(eps.len());
    for &e in eps {
        let avg = |s: &TraceSample| {
            let c = Chord {
                theta: s.theta,
                offset: s.theta.offset_of(s.z.coords),
                alpha: s.theta.dot(s.z.coords) - s.ell,
                beta: s.theta.dot(s.z.coords),
            };
            lebesgue_average_on(u, &c, e, spec, mp)
        };
        let lhs = tf.integrate(|s| (s.value - avg(s)).powi(2));
        rows.push(LebesgueRow {
            eps: e,
            check: InequalityCheck::new(&format!("lebesgue eps={e}"), lhs, scale(d2, e * diam)),
        });
    }
    Ok(rows)
}

/// `‖u‖_{L²} ≤ diam·‖∂_θu‖_{L²}` for `u` vanishing near `∂_{-θ}Ω`.
pub fn poincare_check(
    u: &ScalarField,
    domain: &Domain,
    theta: Direction,
    spec: &QuadratureSpec,
) -> Result<InequalityCheck> {
    let l2 = l2_norm_sq(u, domain, spec)?;
    let d2 = deriv_norm_sq(u, domain, theta, spec)?;
    let diam2 = domain.diameter().powi(2);
    Ok(InequalityCheck::new("poincare", l2, scale(d2, diam2)))
}

/// `∫ h(γ_θu, ℓ) dμ_θ` restricted to offsets in `[lo, hi]`, for a list of
/// windows, with each window integrated on its own grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SentinelRow {
    pub delta: f64,
    pub value: f64,
    pub error: f64,
    /// Ratio to the previous row.
    pub growth: Option<f64>,
}

/// `∫_{offset > δ} (γ_θu)²/ℓ dμ_θ` for each `δ`, accumulated decade by
/// decade (windows `[δ_k, δ_{k-1}]`) so that every decade gets the full
/// line budget.
pub fn divergence_sentinel(
    u: &ScalarField,
    domain: &Domain,
    theta: Direction,
    deltas: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<SentinelRow>> {
    let mut ds: Vec<f64> = deltas.to_vec();
    ds.sort_by(|a, b| b.total_cmp(a));
    let (_, hi) = domain.offset_range(theta);
    let mut upper = hi;
    let (mut acc, mut acc_err) = (0.0, 0.0);
    let mut rows: Vec<SentinelRow> = Vec::new();
    for &d in &ds {
        let mut lo = upper;
        while lo > d {
            let next = (lo / 10.0).max(d);
            let mut s = spec.clone();
            s.window = Some((next, lo));
            let tf = trace_field(u, domain, theta, &s)?;
            let r = tf.integrate(|t| t.value * t.value / t.ell);
            acc += r.value;
            acc_err += r.error;
            lo = next;
        }
        upper = lo;
        let growth = rows.last().map(|p| acc / p.value);
        rows.push(SentinelRow {
            delta: d,
            value: acc,
            error: acc_err,
            growth,
        });
    }
    Ok(rows)
}

/// Whether a finite family of directions refutes membership in `H¹_tr`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Traces agree up to tolerance wherever directions overlap. This only
    /// means "not refuted" by the sampled directions.
    In,
    /// A set of positive `μ_θ` mass carries disagreeing traces.
    Out,
}

/// A boundary point where two directional traces disagree.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub z: Point,
    pub theta: Direction,
    pub other: Direction,
    pub value: f64,
    pub other_value: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairDiscrepancy {
    pub theta: Direction,
    pub other: Direction,
    /// Atoms of `μ_θ` also reachable along `other`.
    pub matched: usize,
    pub max_spread: f64,
    /// `μ_θ` mass of matched atoms whose spread exceeds the tolerance.
    pub disagreement_mass: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub field: String,
    pub pairs: Vec<PairDiscrepancy>,
    pub max_discrepancy: f64,
    pub disagreement_mass: f64,
    pub tolerance: f64,
    pub mass_tolerance: f64,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub status: String,
}

/// Options of [`omnidirectional_consistency`].
#[derive(Clone, Debug)]
pub struct ConsistencyOptions {
    /// Spread above which two traces disagree; defaults to ten times the
    /// combined trace error estimates of the pair, floored at `1e-8`.
    pub tolerance: Option<f64>,
    /// Disagreement mass above which the verdict is `Out`.
    pub mass_tolerance: f64,
    /// Matching radius; defaults to `1e-9·diam`.
    pub r_match: Option<f64>,
    pub max_witnesses: usize,
}

impl Default for ConsistencyOptions {
    fn default() -> Self {
        Self {
            tolerance: None,
            mass_tolerance: 1e-6,
            r_match: None,
            max_witnesses: 16,
        }
    }
}

/// Compares `γ_θu` with `γ_{θ'}u` at every atom of `μ_θ` that is also the
/// plus end of a chord in direction `θ'`, for all ordered pairs.
pub fn omnidirectional_consistency(
    u: &ScalarField,
    domain: &Domain,
    directions: &[Direction],
    opts: &ConsistencyOptions,
    spec: &QuadratureSpec,
) -> Result<ConsistencyReport> {
    if directions.len() < 2 {
        return Err(Error::InvalidParameter(
            "consistency needs at least 2 directions".into(),
        ));
    }
    let r_match = opts.r_match.unwrap_or(1e-9 * domain.diameter());
    let mp = spec.max_panel(domain);
    let fields: Vec<TraceField> = directions
        .iter()
        .map(|&t| trace_field(u, domain, t, spec))
        .collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    let mut candidates: Vec<(f64, Witness)> = Vec::new();
    let mut max_discrepancy = 0.0_f64;
    let mut total_mass = 0.0;
    let mut any_match = false;
    for (i, tf) in fields.iter().enumerate() {
        for (j, &other) in directions.iter().enumerate() {
            if i == j {
                continue;
            }
            // Atoms on one line share its chord set, which is expensive on
            // fractal domains; compute each line once.
            let mut offsets: Vec<f64> = tf
                .samples
                .iter()
                .map(|s| other.offset_of(s.z.coords))
                .collect();
            offsets.sort_by(f64::total_cmp);
            offsets.dedup_by(|a, b| a.to_bits() == b.to_bits());
            let lines: HashMap<u64, ChordSet> = offsets
                .par_iter()
                .map(|&r| (r.to_bits(), domain.chords(other, r)))
                .collect();
            let matches: Vec<Option<(f64, f64, f64)>> = tf
                .samples
                .par_iter()
                .map(|s| {
                    if s.flag {
                        return None;
                    }
                    let set = &lines[&other.offset_of(s.z.coords).to_bits()];
                    let c = set.ending_near(other.dot(s.z.coords), r_match)?;
                    let t = chord_traces(u, c, spec, mp).ok()?;
                    let tol = opts
                        .tolerance
                        .unwrap_or((10.0 * (s.error + t.error)).max(1e-8));
                    Some(((s.value - t.plus).abs(), t.plus, tol))
                })
                .collect();
            let mut pair = PairDiscrepancy {
                theta: tf.theta,
                other,
                matched: 0,
                max_spread: 0.0,
                disagreement_mass: 0.0,
            };
            for (s, m) in tf.samples.iter().zip(&matches) {
                let Some((spread, other_value, tol)) = *m else {
                    continue;
                };
                pair.matched += 1;
                pair.max_spread = pair.max_spread.max(spread);
                if spread > tol {
                    pair.disagreement_mass += s.weight;
                    candidates.push((
                        spread,
                        Witness {
                            z: s.z.coords,
                            theta: tf.theta,
                            other,
                            value: s.value,
                            other_value,
                            weight: s.weight,
                        },
                    ));
                }
            }
            any_match |= pair.matched > 0;
            max_discrepancy = max_discrepancy.max(pair.max_spread);
            total_mass += pair.disagreement_mass;
            pairs.push(pair);
        }
    }
    if !any_match {
        return Err(Error::InsufficientOverlap);
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    let witnesses: Vec<Witness> = candidates
        .into_iter()
        .take(opts.max_witnesses)
        .map(|c| c.1)
        .collect();
    let verdict = if total_mass > opts.mass_tolerance {
        Verdict::Out
    } else {
        Verdict::In
    };
    let status = match verdict {
        Verdict::In => format!(
            "not refuted by {} sampled directions; a finite family cannot certify membership",
            directions.len()
        ),
        Verdict::Out => {
            "refuted: directional traces disagree on a set of positive measure".to_string()
        }
    };
    Ok(ConsistencyReport {
        field: u.label().to_string(),
        pairs,
        max_discrepancy,
        disagreement_mass: total_mass,
        tolerance: opts.tolerance.unwrap_or(f64::NAN),
        mass_tolerance: opts.mass_tolerance,
        verdict,
        witnesses,
        status,
    })
}

/// Largest disagreement between the traces of `u` on `outer` and on
/// `inner ⊂ outer` at atoms of `μ_θ(inner)` that also lie on
/// `∂_θ outer`. Returns `(max difference, shared atoms)`.
pub fn restriction_consistency(
    u: &ScalarField,
    outer: &Domain,
    inner: &Domain,
    theta: Direction,
    spec: &QuadratureSpec,
) -> Result<(f64, usize)> {
    let tf = trace_field(u, inner, theta, spec)?;
    let mp = spec.max_panel(outer);
    let tol = 1e-9 * outer.diameter();
    let diffs: Vec<Option<f64>> = tf
        .samples
        .par_iter()
        .map(|s| {
            let c = outer.chord_ending_near(s.z.coords, theta, tol).ok()?;
            let t = chord_traces(u, &c, spec, mp).ok()?;
            Some((t.plus - s.value).abs())
        })
        .collect();
    let shared = diffs.iter().flatten().count();
    let max = diffs.iter().flatten().fold(0.0_f64, |a, &b| a.max(b));
    Ok((max, shared))
}
