//! One-dimensional theory: isolated boundary points, `H¹_tr` membership on
//! unions of intervals and continuous approximation by staircase bridges.

use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::fractal::staircase::Staircase;
use crate::geometry::IntervalUnion;
use crate::quadrature::{chord_integral, pairwise_sum};

type PieceFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

const ORDER: usize = 16;
const PANELS: f64 = 8.0;

/// A function on a union of open intervals, given on each interval `i` by
/// `f(i, t)` with derivative `df(i, t)`.
#[derive(Clone)]
pub struct IntervalUnionFunction {
    pub label: String,
    intervals: IntervalUnion,
    f: PieceFn,
    df: PieceFn,
}

impl std::fmt::Debug for IntervalUnionFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IntervalUnionFunction")
            .field("label", &self.label)
            .field("intervals", &self.intervals)
            .finish()
    }
}

impl IntervalUnionFunction {
    pub fn new<F, D>(label: impl Into<String>, intervals: IntervalUnion, f: F, df: D) -> Self
    where
        F: Fn(usize, f64) -> f64 + Send + Sync + 'static,
        D: Fn(usize, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            intervals,
            f: Arc::new(f),
            df: Arc::new(df),
        }
    }

    /// The restriction of a field evaluated at `(t, 0)`.
    pub fn from_field(u: &ScalarField, intervals: IntervalUnion) -> Self {
        let (a, b) = (u.clone(), u.clone());
        Self::new(
            u.label(),
            intervals,
            move |_, t| a.eval([t, 0.0]),
            move |_, t| b.grad([t, 0.0])[0],
        )
    }

    /// `x` on `]0,1[` and `x - 1` on `]1,2[`.
    pub fn crack_example() -> Self {
        let iv = IntervalUnion::new(vec![(0.0, 1.0), (1.0, 2.0)]).expect("crack intervals");
        Self::new("crack_1d", iv, |i, t| t - i as f64, |_, _| 1.0)
    }

    pub fn intervals(&self) -> &IntervalUnion {
        &self.intervals
    }

    pub fn eval_on(&self, i: usize, t: f64) -> f64 {
        (self.f)(i, t)
    }

    pub fn deriv_on(&self, i: usize, t: f64) -> f64 {
        (self.df)(i, t)
    }

    /// `u(t)` for `t ∈ Ω`.
    pub fn eval(&self, t: f64) -> Option<f64> {
        self.intervals.locate(t).map(|i| self.eval_on(i, t))
    }

    /// `(γ_{-1}u(a_i), γ_{+1}u(b_i))` on interval `i` by the chord-average
    /// formula.
    pub fn end_traces(&self, i: usize) -> (f64, f64) {
        let (a, b) = self.intervals.intervals()[i];
        let l = b - a;
        let [iu, is, id] = chord_integral(a, b, &[], ORDER, l / PANELS, |s| {
            let d = self.deriv_on(i, s);
            [self.eval_on(i, s), (s - a) * d, d]
        });
        ((iu + is - l * id) / l, (iu + is) / l)
    }

    /// `∫_{]a_i,b_i[} (g² + g'²)` with `g = u - w`, `w` given with its
    /// derivative.
    fn h1_dist_sq_on(&self, i: usize, w: impl Fn(f64) -> (f64, f64)) -> f64 {
        let (a, b) = self.intervals.intervals()[i];
        let [v] = chord_integral(a, b, &[], ORDER, (b - a) / PANELS, |s| {
            let (wv, wd) = w(s);
            let e = self.eval_on(i, s) - wv;
            let d = self.deriv_on(i, s) - wd;
            [e * e + d * d]
        });
        v
    }

    /// `‖u‖²_{H¹}` on interval `i`.
    pub fn h1_norm_sq_on(&self, i: usize) -> f64 {
        self.h1_dist_sq_on(i, |_| (0.0, 0.0))
    }
}

/// `N(Ω)`, the boundary points with `Ω` on both sides, and
/// `Ω* = Ω ∪ N(Ω)`.
pub fn isolated_points(omega: &IntervalUnion) -> (Vec<f64>, IntervalUnion) {
    let mut points = Vec::new();
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for &(a, b) in omega.intervals() {
        match merged.last_mut() {
            Some(last) if last.1 == a => {
                points.push(a);
                last.1 = b;
            }
            _ => merged.push((a, b)),
        }
    }
    let star = IntervalUnion::new(merged).expect("merged intervals stay disjoint and sorted");
    (points, star)
}

/// Left and right traces of `u` at an isolated point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsolatedWitness {
    pub z: f64,
    /// `γ_1u(z)`, from the interval ending at `z`.
    pub left: f64,
    /// `γ_{-1}u(z)`, from the interval starting at `z`.
    pub right: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Membership {
    pub field: String,
    /// `true` when the traces agree at every isolated point.
    pub member: bool,
    pub tolerance: f64,
    /// One entry per isolated point.
    pub points: Vec<IsolatedWitness>,
}

impl Membership {
    pub fn verdict(&self) -> &'static str {
        if self.member {
            "in"
        } else {
            "out"
        }
    }

    pub fn witnesses(&self) -> impl Iterator<Item = &IsolatedWitness> {
        self.points
            .iter()
            .filter(move |w| (w.left - w.right).abs() > self.tolerance)
    }
}

/// `u ∈ H¹_tr(Ω)` iff `γ_1u(z) = γ_{-1}u(z)` at every isolated point `z`.
pub fn h1tr_membership_1d(u: &IntervalUnionFunction, tolerance: f64) -> Membership {
    let iv = u.intervals().intervals();
    let mut points = Vec::new();
    for i in 1..iv.len() {
        if iv[i - 1].1 == iv[i].0 {
            points.push(IsolatedWitness {
                z: iv[i].0,
                left: u.end_traces(i - 1).1,
                right: u.end_traces(i).0,
            });
        }
    }
    let member = points.iter().all(|w| (w.left - w.right).abs() <= tolerance);
    Membership {
        field: u.label.clone(),
        member,
        tolerance,
        points,
    }
}

/// `T_M(x) = max(-M, min(M, x))`.
pub fn truncate(x: f64, m: f64) -> f64 {
    x.clamp(-m, m)
}

/// A bridge `]d, c[` between two selected components, or a constant run
/// before the first or after the last one (no staircase).
#[derive(Clone, Debug, Serialize)]
pub struct Bridge {
    pub start: f64,
    pub end: f64,
    pub left_value: f64,
    pub right_value: f64,
    pub staircase: Option<Staircase>,
}

/// The continuous function `v_n` on `[α, β]`.
#[derive(Clone, Debug)]
pub struct ContinuousApprox {
    u: IntervalUnionFunction,
    pub m: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Selected `Ω*` components, sorted by position.
    pub selected: Vec<(f64, f64)>,
    pub bridges: Vec<Bridge>,
}

impl ContinuousApprox {
    /// `T_M u` at `t` on a selected component, through the interval of `Ω`
    /// containing `t` (or ending at `t` for an isolated point).
    fn inner(&self, t: f64) -> (f64, f64) {
        let iv = self.u.intervals().intervals();
        let i = match self.u.intervals().locate(t) {
            Some(i) => i,
            None => iv.partition_point(|&(_, b)| b < t).min(iv.len() - 1),
        };
        let x = self.u.eval_on(i, t);
        let d = if x.abs() < self.m {
            self.u.deriv_on(i, t)
        } else {
            0.0
        };
        (truncate(x, self.m), d)
    }

    /// `(v_n(t), v_n'(t))`.
    pub fn eval_with_deriv(&self, t: f64) -> (f64, f64) {
        let t = t.clamp(self.alpha, self.beta);
        let k = self.selected.partition_point(|&(_, d)| d < t);
        if k < self.selected.len() && self.selected[k].0 <= t {
            let (c, d) = self.selected[k];
            // Closed ends take the endpoint traces so that v_n is continuous.
            if t == c {
                return (self.bridge_value_at(c), 0.0);
            }
            if t == d {
                return (self.bridge_value_at(d), 0.0);
            }
            return self.inner(t);
        }
        if k == 0 {
            return (self.bridges[0].left_value, 0.0);
        }
        if k == self.selected.len() {
            return (self.bridges[self.bridges.len() - 1].right_value, 0.0);
        }
        let b = &self.bridges[k];
        let st = b
            .staircase
            .as_ref()
            .expect("inner bridges carry a staircase");
        let f = st.eval(t);
        let df = st.slope(t);
        (
            b.left_value * (1.0 - f) + b.right_value * f,
            (b.right_value - b.left_value) * df,
        )
    }

    fn bridge_value_at(&self, t: f64) -> f64 {
        for b in &self.bridges {
            if b.start == t {
                return b.left_value;
            }
            if b.end == t {
                return b.right_value;
            }
        }
        self.inner(t).0
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_with_deriv(t).0
    }

    /// All staircase breakpoints and component ends.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = vec![self.alpha, self.beta];
        for &(c, d) in &self.selected {
            out.push(c);
            out.push(d);
        }
        for st in self.bridges.iter().filter_map(|b| b.staircase.as_ref()) {
            out.extend(st.breakpoints.iter().map(|p| p.0));
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Rows `(t, v_n(t))` on a uniform grid of `samples` points merged with
    /// the breakpoints.
    pub fn write_csv<W: Write>(&self, out: W, samples: usize) -> Result<()> {
        let mut ts = self.breakpoints();
        let n = samples.max(2);
        ts.extend(
            (0..n).map(|k| self.alpha + (self.beta - self.alpha) * k as f64 / (n - 1) as f64),
        );
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "v"])?;
        for t in ts {
            w.serialize((t, self.eval(t)))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `v_n` and its distance to `u`.
#[derive(Clone, Debug)]
pub struct Approximation {
    pub v: ContinuousApprox,
    pub n: u32,
    /// `‖v_n - u‖_{H¹(Ω)}`.
    pub distance: f64,
    /// `λ(Ω* ∖ Ω^{(n)})`.
    pub unselected_measure: f64,
}

/// The `Ω*` components kept at level `n`: longest first (ties by position)
/// until the rest has measure at most `2^{-n}`. Returned sorted by
/// position.
pub fn select_components(star: &IntervalUnion, n: u32) -> Vec<(f64, f64)> {
    let mut order: Vec<(f64, f64)> = star.intervals().to_vec();
    order.sort_by(|x, y| {
        (y.1 - y.0)
            .total_cmp(&(x.1 - x.0))
            .then(x.0.total_cmp(&y.0))
    });
    let budget = 0.5f64.powi(n as i32);
    let mut rest = star.measure();
    let mut chosen = Vec::new();
    for c in order {
        if rest <= budget {
            break;
        }
        rest -= c.1 - c.0;
        chosen.push(c);
    }
    if chosen.is_empty() {
        chosen.push(star.intervals()[0]);
    }
    chosen.sort_by(|x, y| x.0.total_cmp(&y.0));
    chosen
}

/// Default truncation level `1 + max |u|` over Gauss nodes.
pub fn default_truncation(u: &IntervalUnionFunction) -> f64 {
    let mut m: f64 = 0.0;
    for (i, &(a, b)) in u.intervals().intervals().iter().enumerate() {
        for k in 0..=32 {
            let t = a + (b - a) * (k as f64 + 0.5) / 33.0;
            m = m.max(u.eval_on(i, t).abs());
        }
    }
    1.0 + m
}

/// Builds `v_n` on `[inf Ω, sup Ω]`: `T_M u` on the selected components,
/// staircase bridges `u_M(d)(1 - f) + u_M(c) f` between them, constant
/// outside them.
pub fn continuous_approximation_1d(
    u: &IntervalUnionFunction,
    n: u32,
    m: Option<f64>,
) -> Result<Approximation> {
    let membership = h1tr_membership_1d(u, 1e-9);
    if !membership.member {
        return Err(Error::NotInH1tr(membership.witnesses().count()));
    }
    let m = m.unwrap_or_else(|| default_truncation(u));
    let (_, star) = isolated_points(u.intervals());
    let selected = select_components(&star, n);
    let iv = u.intervals().intervals();
    let trace_at = |t: f64, right_end: bool| -> f64 {
        // The interval of Ω with `t` as its right (or left) end.
        let i = if right_end {
            iv.iter().position(|&(_, b)| b == t)
        } else {
            iv.iter().position(|&(a, _)| a == t)
        }
        .expect("component ends are interval ends");
        let (l, r) = u.end_traces(i);
        truncate(if right_end { r } else { l }, m)
    };
    let (alpha, beta) = (u.intervals().inf(), u.intervals().sup());
    let mut bridges = Vec::with_capacity(selected.len() + 1);
    let first = trace_at(selected[0].0, false);
    bridges.push(Bridge {
        start: alpha,
        end: selected[0].0,
        left_value: first,
        right_value: first,
        staircase: None,
    });
    for w in selected.windows(2) {
        let (d, c) = (w[0].1, w[1].0);
        let gaps: Vec<(f64, f64)> = star
            .intervals()
            .iter()
            .copied()
            .filter(|&(a, b)| a >= d && b <= c)
            .collect();
        bridges.push(Bridge {
            start: d,
            end: c,
            left_value: trace_at(d, true),
            right_value: trace_at(c, false),
            staircase: Some(Staircase::complete(&gaps, d, c)?),
        });
    }
    let last_end = selected[selected.len() - 1].1;
    let last = trace_at(last_end, true);
    bridges.push(Bridge {
        start: last_end,
        end: beta,
        left_value: last,
        right_value: last,
        staircase: None,
    });
    let v = ContinuousApprox {
        u: u.clone(),
        m,
        alpha,
        beta,
        selected,
        bridges,
    };
    let parts: Vec<f64> = (0..iv.len())
        .map(|i| u.h1_dist_sq_on(i, |t| v.eval_with_deriv(t)))
        .collect();
    let unselected_measure = star.measure() - v.selected.iter().map(|c| c.1 - c.0).sum::<f64>();
    Ok(Approximation {
        v,
        n,
        distance: pairwise_sum(&parts).max(0.0).sqrt(),
        unselected_measure,
    })
}

/// `‖u‖_{H¹(Ω ∖ Ω^{(n)})}` for each level, the tail outside the selected
/// components.
pub fn tail_norms(u: &IntervalUnionFunction, levels: &[u32]) -> Vec<(u32, f64)> {
    let (_, star) = isolated_points(u.intervals());
    let iv = u.intervals().intervals();
    levels
        .iter()
        .map(|&n| {
            let sel = select_components(&star, n);
            let parts: Vec<f64> = iv
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| !sel.iter().any(|&(c, d)| c <= a && b <= d))
                .map(|(i, _)| u.h1_norm_sq_on(i))
                .collect();
            (n, pairwise_sum(&parts).sqrt())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::parse_field;
    use crate::fractal::cantor::{CantorScheme, CantorSpec};

    fn cantor(level: u32) -> IntervalUnion {
        IntervalUnion::new(
            CantorSpec::new(0.25, level, CantorScheme::Rho)
                .unwrap()
                .sorted_gaps(),
        )
        .unwrap()
    }

    #[test]
    fn isolated_point_examples() {
        let (p, star) = isolated_points(&IntervalUnion::new(vec![(0.0, 1.0), (1.0, 2.0)]).unwrap());
        assert_eq!(p, vec![1.0]);
        assert_eq!(star.intervals(), &[(0.0, 2.0)]);
        assert!(
            isolated_points(&IntervalUnion::new(vec![(0.0, 1.0)]).unwrap())
                .0
                .is_empty()
        );
        let gaps = IntervalUnion::new(CantorSpec::middle_third(3).unwrap().sorted_gaps()).unwrap();
        assert!(isolated_points(&gaps).0.is_empty());
    }

    #[test]
    fn membership_examples() {
        let r = h1tr_membership_1d(&IntervalUnionFunction::crack_example(), 1e-9);
        assert!(!r.member);
        let w = r.witnesses().next().unwrap();
        assert_eq!(w.z, 1.0);
        assert!((w.left - 1.0).abs() < 1e-12 && w.right.abs() < 1e-12);
        let iv = IntervalUnion::new(vec![(0.0, 1.0), (1.0, 2.0)]).unwrap();
        let x = IntervalUnionFunction::from_field(&parse_field("x1").unwrap(), iv.clone());
        assert!(h1tr_membership_1d(&x, 1e-9).member);
        let c = IntervalUnionFunction::new("c", iv, |_, _| 2.5, |_, _| 0.0);
        assert!(h1tr_membership_1d(&c, 1e-9).member);
    }

    #[test]
    fn crack_is_rejected() {
        let r = continuous_approximation_1d(&IntervalUnionFunction::crack_example(), 4, None);
        assert!(matches!(r, Err(Error::NotInH1tr(1))));
    }

    #[test]
    fn global_field_is_reproduced() {
        let iv = IntervalUnion::new(vec![(0.0, 1.0), (1.0, 2.0)]).unwrap();
        let x = IntervalUnionFunction::from_field(&parse_field("x1").unwrap(), iv);
        let a = continuous_approximation_1d(&x, 1, None).unwrap();
        assert!(a.distance < 1e-14);
        assert_eq!(a.v.eval(0.7), 0.7);
        assert_eq!(a.v.eval(1.0), 1.0);
    }

    #[test]
    fn truncation_distance() {
        let iv = IntervalUnion::new(vec![(0.0, 0.5), (1.0, 2.0)]).unwrap();
        let u = IntervalUnionFunction::new("c", iv, |_, _| 3.0, |_, _| 0.0);
        let a = continuous_approximation_1d(&u, 8, Some(2.0)).unwrap();
        assert!((a.distance - 1.5f64.sqrt()).abs() < 1e-13, "{}", a.distance);
        assert!((a.v.eval(0.75) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn approximation_converges_on_cantor_complement() {
        for name in ["sinmix", "expmix"] {
            let u = IntervalUnionFunction::from_field(&parse_field(name).unwrap(), cantor(6));
            let d: Vec<f64> = [4, 6, 8, 10]
                .iter()
                .map(|&n| continuous_approximation_1d(&u, n, None).unwrap().distance)
                .collect();
            assert!(d.windows(2).all(|w| w[1] < w[0]), "{name}: {d:?}");
        }
    }

    #[test]
    fn approximation_is_continuous() {
        let u = IntervalUnionFunction::from_field(&parse_field("sinmix").unwrap(), cantor(6));
        let a = continuous_approximation_1d(&u, 6, None).unwrap();
        let n = 100_000;
        let h = 1.0 / n as f64;
        // Lipschitz bound of v_n: |u'| ≤ 2 on selected parts, bridge slopes
        // are bounded by |Δ| times the steepest staircase piece.
        let mut lip: f64 = 2.0;
        for b in &a.v.bridges {
            let Some(st) = &b.staircase else { continue };
            for w in st.breakpoints.windows(2) {
                if w[1].0 > w[0].0 {
                    lip = lip.max(
                        (b.right_value - b.left_value).abs() * (w[1].1 - w[0].1)
                            / (w[1].0 - w[0].0),
                    );
                }
            }
        }
        let mut max_jump: f64 = 0.0;
        for k in 0..n {
            let t = k as f64 * h;
            max_jump = max_jump.max((a.v.eval(t + h) - a.v.eval(t)).abs());
        }
        assert!(
            max_jump <= lip * h * (1.0 + 1e-9),
            "{max_jump} vs {}",
            lip * h
        );
    }

    #[test]
    fn tails_decrease() {
        let u = IntervalUnionFunction::from_field(&parse_field("expmix").unwrap(), cantor(6));
        let t = tail_norms(&u, &[2, 4, 6, 8, 10]);
        assert!(t.windows(2).all(|w| w[1].1 < w[0].1), "{t:?}");
    }

    #[test]
    fn csv_export() {
        let u = IntervalUnionFunction::from_field(&parse_field("x1").unwrap(), cantor(2));
        let a = continuous_approximation_1d(&u, 3, None).unwrap();
        let mut buf = Vec::new();
        a.v.write_csv(&mut buf, 11).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("t,v\n"));
    }
}
