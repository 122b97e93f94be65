//! Scalar test functions with gradients and the lines where they stop
//! being smooth, plus the norms `‖u‖_θ` and `‖u‖_{H¹}`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractal::split_params;
use crate::geometry::{dot, Chord, Direction, Domain, Point};
use crate::quadrature::{
    chord_integral, integrate_chords_graded, Cut, IntegralResult, QuadratureSpec,
};

/// What happens to a field across a singular line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SingularKind {
    /// The field or one of its derivatives jumps.
    Jump,
    /// `|n·x - c|^{exponent}` blow-up (or a derivative of such).
    Power(f64),
}

/// The line `{x : normal·x = offset}` with its singular behavior.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    pub normal: Point,
    pub offset: f64,
    pub kind: SingularKind,
}

impl Singularity {
    pub fn horizontal(x2: f64, kind: SingularKind) -> Self {
        Self {
            normal: [0.0, 1.0],
            offset: x2,
            kind,
        }
    }

    pub fn vertical(x1: f64, kind: SingularKind) -> Self {
        Self {
            normal: [1.0, 0.0],
            offset: x1,
            kind,
        }
    }

    /// Whether `x` lies within `band` of the line.
    pub fn near(&self, x: Point, band: f64) -> bool {
        (dot(self.normal, x) - self.offset).abs() <= band
    }
}

type EvalFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(Point) -> Point + Send + Sync>;

/// A function with its gradient, evaluable anywhere in the plane (1D
/// fields ignore the second coordinate).
#[derive(Clone)]
pub struct ScalarField {
    label: String,
    eval: EvalFn,
    grad: GradFn,
    singular: Vec<Singularity>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("label", &self.label)
            .field("singular", &self.singular)
            .finish()
    }
}

impl ScalarField {
    pub fn new<E, G>(label: impl Into<String>, eval: E, grad: G, singular: Vec<Singularity>) -> Self
    where
        E: Fn(Point) -> f64 + Send + Sync + 'static,
        G: Fn(Point) -> Point + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            eval: Arc::new(eval),
            grad: Arc::new(grad),
            singular,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn eval(&self, x: Point) -> f64 {
        (self.eval)(x)
    }

    #[inline]
    pub fn grad(&self, x: Point) -> Point {
        (self.grad)(x)
    }

    /// `∂_θ u = θ·∇u`.
    #[inline]
    pub fn deriv(&self, x: Point, theta: Direction) -> f64 {
        theta.dot(self.grad(x))
    }

    pub fn singularities(&self) -> &[Singularity] {
        &self.singular
    }

    /// True when the field is smooth everywhere.
    pub fn is_smooth(&self) -> bool {
        self.singular.is_empty()
    }

    /// Human-readable description of where the field is not smooth.
    pub fn singular_locus(&self) -> Option<String> {
        if self.singular.is_empty() {
            return None;
        }
        let parts: Vec<String> = self
            .singular
            .iter()
            .map(|s| {
                let what = match s.kind {
                    SingularKind::Jump => "jump".to_string(),
                    SingularKind::Power(p) => format!("power singularity, exponent {p}"),
                };
                format!(
                    "{}·x₁ + {}·x₂ = {}: {what}",
                    s.normal[0], s.normal[1], s.offset
                )
            })
            .collect();
        Some(parts.join("; "))
    }

    /// `x ↦ u(x₁, -x₂)`.
    pub fn reflected_y(&self) -> Self {
        let (e, g) = (self.eval.clone(), self.grad.clone());
        let singular = self
            .singular
            .iter()
            .map(|s| Singularity {
                normal: [s.normal[0], -s.normal[1]],
                ..*s
            })
            .collect();
        Self::new(
            format!("{}∘ψ", self.label),
            move |x| e([x[0], -x[1]]),
            move |x| {
                let d = g([x[0], -x[1]]);
                [d[0], -d[1]]
            },
            singular,
        )
    }

    /// Split points of `chord` at the field's singular lines. Points
    /// within a relative `1e-12` of an endpoint snap to it; power
    /// singularities are graded.
    pub fn chord_cuts(&self, chord: &Chord) -> Vec<Cut> {
        let mut cuts = Vec::new();
        let t = chord.theta.components();
        let p = chord.theta.perp();
        let tol = 1e-12 * chord.length().max(1.0);
        for s in &self.singular {
            let nt = dot(s.normal, t);
            if nt.abs() < 1e-14 {
                continue;
            }
            let at = (s.offset - chord.offset * dot(s.normal, p)) / nt;
            let at = if (at - chord.alpha).abs() <= tol {
                chord.alpha
            } else if (at - chord.beta).abs() <= tol {
                chord.beta
            } else {
                at
            };
            if at < chord.alpha || at > chord.beta {
                continue;
            }
            cuts.push(Cut {
                s: at,
                graded: matches!(s.kind, SingularKind::Power(_)),
            });
        }
        cuts
    }
}

/// Offsets of lines in direction `θ` that run along a singular line,
/// marked `true` for power singularities.
pub fn singular_offsets(fields: &[&ScalarField], theta: Direction) -> Vec<(f64, bool)> {
    let t = theta.components();
    let p = theta.perp();
    let mut out = Vec::new();
    for u in fields {
        for s in u.singularities() {
            if dot(s.normal, t).abs() < 1e-14 {
                out.push((
                    s.offset / dot(s.normal, p),
                    matches!(s.kind, SingularKind::Power(_)),
                ));
            }
        }
    }
    out
}

/// Cuts of several fields on one chord.
pub fn chord_cuts(fields: &[&ScalarField], chord: &Chord) -> Vec<Cut> {
    fields.iter().flat_map(|u| u.chord_cuts(chord)).collect()
}

/// `∫_Ω h(x) dx` for an integrand built from `fields`, slicing along `θ`
/// and splitting every chord at the fields' singular lines.
pub fn integrate_fields<const K: usize, H>(
    domain: &Domain,
    theta: Direction,
    spec: &QuadratureSpec,
    fields: &[&ScalarField],
    h: H,
) -> Result<[IntegralResult; K]>
where
    H: Fn(Point) -> [f64; K] + Sync,
{
    let order = spec.gauss;
    let max_panel = spec.max_panel(domain);
    let graded = singular_offsets(fields, theta);
    integrate_chords_graded(domain, theta, spec, &graded, |c| {
        let cuts = chord_cuts(fields, c);
        Ok(chord_integral(
            c.alpha,
            c.beta,
            &cuts,
            order,
            max_panel,
            |s| h(c.point(s)),
        ))
    })
}

/// `√I` with the error propagated to first order.
pub fn sqrt_result(r: IntegralResult) -> IntegralResult {
    let v = r.value.max(0.0).sqrt();
    IntegralResult {
        value: v,
        error: if v > 0.0 {
            r.error / (2.0 * v)
        } else {
            r.error.sqrt()
        },
        extrapolated: r.extrapolated.max(0.0).sqrt(),
        flags: r.flags,
    }
}

/// Slicing direction for volume integrals. Domains built from Cantor
/// cones or combs are sliced vertically, where each line meets at most two
/// chords.
pub(crate) fn slicing(domain: &Domain) -> Direction {
    match domain {
        d if d.dim() == 1 => Direction::line(true),
        Domain::ConeUnionCantor | Domain::Bicone | Domain::CantorComb(_) => Direction::e2(),
        _ => Direction::e1(),
    }
}

/// `‖u‖_θ² = ∫_Ω (u² + (∂_θu)²)`.
pub fn norm_theta_sq(
    u: &ScalarField,
    domain: &Domain,
    theta: Direction,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    let [r] = integrate_fields(domain, slicing(domain), spec, &[u], |x| {
        let (v, d) = (u.eval(x), u.deriv(x, theta));
        [v * v + d * d]
    })?;
    Ok(r)
}

/// `‖u‖_θ`.
pub fn norm_theta(
    u: &ScalarField,
    domain: &Domain,
    theta: Direction,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    norm_theta_sq(u, domain, theta, spec).map(sqrt_result)
}

/// `‖u‖_{H¹}² = ∫_Ω (u² + |∇u|²)`.
pub fn h1_norm_sq(
    u: &ScalarField,
    domain: &Domain,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    let one_d = domain.dim() == 1;
    let [r] = integrate_fields(domain, slicing(domain), spec, &[u], |x| {
        let v = u.eval(x);
        let g = u.grad(x);
        let g2 = if one_d { g[0] * g[0] } else { dot(g, g) };
        [v * v + g2]
    })?;
    Ok(r)
}

/// `‖u‖_{H¹}`.
pub fn h1_norm(u: &ScalarField, domain: &Domain, spec: &QuadratureSpec) -> Result<IntegralResult> {
    h1_norm_sq(u, domain, spec).map(sqrt_result)
}

/// `‖∂_θu‖²_{L²}`.
pub fn deriv_norm_sq(
    u: &ScalarField,
    domain: &Domain,
    theta: Direction,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    let [r] = integrate_fields(domain, slicing(domain), spec, &[u], |x| {
        let d = u.deriv(x, theta);
        [d * d]
    })?;
    Ok(r)
}

/// `‖u‖²_{L²}`.
pub fn l2_norm_sq(
    u: &ScalarField,
    domain: &Domain,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    let [r] = integrate_fields(domain, slicing(domain), spec, &[u], |x| {
        let v = u.eval(x);
        [v * v]
    })?;
    Ok(r)
}

/// Names accepted by [`parse_field`].
pub const FIELD_NAMES: &[&str] = &[
    "one", "const", "x1", "x2", "x1x2", "x1px2", "x1sq", "x2sq", "sinmix", "expmix", "cusp_pow",
    "sign_y", "crack_1d", "crack_2d", "bump",
];

/// Default exponent of the cusp power field.
pub const CUSP_ALPHA: f64 = 0.75;

/// The six smooth `(u, v)` pairs of the test matrix.
pub const SMOOTH_PAIRS: [(&str, &str); 6] = [
    ("x1x2", "x1px2"),
    ("x1", "x2"),
    ("one", "x1sq"),
    ("sinmix", "expmix"),
    ("x2sq", "x1x2"),
    ("expmix", "x1"),
];

/// The built-in field registry.
pub struct FieldLibrary;

impl FieldLibrary {
    pub fn names() -> &'static [&'static str] {
        FIELD_NAMES
    }

    pub fn get(spec: &str) -> Result<ScalarField> {
        parse_field(spec)
    }

    /// The smooth fields used in property checks.
    pub fn smooth() -> Vec<ScalarField> {
        [
            "one", "x1", "x2", "x1x2", "x1px2", "x1sq", "x2sq", "sinmix", "expmix",
        ]
        .iter()
        .map(|n| parse_field(n).expect("built-in"))
        .collect()
    }
}

pub fn constant(c: f64) -> ScalarField {
    ScalarField::new(format!("const:c={c}"), move |_| c, |_| [0.0, 0.0], vec![])
}

/// `x₂^{-α}`, singular at `x₂ = 0`.
pub fn cusp_pow(alpha: f64) -> ScalarField {
    ScalarField::new(
        format!("cusp_pow:alpha={alpha}"),
        move |x| x[1].powf(-alpha),
        move |x| [0.0, -alpha * x[1].powf(-alpha - 1.0)],
        vec![Singularity::horizontal(0.0, SingularKind::Power(-alpha))],
    )
}

/// `(1-t²)²` on `|t| < 1`, zero outside, and its derivative.
fn bump1(t: f64) -> (f64, f64) {
    if t.abs() >= 1.0 {
        (0.0, 0.0)
    } else {
        let q = 1.0 - t * t;
        (q * q, -4.0 * t * q)
    }
}

/// Tensor-product bump centered at `(cx, cy)` with half-widths `rx, ry`.
pub fn bump(cx: f64, cy: f64, rx: f64, ry: f64) -> ScalarField {
    ScalarField::new(
        format!("bump:cx={cx},cy={cy},rx={rx},ry={ry}"),
        move |x| bump1((x[0] - cx) / rx).0 * bump1((x[1] - cy) / ry).0,
        move |x| {
            let (a, da) = bump1((x[0] - cx) / rx);
            let (b, db) = bump1((x[1] - cy) / ry);
            [da * b / rx, a * db / ry]
        },
        vec![
            Singularity::vertical(cx - rx, SingularKind::Jump),
            Singularity::vertical(cx + rx, SingularKind::Jump),
            Singularity::horizontal(cy - ry, SingularKind::Jump),
            Singularity::horizontal(cy + ry, SingularKind::Jump),
        ],
    )
}

/// Parses `name` or `name:k=v,...` into a field.
pub fn parse_field(spec: &str) -> Result<ScalarField> {
    let (name, params) = split_params(spec)?;
    let get = |k: &str, default: Option<f64>| -> Result<f64> {
        match params.get(k) {
            Some(v) => Ok(*v),
            None => default
                .ok_or_else(|| Error::InvalidParameter(format!("field '{name}' needs '{k}'"))),
        }
    };
    let allowed: &[&str] = match name.as_str() {
        "const" => &["c"],
        "cusp_pow" => &["alpha"],
        "bump" => &["cx", "cy", "rx", "ry"],
        _ => &[],
    };
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::InvalidParameter(format!(
            "field '{name}' has no parameter '{k}'"
        )));
    }
    let none = Vec::new;
    let f = match name.as_str() {
        "one" => ScalarField::new("one", |_| 1.0, |_| [0.0, 0.0], none()),
        "const" => constant(get("c", None)?),
        "x1" => ScalarField::new("x1", |x| x[0], |_| [1.0, 0.0], none()),
        "x2" => ScalarField::new("x2", |x| x[1], |_| [0.0, 1.0], none()),
        "x1x2" => ScalarField::new("x1x2", |x| x[0] * x[1], |x| [x[1], x[0]], none()),
        "x1px2" => ScalarField::new("x1px2", |x| x[0] + x[1], |_| [1.0, 1.0], none()),
        "x1sq" => ScalarField::new("x1sq", |x| x[0] * x[0], |x| [2.0 * x[0], 0.0], none()),
        "x2sq" => ScalarField::new("x2sq", |x| x[1] * x[1], |x| [0.0, 2.0 * x[1]], none()),
        "sinmix" => ScalarField::new(
            "sinmix",
            |x| (2.0 * x[0] + x[1]).sin(),
            |x| {
                let c = (2.0 * x[0] + x[1]).cos();
                [2.0 * c, c]
            },
            none(),
        ),
        "expmix" => ScalarField::new(
            "expmix",
            |x| (0.5 * x[0] - x[1]).exp(),
            |x| {
                let e = (0.5 * x[0] - x[1]).exp();
                [0.5 * e, -e]
            },
            none(),
        ),
        "cusp_pow" => {
            let alpha = get("alpha", Some(CUSP_ALPHA))?;
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::InvalidParameter(format!("cusp_pow alpha = {alpha}")));
            }
            cusp_pow(alpha)
        }
        "sign_y" => ScalarField::new(
            "sign_y",
            |x| if x[1] > 0.0 { 1.0 } else { -1.0 },
            |_| [0.0, 0.0],
            vec![Singularity::horizontal(0.0, SingularKind::Jump)],
        ),
        "crack_1d" => ScalarField::new(
            "crack_1d",
            |x| if x[0] < 1.0 { x[0] } else { x[0] - 1.0 },
            |_| [1.0, 0.0],
            vec![Singularity::vertical(1.0, SingularKind::Jump)],
        ),
        "crack_2d" => ScalarField::new(
            "crack_2d",
            |x| {
                if x[1] <= 0.0 {
                    0.0
                } else if x[0] < 0.5 {
                    -x[1]
                } else {
                    x[1]
                }
            },
            |x| {
                if x[1] <= 0.0 {
                    [0.0, 0.0]
                } else if x[0] < 0.5 {
                    [0.0, -1.0]
                } else {
                    [0.0, 1.0]
                }
            },
            vec![
                Singularity::horizontal(0.0, SingularKind::Jump),
                Singularity::vertical(0.5, SingularKind::Jump),
            ],
        ),
        "bump" => {
            let (rx, ry) = (get("rx", None)?, get("ry", None)?);
            if !(rx > 0.0 && ry > 0.0) {
                return Err(Error::InvalidParameter(format!("bump radii {rx}, {ry}")));
            }
            bump(get("cx", None)?, get("cy", None)?, rx, ry)
        }
        other => return Err(Error::UnknownName(format!("field '{other}'"))),
    };
    Ok(f)
}
