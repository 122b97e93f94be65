use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::kernels;
use super::{dist, length_guard, BoundaryPoint, Chord, Direction, Point, EPS_GEO};
use crate::error::{Error, Result};
use crate::fractal::cantor::{cantor_contains, cantor_distance, CantorScheme, CantorSpec};

/// Disjoint, sorted, open intervals of the real line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidDomain("empty interval list".into()));
        }
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::InvalidDomain(format!("bad interval ]{a}, {b}[")));
            }
        }
        for w in intervals.windows(2) {
            if w[0].1 > w[1].0 {
                return Err(Error::InvalidDomain(format!(
                    "intervals ]{}, {}[ and ]{}, {}[ are unsorted or overlap",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn inf(&self) -> f64 {
        self.intervals[0].0
    }

    pub fn sup(&self) -> f64 {
        self.intervals[self.intervals.len() - 1].1
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    /// Index of the interval containing `x`.
    pub fn locate(&self, x: f64) -> Option<usize> {
        let i = self.intervals.partition_point(|&(_, b)| b <= x);
        (i < self.intervals.len() && self.intervals[i].0 < x).then_some(i)
    }
}

impl TryFrom<Vec<(f64, f64)>> for IntervalUnion {
    type Error = Error;
    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<IntervalUnion> for Vec<(f64, f64)> {
    fn from(u: IntervalUnion) -> Self {
        u.intervals
    }
}

/// A simple polygon with counterclockwise vertices, optionally cut by
/// closed segments (slits) that are removed from its interior.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<Point>,
    #[serde(default)]
    slits: Vec<[Point; 2]>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        Self::with_slits(vertices, Vec::new())
    }

    pub fn with_slits(vertices: Vec<Point>, slits: Vec<[Point; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidDomain(
                "polygon needs at least 3 vertices".into(),
            ));
        }
        if vertices
            .iter()
            .chain(slits.iter().flatten())
            .any(|p| !(p[0].is_finite() && p[1].is_finite()))
        {
            return Err(Error::InvalidDomain("non-finite polygon coordinate".into()));
        }
        let p = Self { vertices, slits };
        if p.signed_area() <= 0.0 {
            return Err(Error::InvalidDomain(
                "polygon vertices must be counterclockwise".into(),
            ));
        }
        Ok(p)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn slits(&self) -> &[[Point; 2]] {
        &self.slits
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| super::cross(self.vertices[i], self.vertices[(i + 1) % n]))
            .sum::<f64>()
            * 0.5
    }

    /// Edges `(p_i, p_{i+1})` in order.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Unit outward normal of edge `i`.
    pub fn outward_normal(&self, i: usize) -> Point {
        let n = self.vertices.len();
        let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
        let e = [q[0] - p[0], q[1] - p[1]];
        let l = super::norm(e);
        [e[1] / l, -e[0] / l]
    }

    fn contains(&self, x: Point) -> bool {
        if self.edges().any(|(p, q)| kernels::on_segment(x, p, q))
            || self
                .slits
                .iter()
                .any(|[p, q]| kernels::on_segment(x, *p, *q))
        {
            return false;
        }
        let mut inside = false;
        for (p, q) in self.edges() {
            if (p[1] > x[1]) != (q[1] > x[1]) {
                let t = (x[1] - p[1]) / (q[1] - p[1]);
                if x[0] < p[0] + t * (q[0] - p[0]) {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

/// The `ρ`-comb `(([0,1]∖C_ρ) × ]-1,1[) ∪ (]0,1[ × ]-1,0[)`, with the gap
/// strips enumerated up to a finite level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CantorComb {
    pub rho: f64,
    pub level: u32,
    #[serde(skip)]
    gaps: Arc<Vec<(f64, f64)>>,
}

impl CantorComb {
    pub fn new(rho: f64, level: u32) -> Result<Self> {
        let spec = CantorSpec::new(rho, level, CantorScheme::Rho)?;
        Ok(Self {
            rho,
            level,
            gaps: Arc::new(spec.sorted_gaps()),
        })
    }

    /// Gap strips sorted by position.
    pub fn gaps(&self) -> &[(f64, f64)] {
        &self.gaps
    }

    fn in_gap(&self, x: f64) -> bool {
        let i = self.gaps.partition_point(|&(_, d)| d <= x);
        i < self.gaps.len() && self.gaps[i].0 < x
    }
}

/// A bounded open set with an exact chord oracle.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    /// Open subset of the real line.
    IntervalUnion(IntervalUnion),
    Polygon(Polygon),
    /// `{|x₁| < x₂³, 0 < x₂ < 1}`.
    Cusp,
    /// Union of the cones `K_a`, `a ∈ C_{1/3}`.
    ConeUnionCantor,
    /// `Ω_C ∪ ψ(Ω_C)`.
    Bicone,
    /// `]-1,2[ × ]-1,1[` minus `C_{1/3} × {0}`. The level only bounds the
    /// gap enumeration on the line `x₂ = 0`.
    SquareMinusCantor {
        level: u32,
    },
    /// `B((½,0), 2)` minus `C_{1/3} × {0}`.
    DiskMinusCantor {
        level: u32,
    },
    CantorComb(CantorComb),
}

/// The chords of one line, sorted by `α`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChordSet {
    pub chords: Vec<Chord>,
    /// Set when a chord below the length guard was discarded or two chords
    /// are separated by less than four times the guard.
    pub warning: bool,
}

impl ChordSet {
    /// The chord whose plus end lies within `tol` of the line parameter `s`.
    pub fn ending_near(&self, s: f64, tol: f64) -> Option<&Chord> {
        self.chords
            .iter()
            .filter(|c| (c.beta - s).abs() <= tol)
            .min_by(|a, b| (a.beta - s).abs().total_cmp(&(b.beta - s).abs()))
    }
}

const DISK_CENTER: Point = [0.5, 0.0];
const DISK_RADIUS: f64 = 2.0;
const LEVEL_DEFAULT: u32 = 12;

impl Domain {
    pub fn interval_union(intervals: Vec<(f64, f64)>) -> Result<Self> {
        Ok(Self::IntervalUnion(IntervalUnion::new(intervals)?))
    }

    pub fn polygon(vertices: Vec<Point>) -> Result<Self> {
        Ok(Self::Polygon(Polygon::new(vertices)?))
    }

    pub fn polygon_with_slits(vertices: Vec<Point>, slits: Vec<[Point; 2]>) -> Result<Self> {
        Ok(Self::Polygon(Polygon::with_slits(vertices, slits)?))
    }

    pub fn rectangle(lo: Point, hi: Point) -> Result<Self> {
        Self::polygon(vec![lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]])
    }

    /// `]0,1[²`.
    pub fn unit_square() -> Self {
        Self::rectangle([0.0, 0.0], [1.0, 1.0]).expect("unit square")
    }

    /// `(]0,1[ × ]-1,1[) ∖ ({½} × [0,1])`.
    pub fn crack_2d() -> Self {
        Self::polygon_with_slits(
            vec![[0.0, -1.0], [1.0, -1.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[[0.5, 0.0], [0.5, 1.0]]],
        )
        .expect("crack domain")
    }

    /// `]0,1[ ∪ ]1,2[`.
    pub fn crack_1d() -> Self {
        Self::interval_union(vec![(0.0, 1.0), (1.0, 2.0)]).expect("crack intervals")
    }

    /// The open complement of the `ρ`-Cantor set in `[0, 1]`, truncated at
    /// the given level.
    pub fn cantor_complement(rho: f64, level: u32) -> Result<Self> {
        let spec = CantorSpec::new(rho, level, CantorScheme::Rho)?;
        Self::interval_union(spec.sorted_gaps())
    }

    pub fn square_minus_cantor() -> Self {
        Self::SquareMinusCantor {
            level: LEVEL_DEFAULT,
        }
    }

    pub fn disk_minus_cantor() -> Self {
        Self::DiskMinusCantor {
            level: LEVEL_DEFAULT,
        }
    }

    pub fn cantor_comb(rho: f64, level: u32) -> Result<Self> {
        Ok(Self::CantorComb(CantorComb::new(rho, level)?))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::IntervalUnion(_) => "interval_union",
            Self::Polygon(_) => "polygon",
            Self::Cusp => "cusp",
            Self::ConeUnionCantor => "cone_union_cantor",
            Self::Bicone => "bicone",
            Self::SquareMinusCantor { .. } => "square_minus_cantor",
            Self::DiskMinusCantor { .. } => "disk_minus_cantor",
            Self::CantorComb(_) => "cantor_comb",
        }
    }

    pub fn dim(&self) -> u8 {
        match self {
            Self::IntervalUnion(_) => 1,
            _ => 2,
        }
    }

    /// The directions a sup over `S^{d-1}` is sampled on by default.
    pub fn default_directions(&self, n: usize) -> Vec<Direction> {
        if self.dim() == 1 {
            Direction::line_family()
        } else {
            Direction::family(n)
        }
    }

    pub fn contains(&self, x: Point) -> bool {
        if !(x[0].is_finite() && x[1].is_finite()) {
            return false;
        }
        match self {
            Self::IntervalUnion(u) => x[1] == 0.0 && u.locate(x[0]).is_some(),
            Self::Polygon(p) => p.contains(x),
            Self::Cusp => x[1] > 0.0 && x[1] < 1.0 && x[0].abs() < x[1] * x[1] * x[1],
            Self::ConeUnionCantor => omega_c_contains(x),
            Self::Bicone => omega_c_contains(x) || omega_c_contains([x[0], -x[1]]),
            Self::SquareMinusCantor { .. } => {
                x[0] > -1.0
                    && x[0] < 2.0
                    && x[1] > -1.0
                    && x[1] < 1.0
                    && !(x[1] == 0.0 && cantor_contains(x[0]))
            }
            Self::DiskMinusCantor { .. } => {
                dist(x, DISK_CENTER) < DISK_RADIUS && !(x[1] == 0.0 && cantor_contains(x[0]))
            }
            Self::CantorComb(c) => {
                (x[0] > 0.0 && x[0] < 1.0 && x[1] > -1.0 && x[1] < 0.0)
                    || (x[1] > -1.0 && x[1] < 1.0 && c.in_gap(x[0]))
            }
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bbox(&self) -> (Point, Point) {
        match self {
            Self::IntervalUnion(u) => ([u.inf(), 0.0], [u.sup(), 0.0]),
            Self::Polygon(p) => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for v in &p.vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                (lo, hi)
            }
            Self::Cusp => ([-1.0, 0.0], [1.0, 1.0]),
            Self::ConeUnionCantor => ([-1.0, 0.0], [2.0, 1.0]),
            Self::Bicone => ([-1.0, -1.0], [2.0, 1.0]),
            Self::SquareMinusCantor { .. } => ([-1.0, -1.0], [2.0, 1.0]),
            Self::DiskMinusCantor { .. } => (
                [DISK_CENTER[0] - DISK_RADIUS, -DISK_RADIUS],
                [DISK_CENTER[0] + DISK_RADIUS, DISK_RADIUS],
            ),
            Self::CantorComb(_) => ([0.0, -1.0], [1.0, 1.0]),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Self::IntervalUnion(u) => u.sup() - u.inf(),
            Self::Polygon(p) => {
                let mut d: f64 = 0.0;
                for a in &p.vertices {
                    for b in &p.vertices {
                        d = d.max(dist(*a, *b));
                    }
                }
                d
            }
            Self::Cusp => 2.0,
            Self::ConeUnionCantor => 3.0,
            Self::Bicone => 13f64.sqrt(),
            Self::DiskMinusCantor { .. } => 2.0 * DISK_RADIUS,
            _ => {
                let (lo, hi) = self.bbox();
                dist(lo, hi)
            }
        }
    }

    fn hull_points(&self) -> Vec<Point> {
        match self {
            Self::Polygon(p) => p.vertices.clone(),
            _ => {
                let (lo, hi) = self.bbox();
                vec![lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]]
            }
        }
    }

    /// Range of offsets `r` whose line can meet the domain.
    pub fn offset_range(&self, theta: Direction) -> (f64, f64) {
        if self.dim() == 1 {
            return (0.0, 0.0);
        }
        if let Self::DiskMinusCantor { .. } = self {
            let c = theta.offset_of(DISK_CENTER);
            return (c - DISK_RADIUS, c + DISK_RADIUS);
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in self.hull_points() {
            let r = theta.offset_of(p);
            lo = lo.min(r);
            hi = hi.max(r);
        }
        (lo, hi)
    }

    /// Offsets at which the chord structure changes non-smoothly: vertex
    /// projections and tangencies. Used to align quadrature panels.
    pub fn offset_breakpoints(&self, theta: Direction) -> Vec<f64> {
        let mut pts: Vec<Point> = Vec::new();
        let mut extra: Vec<f64> = Vec::new();
        match self {
            Self::IntervalUnion(_) => return vec![0.0],
            Self::Polygon(p) => {
                pts.extend(&p.vertices);
                pts.extend(p.slits.iter().flatten());
            }
            Self::Cusp => {
                pts.extend([[-1.0, 1.0], [1.0, 1.0], [0.0, 0.0]]);
                let [t1, t2] = theta.components();
                if t2 != 0.0 {
                    for sign in [1.0, -1.0] {
                        let u2 = sign * t1 / (3.0 * t2);
                        if u2 > 0.0 && u2 < 1.0 {
                            let u = u2.sqrt();
                            pts.push([sign * u * u * u, u]);
                        }
                    }
                }
            }
            Self::ConeUnionCantor | Self::Bicone => {
                let mut base = vec![[-1.0, 1.0], [2.0, 1.0], [0.0, 0.0], [1.0, 0.0]];
                for (c, d) in CantorSpec::middle_third(4).expect("level 4").gaps() {
                    base.push([*c, 0.0]);
                    base.push([*d, 0.0]);
                    base.push([0.5 * (c + d), 0.5 * (d - c)]);
                }
                if theta.components()[1] == 0.0 {
                    // Horizontal lines: gap triangles close at heights
                    // 3^{-k-1}/2, which accumulate at x₂ = 0.
                    for k in 5..=10 {
                        base.push([0.0, 0.5 * 3f64.powi(-k - 1)]);
                    }
                }
                if let Self::Bicone = self {
                    let mirrored: Vec<Point> = base.iter().map(|p| [p[0], -p[1]]).collect();
                    base.extend(mirrored);
                }
                pts = base;
            }
            Self::SquareMinusCantor { .. } => {
                pts.extend(self.hull_points());
                pts.extend([[0.0, 0.0], [1.0, 0.0]]);
            }
            Self::DiskMinusCantor { .. } => {
                let c = theta.offset_of(DISK_CENTER);
                extra.extend([c - DISK_RADIUS, c + DISK_RADIUS]);
                pts.extend([[0.0, 0.0], [1.0, 0.0]]);
            }
            Self::CantorComb(comb) => {
                pts.extend([
                    [0.0, -1.0],
                    [1.0, -1.0],
                    [0.0, 1.0],
                    [1.0, 1.0],
                    [0.0, 0.0],
                    [1.0, 0.0],
                ]);
                for &(c, d) in comb.gaps().iter().filter(|(c, d)| d - c > 1e-3) {
                    pts.extend([[c, 0.0], [d, 0.0], [c, 1.0], [d, 1.0]]);
                }
            }
        }
        let mut out: Vec<f64> = pts.iter().map(|p| theta.offset_of(*p)).collect();
        out.extend(extra);
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
        out
    }

    /// Raw open intervals of the line, before filtering.
    fn raw_intervals(&self, theta: Direction, offset: f64) -> Vec<(f64, f64)> {
        let t = theta.components();
        let q = theta.perp();
        let y = [offset * q[0], offset * q[1]];
        match self {
            Self::IntervalUnion(u) => {
                if offset != 0.0 || t[1] != 0.0 {
                    return Vec::new();
                }
                if t[0] > 0.0 {
                    u.intervals.clone()
                } else {
                    u.intervals.iter().rev().map(|&(a, b)| (-b, -a)).collect()
                }
            }
            Self::Polygon(p) => {
                let raw = kernels::polygon(&p.vertices, y, t);
                kernels::cut_slits(raw, &p.slits, y, t)
            }
            Self::Cusp => kernels::cusp(y, t),
            Self::ConeUnionCantor => kernels::cone_union(y, t),
            Self::Bicone => kernels::bicone(y, t),
            Self::SquareMinusCantor { level } => {
                let planes = [
                    ([-1.0, 0.0], 1.0),
                    ([1.0, 0.0], 2.0),
                    ([0.0, -1.0], 1.0),
                    ([0.0, 1.0], 1.0),
                ];
                let raw = super::intervals::clip_open_halfplanes(y, t, &planes)
                    .into_iter()
                    .collect();
                kernels::cut_cantor_slit(raw, y, t, *level)
            }
            Self::DiskMinusCantor { level } => {
                let raw = kernels::disk(DISK_CENTER, DISK_RADIUS, y, t);
                kernels::cut_cantor_slit(raw, y, t, *level)
            }
            Self::CantorComb(c) => kernels::cantor_comb(c.gaps(), y, t),
        }
    }

    /// All chords of the line with direction `θ` and offset `r`, sorted by
    /// `α`. Chords shorter than the rounding guard `length_guard` are
    /// dropped.
    pub fn chords(&self, theta: Direction, offset: f64) -> ChordSet {
        let mut raw = self.raw_intervals(theta, offset);
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut warning = false;
        let mut chords = Vec::with_capacity(raw.len());
        for (alpha, beta) in raw {
            let (alpha, beta) = self.snap_outward(theta, offset, alpha, beta);
            let len = beta - alpha;
            let guard = length_guard(alpha, beta);
            if len <= guard {
                if len > 0.0 {
                    warning = true;
                }
                continue;
            }
            if let Some(prev) = chords.last() {
                let prev: &Chord = prev;
                let gap = alpha - prev.beta;
                if gap < 4.0 * guard && gap > 0.0 {
                    warning = true;
                }
            }
            chords.push(Chord {
                theta,
                offset,
                alpha,
                beta,
            });
        }
        ChordSet { chords, warning }
    }

    /// Moves computed endpoints outward if rounding put them inside.
    fn snap_outward(
        &self,
        theta: Direction,
        offset: f64,
        mut alpha: f64,
        mut beta: f64,
    ) -> (f64, f64) {
        let guard = length_guard(alpha, beta);
        if self.dim() == 1 || beta - alpha <= guard {
            return (alpha, beta);
        }
        let line = |s: f64| {
            let t = theta.components();
            let n = theta.perp();
            [offset * n[0] + s * t[0], offset * n[1] + s * t[1]]
        };
        // Doubling steps from one ulp of the endpoint coordinates, capped at
        // a few hundred ulps or well below the guard, whichever is larger.
        let scale = |s: f64| s.abs().max(offset.abs()).max(guard / EPS_GEO);
        let cap = |s: f64| (1e-3 * guard).max(256.0 * f64::EPSILON * scale(s));
        let mut step = f64::EPSILON * scale(alpha);
        while self.contains(line(alpha)) && step < cap(alpha) {
            alpha -= step;
            step *= 2.0;
        }
        let mut step = f64::EPSILON * scale(beta);
        while self.contains(line(beta)) && step < cap(beta) {
            beta += step;
            step *= 2.0;
        }
        (alpha, beta)
    }

    /// The chord in direction `θ` that contains `x`.
    pub fn chord_through(&self, x: Point, theta: Direction) -> Result<Chord> {
        if !self.contains(x) {
            return Err(Error::PointOutsideDomain(x));
        }
        let r = theta.offset_of(x);
        let s = theta.dot(x);
        self.raw_intervals(theta, r)
            .into_iter()
            .find(|&(a, b)| a < s && s < b)
            .map(|(a, b)| self.snap_outward(theta, r, a, b))
            .map(|(alpha, beta)| Chord {
                theta,
                offset: r,
                alpha,
                beta,
            })
            .ok_or(Error::PointOutsideDomain(x))
    }

    /// `δ_θ(x)`, the distance travelled from `x` in direction `θ` before
    /// leaving the domain.
    pub fn delta(&self, x: Point, theta: Direction) -> Result<f64> {
        let c = self.chord_through(x, theta)?;
        Ok(c.beta - theta.dot(x))
    }

    /// `Φ_θ(x) = x + δ_θ(x) θ`.
    pub fn exit_point(&self, x: Point, theta: Direction) -> Result<BoundaryPoint> {
        Ok(self.chord_through(x, theta)?.plus_point())
    }

    /// The chord whose plus end (in direction `θ`) is `z`.
    pub fn chord_ending_at(&self, z: Point, theta: Direction) -> Result<Chord> {
        self.chord_ending_near(z, theta, 1e-9 * self.diameter().max(1.0))
    }

    /// The chord in direction `θ` whose plus end lies within `tol` of `z`
    /// along the line through `z`.
    pub fn chord_ending_near(&self, z: Point, theta: Direction, tol: f64) -> Result<Chord> {
        let r = theta.offset_of(z);
        let s = theta.dot(z);
        self.chords(theta, r)
            .ending_near(s, tol)
            .copied()
            .ok_or(Error::NotDirectionalBoundary(z))
    }

    /// `(Φ_{-θ}(z), ℓ_{-θ}(z))` for `z ∈ ∂_θΩ`.
    pub fn opposite(&self, z: Point, theta: Direction) -> Result<(BoundaryPoint, f64)> {
        let c = self.chord_ending_at(z, theta)?;
        Ok((c.minus_point(), c.length()))
    }

    /// Exact Lebesgue measure where a closed form is known.
    pub fn volume(&self) -> Option<f64> {
        match self {
            Self::IntervalUnion(u) => Some(u.measure()),
            Self::Polygon(p) => Some(p.signed_area()),
            Self::Cusp => Some(0.5),
            Self::ConeUnionCantor => Some(55.0 / 28.0),
            Self::Bicone => Some(55.0 / 14.0),
            Self::SquareMinusCantor { .. } => Some(6.0),
            Self::DiskMinusCantor { .. } => Some(std::f64::consts::PI * DISK_RADIUS * DISK_RADIUS),
            Self::CantorComb(c) => {
                Some(0.5 + 2.0 * c.gaps().iter().map(|(a, b)| b - a).sum::<f64>())
            }
        }
    }
}

fn omega_c_contains(x: Point) -> bool {
    x[1] > 0.0 && x[1] < 1.0 && cantor_distance(x[0]) < x[1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_domains() -> Vec<Domain> {
        vec![
            Domain::unit_square(),
            Domain::polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap(),
            Domain::polygon(vec![
                [0.0, 0.0],
                [2.0, 0.0],
                [2.0, 2.0],
                [1.0, 0.7],
                [0.0, 2.0],
            ])
            .unwrap(),
            Domain::crack_2d(),
            Domain::Cusp,
            Domain::ConeUnionCantor,
            Domain::Bicone,
            Domain::square_minus_cantor(),
            Domain::disk_minus_cantor(),
            Domain::cantor_comb(0.25, 6).unwrap(),
        ]
    }

    #[test]
    fn membership_examples() {
        assert!(Domain::unit_square().contains([0.5, 0.5]));
        assert!(!Domain::Cusp.contains([0.2, 0.5]));
        assert!(!Domain::ConeUnionCantor.contains([0.5, 0.1]));
        assert!(Domain::ConeUnionCantor.contains([0.5, 0.17]));
        assert!(Domain::ConeUnionCantor.contains([0.0, 0.5]));
        assert!(Domain::Bicone.contains([0.0, -0.5]));
        assert!(!Domain::Bicone.contains([0.0, 0.0]));
        assert!(!Domain::disk_minus_cantor().contains([0.25, 0.0]));
        assert!(Domain::disk_minus_cantor().contains([0.5, 0.0]));
        assert!(!Domain::crack_2d().contains([0.5, 0.5]));
        assert!(Domain::crack_2d().contains([0.5, -0.5]));
    }

    #[test]
    fn delta_examples() {
        let sq = Domain::unit_square();
        assert!((sq.delta([0.25, 0.5], Direction::e1()).unwrap() - 0.75).abs() < 1e-15);
        let crack = Domain::crack_1d();
        assert_eq!(crack.delta([0.5, 0.0], Direction::line(true)).unwrap(), 0.5);
        assert_eq!(
            Domain::Cusp.delta([0.0, 0.5], Direction::e1()).unwrap(),
            0.125
        );
        assert!(matches!(
            sq.delta([1.5, 0.5], Direction::e1()),
            Err(Error::PointOutsideDomain(_))
        ));
    }

    #[test]
    fn chord_examples() {
        let sq = Domain::unit_square();
        let c = sq.chords(Direction::e1(), 0.5).chords;
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].alpha, c[0].beta), (0.0, 1.0));

        // Vertical line x₁ = ½ crosses the slit at a gap point.
        let d = Domain::disk_minus_cantor();
        let e2 = Direction::e2();
        assert_eq!(d.chords(e2, -0.5).chords.len(), 1);
        // x₁ = ¼ is a Cantor point.
        assert_eq!(d.chords(e2, -0.25).chords.len(), 2);

        let b = Domain::Bicone;
        let c = b.chords(e2, 0.0).chords;
        assert_eq!(c.len(), 2);
        assert_eq!((c[0].alpha, c[0].beta), (-1.0, 0.0));
        assert_eq!((c[1].alpha, c[1].beta), (0.0, 1.0));
    }

    #[test]
    fn opposite_examples() {
        let sq = Domain::unit_square();
        let (zh, l) = sq.opposite([1.0, 0.5], Direction::e1()).unwrap();
        assert_eq!(zh.coords, [0.0, 0.5]);
        assert_eq!(l, 1.0);
        assert_eq!(zh.side, Direction::e1().neg());

        let (zh, l) = Domain::Cusp
            .opposite([0.125, 0.5], Direction::e1())
            .unwrap();
        assert!((zh.coords[0] + 0.125).abs() < 1e-15 && zh.coords[1] == 0.5);
        assert!((l - 0.25).abs() < 1e-15);

        let (zh, l) = Domain::crack_1d()
            .opposite([1.0, 0.0], Direction::line(true))
            .unwrap();
        assert_eq!(zh.coords[0], 0.0);
        assert_eq!(l, 1.0);

        assert!(matches!(
            sq.opposite([0.5, 1.0], Direction::e1()),
            Err(Error::NotDirectionalBoundary(_))
        ));
    }

    #[test]
    fn bad_inputs_rejected() {
        assert!(Domain::polygon(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).is_err());
        assert!(Domain::interval_union(vec![(0.0, 1.0), (0.5, 2.0)]).is_err());
        assert!(Domain::interval_union(vec![(1.0, 0.0)]).is_err());
        assert!(Domain::interval_union(vec![(0.0, 1.0), (1.0, 2.0)]).is_ok());
    }

    fn random_interior(d: &Domain, rng: &mut ChaCha8Rng) -> Point {
        let (lo, hi) = d.bbox();
        loop {
            let x = [rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1])];
            if d.contains(x) {
                return x;
            }
        }
    }

    #[test]
    fn delta_sum_equals_chord_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in all_domains() {
            for theta in Direction::family(7) {
                for _ in 0..300 {
                    let x = random_interior(&d, &mut rng);
                    let c = d.chord_through(x, theta).unwrap();
                    let a = d.delta(x, theta).unwrap();
                    let b = d.delta(x, theta.neg()).unwrap();
                    assert!(a > 0.0 && b > 0.0);
                    assert!(
                        (a + b - c.length()).abs() < 1e-12,
                        "{} at {x:?}: {a} + {b} vs {}",
                        d.kind(),
                        c.length()
                    );
                }
            }
        }
    }

    #[test]
    fn endpoints_outside_midpoints_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in all_domains() {
            for theta in Direction::family(9) {
                let (lo, hi) = d.offset_range(theta);
                for _ in 0..200 {
                    let r = rng.gen_range(lo..hi);
                    let set = d.chords(theta, r);
                    for c in &set.chords {
                        assert!(c.length() <= d.diameter() + 1e-12);
                        let mid = c.point(0.5 * (c.alpha + c.beta));
                        assert!(d.contains(mid), "{} midpoint {mid:?}", d.kind());
                        assert!(!d.contains(c.plus()), "{} plus {:?}", d.kind(), c.plus());
                        assert!(!d.contains(c.minus()), "{} minus {:?}", d.kind(), c.minus());
                    }
                }
            }
        }
    }

    #[test]
    fn chord_pairing_is_bijective() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in all_domains() {
            for theta in Direction::family(5) {
                let (lo, hi) = d.offset_range(theta);
                for _ in 0..50 {
                    let r = rng.gen_range(lo..hi);
                    for c in d.chords(theta, r).chords {
                        let (zh, l) = d.opposite(c.plus(), theta).unwrap();
                        assert!(dist(zh.coords, c.minus()) < 1e-9);
                        assert!((l - c.length()).abs() < 1e-9);
                        let (back, _) = d.opposite(c.minus(), theta.neg()).unwrap();
                        assert!(dist(back.coords, c.plus()) < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn omega_c_slices_match_gap_enumeration() {
        let gaps = CantorSpec::middle_third(12).unwrap().sorted_gaps();
        for &h in &[0.3, 0.1, 0.04, 0.013, 0.002] {
            let got = Domain::ConeUnionCantor.chords(Direction::e1(), h).chords;
            // Slice: ]-h, 1+h[ minus [c+h, d-h] for every gap with d - c > 2h.
            let mut removed: Vec<(f64, f64)> = gaps
                .iter()
                .filter(|(c, d)| d - c > 2.0 * h)
                .map(|(c, d)| (c + h, d - h))
                .collect();
            let expected = super::super::subtract_closed(-h, 1.0 + h, &mut removed);
            assert_eq!(got.len(), expected.len(), "h = {h}");
            for (g, e) in got.iter().zip(&expected) {
                assert!((g.alpha - e.0).abs() < 1e-12 && (g.beta - e.1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lower_semicontinuity_probe() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in all_domains() {
            let theta = Direction::from_angle(0.4);
            for _ in 0..40 {
                let x = random_interior(&d, &mut rng);
                let delta = d.delta(x, theta).unwrap();
                let lambda = 0.5 * delta;
                let mut r = 0.1;
                let found = (0..40).any(|_| {
                    r *= 0.5;
                    (0..32).all(|k| {
                        let a = k as f64 * std::f64::consts::PI / 16.0;
                        let p = [x[0] + r * a.cos(), x[1] + r * a.sin()];
                        d.delta(p, theta).map(|v| v > lambda).unwrap_or(false)
                    })
                });
                assert!(found, "{} at {x:?}", d.kind());
            }
        }
    }

    #[test]
    fn one_d_reverse_direction() {
        let d = Domain::crack_1d();
        let c = d.chords(Direction::line(false), 0.0).chords;
        assert_eq!(c.len(), 2);
        assert_eq!((c[0].alpha, c[0].beta), (-2.0, -1.0));
        assert_eq!(c[1].plus(), [-0.0, 0.0]);
    }

    #[test]
    fn cusp_endpoints_near_the_tip_are_outside() {
        // Offsets far larger than the chord parameters, where rounding of
        // the offset dominates the endpoint error.
        let d = Domain::Cusp;
        let theta = Direction::from_angle(0.02817510955332792);
        let (lo, hi) = d.offset_range(theta);
        for i in 0..512 {
            let r = lo + (i as f64 + 0.5) / 512.0 * (hi - lo);
            for c in &d.chords(theta, r).chords {
                assert!(!d.contains(c.plus()) && !d.contains(c.minus()), "{c:?}");
            }
        }
    }
}
