//! Exact line/domain intersections for each domain kind. Every function
//! returns the open parameter intervals `]α, β[` of the line `y + sθ`
//! inside the domain, unsorted and possibly containing degenerate pieces.

use super::intervals::{clip_halfplanes, clip_open_halfplanes, subtract_closed};
use super::{cross, Point};
use crate::fractal::cantor::{cantor_contains, middle_third_gaps_by_position};

/// Cantor intervals narrower than this are not descended into when
/// subtracting gap triangles; the pieces they would cut off are far below
/// `EPS_GEO`.
const CONE_MIN_WIDTH: f64 = 1e-12;

pub(crate) fn polygon(vertices: &[Point], y: Point, theta: Point) -> Vec<(f64, f64)> {
    let perp = [-theta[1], theta[0]];
    let r = perp[0] * y[0] + perp[1] * y[1];
    let n = vertices.len();
    let mut crossings = Vec::new();
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        let np = perp[0] * p[0] + perp[1] * p[1];
        let nq = perp[0] * q[0] + perp[1] * q[1];
        if (np > r) != (nq > r) {
            let tp = theta[0] * p[0] + theta[1] * p[1];
            let tq = theta[0] * q[0] + theta[1] * q[1];
            let lambda = (r - np) / (nq - np);
            crossings.push(tp + lambda * (tq - tp));
        }
    }
    crossings.sort_by(f64::total_cmp);
    crossings.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

/// Splits intervals where the line crosses a slit segment, and removes the
/// overlap when the line runs along one.
pub(crate) fn cut_slits(
    intervals: Vec<(f64, f64)>,
    slits: &[[Point; 2]],
    y: Point,
    theta: Point,
) -> Vec<(f64, f64)> {
    if slits.is_empty() {
        return intervals;
    }
    let perp = [-theta[1], theta[0]];
    let r = perp[0] * y[0] + perp[1] * y[1];
    let mut removed = Vec::new();
    for [p, q] in slits {
        let np = perp[0] * p[0] + perp[1] * p[1] - r;
        let nq = perp[0] * q[0] + perp[1] * q[1] - r;
        let tp = theta[0] * p[0] + theta[1] * p[1];
        let tq = theta[0] * q[0] + theta[1] * q[1];
        if np == 0.0 && nq == 0.0 {
            removed.push((tp.min(tq), tp.max(tq)));
        } else if (np <= 0.0 && nq >= 0.0) || (np >= 0.0 && nq <= 0.0) {
            let lambda = np / (np - nq);
            let s = tp + lambda * (tq - tp);
            removed.push((s, s));
        }
    }
    subtract_each(intervals, &mut removed)
}

fn subtract_each(intervals: Vec<(f64, f64)>, removed: &mut [(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for (a, b) in intervals {
        out.extend(subtract_closed(a, b, removed));
    }
    out
}

/// `{|x₁| < x₂³, 0 < x₂ < 1}`.
pub(crate) fn cusp(y: Point, theta: Point) -> Vec<(f64, f64)> {
    let inside = |p: Point| p[1] > 0.0 && p[1] < 1.0 && p[0].abs() < p[1] * p[1] * p[1];
    if theta[1] == 0.0 {
        let h = y[1];
        if !(h > 0.0 && h < 1.0) {
            return Vec::new();
        }
        let w = h * h * h;
        let (a, b) = ((-w - y[0]) / theta[0], (w - y[0]) / theta[0]);
        return vec![(a.min(b), a.max(b))];
    }
    // Parametrize by u = x₂ ∈ ]0, 1[; then x₁ = A + B u.
    let b = theta[0] / theta[1];
    let a = y[0] - y[1] * b;
    let mut us = vec![0.0, 1.0];
    // u³ - B u - A = 0 and u³ + B u + A = 0 on [0, 1].
    us.extend(depressed_cubic_roots_in_unit(-b, -a));
    us.extend(depressed_cubic_roots_in_unit(b, a));
    let mut ss: Vec<f64> = us.iter().map(|&u| (u - y[1]) / theta[1]).collect();
    ss.sort_by(f64::total_cmp);
    ss.dedup();
    let mut out = Vec::new();
    for w in ss.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if w[1] > w[0] && inside([y[0] + mid * theta[0], y[1] + mid * theta[1]]) {
            out.push((w[0], w[1]));
        }
    }
    out
}

/// Real roots of `u³ + p u + q` in `[0, 1]`, bracketed on monotone pieces
/// and refined by bisection to full precision.
fn depressed_cubic_roots_in_unit(p: f64, q: f64) -> Vec<f64> {
    let f = |u: f64| (u * u + p) * u + q;
    let mut knots = vec![0.0];
    if p < 0.0 {
        let c = (-p / 3.0).sqrt();
        if c > 0.0 && c < 1.0 {
            knots.push(c);
        }
    }
    knots.push(1.0);
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (f(lo), f(hi));
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        if fhi == 0.0 {
            roots.push(hi);
            continue;
        }
        if flo.signum() == fhi.signum() {
            continue;
        }
        let rising = fhi > flo;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = f(mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (fm > 0.0) == rising {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots
}

/// `Ω_C = {0 < x₂ < 1, dist(x₁, C) < x₂}` written as the strip minus the
/// closed triangles under every middle-third gap and the two outer wedges.
pub(crate) fn cone_union(y: Point, theta: Point) -> Vec<(f64, f64)> {
    let strip = [([0.0, -1.0], 0.0), ([0.0, 1.0], 1.0)];
    let (lo, hi) = match clip_halfplanes(y, theta, &strip) {
        Some(r) => r,
        None => return Vec::new(),
    };
    let mut removed = Vec::new();
    // x₁ + x₂ ≤ 0 and x₂ - x₁ ≤ -1.
    for plane in [([1.0, 1.0], 0.0), ([-1.0, 1.0], -1.0)] {
        if let Some(r) = clip_halfplanes(y, theta, &[plane]) {
            removed.push(r);
        }
    }
    cut_gap_triangles(y, theta, 0.0, 1.0, &mut removed);
    subtract_closed(lo, hi, &mut removed)
}

fn cut_gap_triangles(y: Point, theta: Point, a: f64, b: f64, removed: &mut Vec<(f64, f64)>) {
    let w = b - a;
    // All triangles of gaps inside [a, b] lie in [a, b] × [0, w/6].
    let bx = [
        ([-1.0, 0.0], -a),
        ([1.0, 0.0], b),
        ([0.0, -1.0], 0.0),
        ([0.0, 1.0], w / 6.0),
    ];
    if clip_halfplanes(y, theta, &bx).is_none() {
        return;
    }
    let c = a + w / 3.0;
    let d = a + 2.0 * w / 3.0;
    let tri = [([0.0, -1.0], 0.0), ([-1.0, 1.0], -c), ([1.0, 1.0], d)];
    if let Some(r) = clip_halfplanes(y, theta, &tri) {
        removed.push(r);
    }
    if w / 3.0 > CONE_MIN_WIDTH {
        cut_gap_triangles(y, theta, a, c, removed);
        cut_gap_triangles(y, theta, d, b, removed);
    }
}

/// `Ω_C ∪ ψ(Ω_C)` with `ψ(x₁, x₂) = (x₁, -x₂)`.
pub(crate) fn bicone(y: Point, theta: Point) -> Vec<(f64, f64)> {
    let mut out = cone_union(y, theta);
    out.extend(cone_union([y[0], -y[1]], [theta[0], -theta[1]]));
    out
}

/// Removes `C_{1/3} × {0}` from the given intervals.
pub(crate) fn cut_cantor_slit(
    intervals: Vec<(f64, f64)>,
    y: Point,
    theta: Point,
    level: u32,
) -> Vec<(f64, f64)> {
    if theta[1] != 0.0 {
        let s = -y[1] / theta[1];
        let x1 = y[0] + s * theta[0];
        if cantor_contains(x1) {
            return subtract_each(intervals, &mut [(s, s)]);
        }
        return intervals;
    }
    if y[1] != 0.0 {
        return intervals;
    }
    // The line is the x₁-axis itself: keep only the complement of C.
    let to_s = |x: f64| (x - y[0]) / theta[0];
    let (s0, s1) = (to_s(0.0), to_s(1.0));
    let mut removed = vec![(s0.min(s1), s0.max(s1))];
    let mut out = subtract_each(intervals.clone(), &mut removed);
    for (c, d) in middle_third_gaps_by_position(level) {
        let (p, q) = (to_s(c), to_s(d));
        let (p, q) = (p.min(q), p.max(q));
        for &(a, b) in &intervals {
            let (lo, hi) = (p.max(a), q.min(b));
            if lo < hi {
                out.push((lo, hi));
            }
        }
    }
    out
}

pub(crate) fn disk(center: Point, radius: f64, y: Point, theta: Point) -> Vec<(f64, f64)> {
    let d = [y[0] - center[0], y[1] - center[1]];
    let b = d[0] * theta[0] + d[1] * theta[1];
    let c = d[0] * d[0] + d[1] * d[1] - radius * radius;
    let disc = b * b - c;
    if disc <= 0.0 {
        return Vec::new();
    }
    let h = disc.sqrt();
    vec![(-b - h, -b + h)]
}

/// `(]0,1[ × ]-1,0[) ∪ ⋃ (]c,d[ × ]-1,1[)` over the sorted gap list.
pub(crate) fn cantor_comb(gaps: &[(f64, f64)], y: Point, theta: Point) -> Vec<(f64, f64)> {
    let band = [([0.0, -1.0], 1.0), ([0.0, 1.0], 1.0)];
    let Some((s0, s1)) = clip_open_halfplanes(y, theta, &band) else {
        return Vec::new();
    };
    let mut pieces = Vec::new();
    let base = [([-1.0, 0.0], 0.0), ([1.0, 0.0], 1.0), ([0.0, 1.0], 0.0)];
    pieces.extend(clip_open_halfplanes(
        y,
        theta,
        &[band[0], base[0], base[1], base[2]],
    ));
    // Only gaps meeting the x₁-range of the line inside the band matter.
    let x_at = |s: f64| y[0] + s * theta[0];
    let (xa, xb) = if s0.is_finite() && s1.is_finite() {
        let (p, q) = (x_at(s0), x_at(s1));
        (p.min(q), p.max(q))
    } else {
        (f64::NEG_INFINITY, f64::INFINITY)
    };
    let first = gaps.partition_point(|&(_, d)| d <= xa);
    for &(c, d) in &gaps[first..] {
        if c >= xb {
            break;
        }
        let strip = [band[0], band[1], ([-1.0, 0.0], -c), ([1.0, 0.0], d)];
        pieces.extend(clip_open_halfplanes(y, theta, &strip));
    }
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
    for (a, b) in pieces {
        match out.last_mut() {
            Some(last) if a < last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

pub(crate) fn on_segment(x: Point, p: Point, q: Point) -> bool {
    let e = [q[0] - p[0], q[1] - p[1]];
    let v = [x[0] - p[0], x[1] - p[1]];
    let scale = e[0].abs().max(e[1].abs()).max(1.0);
    if cross(e, v).abs() > 1e-14 * scale * scale {
        return false;
    }
    let t = e[0] * v[0] + e[1] * v[1];
    t >= 0.0 && t <= e[0] * e[0] + e[1] * e[1]
}
