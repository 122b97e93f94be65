//! Fubini-by-chords integration over a domain and over its directional
//! boundary measures, with a Monte-Carlo cross-check.
//!
//! Every integral is computed on two nested offset grids (`N` and `N/2`
//! lines per panel layout); the difference is the reported error and the
//! midpoint-rule Richardson combination is reported as `extrapolated`.
//! Reductions are pairwise over a fixed line order, so results do not
//! depend on the number of worker threads.

mod gauss;
mod grid;
mod montecarlo;

pub use gauss::{gauss, gauss_legendre};
pub use grid::{OffsetGrid, OffsetRule};
pub use montecarlo::{monte_carlo_boundary, monte_carlo_volume, McEstimate};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, Chord, Direction, Domain, Point};

/// Resolution of the chord quadrature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Number of lines `N_y` on the fine grid.
    pub ny: usize,
    /// Gauss–Legendre order along each chord panel.
    pub gauss: usize,
    pub mc_samples: usize,
    pub seed: u64,
    /// Placement of lines inside each offset panel.
    pub rule: OffsetRule,
    /// Restricts the offsets to `[lo, hi]` when set.
    pub window: Option<(f64, f64)>,
    /// Chord panels are at most this fraction of the domain diameter.
    pub panel_fraction: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            ny: 4096,
            gauss: 8,
            mc_samples: 200_000,
            seed: 0x5eed,
            rule: OffsetRule::Gauss(2),
            window: None,
            panel_fraction: 1.0 / 32.0,
        }
    }
}

impl QuadratureSpec {
    pub fn with_ny(ny: usize) -> Self {
        Self {
            ny,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ny < 2 {
            return Err(Error::InvalidParameter(format!("ny = {} < 2", self.ny)));
        }
        if ![4, 8, 16].contains(&self.gauss) {
            return Err(Error::InvalidParameter(format!(
                "gauss = {} not in {{4, 8, 16}}",
                self.gauss
            )));
        }
        if let OffsetRule::Gauss(q) = self.rule {
            if !(1..=64).contains(&q) {
                return Err(Error::InvalidParameter(format!("offset Gauss order {q}")));
            }
        }
        if !(self.panel_fraction > 0.0 && self.panel_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "panel fraction {}",
                self.panel_fraction
            )));
        }
        Ok(())
    }

    /// Fine and coarse offset grids for `domain` in direction `θ`.
    pub fn grids(&self, domain: &Domain, theta: Direction) -> (OffsetGrid, OffsetGrid) {
        self.grids_graded(domain, theta, &[])
    }

    /// As [`grids`](Self::grids), with extra panel boundaries at the given
    /// offsets. Boundaries accumulate geometrically towards offsets marked
    /// as graded.
    pub fn grids_graded(
        &self,
        domain: &Domain,
        theta: Direction,
        extra: &[(f64, bool)],
    ) -> (OffsetGrid, OffsetGrid) {
        if domain.dim() == 1 {
            return OffsetGrid::pair_for_domain(domain, theta, self.ny, self.rule);
        }
        let (a, b) = domain.offset_range(theta);
        let (lo, hi) = match self.window {
            Some((lo, hi)) => (lo.max(a), hi.min(b)),
            None => (a, b),
        };
        if !(hi > lo) {
            let empty = OffsetGrid { nodes: Vec::new() };
            return (empty.clone(), empty);
        }
        let mut breaks = domain.offset_breakpoints(theta);
        let width = b - a;
        for &(r, graded) in extra {
            let mut h = 0.5 * width;
            while graded && h > 1e-13 * width {
                breaks.push(r - h);
                breaks.push(r + h);
                h *= 0.5;
            }
            breaks.push(r);
        }
        OffsetGrid::pair(lo, hi, &breaks, self.ny, self.rule)
    }

    /// Longest chord panel for `domain`.
    pub fn max_panel(&self, domain: &Domain) -> f64 {
        self.panel_fraction * domain.diameter().max(1e-300)
    }
}

/// A quadrature value with its error estimate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    /// `|I_N - I_{N/2}|` plus a rounding floor; never negative.
    pub error: f64,
    pub extrapolated: f64,
    /// Number of fine-grid lines that carried a resolution warning.
    pub flags: usize,
}

impl IntegralResult {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error: 0.0,
            extrapolated: value,
            flags: 0,
        }
    }
}

/// Pairwise (tree) summation.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 16 {
        return x.iter().sum();
    }
    let (a, b) = x.split_at(x.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// A point where a chord integrand is split; graded points also attract a
/// geometric refinement on both sides.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cut {
    pub s: f64,
    pub graded: bool,
}

const GRADING_RATIO: f64 = 0.5;
const GRADING_STEPS: usize = 192;

/// `∫_a^b f` by composite Gauss–Legendre, split at `cuts` and graded
/// geometrically towards graded cuts (which may sit at `a` or `b`).
pub fn chord_integral<const K: usize, F>(
    a: f64,
    b: f64,
    cuts: &[Cut],
    order: usize,
    max_panel: f64,
    mut f: F,
) -> [f64; K]
where
    F: FnMut(f64) -> [f64; K],
{
    let mut pts: Vec<Cut> = vec![Cut {
        s: a,
        graded: false,
    }];
    let mut inner: Vec<Cut> = cuts
        .iter()
        .copied()
        .filter(|c| c.s > a && c.s < b)
        .collect();
    inner.sort_by(|x, y| x.s.total_cmp(&y.s));
    pts.extend(inner);
    pts.push(Cut {
        s: b,
        graded: false,
    });
    for c in cuts {
        if c.graded && c.s == a {
            pts[0].graded = true;
        }
        if c.graded && c.s == b {
            let n = pts.len();
            pts[n - 1].graded = true;
        }
    }
    let mut acc = [0.0; K];
    let mut add = |lo: f64, hi: f64, acc: &mut [f64; K]| {
        let len = hi - lo;
        if len <= 0.0 {
            return;
        }
        let panels = ((len / max_panel).ceil() as usize).clamp(1, 1 << 16);
        let h = len / panels as f64;
        let (x, w) = gauss_legendre(order);
        for p in 0..panels {
            let m = lo + (p as f64 + 0.5) * h;
            for (xi, wi) in x.iter().zip(w) {
                let v = f(m + 0.5 * h * xi);
                for k in 0..K {
                    acc[k] += 0.5 * h * wi * v[k];
                }
            }
        }
    };
    for w in pts.windows(2) {
        let (l, r) = (w[0], w[1]);
        match (l.graded, r.graded) {
            (false, false) => add(l.s, r.s, &mut acc),
            (true, false) => graded(l.s, r.s, &mut acc, &mut add),
            (false, true) => graded(r.s, l.s, &mut acc, &mut add),
            (true, true) => {
                let m = 0.5 * (l.s + r.s);
                graded(l.s, m, &mut acc, &mut add);
                graded(r.s, m, &mut acc, &mut add);
            }
        }
    }
    acc
}

/// Pieces `[s + (t-s)ρ^{k+1}, s + (t-s)ρ^k]` accumulating towards `s`.
fn graded<const K: usize, A>(s: f64, t: f64, acc: &mut [f64; K], add: &mut A)
where
    A: FnMut(f64, f64, &mut [f64; K]),
{
    let d = t - s;
    let mut outer = 1.0;
    for _ in 0..GRADING_STEPS {
        let inner = outer * GRADING_RATIO;
        let (p, q) = (s + d * inner, s + d * outer);
        add(p.min(q), p.max(q), acc);
        outer = inner;
    }
}

/// Integrates `f` over every chord of every line of the grid, weighting
/// each line by its offset weight. `f` returns `K` values at once so that
/// related quantities share one pass over the geometry.
pub fn integrate_chords<const K: usize, F>(
    domain: &Domain,
    theta: Direction,
    spec: &QuadratureSpec,
    f: F,
) -> Result<[IntegralResult; K]>
where
    F: Fn(&Chord) -> Result<[f64; K]> + Sync,
{
    integrate_chords_graded(domain, theta, spec, &[], f)
}

/// As [`integrate_chords`], with the offset grid split at the offsets in
/// `extra` (lines along which the integrand is not smooth) and graded
/// towards those marked `true` (lines along which it blows up).
pub fn integrate_chords_graded<const K: usize, F>(
    domain: &Domain,
    theta: Direction,
    spec: &QuadratureSpec,
    extra: &[(f64, bool)],
    f: F,
) -> Result<[IntegralResult; K]>
where
    F: Fn(&Chord) -> Result<[f64; K]> + Sync,
{
    spec.validate()?;
    let (fine, coarse) = spec.grids_graded(domain, theta, extra);
    let (vf, af, flags) = sweep(domain, theta, &fine, &f)?;
    let (vc, _, _) = if domain.dim() == 1 {
        (vf, af, 0)
    } else {
        sweep(domain, theta, &coarse, &f)?
    };
    let mut out = [IntegralResult::default(); K];
    for k in 0..K {
        let floor = 64.0 * f64::EPSILON * af[k];
        let diff = vf[k] - vc[k];
        out[k] = IntegralResult {
            value: vf[k],
            error: diff.abs() + floor,
            extrapolated: vf[k] + diff / 3.0,
            flags,
        };
    }
    Ok(out)
}

type Sweep<const K: usize> = ([f64; K], [f64; K], usize);

fn sweep<const K: usize, F>(
    domain: &Domain,
    theta: Direction,
    grid: &OffsetGrid,
    f: &F,
) -> Result<Sweep<K>>
where
    F: Fn(&Chord) -> Result<[f64; K]> + Sync,
{
    let lines: Vec<([f64; K], bool)> = grid
        .nodes
        .par_iter()
        .map(|&(r, w)| {
            let set = domain.chords(theta, r);
            let mut acc = [0.0; K];
            for c in &set.chords {
                let v = f(c)?;
                for k in 0..K {
                    acc[k] += v[k];
                }
            }
            for a in acc.iter_mut() {
                *a *= w;
            }
            Ok((acc, set.warning))
        })
        .collect::<Result<_>>()?;
    let mut values = [0.0; K];
    let mut abs = [0.0; K];
    let mut col = vec![0.0; lines.len()];
    for k in 0..K {
        for (i, (v, _)) in lines.iter().enumerate() {
            col[i] = v[k];
        }
        values[k] = pairwise_sum(&col);
        if !values[k].is_finite() {
            return Err(Error::UnresolvedSingularity);
        }
        for c in col.iter_mut() {
            *c = c.abs();
        }
        abs[k] = pairwise_sum(&col);
    }
    let flags = lines.iter().filter(|(_, w)| *w).count();
    Ok((values, abs, flags))
}

/// `∫_Ω f dx`, slicing along `e₁` (or `+1` in 1D).
pub fn volume_integral<F>(domain: &Domain, f: F, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: Fn(Point) -> f64 + Sync,
{
    let theta = if domain.dim() == 1 {
        Direction::line(true)
    } else {
        Direction::e1()
    };
    volume_integral_along(domain, theta, f, spec)
}

/// `∫_Ω f dx`, slicing along `θ`.
pub fn volume_integral_along<F>(
    domain: &Domain,
    theta: Direction,
    f: F,
    spec: &QuadratureSpec,
) -> Result<IntegralResult>
where
    F: Fn(Point) -> f64 + Sync,
{
    let order = spec.gauss;
    let max_panel = spec.max_panel(domain);
    let [r] = integrate_chords(domain, theta, spec, |c| {
        Ok(chord_integral(
            c.alpha,
            c.beta,
            &[],
            order,
            max_panel,
            |s| [f(c.point(s))],
        ))
    })?;
    Ok(r)
}

/// `∫ g dμ_θ`: the plus end of every chord carries the weight `(β - α)Δr`.
pub fn boundary_integral<G>(
    domain: &Domain,
    theta: Direction,
    g: G,
    spec: &QuadratureSpec,
) -> Result<IntegralResult>
where
    G: Fn(&BoundaryPoint) -> f64 + Sync,
{
    let [r] = integrate_chords(domain, theta, spec, |c| {
        Ok([c.length() * g(&c.plus_point())])
    })?;
    Ok(r)
}
