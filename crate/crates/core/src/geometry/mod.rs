//! Domains, directions and the ray kernel.
//!
//! Every domain answers two questions exactly: whether a point is inside,
//! and what the maximal open intervals of a line `y + s θ` inside it are.
//! Lines are addressed by a direction `θ` and a scalar offset `r` along
//! `θ⊥ = (-θ₂, θ₁)`, so the base point of a line is `y = r θ⊥` and
//! `s = x·θ` is the position along it.

mod direction;
mod domain;
mod intervals;
mod kernels;
pub mod spec;

pub use direction::Direction;
pub use domain::{ChordSet, Domain, IntervalUnion, Polygon};
pub use intervals::subtract_closed;

use serde::{Deserialize, Serialize};

/// A point of the plane. One-dimensional domains use the first coordinate
/// and keep the second at zero.
pub type Point = [f64; 2];

/// Chords shorter than this, relative to the size of their endpoint
/// parameters (capped at 1), are discarded.
pub const EPS_GEO: f64 = 1e-10;

/// Length below which a chord `]α, β[` is rounding noise:
/// `EPS_GEO·min(1, max(|α|, |β|))`.
#[inline]
pub fn length_guard(alpha: f64, beta: f64) -> f64 {
    EPS_GEO * alpha.abs().max(beta.abs()).min(1.0)
}

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    norm([a[0] - b[0], a[1] - b[1]])
}

#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// A maximal open interval `]α, β[` of the line `y + sθ` inside a domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chord {
    pub theta: Direction,
    /// Offset of the line along `θ⊥`.
    pub offset: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Chord {
    pub fn base(&self) -> Point {
        let p = self.theta.perp();
        [self.offset * p[0], self.offset * p[1]]
    }

    #[inline]
    pub fn point(&self, s: f64) -> Point {
        let p = self.theta.perp();
        let t = self.theta.components();
        [self.offset * p[0] + s * t[0], self.offset * p[1] + s * t[1]]
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.beta - self.alpha
    }

    /// `y + βθ`, the exit point in direction θ.
    pub fn plus(&self) -> Point {
        self.point(self.beta)
    }

    /// `y + αθ`, the exit point in direction −θ.
    pub fn minus(&self) -> Point {
        self.point(self.alpha)
    }

    pub fn plus_point(&self) -> BoundaryPoint {
        BoundaryPoint {
            coords: self.plus(),
            side: self.theta,
        }
    }

    pub fn minus_point(&self) -> BoundaryPoint {
        BoundaryPoint {
            coords: self.minus(),
            side: self.theta.neg(),
        }
    }

    /// The same set of points traversed in the opposite direction.
    pub fn reversed(&self) -> Chord {
        Chord {
            theta: self.theta.neg(),
            offset: -self.offset,
            alpha: -self.beta,
            beta: -self.alpha,
        }
    }
}

/// A boundary point together with the direction it was reached from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub coords: Point,
    /// `z ∈ ∂_side Ω`.
    pub side: Direction,
}
