use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Point;
use crate::error::{Error, Result};

/// A unit vector of `S^{d-1}`, `d ∈ {1, 2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    c: Point,
    dim: u8,
}

impl Direction {
    /// Normalizes `(x, y)`. Fails on zero or non-finite input.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let n = x.hypot(y);
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidDirection(format!("({x}, {y})")));
        }
        Ok(Self {
            c: [x / n, y / n],
            dim: 2,
        })
    }

    pub fn from_angle(angle: f64) -> Self {
        // Snap axis directions so that closed-form branches see exact zeros.
        let (s, c) = angle.sin_cos();
        let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
        Self {
            c: [snap(c), snap(s)],
            dim: 2,
        }
    }

    pub fn e1() -> Self {
        Self {
            c: [1.0, 0.0],
            dim: 2,
        }
    }

    pub fn e2() -> Self {
        Self {
            c: [0.0, 1.0],
            dim: 2,
        }
    }

    /// `+1` or `-1` on the real line.
    pub fn line(positive: bool) -> Self {
        Self {
            c: [if positive { 1.0 } else { -1.0 }, 0.0],
            dim: 1,
        }
    }

    /// `n` equally spaced angles `2πk/n`.
    pub fn family(n: usize) -> Vec<Self> {
        (0..n)
            .map(|k| Self::from_angle(2.0 * PI * k as f64 / n as f64))
            .collect()
    }

    /// Both directions of `S^0`.
    pub fn line_family() -> Vec<Self> {
        vec![Self::line(true), Self::line(false)]
    }

    #[inline]
    pub fn components(&self) -> Point {
        self.c
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn angle(&self) -> f64 {
        self.c[1].atan2(self.c[0])
    }

    pub fn neg(&self) -> Self {
        Self {
            c: [-self.c[0] + 0.0, -self.c[1] + 0.0],
            dim: self.dim,
        }
    }

    /// `θ⊥ = (-θ₂, θ₁)`.
    #[inline]
    pub fn perp(&self) -> Point {
        [-self.c[1] + 0.0, self.c[0]]
    }

    #[inline]
    pub fn dot(&self, p: Point) -> f64 {
        self.c[0] * p[0] + self.c[1] * p[1]
    }

    /// Offset of the line through `p`, i.e. `p·θ⊥`.
    #[inline]
    pub fn offset_of(&self, p: Point) -> f64 {
        let q = self.perp();
        q[0] * p[0] + q[1] * p[1]
    }

    pub fn is_axis(&self) -> bool {
        self.c[0] == 0.0 || self.c[1] == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_norm_and_negation() {
        for d in Direction::family(32) {
            let [x, y] = d.components();
            assert!((x.hypot(y) - 1.0).abs() < 1e-12);
            let n = d.neg();
            assert_eq!(n.neg(), d);
            assert!((d.dot(n.components()) + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn axis_snapping() {
        let d = Direction::from_angle(PI / 2.0);
        assert_eq!(d.components(), [0.0, 1.0]);
        assert!(Direction::from_angle(PI).is_axis());
        assert!(Direction::new(0.0, 0.0).is_err());
    }

    #[test]
    fn offset_is_perpendicular_coordinate() {
        let d = Direction::e1();
        assert_eq!(d.offset_of([0.3, 0.7]), 0.7);
        assert_eq!(d.neg().offset_of([0.3, 0.7]), -0.7);
    }
}
