use serde::{Deserialize, Serialize};

use super::gauss::gauss_legendre;
use crate::geometry::{Direction, Domain};

/// How offsets are distributed inside each panel between breakpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OffsetRule {
    /// Composite midpoint rule.
    Midpoint,
    /// Composite Gauss–Legendre with the given order per panel.
    Gauss(usize),
}

/// Weighted offsets `(r, Δr)` covering a range of lines.
#[derive(Clone, Debug, PartialEq)]
pub struct OffsetGrid {
    pub nodes: Vec<(f64, f64)>,
}

impl OffsetGrid {
    /// Roughly `n` nodes over `[lo, hi]`, with panel boundaries at every
    /// breakpoint inside the range.
    pub fn build(lo: f64, hi: f64, breakpoints: &[f64], n: usize, rule: OffsetRule) -> Self {
        Self::pair(lo, hi, breakpoints, n, rule).0
    }

    /// The grid for `n` together with the grid that has half as many
    /// sub-panels in every panel.
    pub fn pair(lo: f64, hi: f64, breakpoints: &[f64], n: usize, rule: OffsetRule) -> (Self, Self) {
        if !(hi > lo) {
            let g = Self {
                nodes: vec![(lo, 1.0)],
            };
            return (g.clone(), g);
        }
        let mut cuts = vec![lo];
        cuts.extend(breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        // Merge panels that are negligibly thin.
        let min_len = (hi - lo) * 1e-12;
        let mut merged = vec![cuts[0]];
        for &c in &cuts[1..] {
            if c - merged[merged.len() - 1] > min_len {
                merged.push(c);
            } else {
                let last = merged.len() - 1;
                merged[last] = c;
            }
        }
        let cuts = merged;
        let per_node = match rule {
            OffsetRule::Midpoint => 1,
            OffsetRule::Gauss(q) => q,
        };
        let base = ((n / 2).max(1) / per_node).max(1);
        let total = hi - lo;
        let coarse: Vec<usize> = cuts
            .windows(2)
            .map(|w| ((base as f64 * (w[1] - w[0]) / total).round() as usize).max(1))
            .collect();
        let fine: Vec<usize> = coarse.iter().map(|c| 2 * c).collect();
        (
            Self::from_counts(&cuts, &fine, rule),
            Self::from_counts(&cuts, &coarse, rule),
        )
    }

    fn from_counts(cuts: &[f64], counts: &[usize], rule: OffsetRule) -> Self {
        let mut nodes = Vec::new();
        for (w, &k) in cuts.windows(2).zip(counts) {
            let h = (w[1] - w[0]) / k as f64;
            for j in 0..k {
                let a = w[0] + j as f64 * h;
                match rule {
                    OffsetRule::Midpoint => nodes.push((a + 0.5 * h, h)),
                    OffsetRule::Gauss(q) => {
                        let (x, wt) = gauss_legendre(q);
                        for (xi, wi) in x.iter().zip(wt) {
                            nodes.push((a + 0.5 * h * (1.0 + xi), 0.5 * h * wi));
                        }
                    }
                }
            }
        }
        Self { nodes }
    }

    /// The grid of `domain` for direction `θ` at resolution `n`.
    pub fn for_domain(domain: &Domain, theta: Direction, n: usize, rule: OffsetRule) -> Self {
        Self::pair_for_domain(domain, theta, n, rule).0
    }

    /// Fine and coarse grids of `domain`; a single line in 1D.
    pub fn pair_for_domain(
        domain: &Domain,
        theta: Direction,
        n: usize,
        rule: OffsetRule,
    ) -> (Self, Self) {
        if domain.dim() == 1 {
            let g = Self {
                nodes: vec![(0.0, 1.0)],
            };
            return (g.clone(), g);
        }
        let (lo, hi) = domain.offset_range(theta);
        Self::pair(lo, hi, &domain.offset_breakpoints(theta), n, rule)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_cover_range() {
        for rule in [OffsetRule::Midpoint, OffsetRule::Gauss(4)] {
            let g = OffsetGrid::build(-1.0, 2.0, &[0.0, 0.3, 5.0], 100, rule);
            let s: f64 = g.nodes.iter().map(|n| n.1).sum();
            assert!((s - 3.0).abs() < 1e-13);
            assert!(g.nodes.windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    #[test]
    fn levels_share_panels() {
        let (fine, coarse) = OffsetGrid::pair(0.0, 1.0, &[0.37], 64, OffsetRule::Midpoint);
        let cut = |g: &OffsetGrid| {
            g.nodes
                .iter()
                .filter(|n| n.0 < 0.37)
                .map(|n| n.1)
                .sum::<f64>()
        };
        assert!((cut(&fine) - 0.37).abs() < 1e-15);
        assert!((cut(&coarse) - 0.37).abs() < 1e-15);
        assert_eq!(fine.len(), 2 * coarse.len());
        assert_eq!(fine.len(), 64);
    }

    #[test]
    fn midpoint_exact_for_linear() {
        let g = OffsetGrid::build(0.0, 2.0, &[], 10, OffsetRule::Midpoint);
        let s: f64 = g.nodes.iter().map(|(r, w)| r * w).sum();
        assert!((s - 2.0).abs() < 1e-14);
    }
}
