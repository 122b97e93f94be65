use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which recursion generates the gaps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CantorScheme {
    /// `c = (2a + b)/3`, `d = (a + 2b)/3`.
    Third,
    /// Centered gap of length `ρ^{k+1}` at depth `k`.
    Rho,
}

impl std::str::FromStr for CantorScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "third" => Ok(Self::Third),
            "rho" => Ok(Self::Rho),
            other => Err(Error::UnknownName(format!("cantor scheme '{other}'"))),
        }
    }
}

/// The gap records `]c_m, d_m[` of a truncated Cantor construction,
/// `m = 1..2^{L+1}-1`, children of `m` being `2m` and `2m+1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CantorSpec {
    pub ratio: f64,
    pub level: u32,
    pub scheme: CantorScheme,
    gaps: Vec<(f64, f64)>,
}

impl CantorSpec {
    pub fn new(ratio: f64, level: u32, scheme: CantorScheme) -> Result<Self> {
        if !(ratio > 0.0 && ratio <= 1.0 / 3.0) {
            return Err(Error::InvalidRatio(ratio));
        }
        if !(1..=24).contains(&level) {
            return Err(Error::InvalidLevel(level));
        }
        let count = (1usize << (level + 1)) - 1;
        let mut gaps = Vec::with_capacity(count);
        let mut parents = vec![(0.0_f64, 1.0_f64)];
        for k in 0..=level {
            let half = 0.5 * ratio.powi(k as i32 + 1);
            let mut next = Vec::with_capacity(2 * parents.len());
            for &(a, b) in &parents {
                let (c, d) = match scheme {
                    CantorScheme::Third => ((2.0 * a + b) / 3.0, (a + 2.0 * b) / 3.0),
                    CantorScheme::Rho => {
                        let mid = 0.5 * (a + b);
                        (mid - half, mid + half)
                    }
                };
                gaps.push((c, d));
                next.push((a, c));
                next.push((d, b));
            }
            parents = next;
        }
        Ok(Self {
            ratio,
            level,
            scheme,
            gaps,
        })
    }

    pub fn middle_third(level: u32) -> Result<Self> {
        Self::new(1.0 / 3.0, level, CantorScheme::Third)
    }

    /// Gaps in index order `m = 1, 2, ...`.
    pub fn gaps(&self) -> &[(f64, f64)] {
        &self.gaps
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    /// `(c_m, d_m)` for `m ≥ 1`.
    pub fn gap(&self, m: usize) -> (f64, f64) {
        self.gaps[m - 1]
    }

    /// `(a_m, b_m)`, the interval whose middle part is gap `m`.
    pub fn interval(&self, m: usize) -> (f64, f64) {
        if m == 1 {
            return (0.0, 1.0);
        }
        let (pa, pb) = self.interval(m / 2);
        let (pc, pd) = self.gap(m / 2);
        if m.is_multiple_of(2) {
            (pa, pc)
        } else {
            (pd, pb)
        }
    }

    /// `k` such that `2^k ≤ m < 2^{k+1}`.
    pub fn depth(m: usize) -> u32 {
        usize::BITS - 1 - m.leading_zeros()
    }

    /// Gaps sorted by position.
    pub fn sorted_gaps(&self) -> Vec<(f64, f64)> {
        let mut g = self.gaps.clone();
        g.sort_by(|a, b| a.0.total_cmp(&b.0));
        g
    }

    pub fn total_gap_length(&self) -> f64 {
        crate::quadrature::pairwise_sum(&self.gaps.iter().map(|(c, d)| d - c).collect::<Vec<_>>())
    }

    /// `Σ_{k=0}^{L} 2^k ρ^{k+1}`.
    pub fn predicted_gap_length(&self) -> f64 {
        (0..=self.level)
            .map(|k| 2f64.powi(k as i32) * self.ratio.powi(k as i32 + 1))
            .sum()
    }

    /// `ρ/(1 - 2ρ)`, the measure of the full complement.
    pub fn limit_gap_length(&self) -> f64 {
        self.ratio / (1.0 - 2.0 * self.ratio)
    }

    /// Writes rows `(m, c_m, d_m, depth)`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["m", "c", "d", "depth"])?;
        for (i, (c, d)) in self.gaps.iter().enumerate() {
            let m = i + 1;
            w.serialize((m, c, d, Self::depth(m)))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// The `2^{L+1}-1` gaps `(c_m, d_m)` in index order.
pub fn cantor_gaps(ratio: f64, level: u32, scheme: CantorScheme) -> Result<Vec<(f64, f64)>> {
    Ok(CantorSpec::new(ratio, level, scheme)?.gaps)
}

/// Middle-third gaps up to the given depth, sorted by position.
pub(crate) fn middle_third_gaps_by_position(level: u32) -> Vec<(f64, f64)> {
    CantorSpec::middle_third(level.clamp(1, 24))
        .map(|s| s.sorted_gaps())
        .unwrap_or_default()
}

/// Distance from `x` to the middle-third Cantor set, by descent into the
/// sub-interval containing `x` until it lands in a gap.
pub fn cantor_distance(x: f64) -> f64 {
    if x <= 0.0 {
        return -x;
    }
    if x >= 1.0 {
        return x - 1.0;
    }
    let (mut a, mut b) = (0.0_f64, 1.0_f64);
    while b - a > 1e-15 {
        let c = (2.0 * a + b) / 3.0;
        let d = (a + 2.0 * b) / 3.0;
        if x <= c {
            b = c;
        } else if x >= d {
            a = d;
        } else {
            return (x - c).min(d - x);
        }
    }
    0.0
}

pub fn cantor_contains(x: f64) -> bool {
    cantor_distance(x) == 0.0
}
