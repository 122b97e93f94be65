use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// One element `(c, d, m)` of `F_p`: `f_p` rises by `2^{-m}` affinely on
/// `[c, d]`. `gaps` lists the indices of the gaps contained in `[c, d]`,
/// sorted by position.
#[derive(Clone, Debug)]
struct Piece {
    c: f64,
    d: f64,
    m: u32,
    gaps: Vec<usize>,
}

/// The exact piecewise-affine function `f_p` of the generalized Cantor
/// staircase construction, stored through its breakpoints.
#[derive(Clone, Debug, Serialize)]
pub struct Staircase {
    /// Sorted `(t, f(t))`; `f` is affine between consecutive entries.
    pub breakpoints: Vec<(f64, f64)>,
    /// Number of refinement steps applied.
    pub p_max: u32,
    /// Whether further steps would leave the function unchanged.
    pub complete: bool,
}

impl Staircase {
    /// `f_{p_max}` for the given gaps `]a_i, b_i[ ⊂ ]α, β[`.
    pub fn new(gaps: &[(f64, f64)], alpha: f64, beta: f64, p_max: u32) -> Result<Self> {
        let mut builder = Builder::new(gaps, alpha, beta)?;
        for _ in 0..p_max {
            if !builder.step() {
                break;
            }
        }
        Ok(builder.snapshot(p_max))
    }

    /// Runs the construction until no piece contains a gap, so that the
    /// result is constant on every gap.
    pub fn complete(gaps: &[(f64, f64)], alpha: f64, beta: f64) -> Result<Self> {
        let mut builder = Builder::new(gaps, alpha, beta)?;
        let mut p = 0;
        while builder.step() {
            p += 1;
        }
        Ok(builder.snapshot(p))
    }

    /// `f_0, f_1, ..., f_{p_max}`.
    pub fn sequence(gaps: &[(f64, f64)], alpha: f64, beta: f64, p_max: u32) -> Result<Vec<Self>> {
        let mut builder = Builder::new(gaps, alpha, beta)?;
        let mut out = vec![builder.snapshot(0)];
        for p in 1..=p_max {
            builder.step();
            out.push(builder.snapshot(p));
        }
        Ok(out)
    }

    pub fn alpha(&self) -> f64 {
        self.breakpoints[0].0
    }

    pub fn beta(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1].0
    }

    /// `f(t)`, clamped to `0` left of `α` and `1` right of `β`.
    pub fn eval(&self, t: f64) -> f64 {
        let b = &self.breakpoints;
        if t <= b[0].0 {
            return 0.0;
        }
        if t >= b[b.len() - 1].0 {
            return 1.0;
        }
        let i = b.partition_point(|&(s, _)| s <= t);
        let (t0, f0) = b[i - 1];
        let (t1, f1) = b[i];
        if t1 == t0 {
            return f1;
        }
        f0 + (f1 - f0) * (t - t0) / (t1 - t0)
    }

    /// `f'(t)` away from breakpoints.
    pub fn slope(&self, t: f64) -> f64 {
        let b = &self.breakpoints;
        if t <= b[0].0 || t >= b[b.len() - 1].0 {
            return 0.0;
        }
        let i = b.partition_point(|&(s, _)| s <= t);
        let (t0, f0) = b[i - 1];
        let (t1, f1) = b[i];
        if t1 == t0 {
            0.0
        } else {
            (f1 - f0) / (t1 - t0)
        }
    }

    /// `sup |f - g|` over `[α, β]`, exact for piecewise-affine functions.
    pub fn sup_distance(&self, other: &Staircase) -> f64 {
        self.breakpoints
            .iter()
            .chain(&other.breakpoints)
            .map(|&(t, _)| (self.eval(t) - other.eval(t)).abs())
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "f"])?;
        for &(t, f) in &self.breakpoints {
            w.serialize((t, f))?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Builder<'a> {
    gaps: &'a [(f64, f64)],
    pieces: Vec<Piece>,
}

impl<'a> Builder<'a> {
    fn new(gaps: &'a [(f64, f64)], alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha < beta) {
            return Err(Error::InvalidParameter(format!(
                "staircase range [{alpha}, {beta}] is empty"
            )));
        }
        let mut order: Vec<usize> = (0..gaps.len()).collect();
        order.sort_by(|&i, &j| gaps[i].0.total_cmp(&gaps[j].0));
        for &i in &order {
            let (a, b) = gaps[i];
            if !(alpha < a && a < b && b < beta) {
                return Err(Error::GapOutsideRange(a, b, alpha, beta));
            }
        }
        for w in order.windows(2) {
            let (a0, b0) = gaps[w[0]];
            let (a1, b1) = gaps[w[1]];
            if b0 >= a1 {
                return Err(Error::OverlappingGaps(a0, b0, a1, b1));
            }
        }
        Ok(Self {
            gaps,
            pieces: vec![Piece {
                c: alpha,
                d: beta,
                m: 0,
                gaps: order,
            }],
        })
    }

    /// Applies `F_p → F_{p+1}`. Returns false when nothing was split.
    fn step(&mut self) -> bool {
        let mut changed = false;
        let mut next = Vec::with_capacity(2 * self.pieces.len());
        for piece in self.pieces.drain(..) {
            if piece.gaps.is_empty() {
                next.push(piece);
                continue;
            }
            changed = true;
            // Longest gap, smallest index on ties.
            let (pos, &pick) = piece
                .gaps
                .iter()
                .enumerate()
                .max_by(|(_, &i), (_, &j)| {
                    let li = self.gaps[i].1 - self.gaps[i].0;
                    let lj = self.gaps[j].1 - self.gaps[j].0;
                    li.total_cmp(&lj).then(j.cmp(&i))
                })
                .expect("non-empty");
            let (a, b) = self.gaps[pick];
            next.push(Piece {
                c: piece.c,
                d: a,
                m: piece.m + 1,
                gaps: piece.gaps[..pos].to_vec(),
            });
            next.push(Piece {
                c: b,
                d: piece.d,
                m: piece.m + 1,
                gaps: piece.gaps[pos + 1..].to_vec(),
            });
        }
        self.pieces = next;
        changed
    }

    fn snapshot(&self, p: u32) -> Staircase {
        let mut breakpoints = Vec::with_capacity(2 * self.pieces.len());
        let mut level = 0.0;
        for piece in &self.pieces {
            breakpoints.push((piece.c, level));
            level += 0.5f64.powi(piece.m as i32);
            breakpoints.push((piece.d, level));
        }
        // The masses 2^{-m} sum to one exactly in binary arithmetic.
        debug_assert_eq!(level, 1.0);
        Staircase {
            breakpoints,
            p_max: p,
            complete: self.pieces.iter().all(|piece| piece.gaps.is_empty()),
        }
    }
}
