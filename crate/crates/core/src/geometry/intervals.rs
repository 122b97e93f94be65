/// Removes closed intervals `[p, q]` from the open interval `]lo, hi[` and
/// returns the remaining open intervals in increasing order.
///
/// A degenerate `[p, p]` splits an interval at `p`.
pub fn subtract_closed(lo: f64, hi: f64, removed: &mut [(f64, f64)]) -> Vec<(f64, f64)> {
    if !(lo < hi) {
        return Vec::new();
    }
    removed.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::new();
    let mut cursor = lo;
    let mut open_at_cursor = true;
    for &(p, q) in removed.iter() {
        if q < cursor || (q == cursor && !open_at_cursor) {
            continue;
        }
        if p >= hi {
            break;
        }
        if p > cursor {
            out.push((cursor, p));
        }
        if q >= cursor {
            cursor = q;
            open_at_cursor = false;
        }
        if cursor >= hi {
            return out;
        }
    }
    if cursor < hi {
        out.push((cursor, hi));
    }
    out
}

/// Clips the line `y + sθ` against the closed polygonal set
/// `{x : n_i·x ≤ c_i ∀i}`. Returns the closed parameter range, if any.
pub(crate) fn clip_halfplanes(
    y: [f64; 2],
    theta: [f64; 2],
    planes: &[([f64; 2], f64)],
) -> Option<(f64, f64)> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for &(n, c) in planes {
        let a = n[0] * theta[0] + n[1] * theta[1];
        let b = c - (n[0] * y[0] + n[1] * y[1]);
        if a == 0.0 {
            if b < 0.0 {
                return None;
            }
        } else if a > 0.0 {
            hi = hi.min(b / a);
        } else {
            lo = lo.max(b / a);
        }
        if lo > hi {
            return None;
        }
    }
    Some((lo, hi))
}

/// Like [`clip_halfplanes`] for the open set `{x : n_i·x < c_i ∀i}`.
/// Returns the open parameter range if it is non-empty.
pub(crate) fn clip_open_halfplanes(
    y: [f64; 2],
    theta: [f64; 2],
    planes: &[([f64; 2], f64)],
) -> Option<(f64, f64)> {
    for &(n, c) in planes {
        let a = n[0] * theta[0] + n[1] * theta[1];
        if a == 0.0 && c - (n[0] * y[0] + n[1] * y[1]) <= 0.0 {
            return None;
        }
    }
    clip_halfplanes(y, theta, planes).filter(|(lo, hi)| lo < hi)
}
