use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{BoundaryPoint, Direction, Domain, Point};

/// A Monte-Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

fn sample_box(domain: &Domain, n: usize, seed: u64, mut h: impl FnMut(Point) -> f64) -> McEstimate {
    let (lo, hi) = domain.bbox();
    let one_d = domain.dim() == 1;
    let vol = if one_d {
        hi[0] - lo[0]
    } else {
        (hi[0] - lo[0]) * (hi[1] - lo[1])
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let x = rng.gen_range(lo[0]..hi[0]);
        let y = if one_d {
            0.0
        } else {
            rng.gen_range(lo[1]..hi[1])
        };
        let p = [x, y];
        let v = if domain.contains(p) { vol * h(p) } else { 0.0 };
        s += v;
        s2 += v * v;
    }
    let nf = n as f64;
    let mean = s / nf;
    let var = (s2 / nf - mean * mean).max(0.0);
    McEstimate {
        value: mean,
        std_error: (var / nf).sqrt(),
        samples: n,
    }
}

/// `∫_Ω f dx` by uniform sampling of the bounding box.
pub fn monte_carlo_volume(
    domain: &Domain,
    f: impl Fn(Point) -> f64,
    samples: usize,
    seed: u64,
) -> McEstimate {
    sample_box(domain, samples, seed, f)
}

/// `∫ g dμ_θ = ∫_Ω g(Φ_θ(x)) dx` by sampling `x` and casting the ray.
pub fn monte_carlo_boundary(
    domain: &Domain,
    theta: Direction,
    g: impl Fn(&BoundaryPoint) -> f64,
    samples: usize,
    seed: u64,
) -> McEstimate {
    sample_box(domain, samples, seed, |x| {
        match domain.exit_point(x, theta) {
            Ok(z) => g(&z),
            Err(_) => 0.0,
        }
    })
}
