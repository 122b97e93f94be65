//! Directional boundary measures `μ_θ` as weighted atom clouds, with the
//! closed-form density on polygons, the reflection identity and the
//! sup-over-directions norm.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fractal::cantor_contains;
use crate::geometry::{
    cross, dist, dot, norm, BoundaryPoint, Chord, Direction, Domain, Point, Polygon,
};
use crate::quadrature::{gauss, pairwise_sum, IntegralResult, OffsetGrid, QuadratureSpec};

/// One atom of `μ_θ`: the plus end of a chord on one grid line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub z: BoundaryPoint,
    /// `(β - α)·Δr`.
    pub weight: f64,
    /// `ℓ_{-θ}(z) = β - α`.
    pub ell: f64,
    /// `ẑ = Φ_{-θ}(z)`.
    pub opposite: Point,
    pub chord: Chord,
}

/// A discretization of `μ_θ` on the fine and the coarse offset grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DirectionalMeasure {
    pub theta: Direction,
    pub atoms: Vec<Atom>,
    /// The same measure on the coarse grid, used for error estimates.
    pub coarse: Vec<Atom>,
    pub spec: QuadratureSpec,
    /// Grid lines with a resolution warning.
    pub flags: usize,
}

fn atoms_on(domain: &Domain, theta: Direction, grid: &OffsetGrid) -> (Vec<Atom>, usize) {
    let lines: Vec<(Vec<Atom>, bool)> = grid
        .nodes
        .par_iter()
        .map(|&(r, w)| {
            let set = domain.chords(theta, r);
            let atoms = set
                .chords
                .iter()
                .map(|c| Atom {
                    z: c.plus_point(),
                    weight: c.length() * w,
                    ell: c.length(),
                    opposite: c.minus(),
                    chord: *c,
                })
                .collect();
            (atoms, set.warning)
        })
        .collect();
    let flags = lines.iter().filter(|l| l.1).count();
    (lines.into_iter().flat_map(|l| l.0).collect(), flags)
}

/// `μ_θ` as one atom per (grid line, chord).
pub fn mu_atoms(
    domain: &Domain,
    theta: Direction,
    spec: &QuadratureSpec,
) -> Result<DirectionalMeasure> {
    spec.validate()?;
    let (fine, coarse) = spec.grids(domain, theta);
    let (atoms, flags) = atoms_on(domain, theta, &fine);
    let coarse = if domain.dim() == 1 {
        atoms.clone()
    } else {
        atoms_on(domain, theta, &coarse).0
    };
    Ok(DirectionalMeasure {
        theta,
        atoms,
        coarse,
        spec: spec.clone(),
        flags,
    })
}

fn weighted_sum(atoms: &[Atom], g: &(impl Fn(&Atom) -> f64 + Sync)) -> (f64, f64) {
    let v: Vec<f64> = atoms.par_iter().map(|a| a.weight * g(a)).collect();
    let abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    (pairwise_sum(&v), pairwise_sum(&abs))
}

impl DirectionalMeasure {
    /// `Σ w·h(atom)` on both grids, with the usual error model.
    pub fn integrate_atoms<H>(&self, h: H) -> IntegralResult
    where
        H: Fn(&Atom) -> f64 + Sync,
    {
        let (vf, af) = weighted_sum(&self.atoms, &h);
        let (vc, _) = weighted_sum(&self.coarse, &h);
        let diff = vf - vc;
        IntegralResult {
            value: vf,
            error: diff.abs() + 64.0 * f64::EPSILON * af,
            extrapolated: vf + diff / 3.0,
            flags: self.flags,
        }
    }

    /// `∫ g dμ_θ`.
    pub fn integrate<G>(&self, g: G) -> IntegralResult
    where
        G: Fn(&BoundaryPoint) -> f64 + Sync,
    {
        self.integrate_atoms(|a| g(&a.z))
    }

    /// `μ_θ(∂Ω)`.
    pub fn total_mass(&self) -> IntegralResult {
        self.integrate_atoms(|_| 1.0)
    }

    /// `μ_θ(A)`.
    pub fn mass_of(&self, a: &BoundaryPredicate) -> IntegralResult {
        self.integrate_atoms(|t| if a.test(t.z.coords) { 1.0 } else { 0.0 })
    }

    /// Writes rows `(z1, z2, weight, ell, zhat1, zhat2)`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["z1", "z2", "weight", "ell", "zhat1", "zhat2"])?;
        for a in &self.atoms {
            w.serialize((
                a.z.coords[0],
                a.z.coords[1],
                a.weight,
                a.ell,
                a.opposite[0],
                a.opposite[1],
            ))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A region of the plane used to select boundary atoms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BoundaryPredicate {
    All,
    Empty,
    /// `normal·z > offset`.
    HalfPlane {
        normal: Point,
        offset: f64,
    },
    /// The closed box `[lo, hi]`.
    Box {
        lo: Point,
        hi: Point,
    },
    /// Points within `tol` of the closed segment `[a, b]`.
    Segment {
        a: Point,
        b: Point,
        tol: f64,
    },
    /// `C_{1/3} × {0}`.
    CantorSlit,
    Not {
        inner: Box<BoundaryPredicate>,
    },
    And {
        left: Box<BoundaryPredicate>,
        right: Box<BoundaryPredicate>,
    },
}

impl BoundaryPredicate {
    pub fn segment(a: Point, b: Point) -> Self {
        Self::Segment { a, b, tol: 1e-9 }
    }

    pub fn test(&self, z: Point) -> bool {
        match self {
            Self::All => true,
            Self::Empty => false,
            Self::HalfPlane { normal, offset } => dot(*normal, z) > *offset,
            Self::Box { lo, hi } => {
                lo[0] <= z[0] && z[0] <= hi[0] && lo[1] <= z[1] && z[1] <= hi[1]
            }
            Self::Segment { a, b, tol } => segment_distance(z, *a, *b) <= *tol,
            Self::CantorSlit => z[1] == 0.0 && cantor_contains(z[0]),
            Self::Not { inner } => !inner.test(z),
            Self::And { left, right } => left.test(z) && right.test(z),
        }
    }
}

fn segment_distance(z: Point, a: Point, b: Point) -> f64 {
    let e = [b[0] - a[0], b[1] - a[1]];
    let v = [z[0] - a[0], z[1] - a[1]];
    let l2 = dot(e, e);
    let t = if l2 > 0.0 {
        (dot(e, v) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    dist(z, [a[0] + t * e[0], a[1] + t * e[1]])
}

/// Per-edge comparison of `μ_θ` with `ℓ_{-θ}(z) max(θ·n(z), 0) ds`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeMass {
    pub edge: usize,
    pub from: Point,
    pub to: Point,
    pub measured: f64,
    pub closed_form: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LipschitzDensityReport {
    pub theta: Direction,
    pub edges: Vec<EdgeMass>,
    /// Mass of atoms not assigned to any edge.
    pub unassigned: f64,
    pub max_discrepancy: f64,
}

/// Distance from `z` backwards along `-θ` to the first polygon edge or
/// slit, by direct ray–segment intersection.
fn back_distance(poly: &Polygon, z: Point, theta: Direction) -> f64 {
    let d = theta.neg().components();
    let scale = poly
        .vertices()
        .iter()
        .map(|v| norm(*v))
        .fold(1.0_f64, f64::max);
    let tiny = 1e-12 * scale;
    let mut best = f64::INFINITY;
    let segs = poly
        .edges()
        .chain(poly.slits().iter().map(|s| (s[0], s[1])));
    for (p, q) in segs {
        let e = [q[0] - p[0], q[1] - p[1]];
        let den = cross(d, e);
        if den.abs() < 1e-15 {
            continue;
        }
        let w = [p[0] - z[0], p[1] - z[1]];
        let t = cross(w, e) / den;
        let u = cross(w, d) / den;
        if t > tiny && (-1e-12..=1.0 + 1e-12).contains(&u) {
            best = best.min(t);
        }
    }
    best
}

/// Closed-form edge mass `∫_edge ℓ_{-θ} max(θ·n, 0) ds` for edge `i`.
/// `ℓ` is affine between the projections of the polygon vertices onto the
/// edge along `θ`, so Gauss on each piece is exact up to rounding.
fn edge_closed_form(poly: &Polygon, i: usize, theta: Direction) -> f64 {
    let n = poly.outward_normal(i);
    let tn = theta.dot(n);
    if tn <= 0.0 {
        return 0.0;
    }
    let (p, q) = poly.edges().nth(i).expect("edge index");
    let e = [q[0] - p[0], q[1] - p[1]];
    let len = norm(e);
    let t = theta.components();
    let den = cross(t, e);
    let mut cuts = vec![0.0, 1.0];
    for v in poly.vertices().iter().chain(poly.slits().iter().flatten()) {
        // v + λθ meets p + u e.
        let w = [v[0] - p[0], v[1] - p[1]];
        let u = cross(t, w) / den;
        if u > 0.0 && u < 1.0 {
            cuts.push(u);
        }
    }
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += gauss(w[0], w[1], 4, |u| {
            let z = [p[0] + u * e[0], p[1] + u * e[1]];
            let l = back_distance(poly, z, theta);
            if l.is_finite() {
                l
            } else {
                0.0
            }
        });
    }
    total * len * tn
}

/// Compares atom masses per polygon edge with the closed-form density.
pub fn lipschitz_density_check(
    poly: &Polygon,
    theta: Direction,
    spec: &QuadratureSpec,
) -> Result<LipschitzDensityReport> {
    let domain = Domain::Polygon(poly.clone());
    let mu = mu_atoms(&domain, theta, spec)?;
    let edges: Vec<(Point, Point)> = poly.edges().collect();
    let mut measured = vec![0.0; edges.len()];
    let mut unassigned = 0.0;
    for a in &mu.atoms {
        match edges
            .iter()
            .position(|(p, q)| segment_distance(a.z.coords, *p, *q) <= 1e-9)
        {
            Some(i) => measured[i] += a.weight,
            None => unassigned += a.weight,
        }
    }
    let mut max_discrepancy = unassigned;
    let edges: Vec<EdgeMass> = edges
        .iter()
        .enumerate()
        .map(|(i, (p, q))| {
            let closed_form = edge_closed_form(poly, i, theta);
            max_discrepancy = max_discrepancy.max((measured[i] - closed_form).abs());
            EdgeMass {
                edge: i,
                from: *p,
                to: *q,
                measured: measured[i],
                closed_form,
            }
        })
        .collect();
    Ok(LipschitzDensityReport {
        theta,
        edges,
        unassigned,
        max_discrepancy,
    })
}

/// `(μ_{-θ}(A), μ_θ(Φ_{-θ}^{-1}(A)))`. The first is built from chords in
/// direction `-θ`, the second from the opposite endpoints of `θ`-chords.
pub fn mu_reflection_check(
    domain: &Domain,
    theta: Direction,
    a: &BoundaryPredicate,
    spec: &QuadratureSpec,
) -> Result<(IntegralResult, IntegralResult)> {
    let minus = mu_atoms(domain, theta.neg(), spec)?.mass_of(a);
    let plus =
        mu_atoms(domain, theta, spec)?
            .integrate_atoms(|t| if a.test(t.opposite) { 1.0 } else { 0.0 });
    Ok((minus, plus))
}

/// `sup_θ (∫ g² dμ_θ)^{1/2}` over a finite direction family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyNorm {
    pub value: f64,
    /// `(θ, (∫ g² dμ_θ)^{1/2}, error)` per direction.
    pub per_direction: Vec<(Direction, f64, f64)>,
}

pub fn family_sup_norm<G>(
    g: G,
    domain: &Domain,
    directions: &[Direction],
    spec: &QuadratureSpec,
) -> Result<FamilyNorm>
where
    G: Fn(&BoundaryPoint) -> f64 + Sync,
{
    if directions.is_empty() {
        return Err(crate::error::Error::InvalidParameter(
            "empty direction family".into(),
        ));
    }
    let mut per_direction = Vec::with_capacity(directions.len());
    for &theta in directions {
        let r = mu_atoms(domain, theta, spec)?.integrate(|z| {
            let v = g(z);
            v * v
        });
        let r = crate::fields::sqrt_result(r);
        per_direction.push((theta, r.value, r.error));
    }
    let value = per_direction.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(FamilyNorm {
        value,
        per_direction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractal::CantorSpec;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::with_ny(1024)
    }

    fn square() -> Polygon {
        match Domain::unit_square() {
            Domain::Polygon(p) => p,
            _ => unreachable!(),
        }
    }

    #[test]
    fn square_atoms_on_right_edge() {
        let mu = mu_atoms(&Domain::unit_square(), Direction::e1(), &spec()).unwrap();
        assert!(mu
            .atoms
            .iter()
            .all(|a| a.z.coords[0] == 1.0 && a.opposite[0] == 0.0));
        assert!((mu.total_mass().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cantor_atoms_sit_at_gap_right_ends() {
        let d = Domain::cantor_complement(0.25, 5).unwrap();
        let mu = mu_atoms(&d, Direction::line(true), &spec()).unwrap();
        let s = CantorSpec::new(0.25, 5, crate::fractal::CantorScheme::Rho).unwrap();
        let mut expected: Vec<(f64, f64)> = s.gaps().iter().map(|(c, dd)| (*dd, dd - c)).collect();
        expected.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert_eq!(mu.atoms.len(), expected.len());
        for (a, (d_m, w)) in mu.atoms.iter().zip(expected) {
            assert_eq!(a.z.coords[0], d_m);
            assert!((a.weight - w).abs() < 1e-15);
        }
    }

    #[test]
    fn cusp_mass_is_area() {
        let mu = mu_atoms(
            &Domain::Cusp,
            Direction::e1(),
            &QuadratureSpec::with_ny(4096),
        )
        .unwrap();
        assert!((mu.total_mass().value - 0.5).abs() < 1e-6);
        assert!(mu
            .atoms
            .iter()
            .all(|a| (a.z.coords[0] - a.z.coords[1].powi(3)).abs() < 1e-12));
    }

    #[test]
    fn density_examples() {
        let sq = square();
        let r = lipschitz_density_check(&sq, Direction::e1(), &spec()).unwrap();
        assert!(r.max_discrepancy < 1e-10, "{r:?}");
        let right: Vec<f64> = r.edges.iter().map(|e| e.closed_form).collect();
        assert_eq!(right.iter().filter(|&&m| m != 0.0).count(), 1);
        let diag = Direction::new(1.0, 1.0).unwrap();
        let r = lipschitz_density_check(&sq, diag, &spec()).unwrap();
        assert!(r.max_discrepancy < 1e-6, "{r:?}");
        let halves: Vec<f64> = r
            .edges
            .iter()
            .map(|e| e.closed_form)
            .filter(|&m| m > 0.0)
            .collect();
        assert_eq!(halves.len(), 2);
        assert!(halves.iter().all(|m| (m - 0.5).abs() < 1e-12));
        let tri = Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let r = lipschitz_density_check(&tri, Direction::e1(), &spec()).unwrap();
        let total: f64 = r.edges.iter().map(|e| e.closed_form).sum();
        assert!((total - 0.5).abs() < 1e-12);
        assert!(r.max_discrepancy < 1e-6);
    }

    #[test]
    fn no_atoms_where_normal_faces_away() {
        let sq = square();
        for theta in Direction::family(16) {
            let r = lipschitz_density_check(&sq, theta, &spec()).unwrap();
            for (i, e) in r.edges.iter().enumerate() {
                if theta.dot(sq.outward_normal(i)) < -1e-12 {
                    assert_eq!(e.measured, 0.0);
                }
            }
        }
    }

    #[test]
    fn reflection_examples() {
        let sq = Domain::unit_square();
        let upper_left = BoundaryPredicate::And {
            left: Box::new(BoundaryPredicate::segment([0.0, 0.0], [0.0, 1.0])),
            right: Box::new(BoundaryPredicate::HalfPlane {
                normal: [0.0, 1.0],
                offset: 0.5,
            }),
        };
        let (a, b) = mu_reflection_check(&sq, Direction::e1(), &upper_left, &spec()).unwrap();
        assert!((a.value - 0.5).abs() < 1e-12 && (b.value - 0.5).abs() < 1e-12);
        let (a, b) =
            mu_reflection_check(&sq, Direction::e1(), &BoundaryPredicate::All, &spec()).unwrap();
        assert!((a.value - 1.0).abs() < 1e-12 && (b.value - 1.0).abs() < 1e-12);
        let top = BoundaryPredicate::segment([0.0, 1.0], [1.0, 1.0]);
        let (a, b) = mu_reflection_check(&sq, Direction::e1(), &top, &spec()).unwrap();
        assert_eq!((a.value, b.value), (0.0, 0.0));
    }

    #[test]
    fn family_norm_examples() {
        let sq = Domain::unit_square();
        let r = family_sup_norm(|_| 1.0, &sq, &Direction::family(8), &spec()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let r = family_sup_norm(
            |z| z.coords[1],
            &sq,
            &[Direction::e1(), Direction::e2()],
            &spec(),
        )
        .unwrap();
        assert!((r.per_direction[0].1 - (1.0f64 / 3.0).sqrt()).abs() < 1e-6);
        assert!((r.value - 1.0).abs() < 1e-12);
        let d = Domain::square_minus_cantor();
        let slit = BoundaryPredicate::CantorSlit;
        let g = |z: &BoundaryPoint| if slit.test(z.coords) { 1.0 } else { 0.0 };
        let r = family_sup_norm(g, &d, &Direction::family(8), &spec()).unwrap();
        assert!(r.value < 1e-3, "{r:?}");
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mu = mu_atoms(
            &Domain::unit_square(),
            Direction::e1(),
            &QuadratureSpec::with_ny(8),
        )
        .unwrap();
        let mut buf = Vec::new();
        mu.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("z1,z2,weight,ell,zhat1,zhat2\n"));
        assert_eq!(text.lines().count(), 1 + mu.atoms.len());
    }
}
