use std::f64::consts::TAU;

use rand::Rng;

use super::{omega, SphericalRegion};
use crate::error::{validation, Error, Result};
use crate::montecarlo::{run_batches, Estimate, McConfig};
use crate::multilinear::Subspace;
use crate::polytope::PolyhedralCone;
use crate::Vector;

/// Which evaluation path `cone_spherical_measure` takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurePath {
    Exact,
    MonteCarlo,
}

/// Path used for a cone whose linear hull has dimension `m` with the given
/// direction region.
pub fn measure_path(m: usize, region: &SphericalRegion) -> MeasurePath {
    match (m, region) {
        (0..=2, _) => MeasurePath::Exact,
        (3, SphericalRegion::All | SphericalRegion::Polyhedral { .. }) => MeasurePath::Exact,
        _ => MeasurePath::MonteCarlo,
    }
}

/// `H^{m-1}(K ∩ S^{d-1} ∩ C)` with `m = dim lin K`.
///
/// Rays are counted, planar cones are measured as clipped arcs, cones with a
/// three-dimensional span are clipped in a gnomonic chart and measured by
/// spherical triangle excesses. Everything else is Monte Carlo inside
/// `lin K`; exact results carry a zero standard error.
pub fn cone_spherical_measure(
    cone: &PolyhedralCone,
    region: &SphericalRegion,
    cfg: &McConfig,
) -> Result<Estimate> {
    let d = cone.dim();
    if let SphericalRegion::Cap { axis, .. } = region {
        if axis.len() != d {
            return validation("direction region has the wrong dimension");
        }
    }
    if let SphericalRegion::Polyhedral { normals } = region {
        if normals.iter().any(|n| n.len() != d) {
            return validation("direction region has the wrong dimension");
        }
    }
    if cone.is_zero() {
        return Ok(Estimate::exact(0.0));
    }
    let center = cone.min_norm_point();
    if center.norm() <= crate::polytope::POINTED_TOL {
        return Err(Error::NonPointedCone);
    }
    let center = &center / center.norm();
    let lin = cone.linear_hull();
    let m = lin.dim();
    match measure_path(m, region) {
        MeasurePath::Exact => Ok(Estimate::exact(match m {
            1 => {
                if region.contains(&center) {
                    1.0
                } else {
                    0.0
                }
            }
            2 => planar_arc(cone, &lin, &center, region),
            _ => gnomonic_area(cone, &lin, &center, region),
        })),
        MeasurePath::MonteCarlo => monte_carlo(cone, &lin, &center, region, cfg),
    }
}

fn planar_arc(cone: &PolyhedralCone, lin: &Subspace, center: &Vector, region: &SphericalRegion) -> f64 {
    let e1 = lin.coordinates(center);
    let e1 = &e1 / e1.norm();
    let e2 = Vector::from_column_slice(&[-e1[1], e1[0]]);
    let angle_of = |c: &Vector| c.dot(&e2).atan2(c.dot(&e1));
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for g in cone.generators() {
        let a = angle_of(&lin.coordinates(g));
        lo = lo.min(a);
        hi = hi.max(a);
    }
    let mut pieces = vec![(lo, hi)];
    for (a, b) in region.constraints() {
        let ac = lin.coordinates(&a);
        let len = ac.norm();
        let (mid, half) = if len <= 1e-15 {
            if b <= 0.0 {
                continue;
            }
            return 0.0;
        } else {
            let s = b / len;
            if s > 1.0 {
                return 0.0;
            }
            if s <= -1.0 {
                continue;
            }
            (angle_of(&ac), s.acos())
        };
        let mut next = Vec::new();
        for &(l, h) in &pieces {
            for k in -2..=2 {
                let shift = TAU * k as f64;
                let cl = l.max(mid - half + shift);
                let ch = h.min(mid + half + shift);
                if ch > cl {
                    next.push((cl, ch));
                }
            }
        }
        pieces = next;
    }
    pieces.iter().map(|(l, h)| h - l).sum()
}

fn cross(a: &Vector, b: &Vector) -> Vector {
    Vector::from_column_slice(&[
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

fn arc_length(a: &Vector, b: &Vector) -> f64 {
    cross(a, b).norm().atan2(a.dot(b))
}

/// Area of the spherical triangle `abc` by l'Huilier's theorem.
pub(crate) fn spherical_triangle_area(a: &Vector, b: &Vector, c: &Vector) -> f64 {
    let x = arc_length(b, c);
    let y = arc_length(c, a);
    let z = arc_length(a, b);
    let s = 0.5 * (x + y + z);
    let t = (0.5 * s).tan()
        * (0.5 * (s - x)).tan().max(0.0)
        * (0.5 * (s - y)).tan().max(0.0)
        * (0.5 * (s - z)).tan().max(0.0);
    4.0 * t.max(0.0).sqrt().atan()
}

fn convex_hull_2d(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));
    pts.dedup_by(|p, q| (p[0] - q[0]).abs() < 1e-14 && (p[1] - q[1]).abs() < 1e-14);
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for p in &pts {
        while hull.len() >= 2 && turn(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 1e-15 {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && turn(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 1e-15 {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    hull
}

/// Keeps the part of a convex polygon where `n . y + c >= 0`.
fn clip(poly: &[[f64; 2]], n: [f64; 2], c: f64) -> Vec<[f64; 2]> {
    let val = |p: &[f64; 2]| n[0] * p[0] + n[1] * p[1] + c;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let p = &poly[i];
        let q = &poly[(i + 1) % poly.len()];
        let (vp, vq) = (val(p), val(q));
        if vp >= 0.0 {
            out.push(*p);
        }
        if (vp >= 0.0) != (vq >= 0.0) {
            let t = vp / (vp - vq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

fn gnomonic_area(cone: &PolyhedralCone, lin: &Subspace, center: &Vector, region: &SphericalRegion) -> f64 {
    let c = lin.coordinates(center);
    let c = &c / c.norm();
    let chart = Subspace::span_unchecked(3, &[c.clone()]).complement();
    let (b1, b2) = (&chart.basis()[0], &chart.basis()[1]);
    let pts: Vec<[f64; 2]> = cone
        .generators()
        .iter()
        .map(|g| {
            let gc = lin.coordinates(g);
            let p = &gc / gc.dot(&c);
            [p.dot(b1), p.dot(b2)]
        })
        .collect();
    let mut poly = convex_hull_2d(pts);
    for (a, b) in region.constraints() {
        debug_assert!(b == 0.0);
        let ac = lin.coordinates(&a);
        poly = clip(&poly, [ac.dot(b1), ac.dot(b2)], ac.dot(&c));
        if poly.len() < 3 {
            return 0.0;
        }
    }
    if poly.len() < 3 {
        return 0.0;
    }
    let lift = |p: &[f64; 2]| {
        let v = &c + b1 * p[0] + b2 * p[1];
        let n = v.norm();
        v / n
    };
    let first = lift(&poly[0]);
    let mut area = 0.0;
    let mut prev = lift(&poly[1]);
    for p in &poly[2..] {
        let next = lift(p);
        area += spherical_triangle_area(&first, &prev, &next);
        prev = next;
    }
    area
}

fn monte_carlo(
    cone: &PolyhedralCone,
    lin: &Subspace,
    center: &Vector,
    region: &SphericalRegion,
    cfg: &McConfig,
) -> Result<Estimate> {
    cfg.validate()?;
    let m = lin.dim();
    let c = lin.coordinates(center);
    let normals: Vec<Vector> = cone.inner_normals().iter().map(|n| lin.coordinates(n)).collect();
    let stats = run_batches(cfg, |rng, count, stats| {
        let mut u = Vector::zeros(m);
        for _ in 0..count {
            // uniform on the hemisphere around the slicing direction
            loop {
                for i in 0..m {
                    u[i] = rng.sample::<f64, _>(rand_distr::StandardNormal);
                }
                let n = u.norm();
                if n > 1e-12 {
                    u /= n;
                    break;
                }
            }
            if u.dot(&c) < 0.0 {
                u.neg_mut();
            }
            let inside = normals.iter().all(|n| n.dot(&u) >= 0.0) && region.contains(&lin.embed(&u));
            stats.push(if inside { 1.0 } else { 0.0 });
        }
    });
    Ok(stats.estimate(0.5 * omega(m), cfg.seed))
}
