//! Vertex and halfspace representations for small dimensions.

use itertools::Itertools;

use super::{assemble, tolerance_for, HalfSpace, Intersection, Polytope};
use crate::error::{validation, Error, Result};
use crate::multilinear::{orthonormalize, Subspace};
use crate::{Matrix, Vector};

/// Affine dimension of a point set.
pub(crate) fn affine_rank(points: &[Vector]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let diffs: Vec<Vector> = points[1..].iter().map(|p| p - &points[0]).collect();
    orthonormalize(&diffs).len()
}

fn dedup_points(points: &[Vector], tol: f64) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| (q - p).amax() <= tol) {
            out.push(p.clone());
        }
    }
    out
}

/// Unit normal of the hyperplane through `d` points, if they are in general position.
fn hyperplane_normal(pts: &[&Vector], tol: f64) -> Option<Vector> {
    let d = pts[0].len();
    match d {
        2 => {
            let e = pts[1] - pts[0];
            let n = Vector::from_column_slice(&[-e[1], e[0]]);
            let len = n.norm();
            (len > tol).then(|| n / len)
        }
        3 => {
            let a = pts[1] - pts[0];
            let b = pts[2] - pts[0];
            let n = Vector::from_column_slice(&[
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ]);
            let len = n.norm();
            (len > tol * (a.norm() + b.norm())).then(|| n / len)
        }
        _ => {
            let diffs: Vec<Vector> = pts[1..].iter().map(|p| *p - pts[0]).collect();
            let span = Subspace::span_unchecked(d, &diffs);
            (span.dim() == d - 1).then(|| span.complement().basis()[0].clone())
        }
    }
}

/// Convex hull of a point cloud in `R^2` or `R^3`.
///
/// Candidate facet planes are spanned by `d`-subsets of the points; a plane
/// is kept when every point lies on one side within tolerance. Coplanar
/// candidates collapse onto the same on-plane point set. Vertices are the
/// points whose incident facet normals span `R^d`.
pub(crate) fn from_vertices(points: &[Vector]) -> Result<Polytope> {
    let Some(first) = points.first() else {
        return Err(Error::DegenerateInput("empty point set".into()));
    };
    let d = first.len();
    if points.iter().any(|p| p.len() != d) {
        return validation("points have different dimensions");
    }
    if !(2..=3).contains(&d) {
        return validation(format!(
            "automatic hull construction supports d = 2, 3; supply facets for d = {d}"
        ));
    }
    if points.iter().any(|p| p.iter().any(|x| !x.is_finite())) {
        return validation("non-finite coordinate");
    }
    let tol = tolerance_for(points);
    let pts = dedup_points(points, tol);
    if pts.len() < d + 1 || affine_rank(&pts) < d {
        return Err(Error::DegenerateInput(
            "points do not span a full-dimensional polytope".into(),
        ));
    }

    let mut planes: Vec<(HalfSpace, Vec<usize>)> = Vec::new();
    for combo in (0..pts.len()).combinations(d) {
        let chosen: Vec<&Vector> = combo.iter().map(|&i| &pts[i]).collect();
        let Some(n) = hyperplane_normal(&chosen, tol) else {
            continue;
        };
        let h = n.dot(chosen[0]);
        let mut above = false;
        let mut below = false;
        for p in &pts {
            let s = n.dot(p) - h;
            if s > tol {
                above = true;
            } else if s < -tol {
                below = true;
            }
            if above && below {
                break;
            }
        }
        if above && below {
            continue;
        }
        let (normal, offset) = if above { (-n, -h) } else { (n, h) };
        let on: Vec<usize> = pts
            .iter()
            .enumerate()
            .filter(|(_, p)| (normal.dot(p) - offset).abs() <= tol)
            .map(|(i, _)| i)
            .collect();
        if planes.iter().any(|(_, ids)| *ids == on) {
            continue;
        }
        planes.push((HalfSpace { normal, offset }, on));
    }

    // refit each plane to all of its points so coplanar sets agree
    let halfspaces: Vec<HalfSpace> = planes
        .into_iter()
        .map(|(h, ids)| refit(h, &ids, &pts))
        .collect();

    let vertex_mask: Vec<bool> = pts
        .iter()
        .map(|p| {
            let normals: Vec<Vector> = halfspaces
                .iter()
                .filter(|h| (h.normal.dot(p) - h.offset).abs() <= tol)
                .map(|h| h.normal.clone())
                .collect();
            orthonormalize(&normals).len() == d
        })
        .collect();
    let vertices: Vec<Vector> = pts
        .into_iter()
        .zip(vertex_mask)
        .filter(|(_, keep)| *keep)
        .map(|(p, _)| p)
        .collect();
    Ok(assemble(d, vertices, halfspaces, tol))
}

fn refit(h: HalfSpace, ids: &[usize], pts: &[Vector]) -> HalfSpace {
    if ids.len() <= pts[0].len() {
        return h;
    }
    let d = pts[0].len();
    let mut centroid = Vector::zeros(d);
    for &i in ids {
        centroid += &pts[i];
    }
    centroid /= ids.len() as f64;
    let diffs: Vec<Vector> = ids.iter().map(|&i| &pts[i] - &centroid).collect();
    let span = Subspace::span_unchecked(d, &diffs);
    if span.dim() != d - 1 {
        return h;
    }
    let mut n = span.complement().basis()[0].clone();
    if n.dot(&h.normal) < 0.0 {
        n = -n;
    }
    let offset = n.dot(&centroid);
    HalfSpace { normal: n, offset }
}

/// Solves `rows * x = rhs` for a square system; `None` if (near) singular.
pub(crate) fn solve_square(rows: &[&Vector], rhs: &[f64]) -> Option<Vector> {
    let d = rows.len();
    match d {
        1 => (rows[0][0].abs() > 1e-12).then(|| Vector::from_element(1, rhs[0] / rows[0][0])),
        2 => {
            let (a, b) = (rows[0], rows[1]);
            let det = a[0] * b[1] - a[1] * b[0];
            if det.abs() < 1e-12 {
                return None;
            }
            Some(Vector::from_column_slice(&[
                (rhs[0] * b[1] - a[1] * rhs[1]) / det,
                (a[0] * rhs[1] - rhs[0] * b[0]) / det,
            ]))
        }
        3 => {
            let (a, b, c) = (rows[0], rows[1], rows[2]);
            let cof0 = b[1] * c[2] - b[2] * c[1];
            let cof1 = b[2] * c[0] - b[0] * c[2];
            let cof2 = b[0] * c[1] - b[1] * c[0];
            let det = a[0] * cof0 + a[1] * cof1 + a[2] * cof2;
            if det.abs() < 1e-12 {
                return None;
            }
            // x = adj(M) rhs / det, rows of adj are cross products
            let bc = [cof0, cof1, cof2];
            let ca = [
                c[1] * a[2] - c[2] * a[1],
                c[2] * a[0] - c[0] * a[2],
                c[0] * a[1] - c[1] * a[0],
            ];
            let ab = [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ];
            let x: Vec<f64> = (0..3)
                .map(|i| (bc[i] * rhs[0] + ca[i] * rhs[1] + ab[i] * rhs[2]) / det)
                .collect();
            Some(Vector::from_vec(x))
        }
        _ => {
            let m = Matrix::from_fn(d, d, |i, j| rows[i][j]);
            let lu = m.lu();
            if lu.determinant().abs() < 1e-12 {
                return None;
            }
            lu.solve(&Vector::from_column_slice(rhs))
        }
    }
}

/// Vertex enumeration for an intersection of halfspaces.
///
/// Parallel halfspaces with the same outer normal are merged to the tightest
/// one first; vertices are the feasible solutions of `d`-subsets of tight
/// constraints.
pub(crate) fn from_halfspaces(dim: usize, halfspaces: &[HalfSpace]) -> Result<Intersection> {
    if dim == 0 {
        return validation("dimension must be positive");
    }
    if halfspaces.iter().any(|h| h.normal.len() != dim) {
        return validation("halfspace in the wrong dimension");
    }
    let mut merged: Vec<HalfSpace> = Vec::with_capacity(halfspaces.len());
    for h in halfspaces {
        if let Some(existing) = merged
            .iter_mut()
            .find(|m| (&m.normal - &h.normal).amax() <= 1e-12)
        {
            existing.offset = existing.offset.min(h.offset);
        } else {
            merged.push(h.clone());
        }
    }
    let scale = merged.iter().fold(1.0f64, |m, h| m.max(h.offset.abs()));
    let tol = super::GEOM_TOL * scale;

    let mut points: Vec<Vector> = Vec::new();
    for combo in (0..merged.len()).combinations(dim) {
        let rows: Vec<&Vector> = combo.iter().map(|&i| &merged[i].normal).collect();
        let rhs: Vec<f64> = combo.iter().map(|&i| merged[i].offset).collect();
        let Some(x) = solve_square(&rows, &rhs) else {
            continue;
        };
        if merged.iter().all(|h| h.normal.dot(&x) <= h.offset + tol)
            && !points.iter().any(|p| (p - &x).amax() <= tol)
        {
            points.push(x);
        }
    }
    if points.is_empty() {
        return Ok(Intersection::Empty);
    }
    let rank = affine_rank(&points);
    if rank < dim {
        return Ok(Intersection::Degenerate(rank));
    }
    let tol = tolerance_for(&points).max(tol);
    Ok(Intersection::Polytope(assemble(dim, points, merged, tol)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    #[test]
    fn hull_drops_interior_and_edge_points() {
        let pts = [
            vector(&[0.0, 0.0]),
            vector(&[1.0, 0.0]),
            vector(&[1.0, 1.0]),
            vector(&[0.0, 1.0]),
            vector(&[0.5, 0.0]),
            vector(&[0.5, 0.5]),
            vector(&[1.0, 1.0]),
        ];
        let p = from_vertices(&pts).unwrap();
        assert_eq!(p.f_vector(), vec![4, 4, 1]);
    }

    #[test]
    fn octahedron_has_nonsimple_vertices() {
        let mut pts = Vec::new();
        for i in 0..3 {
            for s in [-1.0, 1.0] {
                let mut v = Vector::zeros(3);
                v[i] = s;
                pts.push(v);
            }
        }
        let p = from_vertices(&pts).unwrap();
        assert_eq!(p.f_vector(), vec![6, 12, 8, 1]);
        assert!((p.volume() - 4.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn four_dimensional_points_need_facets() {
        let pts: Vec<Vector> = (0..5).map(|i| Vector::from_fn(4, |j, _| if i == j + 1 { 1.0 } else { 0.0 })).collect();
        assert!(matches!(from_vertices(&pts), Err(Error::Validation(_))));
    }

    #[test]
    fn small_solver_matches_lu() {
        let rows = [vector(&[2.0, 1.0, 0.5]), vector(&[0.0, 1.0, -1.0]), vector(&[1.0, 0.0, 3.0])];
        let refs: Vec<&Vector> = rows.iter().collect();
        let x = solve_square(&refs, &[1.0, 2.0, 3.0]).unwrap();
        for (r, b) in rows.iter().zip([1.0, 2.0, 3.0]) {
            assert!((r.dot(&x) - b).abs() < 1e-13);
        }
    }
}
