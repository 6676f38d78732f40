//! Convex polytopes with an explicit face lattice.
//!
//! A [`Polytope`] is always bounded and full-dimensional. It stores its
//! vertices, its facets as outer unit normals with offsets, and every face
//! grouped by dimension. Faces carry the ids of the facets that contain them,
//! so normal cones come for free, and their relative volumes, so Hausdorff
//! measures of whole faces are O(1).

mod cone;
mod hull;
mod io;
mod region;

pub use cone::{PolyhedralCone, POINTED_TOL};
pub use io::{FacetJson, PolytopeJson};
pub use region::{face_measure, Region};

use std::collections::HashSet;

use crate::error::{validation, Error, Result};
use crate::multilinear::Subspace;
use crate::{Matrix, Vector};

/// Relative tolerance for incidence and feasibility tests.
pub const GEOM_TOL: f64 = 1e-9;

/// Closed halfspace `{x : normal · x <= offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub normal: Vector,
    pub offset: f64,
}

impl HalfSpace {
    /// Normalizes the normal; fails for a zero normal.
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if !(n > 0.0) || !n.is_finite() || !offset.is_finite() {
            return validation("halfspace needs a finite nonzero normal");
        }
        Ok(Self {
            normal: normal / n,
            offset: offset / n,
        })
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.normal.dot(x) <= self.offset + tol
    }

    pub fn slack(&self, x: &Vector) -> f64 {
        self.offset - self.normal.dot(x)
    }

    pub fn translated(&self, z: &Vector) -> Self {
        Self {
            normal: self.normal.clone(),
            offset: self.offset + self.normal.dot(z),
        }
    }

    pub fn transformed(&self, rotation: &Matrix) -> Self {
        Self {
            normal: rotation * &self.normal,
            offset: self.offset,
        }
    }
}

/// Facet: supporting halfspace plus the vertices on its boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub halfspace: HalfSpace,
    pub vertex_ids: Vec<usize>,
}

/// A j-face of a polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub dim: usize,
    /// Sorted vertex ids.
    pub vertex_ids: Vec<usize>,
    /// Sorted ids of the facets containing the face (empty for the polytope itself).
    pub facet_ids: Vec<usize>,
    /// Indices of the (dim-1)-faces contained in this face.
    pub subfaces: Vec<usize>,
    /// Vertex centroid, a relative interior point.
    pub affine_point: Vector,
    /// `lin(F - F)`.
    pub direction: Subspace,
    /// `dim`-dimensional volume of the face.
    pub volume: f64,
}

/// Outcome of intersecting polytopes.
#[derive(Debug, Clone)]
pub enum Intersection {
    Polytope(Polytope),
    Empty,
    /// Nonempty but lower dimensional, of the given affine dimension.
    Degenerate(usize),
}

impl Intersection {
    pub fn polytope(self) -> Option<Polytope> {
        match self {
            Intersection::Polytope(p) => Some(p),
            _ => None,
        }
    }
}

/// Bounded, full-dimensional convex polytope in `R^d`.
#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vector>,
    facets: Vec<Facet>,
    /// `faces[j]` lists the j-faces, `faces[d]` holds the polytope itself.
    faces: Vec<Vec<Face>>,
    tol: f64,
}

pub(crate) fn tolerance_for(points: &[Vector]) -> f64 {
    let scale = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(1.0f64, |m, x| m.max(x.abs()));
    GEOM_TOL * scale
}

impl Polytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Faces of dimension `j` (`j = d` gives the polytope itself).
    pub fn faces(&self, j: usize) -> &[Face] {
        self.faces.get(j).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Number of j-faces for `j = 0..=d`.
    pub fn f_vector(&self) -> Vec<usize> {
        self.faces.iter().map(Vec::len).collect()
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// `d`-dimensional volume.
    pub fn volume(&self) -> f64 {
        self.faces[self.dim][0].volume
    }

    pub fn contains(&self, x: &Vector) -> bool {
        self.facets
            .iter()
            .all(|f| f.halfspace.contains(x, self.tol))
    }

    pub fn halfspaces(&self) -> impl Iterator<Item = &HalfSpace> {
        self.facets.iter().map(|f| &f.halfspace)
    }

    /// Axis-aligned bounding box `(lower, upper)`.
    pub fn bounding_box(&self) -> (Vector, Vector) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for i in 0..self.dim {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        (lo, hi)
    }

    /// Normal cone `N(P, F)`, generated by the outer normals of the facets
    /// containing `F`. The zero cone for `F = P`.
    pub fn normal_cone(&self, face: &Face) -> PolyhedralCone {
        PolyhedralCone::new_unchecked(
            self.dim,
            face.facet_ids
                .iter()
                .map(|&i| self.facets[i].halfspace.normal.clone())
                .collect(),
        )
    }

    /// Builds a polytope from a point cloud (d = 2 or 3).
    pub fn from_vertices(points: &[Vector]) -> Result<Self> {
        hull::from_vertices(points)
    }

    /// Intersection of halfspaces in `R^dim`. The outer normals must
    /// positively span `R^dim`; otherwise the intersection is unbounded.
    pub fn from_halfspaces(dim: usize, halfspaces: &[HalfSpace]) -> Result<Intersection> {
        if halfspaces.iter().any(|h| h.normal.len() != dim) {
            return validation("halfspace in the wrong dimension");
        }
        let normals = PolyhedralCone::new_unchecked(dim, halfspaces.iter().map(|h| h.normal.clone()).collect());
        if dim == 0 || normals.linear_hull().dim() < dim || !normals.inner_normals().is_empty() {
            return validation("halfspaces do not bound a polytope");
        }
        hull::from_halfspaces(dim, halfspaces)
    }

    /// [`Polytope::from_halfspaces`] for systems known to be bounded, such
    /// as facets of several polytopes together.
    pub(crate) fn from_bounded_halfspaces(dim: usize, halfspaces: &[HalfSpace]) -> Result<Intersection> {
        hull::from_halfspaces(dim, halfspaces)
    }

    /// Builds a polytope from explicit combinatorial data, as required for
    /// d >= 4. Every vertex must satisfy every facet inequality and every
    /// facet must contain `d` affinely independent vertices. When `faces`
    /// is given (vertex-id lists keyed by dimension) it must match the
    /// lattice generated by the facets.
    pub fn from_combinatorial(
        dim: usize,
        vertices: Vec<Vector>,
        facets: Vec<HalfSpace>,
        faces: Option<&[(usize, Vec<Vec<usize>>)]>,
    ) -> Result<Self> {
        if dim < 1 {
            return validation("dimension must be positive");
        }
        if vertices.iter().any(|v| v.len() != dim) || facets.iter().any(|h| h.normal.len() != dim)
        {
            return validation("vertex or facet normal has the wrong dimension");
        }
        if vertices.len() < dim + 1 {
            return Err(Error::DegenerateInput(format!(
                "{} vertices cannot span dimension {dim}",
                vertices.len()
            )));
        }
        let tol = tolerance_for(&vertices);
        for (fi, h) in facets.iter().enumerate() {
            for (vi, v) in vertices.iter().enumerate() {
                if !h.contains(v, tol) {
                    return validation(format!("vertex {vi} violates facet {fi}"));
                }
            }
        }
        if hull::affine_rank(&vertices) < dim {
            return Err(Error::DegenerateInput("vertices are not full-dimensional".into()));
        }
        let n_facets = facets.len();
        let poly = assemble(dim, vertices, facets, tol);
        if poly.facets.len() != n_facets {
            return validation("some facet does not contain d affinely independent vertices");
        }
        if let Some(given) = faces {
            for (j, lists) in given {
                let mut expected: Vec<Vec<usize>> = lists
                    .iter()
                    .map(|l| {
                        let mut l = l.clone();
                        l.sort_unstable();
                        l
                    })
                    .collect();
                expected.sort();
                let mut actual: Vec<Vec<usize>> =
                    poly.faces(*j).iter().map(|f| f.vertex_ids.clone()).collect();
                actual.sort();
                if expected != actual {
                    return validation(format!(
                        "given {j}-faces do not match the lattice generated by the facets"
                    ));
                }
            }
        }
        Ok(poly)
    }

    /// Intersection `P ∩ Q`.
    pub fn intersect(&self, other: &Polytope) -> Result<Intersection> {
        intersect_all(&[self, other])
    }

    /// Minkowski sum, as the hull of pairwise vertex sums (d = 2 or 3).
    pub fn minkowski_sum(&self, other: &Polytope) -> Result<Polytope> {
        if self.dim != other.dim {
            return validation("Minkowski sum of polytopes in different dimensions");
        }
        let mut points = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for a in &self.vertices {
            for b in &other.vertices {
                points.push(a + b);
            }
        }
        Polytope::from_vertices(&points)
    }

    /// Applies `x -> A x + b` to all geometric data, keeping the combinatorics.
    /// `A` must be a similarity (orthogonal times positive scalar).
    fn mapped(&self, linear: &Matrix, scale: f64, shift: &Vector) -> Polytope {
        let vertices: Vec<Vector> = self.vertices.iter().map(|v| linear * v + shift).collect();
        let facets: Vec<HalfSpace> = self
            .facets
            .iter()
            .map(|f| {
                let normal = linear * &f.halfspace.normal / scale;
                let offset = f.halfspace.offset * scale + normal.dot(shift);
                HalfSpace { normal, offset }
            })
            .collect();
        let tol = tolerance_for(&vertices);
        assemble(self.dim, vertices, facets, tol)
    }

    pub fn translate(&self, z: &Vector) -> Result<Polytope> {
        if z.len() != self.dim {
            return validation("translation vector has the wrong dimension");
        }
        Ok(self.mapped(&Matrix::identity(self.dim, self.dim), 1.0, z))
    }

    /// `-P`.
    pub fn reflect(&self) -> Polytope {
        self.mapped(
            &(-Matrix::identity(self.dim, self.dim)),
            1.0,
            &Vector::zeros(self.dim),
        )
    }

    /// `λ P` for `λ > 0`.
    pub fn scale(&self, lambda: f64) -> Result<Polytope> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return validation("scale factor must be positive");
        }
        Ok(self.mapped(
            &(Matrix::identity(self.dim, self.dim) * lambda),
            lambda,
            &Vector::zeros(self.dim),
        ))
    }

    /// `R P` for an orthogonal matrix `R` (checked to 1e-10).
    pub fn rotate(&self, rotation: &Matrix) -> Result<Polytope> {
        check_orthogonal(rotation, self.dim)?;
        Ok(self.mapped(rotation, 1.0, &Vector::zeros(self.dim)))
    }
}

pub(crate) fn check_orthogonal(rotation: &Matrix, dim: usize) -> Result<()> {
    if rotation.nrows() != dim || rotation.ncols() != dim {
        return validation("rotation matrix has the wrong shape");
    }
    let err = (rotation.transpose() * rotation - Matrix::identity(dim, dim)).amax();
    if err > 1e-10 {
        return validation(format!("matrix is not orthogonal (deviation {err:e})"));
    }
    Ok(())
}

/// Intersection of several polytopes in one halfspace pass.
pub fn intersect_all(polys: &[&Polytope]) -> Result<Intersection> {
    let Some(first) = polys.first() else {
        return validation("intersection of an empty family");
    };
    let d = first.dim;
    if polys.iter().any(|p| p.dim != d) {
        return validation("intersection of polytopes in different dimensions");
    }
    let (mut lo, mut hi) = first.bounding_box();
    for p in &polys[1..] {
        let (plo, phi) = p.bounding_box();
        for i in 0..d {
            lo[i] = lo[i].max(plo[i]);
            hi[i] = hi[i].min(phi[i]);
        }
    }
    let tol = polys.iter().map(|p| p.tol).fold(0.0, f64::max);
    if (0..d).any(|i| lo[i] > hi[i] + tol) {
        return Ok(Intersection::Empty);
    }
    let halfspaces: Vec<HalfSpace> = polys
        .iter()
        .flat_map(|p| p.halfspaces().cloned())
        .collect();
    hull::from_halfspaces(d, &halfspaces)
}

fn sorted_intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut j = 0;
    for &x in small {
        while j < big.len() && big[j] < x {
            j += 1;
        }
        if j == big.len() || big[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// Computes facet incidences, the face lattice and face volumes.
///
/// Halfspaces that do not touch the vertex set in `d` affinely independent
/// points are dropped. Faces are all nonempty intersections of facet vertex
/// sets, which is exactly the proper part of the face lattice.
pub(crate) fn assemble(dim: usize, vertices: Vec<Vector>, halfspaces: Vec<HalfSpace>, tol: f64) -> Polytope {
    let mut facets: Vec<Facet> = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    for h in halfspaces {
        let ids: Vec<usize> = vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| (h.normal.dot(v) - h.offset).abs() <= tol)
            .map(|(i, _)| i)
            .collect();
        if ids.len() < dim {
            continue;
        }
        let pts: Vec<Vector> = ids.iter().map(|&i| vertices[i].clone()).collect();
        if hull::affine_rank(&pts) + 1 < dim {
            continue;
        }
        if seen.insert(ids.clone()) {
            facets.push(Facet {
                halfspace: h,
                vertex_ids: ids,
            });
        }
    }

    let mut sets: Vec<Vec<usize>> = facets.iter().map(|f| f.vertex_ids.clone()).collect();
    let mut known: HashSet<Vec<usize>> = sets.iter().cloned().collect();
    let mut i = 0;
    while i < sets.len() {
        for f in &facets {
            let t = sorted_intersection(&sets[i], &f.vertex_ids);
            if !t.is_empty() && t.len() < sets[i].len() && !known.contains(&t) {
                known.insert(t.clone());
                sets.push(t);
            }
        }
        i += 1;
    }
    let all: Vec<usize> = (0..vertices.len()).collect();
    sets.push(all);

    let mut faces: Vec<Vec<Face>> = vec![Vec::new(); dim + 1];
    for ids in sets {
        let pts: Vec<&Vector> = ids.iter().map(|&i| &vertices[i]).collect();
        let mut centroid = Vector::zeros(dim);
        for p in &pts {
            centroid += *p;
        }
        centroid /= pts.len() as f64;
        let diffs: Vec<Vector> = pts[1..].iter().map(|p| *p - pts[0]).collect();
        let direction = Subspace::span_unchecked(dim, &diffs);
        let j = direction.dim();
        let facet_ids: Vec<usize> = if ids.len() == vertices.len() {
            Vec::new()
        } else {
            facets
                .iter()
                .enumerate()
                .filter(|(_, f)| is_subset(&ids, &f.vertex_ids))
                .map(|(k, _)| k)
                .collect()
        };
        faces[j].push(Face {
            dim: j,
            vertex_ids: ids,
            facet_ids,
            subfaces: Vec::new(),
            affine_point: centroid,
            direction,
            volume: 0.0,
        });
    }
    for level in faces.iter_mut() {
        level.sort_by(|a, b| a.vertex_ids.cmp(&b.vertex_ids));
    }
    // facets keep the order of faces[d-1]
    let mut ordered = Vec::with_capacity(facets.len());
    let mut remap = vec![0usize; facets.len()];
    for (new_id, face) in faces[dim - 1].iter().enumerate() {
        let old = facets
            .iter()
            .position(|f| f.vertex_ids == face.vertex_ids)
            .expect("every (d-1)-face is a facet");
        remap[old] = new_id;
        ordered.push(facets[old].clone());
    }
    let facets = if ordered.len() == facets.len() { ordered } else { facets };
    for level in faces.iter_mut() {
        for face in level.iter_mut() {
            for id in face.facet_ids.iter_mut() {
                *id = remap[*id];
            }
            face.facet_ids.sort_unstable();
        }
    }

    for j in 1..=dim {
        let (lower, upper) = faces.split_at_mut(j);
        let below = &lower[j - 1];
        for face in upper[0].iter_mut() {
            face.subfaces = below
                .iter()
                .enumerate()
                .filter(|(_, g)| is_subset(&g.vertex_ids, &face.vertex_ids))
                .map(|(k, _)| k)
                .collect();
        }
    }

    // volumes bottom-up: vol_j(F) = (1/j) Σ_G dist(c_F, aff G) vol_{j-1}(G)
    for face in faces[0].iter_mut() {
        face.volume = 1.0;
    }
    for j in 1..=dim {
        let (lower, upper) = faces.split_at_mut(j);
        let below = &lower[j - 1];
        for face in upper[0].iter_mut() {
            let mut total = 0.0;
            for &g in &face.subfaces {
                let sub = &below[g];
                let diff = &face.affine_point - &sub.affine_point;
                let height = (&diff - sub.direction.project(&diff)).norm();
                total += height * sub.volume;
            }
            face.volume = total / j as f64;
        }
    }

    Polytope {
        dim,
        vertices,
        facets,
        faces,
        tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::vector;
    use approx::assert_abs_diff_eq;

    #[test]
    fn square_lattice() {
        let sq = corpus::unit_square();
        assert_eq!(sq.f_vector(), vec![4, 4, 1]);
        assert_abs_diff_eq!(sq.volume(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn cube_lattice_and_volume() {
        let c = corpus::unit_cube();
        assert_eq!(c.f_vector(), vec![8, 12, 6, 1]);
        assert_abs_diff_eq!(c.volume(), 1.0, epsilon = 1e-14);
        for f in c.faces(2) {
            assert_abs_diff_eq!(f.volume, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn collinear_points_are_degenerate() {
        let pts = [vector(&[0.0, 0.0]), vector(&[1.0, 1.0]), vector(&[2.0, 2.0])];
        assert!(matches!(
            Polytope::from_vertices(&pts),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn normal_cones_of_square_and_cube() {
        let sq = corpus::unit_square();
        let top = sq
            .faces(1)
            .iter()
            .find(|f| f.vertex_ids.iter().all(|&i| sq.vertices()[i][1] == 1.0))
            .unwrap();
        let cone = sq.normal_cone(top);
        assert_eq!(cone.generators().len(), 1);
        assert_abs_diff_eq!((&cone.generators()[0] - vector(&[0.0, 1.0])).norm(), 0.0, epsilon = 1e-14);

        let corner = sq
            .faces(0)
            .iter()
            .find(|f| sq.vertices()[f.vertex_ids[0]] == vector(&[1.0, 1.0]))
            .unwrap();
        assert_eq!(sq.normal_cone(corner).generators().len(), 2);

        let cube = corpus::unit_cube();
        let edge = cube
            .faces(1)
            .iter()
            .find(|f| {
                f.vertex_ids
                    .iter()
                    .all(|&i| cube.vertices()[i][0] == 1.0 && cube.vertices()[i][1] == 1.0)
            })
            .unwrap();
        let mut gens: Vec<Vec<f64>> = cube
            .normal_cone(edge)
            .generators()
            .iter()
            .map(|g| g.iter().map(|x| x.round()).collect())
            .collect();
        gens.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(gens, vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]]);
        let whole = &cube.faces(3)[0];
        assert!(cube.normal_cone(whole).generators().is_empty());
    }

    #[test]
    fn intersections() {
        let sq = corpus::unit_square();
        let shifted = sq.translate(&vector(&[0.5, 0.5])).unwrap();
        let p = sq.intersect(&shifted).unwrap().polytope().unwrap();
        assert_abs_diff_eq!(p.volume(), 0.25, epsilon = 1e-14);
        assert!(matches!(
            sq.intersect(&sq.translate(&vector(&[2.0, 0.0])).unwrap()).unwrap(),
            Intersection::Empty
        ));
        assert!(matches!(
            sq.intersect(&sq.translate(&vector(&[1.0, 0.0])).unwrap()).unwrap(),
            Intersection::Degenerate(1)
        ));
        assert!(matches!(
            sq.intersect(&sq.translate(&vector(&[1.0, 1.0])).unwrap()).unwrap(),
            Intersection::Degenerate(0)
        ));
    }

    #[test]
    fn minkowski_sums() {
        let sq = corpus::unit_square();
        let s = sq.minkowski_sum(&sq).unwrap();
        assert_abs_diff_eq!(s.volume(), 4.0, epsilon = 1e-13);
        let (lo, hi) = s.bounding_box();
        assert_abs_diff_eq!((hi - lo - vector(&[2.0, 2.0])).norm(), 0.0, epsilon = 1e-14);
        let t = sq.minkowski_sum(&sq.reflect()).unwrap();
        let (lo, hi) = t.bounding_box();
        assert_abs_diff_eq!((lo + vector(&[1.0, 1.0])).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((hi - vector(&[1.0, 1.0])).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn rigid_maps() {
        let sq = corpus::unit_square();
        let r = sq.reflect();
        for v in r.vertices() {
            assert!(v.iter().all(|&x| (-1.0..=0.0).contains(&x)));
        }
        let rot = Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert_abs_diff_eq!(sq.rotate(&rot).unwrap().volume(), 1.0, epsilon = 1e-14);
        let skew = Matrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(sq.rotate(&skew).is_err());
        assert_abs_diff_eq!(sq.scale(3.0).unwrap().volume(), 9.0, epsilon = 1e-12);
    }

    #[test]
    fn combinatorial_input_is_checked() {
        let cube = corpus::unit_cube();
        let facets: Vec<HalfSpace> = cube.halfspaces().cloned().collect();
        let p = Polytope::from_combinatorial(3, cube.vertices().to_vec(), facets.clone(), None).unwrap();
        assert_eq!(p.f_vector(), vec![8, 12, 6, 1]);

        let mut bad = facets.clone();
        bad[0].offset -= 0.5;
        assert!(Polytope::from_combinatorial(3, cube.vertices().to_vec(), bad, None).is_err());

        let wrong_faces = vec![(0usize, vec![vec![0usize]])];
        assert!(Polytope::from_combinatorial(3, cube.vertices().to_vec(), facets, Some(&wrong_faces)).is_err());
    }

    #[test]
    fn hypercube_from_combinatorial_data() {
        let p = corpus::hypercube(4);
        assert_eq!(p.f_vector(), vec![16, 32, 24, 8, 1]);
        assert_abs_diff_eq!(p.volume(), 1.0, epsilon = 1e-12);
    }
}
