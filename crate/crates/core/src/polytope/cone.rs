use itertools::Itertools;

use crate::error::{validation, Result};
use crate::multilinear::Subspace;
use crate::{Matrix, Vector};

/// Tolerance below which the min-norm point of the generator hull counts as 0.
pub const POINTED_TOL: f64 = 1e-10;

/// Finitely generated convex cone `cone{g_1, ..., g_n}` with unit generators.
#[derive(Debug, Clone)]
pub struct PolyhedralCone {
    dim: usize,
    generators: Vec<Vector>,
}

impl PolyhedralCone {
    /// Normalizes the generators; zero generators are dropped.
    pub fn new(dim: usize, generators: Vec<Vector>) -> Result<Self> {
        if generators.iter().any(|g| g.len() != dim) {
            return validation("cone generator has the wrong dimension");
        }
        if generators.iter().any(|g| g.iter().any(|x| !x.is_finite())) {
            return validation("non-finite cone generator");
        }
        let generators = generators
            .into_iter()
            .filter_map(|g| {
                let n = g.norm();
                (n > 1e-14).then(|| g / n)
            })
            .collect();
        Ok(Self::new_unchecked(dim, generators))
    }

    /// Generators must already be unit vectors of length `dim`.
    pub(crate) fn new_unchecked(dim: usize, generators: Vec<Vector>) -> Self {
        let mut unique: Vec<Vector> = Vec::with_capacity(generators.len());
        for g in generators {
            if !unique.iter().any(|u| (u - &g).amax() <= 1e-12) {
                unique.push(g);
            }
        }
        Self {
            dim,
            generators: unique,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    /// `lin K`, the span of the generators.
    pub fn linear_hull(&self) -> Subspace {
        Subspace::span_unchecked(self.dim, &self.generators)
    }

    /// Sum of cones: the cone generated by all generators together.
    pub fn sum(cones: &[&PolyhedralCone]) -> Result<PolyhedralCone> {
        let Some(first) = cones.first() else {
            return validation("sum of an empty family of cones");
        };
        if cones.iter().any(|c| c.dim != first.dim) {
            return validation("cones live in different dimensions");
        }
        let gens = cones
            .iter()
            .flat_map(|c| c.generators.iter().cloned())
            .collect();
        Ok(PolyhedralCone::new_unchecked(first.dim, gens))
    }

    /// Point of minimal norm in the convex hull of the generators (Wolfe's
    /// algorithm). It satisfies `x . g >= |x|^2` for every generator, so for a
    /// pointed cone it is an interior slicing direction.
    pub fn min_norm_point(&self) -> Vector {
        min_norm_point(&self.generators, self.dim)
    }

    /// True when the cone contains no line. The zero cone is pointed.
    pub fn is_pointed(&self) -> bool {
        self.is_zero() || self.min_norm_point().norm() > POINTED_TOL
    }

    pub fn contains(&self, x: &Vector) -> bool {
        let lin = self.linear_hull();
        let scale = x.norm().max(1.0);
        if (x - lin.project(x)).norm() > 1e-9 * scale {
            return false;
        }
        self.inner_normals()
            .iter()
            .all(|n| n.dot(x) >= -1e-9 * scale)
    }

    /// Inner facet normals of the cone, relative to `lin K`: `u` in `lin K`
    /// lies in `K` iff `n . u >= 0` for all returned `n`. Empty when `K` is a
    /// linear subspace or `lin K` has dimension 1 with a single ray.
    pub fn inner_normals(&self) -> Vec<Vector> {
        let lin = self.linear_hull();
        let m = lin.dim();
        if m == 0 {
            return Vec::new();
        }
        let coords: Vec<Vector> = self.generators.iter().map(|g| lin.coordinates(g)).collect();
        let mut normals: Vec<Vector> = Vec::new();
        if m == 1 {
            let pos = coords.iter().any(|c| c[0] > 0.0);
            let neg = coords.iter().any(|c| c[0] < 0.0);
            if pos != neg {
                let s = if pos { 1.0 } else { -1.0 };
                normals.push(lin.embed(&Vector::from_element(1, s)));
            }
            return normals;
        }
        for subset in (0..coords.len()).combinations(m - 1) {
            let chosen: Vec<Vector> = subset.iter().map(|&i| coords[i].clone()).collect();
            let span = Subspace::span_unchecked(m, &chosen);
            if span.dim() != m - 1 {
                continue;
            }
            let n = span.complement().basis()[0].clone();
            let mut pos = false;
            let mut neg = false;
            for c in &coords {
                let s = n.dot(c);
                if s > 1e-12 {
                    pos = true;
                } else if s < -1e-12 {
                    neg = true;
                }
            }
            if pos && neg {
                continue;
            }
            let n = if neg { -n } else { n };
            if !normals.iter().any(|u| (u - &n).amax() <= 1e-10) {
                normals.push(n);
            }
        }
        normals.into_iter().map(|n| lin.embed(&n)).collect()
    }

    pub fn transformed(&self, rotation: &Matrix) -> PolyhedralCone {
        PolyhedralCone::new_unchecked(
            self.dim,
            self.generators.iter().map(|g| rotation * g).collect(),
        )
    }
}

/// Wolfe's minimum-norm point in the convex hull of `points`.
pub(crate) fn min_norm_point(points: &[Vector], dim: usize) -> Vector {
    if points.is_empty() {
        return Vector::zeros(dim);
    }
    let scale = points.iter().map(|p| p.norm_squared()).fold(0.0, f64::max);
    let eps = 1e-13 * scale.max(1e-300);
    let start = (0..points.len())
        .min_by(|&a, &b| points[a].norm_squared().total_cmp(&points[b].norm_squared()))
        .unwrap();
    let mut set = vec![start];
    let mut weights = vec![1.0];
    let mut x = points[start].clone();

    for _ in 0..(50 * points.len() + 50) {
        let xx = x.norm_squared();
        if xx <= eps {
            return Vector::zeros(dim);
        }
        let (j, best) = (0..points.len())
            .map(|j| (j, x.dot(&points[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if xx - best <= 1e-12 * scale || set.contains(&j) {
            return x;
        }
        set.push(j);
        weights.push(0.0);
        loop {
            let mu = affine_minimizer(points, &set);
            if mu.iter().all(|&m| m > 1e-14) {
                weights = mu;
                x = combine(points, &set, &weights, dim);
                break;
            }
            let mut theta = 1.0f64;
            for (l, m) in weights.iter().zip(&mu) {
                if *m <= 1e-14 {
                    let t = l / (l - m);
                    if t < theta {
                        theta = t;
                    }
                }
            }
            let theta = theta.clamp(0.0, 1.0);
            for (l, m) in weights.iter_mut().zip(&mu) {
                *l = (1.0 - theta) * *l + theta * m;
            }
            let mut k = 0;
            while k < set.len() {
                if weights[k] <= 1e-14 {
                    set.remove(k);
                    weights.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = weights.iter().sum();
            for w in weights.iter_mut() {
                *w /= total;
            }
            x = combine(points, &set, &weights, dim);
            if set.len() <= 1 {
                break;
            }
        }
    }
    x
}

fn combine(points: &[Vector], set: &[usize], weights: &[f64], dim: usize) -> Vector {
    let mut x = Vector::zeros(dim);
    for (&i, &w) in set.iter().zip(weights) {
        x.axpy(w, &points[i], 1.0);
    }
    x
}

/// Weights summing to 1 that minimize `|Σ w_i p_i|` over the affine hull.
fn affine_minimizer(points: &[Vector], set: &[usize]) -> Vec<f64> {
    let n = set.len();
    let mut m = Matrix::zeros(n + 1, n + 1);
    for a in 0..n {
        for b in 0..n {
            m[(a, b)] = points[set[a]].dot(&points[set[b]]);
        }
        m[(a, n)] = 1.0;
        m[(n, a)] = 1.0;
    }
    let mut rhs = Vector::zeros(n + 1);
    rhs[n] = 1.0;
    let sol = m
        .clone()
        .lu()
        .solve(&rhs)
        .filter(|s| s.iter().all(|x| x.is_finite()))
        .or_else(|| m.svd(true, true).solve(&rhs, 1e-14).ok())
        .unwrap_or_else(|| {
            let mut v = Vector::zeros(n + 1);
            v[0] = 1.0;
            v
        });
    sol.iter().take(n).copied().collect()
}
