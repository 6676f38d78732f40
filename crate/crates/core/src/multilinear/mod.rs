//! Exterior-algebra kernel on simple multivectors.
//!
//! Only simple (decomposable) multivectors are represented: a coefficient
//! times an ordered wedge of vectors. That is enough for Gram volumes, the
//! Hodge star, p-products and subspace brackets, which is all the mixed
//! measure formulas need.

mod signs;

pub use signs::{sign_parities, SignCalc, SignParities, SINGLE_SET_C1_STATED};

use crate::error::{validation, Result};
use crate::{Matrix, Vector};

/// Orthonormality tolerance for [`Subspace`] bases.
pub const ORTHONORMAL_TOL: f64 = 1e-12;
/// Relative residual below which a vector is treated as dependent.
pub const RANK_TOL: f64 = 1e-10;

/// Volume of the parallelepiped spanned by `vectors`, i.e. `sqrt(det(G))` for
/// the Gram matrix `G`. Zero when the vectors are dependent; one for the empty
/// list.
///
/// Evaluated as the product of the diagonal of the QR factor, which avoids
/// the cancellation of forming `G` explicitly.
pub fn gram_volume(vectors: &[Vector]) -> Result<f64> {
    let Some(first) = vectors.first() else {
        return Ok(1.0);
    };
    let d = first.len();
    if vectors.iter().any(|v| v.len() != d) {
        return validation("gram_volume: vectors have different dimensions");
    }
    if vectors.len() > d {
        return validation(format!(
            "gram_volume: {} vectors in dimension {d}",
            vectors.len()
        ));
    }
    Ok(gram_volume_unchecked(vectors))
}

pub(crate) fn gram_volume_unchecked(vectors: &[Vector]) -> f64 {
    if vectors.is_empty() {
        return 1.0;
    }
    let d = vectors[0].len();
    if vectors.len() > d {
        return 0.0;
    }
    match vectors.len() {
        1 => vectors[0].norm(),
        2 => {
            let (a, b) = (&vectors[0], &vectors[1]);
            let aa = a.norm_squared();
            let bb = b.norm_squared();
            let ab = a.dot(b);
            // Lagrange identity; fall back to QR when cancellation bites.
            let det = aa * bb - ab * ab;
            if det > 1e-8 * aa * bb {
                det.sqrt()
            } else {
                qr_volume(vectors)
            }
        }
        _ => qr_volume(vectors),
    }
}

fn qr_volume(vectors: &[Vector]) -> f64 {
    let m = Matrix::from_columns(vectors);
    let r = m.qr().r();
    r.diagonal().iter().map(|x| x.abs()).product()
}

/// Determinant of the square matrix whose columns are `vectors`.
pub(crate) fn det_columns(vectors: &[Vector]) -> f64 {
    let d = vectors.len();
    match d {
        0 => 1.0,
        1 => vectors[0][0],
        2 => vectors[0][0] * vectors[1][1] - vectors[0][1] * vectors[1][0],
        3 => {
            let (a, b, c) = (&vectors[0], &vectors[1], &vectors[2]);
            a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0])
        }
        _ => Matrix::from_columns(vectors).determinant(),
    }
}

/// Modified Gram–Schmidt with pivoting: at each step the candidate with the
/// largest residual is taken. Candidates whose residual falls below
/// `RANK_TOL` times the largest input norm are dropped.
pub fn orthonormalize(vectors: &[Vector]) -> Vec<Vector> {
    let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut residuals: Vec<Vector> = vectors.to_vec();
    let mut basis: Vec<Vector> = Vec::new();
    loop {
        let best = residuals
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((idx, norm)) = best else { break };
        if norm <= RANK_TOL * scale {
            break;
        }
        let q = residuals.swap_remove(idx) / norm;
        for r in residuals.iter_mut() {
            let c = q.dot(r);
            r.axpy(-c, &q, 1.0);
        }
        // second pass keeps the basis orthonormal to round-off
        for r in residuals.iter_mut() {
            let c = q.dot(r);
            r.axpy(-c, &q, 1.0);
        }
        basis.push(q);
    }
    basis
}

/// Linear subspace of `R^d` with an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vector>,
}

impl Subspace {
    /// Span of arbitrary vectors.
    pub fn span(ambient: usize, vectors: &[Vector]) -> Result<Self> {
        if vectors.iter().any(|v| v.len() != ambient) {
            return validation("Subspace::span: vector dimension mismatch");
        }
        Ok(Self {
            ambient,
            basis: orthonormalize(vectors),
        })
    }

    pub(crate) fn span_unchecked(ambient: usize, vectors: &[Vector]) -> Self {
        Self {
            ambient,
            basis: orthonormalize(vectors),
        }
    }

    /// Wraps a basis that must already be orthonormal (Gram matrix equal to
    /// the identity within `ORTHONORMAL_TOL`).
    pub fn from_orthonormal(ambient: usize, basis: Vec<Vector>) -> Result<Self> {
        if basis.len() > ambient || basis.iter().any(|v| v.len() != ambient) {
            return validation("Subspace: basis does not fit the ambient dimension");
        }
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                if (a.dot(b) - target).abs() > ORTHONORMAL_TOL {
                    return validation("Subspace: basis is not orthonormal");
                }
            }
        }
        Ok(Self { ambient, basis })
    }

    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn whole(ambient: usize) -> Self {
        Self {
            ambient,
            basis: (0..ambient).map(|i| unit(ambient, i)).collect(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, v: &Vector) -> Vector {
        let mut out = Vector::zeros(self.ambient);
        for b in &self.basis {
            out.axpy(b.dot(v), b, 1.0);
        }
        out
    }

    /// Coordinates of `v` with respect to the basis.
    pub fn coordinates(&self, v: &Vector) -> Vector {
        Vector::from_iterator(self.basis.len(), self.basis.iter().map(|b| b.dot(v)))
    }

    /// Maps basis coordinates back into the ambient space.
    pub fn embed(&self, coords: &Vector) -> Vector {
        let mut out = Vector::zeros(self.ambient);
        for (b, c) in self.basis.iter().zip(coords.iter()) {
            out.axpy(*c, b, 1.0);
        }
        out
    }

    /// Orthogonal complement, built by extending the basis with canonical
    /// vectors (largest residual first).
    pub fn complement(&self) -> Subspace {
        let mut basis = self.basis.clone();
        let mut extra = Vec::new();
        let mut candidates: Vec<Vector> = (0..self.ambient)
            .map(|i| {
                let mut e = unit(self.ambient, i);
                for b in &basis {
                    let c = b.dot(&e);
                    e.axpy(-c, b, 1.0);
                }
                e
            })
            .collect();
        while basis.len() < self.ambient {
            let (idx, norm) = candidates
                .iter()
                .enumerate()
                .map(|(i, r)| (i, r.norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("candidates remain while the basis is incomplete");
            let q = candidates.swap_remove(idx) / norm;
            for r in candidates.iter_mut() {
                for _ in 0..2 {
                    let c = q.dot(r);
                    r.axpy(-c, &q, 1.0);
                }
            }
            basis.push(q.clone());
            extra.push(q);
        }
        Subspace {
            ambient: self.ambient,
            basis: extra,
        }
    }

    /// Applies a linear isometry to the basis.
    pub fn transformed(&self, rotation: &Matrix) -> Subspace {
        Subspace {
            ambient: self.ambient,
            basis: self.basis.iter().map(|b| rotation * b).collect(),
        }
    }
}

pub(crate) fn unit(d: usize, i: usize) -> Vector {
    let mut e = Vector::zeros(d);
    e[i] = 1.0;
    e
}

/// Simple m-vector `coeff * v_1 ∧ ... ∧ v_m` in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleMultivector {
    dim: usize,
    coeff: f64,
    vectors: Vec<Vector>,
}

impl SimpleMultivector {
    pub fn new(dim: usize, vectors: Vec<Vector>) -> Result<Self> {
        Self::with_coeff(dim, 1.0, vectors)
    }

    pub fn with_coeff(dim: usize, coeff: f64, vectors: Vec<Vector>) -> Result<Self> {
        if vectors.len() > dim {
            return validation(format!(
                "multivector of grade {} in dimension {dim}",
                vectors.len()
            ));
        }
        if vectors.iter().any(|v| v.len() != dim) {
            return validation("multivector factors have the wrong dimension");
        }
        Ok(Self {
            dim,
            coeff,
            vectors,
        })
    }

    /// Scalar as a 0-vector.
    pub fn scalar(dim: usize, value: f64) -> Self {
        Self {
            dim,
            coeff: value,
            vectors: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grade(&self) -> usize {
        self.vectors.len()
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    /// Euclidean norm `|α|`.
    pub fn norm(&self) -> f64 {
        self.coeff.abs() * gram_volume_unchecked(&self.vectors)
    }

    /// Wedge product of two simple multivectors.
    pub fn wedge(&self, other: &SimpleMultivector) -> Result<SimpleMultivector> {
        if self.dim != other.dim {
            return validation("wedge: dimension mismatch");
        }
        let mut vectors = self.vectors.clone();
        vectors.extend(other.vectors.iter().cloned());
        SimpleMultivector::with_coeff(self.dim, self.coeff * other.coeff, vectors)
    }

    /// Pairing `<α, Ω^d>` of a d-vector with the volume form.
    pub fn volume_pairing(&self) -> Result<f64> {
        if self.grade() != self.dim {
            return validation(format!(
                "volume pairing needs a {}-vector, got grade {}",
                self.dim,
                self.grade()
            ));
        }
        Ok(self.coeff * det_columns(&self.vectors))
    }

    /// Linear span of the factors.
    pub fn span(&self) -> Subspace {
        Subspace::span_unchecked(self.dim, &self.vectors)
    }

    /// Hodge star. Returns the simple `(d-m)`-vector `β` spanning the
    /// orthogonal complement of `span(α)`, with `|β| = |α|` and
    /// `<α ∧ β, Ω^d> = |α|^2`.
    pub fn hodge_star(&self) -> SimpleMultivector {
        let d = self.dim;
        let m = self.grade();
        let gram = gram_volume_unchecked(&self.vectors);
        if self.coeff == 0.0 || gram == 0.0 {
            return SimpleMultivector {
                dim: d,
                coeff: 0.0,
                vectors: (0..d - m).map(|i| unit(d, i)).collect(),
            };
        }
        let span = Subspace::span_unchecked(d, &self.vectors);
        let complement = span.complement();
        let mut all = self.vectors.clone();
        all.extend(complement.basis().iter().cloned());
        let orientation = det_columns(&all).signum();
        SimpleMultivector {
            dim: d,
            coeff: self.coeff * gram * orientation,
            vectors: complement.basis,
        }
    }
}

/// p-product `[α_1, ..., α_p] = <(*α_1) ∧ ... ∧ (*α_p), Ω^d>` for grades
/// summing to `(p-1) d`.
pub fn p_product(alphas: &[SimpleMultivector]) -> Result<f64> {
    let Some(first) = alphas.first() else {
        return validation("p_product: empty argument list");
    };
    let d = first.dim();
    if alphas.iter().any(|a| a.dim() != d) {
        return validation("p_product: dimension mismatch");
    }
    let p = alphas.len();
    let grades: usize = alphas.iter().map(|a| a.grade()).sum();
    if grades != (p - 1) * d {
        return validation(format!(
            "p_product: grades sum to {grades}, expected {}",
            (p - 1) * d
        ));
    }
    let mut acc = SimpleMultivector::scalar(d, 1.0);
    for a in alphas {
        acc = acc.wedge(&a.hodge_star())?;
    }
    acc.volume_pairing()
}

/// Bracket `[L_1, ..., L_q]`: Gram volume of the juxtaposed orthonormal
/// bases of the orthogonal complements. Lies in `[0, 1]`; zero exactly when
/// the complements are dependent.
pub fn bracket(subspaces: &[Subspace], d: usize) -> Result<f64> {
    let mut codim = 0;
    for l in subspaces {
        if l.ambient() != d {
            return validation("bracket: subspace in the wrong ambient dimension");
        }
        codim += d - l.dim();
    }
    if codim > d {
        return validation(format!(
            "bracket: complements have total dimension {codim} > {d}"
        ));
    }
    let normals: Vec<Vector> = subspaces
        .iter()
        .flat_map(|l| l.complement().basis)
        .collect();
    Ok(gram_volume_unchecked(&normals))
}
