use serde::{Deserialize, Serialize};

use super::{hull, check_orthogonal, Face, HalfSpace, Intersection, Polytope};
use crate::error::{validation, Result};
use crate::{Matrix, Vector};

/// Convex Borel region in `R^d` used to localize measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RegionJson", into = "RegionJson")]
pub enum Region {
    All,
    /// Closed axis-aligned box.
    Box { lower: Vector, upper: Vector },
    /// Intersection of closed halfspaces `n . x <= h`.
    HalfSpaces(Vec<HalfSpace>),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RegionJson {
    All,
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Halfspaces(Vec<HalfSpaceJson>),
}

#[derive(Serialize, Deserialize)]
struct HalfSpaceJson {
    normal: Vec<f64>,
    offset: f64,
}

impl From<RegionJson> for Region {
    fn from(r: RegionJson) -> Self {
        match r {
            RegionJson::All => Region::All,
            RegionJson::Box { lower, upper } => Region::Box {
                lower: Vector::from_vec(lower),
                upper: Vector::from_vec(upper),
            },
            // normalization happens in `validate`
            RegionJson::Halfspaces(hs) => Region::HalfSpaces(
                hs.into_iter()
                    .map(|h| HalfSpace {
                        normal: Vector::from_vec(h.normal),
                        offset: h.offset,
                    })
                    .collect(),
            ),
        }
    }
}

impl From<Region> for RegionJson {
    fn from(r: Region) -> Self {
        match r {
            Region::All => RegionJson::All,
            Region::Box { lower, upper } => RegionJson::Box {
                lower: lower.iter().copied().collect(),
                upper: upper.iter().copied().collect(),
            },
            Region::HalfSpaces(hs) => RegionJson::Halfspaces(
                hs.into_iter()
                    .map(|h| HalfSpaceJson {
                        normal: h.normal.iter().copied().collect(),
                        offset: h.offset,
                    })
                    .collect(),
            ),
        }
    }
}

impl Region {
    pub fn boxed(lower: &[f64], upper: &[f64]) -> Region {
        Region::Box {
            lower: Vector::from_column_slice(lower),
            upper: Vector::from_column_slice(upper),
        }
    }

    /// Checks dimensions and normalizes halfspace normals.
    pub fn validate(self, dim: usize) -> Result<Region> {
        match self {
            Region::All => Ok(Region::All),
            Region::Box { lower, upper } => {
                if lower.len() != dim || upper.len() != dim {
                    return validation(format!("box bounds must have dimension {dim}"));
                }
                if lower.iter().chain(upper.iter()).any(|x| !x.is_finite()) {
                    return validation("box bounds must be finite");
                }
                if lower.iter().zip(upper.iter()).any(|(l, u)| l > u) {
                    return validation("box lower bound exceeds upper bound");
                }
                Ok(Region::Box { lower, upper })
            }
            Region::HalfSpaces(hs) => {
                let mut out = Vec::with_capacity(hs.len());
                for h in hs {
                    if h.normal.len() != dim {
                        return validation(format!("halfspace normal must have dimension {dim}"));
                    }
                    out.push(HalfSpace::new(h.normal, h.offset)?);
                }
                Ok(Region::HalfSpaces(out))
            }
        }
    }

    pub fn is_all(&self) -> bool {
        matches!(self, Region::All)
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        match self {
            Region::All => true,
            Region::Box { lower, upper } => (0..x.len()).all(|i| x[i] >= lower[i] - tol && x[i] <= upper[i] + tol),
            Region::HalfSpaces(hs) => hs.iter().all(|h| h.contains(x, tol)),
        }
    }

    /// Halfspace description; empty for `All`.
    pub fn halfspaces(&self) -> Vec<HalfSpace> {
        match self {
            Region::All => Vec::new(),
            Region::Box { lower, upper } => {
                let d = lower.len();
                let mut out = Vec::with_capacity(2 * d);
                for i in 0..d {
                    let mut n = Vector::zeros(d);
                    n[i] = 1.0;
                    out.push(HalfSpace {
                        normal: n.clone(),
                        offset: upper[i],
                    });
                    out.push(HalfSpace {
                        normal: -n,
                        offset: -lower[i],
                    });
                }
                out
            }
            Region::HalfSpaces(hs) => hs.clone(),
        }
    }

    pub fn translate(&self, z: &Vector) -> Region {
        match self {
            Region::All => Region::All,
            Region::Box { lower, upper } => Region::Box {
                lower: lower + z,
                upper: upper + z,
            },
            Region::HalfSpaces(hs) => Region::HalfSpaces(hs.iter().map(|h| h.translated(z)).collect()),
        }
    }

    /// Image under an orthogonal map; boxes become halfspace regions.
    pub fn rotate(&self, rotation: &Matrix) -> Result<Region> {
        if let Region::All = self {
            return Ok(Region::All);
        }
        check_orthogonal(rotation, rotation.nrows())?;
        Ok(Region::HalfSpaces(
            self.halfspaces().iter().map(|h| h.transformed(rotation)).collect(),
        ))
    }

    /// `λ B` for `λ > 0`.
    pub fn scale(&self, lambda: f64) -> Region {
        match self {
            Region::All => Region::All,
            Region::Box { lower, upper } => Region::Box {
                lower: lower * lambda,
                upper: upper * lambda,
            },
            Region::HalfSpaces(hs) => Region::HalfSpaces(
                hs.iter()
                    .map(|h| HalfSpace {
                        normal: h.normal.clone(),
                        offset: h.offset * lambda,
                    })
                    .collect(),
            ),
        }
    }

    pub fn intersect(&self, other: &Region) -> Region {
        match (self, other) {
            (Region::All, r) | (r, Region::All) => r.clone(),
            (
                Region::Box { lower: l1, upper: u1 },
                Region::Box { lower: l2, upper: u2 },
            ) => Region::Box {
                lower: l1.zip_map(l2, f64::max),
                upper: u1.zip_map(u2, f64::min),
            },
            (a, b) => {
                let mut hs = a.halfspaces();
                hs.extend(b.halfspaces());
                Region::HalfSpaces(hs)
            }
        }
    }

    /// True if the region is (numerically) empty as a box.
    pub(crate) fn box_is_empty(&self) -> bool {
        match self {
            Region::Box { lower, upper } => lower.iter().zip(upper.iter()).any(|(l, u)| l > u),
            _ => false,
        }
    }
}

/// `H^j(F ∩ B)` for a `j`-face `F` of `poly`.
///
/// The face is described inside its affine hull by the halfspaces of its
/// `(j-1)`-subfaces; the region's halfspaces are pulled back to the same
/// local coordinates and the clipped polytope's volume is returned.
pub fn face_measure(poly: &Polytope, face: &Face, region: &Region) -> f64 {
    let tol = poly.tolerance();
    if region.is_all() {
        return face.volume;
    }
    if region.box_is_empty() {
        return 0.0;
    }
    let verts = poly.vertices();
    if face
        .vertex_ids
        .iter()
        .all(|&i| region.contains(&verts[i], tol))
    {
        return face.volume;
    }
    if face.dim == 0 {
        return 0.0;
    }
    let basis = face.direction.basis();
    let c = &face.affine_point;
    let j = face.dim;

    let mut constraints: Vec<(Vector, f64)> = Vec::new();
    for h in region.halfspaces() {
        let a = Vector::from_iterator(j, basis.iter().map(|b| b.dot(&h.normal)));
        let rhs = h.offset - h.normal.dot(c);
        if a.norm() <= 1e-12 {
            if rhs < -tol {
                return 0.0;
            }
            continue;
        }
        constraints.push((a, rhs));
    }

    if j == 1 {
        let coords: Vec<f64> = face
            .vertex_ids
            .iter()
            .map(|&i| basis[0].dot(&(&verts[i] - c)))
            .collect();
        let mut lo = coords.iter().copied().fold(f64::INFINITY, f64::min);
        let mut hi = coords.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (a, rhs) in &constraints {
            let t = rhs / a[0];
            if a[0] > 0.0 {
                hi = hi.min(t);
            } else {
                lo = lo.max(t);
            }
        }
        return (hi - lo).max(0.0);
    }

    let below = poly.faces(j - 1);
    let mut hs: Vec<HalfSpace> = Vec::with_capacity(face.subfaces.len() + constraints.len());
    for &g in &face.subfaces {
        let sub = &below[g];
        let w = c - &sub.affine_point;
        let inward = &w - sub.direction.project(&w);
        let n = Vector::from_iterator(j, basis.iter().map(|b| -b.dot(&inward)));
        let len = n.norm();
        let n = n / len;
        let p = Vector::from_iterator(j, basis.iter().map(|b| b.dot(&(&sub.affine_point - c))));
        let offset = n.dot(&p);
        hs.push(HalfSpace { normal: n, offset });
    }
    for (a, rhs) in constraints {
        let len = a.norm();
        hs.push(HalfSpace {
            normal: a / len,
            offset: rhs / len,
        });
    }
    match hull::from_halfspaces(j, &hs) {
        Ok(Intersection::Polytope(p)) => p.volume(),
        _ => 0.0,
    }
}
