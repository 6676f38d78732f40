use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::polytope::PolyhedralCone;
use crate::{Matrix, Vector};

/// Borel set of directions `C ⊂ S^{d-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "DirectionsJson", into = "DirectionsJson")]
pub enum SphericalRegion {
    All,
    /// `{u : u . axis >= cos(angle)}` with `angle` in `(0, π]`.
    Cap { axis: Vector, angle: f64 },
    /// `{u : u . n >= 0 for all n}`; a full-dimensional polyhedral cone.
    Polyhedral { normals: Vec<Vector> },
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum DirectionsJson {
    All,
    Cap { axis: Vec<f64>, angle: f64 },
    Cone { generators: Vec<Vec<f64>> },
    Halfspaces(Vec<Vec<f64>>),
}

impl From<DirectionsJson> for SphericalRegion {
    fn from(c: DirectionsJson) -> Self {
        match c {
            DirectionsJson::All => SphericalRegion::All,
            DirectionsJson::Cap { axis, angle } => SphericalRegion::Cap {
                axis: Vector::from_vec(axis),
                angle,
            },
            DirectionsJson::Cone { generators } => {
                let dim = generators.first().map_or(0, |g| g.len());
                let gens = generators.into_iter().map(Vector::from_vec).collect();
                match PolyhedralCone::new(dim, gens) {
                    Ok(k) if k.linear_hull().dim() == dim && dim > 0 => SphericalRegion::Polyhedral {
                        normals: k.inner_normals(),
                    },
                    // rejected by `validate`
                    _ => SphericalRegion::Polyhedral {
                        normals: vec![Vector::zeros(0)],
                    },
                }
            }
            DirectionsJson::Halfspaces(ns) => SphericalRegion::Polyhedral {
                normals: ns.into_iter().map(Vector::from_vec).collect(),
            },
        }
    }
}

impl From<SphericalRegion> for DirectionsJson {
    fn from(c: SphericalRegion) -> Self {
        match c {
            SphericalRegion::All => DirectionsJson::All,
            SphericalRegion::Cap { axis, angle } => DirectionsJson::Cap {
                axis: axis.iter().copied().collect(),
                angle,
            },
            SphericalRegion::Polyhedral { normals } => DirectionsJson::Halfspaces(
                normals.iter().map(|n| n.iter().copied().collect()).collect(),
            ),
        }
    }
}

impl SphericalRegion {
    pub fn cap(axis: Vector, angle: f64) -> Result<Self> {
        SphericalRegion::Cap { axis, angle }.validate(0)
    }

    /// Directions in a full-dimensional cone `K` (`C = K ∩ S^{d-1}`).
    pub fn from_cone(cone: &PolyhedralCone) -> Result<Self> {
        if cone.linear_hull().dim() != cone.dim() {
            return validation("direction cone must be full-dimensional");
        }
        if !cone.is_pointed() {
            return validation("direction cone must be pointed");
        }
        Ok(SphericalRegion::Polyhedral {
            normals: cone.inner_normals(),
        })
    }

    /// Checks dimensions (`dim = 0` skips the dimension check) and
    /// normalizes axes and normals.
    pub fn validate(self, dim: usize) -> Result<Self> {
        match self {
            SphericalRegion::All => Ok(SphericalRegion::All),
            SphericalRegion::Cap { axis, angle } => {
                if dim > 0 && axis.len() != dim {
                    return validation(format!("cap axis must have dimension {dim}"));
                }
                let n = axis.norm();
                if !(n > 0.0) || !n.is_finite() {
                    return validation("cap axis must be a nonzero finite vector");
                }
                if !(angle > 0.0 && angle <= std::f64::consts::PI) {
                    return validation("cap angle must lie in (0, pi]");
                }
                Ok(SphericalRegion::Cap {
                    axis: axis / n,
                    angle,
                })
            }
            SphericalRegion::Polyhedral { normals } => {
                let mut out = Vec::with_capacity(normals.len());
                for n in normals {
                    if (dim > 0 && n.len() != dim) || n.is_empty() {
                        return validation("direction halfspace has the wrong dimension or a degenerate cone was given");
                    }
                    let len = n.norm();
                    if !(len > 0.0) || !len.is_finite() {
                        return validation("direction halfspace normal must be nonzero");
                    }
                    out.push(n / len);
                }
                Ok(SphericalRegion::Polyhedral { normals: out })
            }
        }
    }

    pub fn is_all(&self) -> bool {
        matches!(self, SphericalRegion::All)
    }

    pub fn contains(&self, u: &Vector) -> bool {
        match self {
            SphericalRegion::All => true,
            SphericalRegion::Cap { axis, angle } => axis.dot(u) >= angle.cos(),
            SphericalRegion::Polyhedral { normals } => normals.iter().all(|n| n.dot(u) >= 0.0),
        }
    }

    /// `R C`.
    pub fn rotate(&self, rotation: &Matrix) -> SphericalRegion {
        match self {
            SphericalRegion::All => SphericalRegion::All,
            SphericalRegion::Cap { axis, angle } => SphericalRegion::Cap {
                axis: rotation * axis,
                angle: *angle,
            },
            SphericalRegion::Polyhedral { normals } => SphericalRegion::Polyhedral {
                normals: normals.iter().map(|n| rotation * n).collect(),
            },
        }
    }

    /// Constraints `a . u >= b` describing the region.
    pub(crate) fn constraints(&self) -> Vec<(Vector, f64)> {
        match self {
            SphericalRegion::All => Vec::new(),
            SphericalRegion::Cap { axis, angle } => vec![(axis.clone(), angle.cos())],
            SphericalRegion::Polyhedral { normals } => {
                normals.iter().map(|n| (n.clone(), 0.0)).collect()
            }
        }
    }
}
