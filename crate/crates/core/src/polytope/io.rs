use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{HalfSpace, Polytope};
use crate::error::{validation, Result};
use crate::Vector;

/// Facet record of the polytope JSON format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FacetJson {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Polytope JSON document.
///
/// `{"dim": d, "vertices": [[...], ...]}` is enough for `d <= 3`; higher
/// dimensions must list `facets`, and may list `faces` (vertex-id lists keyed
/// by dimension) which are checked against the facet lattice.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<FacetJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faces: Option<BTreeMap<String, Vec<Vec<usize>>>>,
}

impl PolytopeJson {
    pub fn to_polytope(&self) -> Result<Polytope> {
        if self.vertices.iter().any(|v| v.len() != self.dim) {
            return validation(format!("every vertex must have {} coordinates", self.dim));
        }
        let vertices: Vec<Vector> = self
            .vertices
            .iter()
            .map(|v| Vector::from_column_slice(v))
            .collect();
        match &self.facets {
            None => {
                if self.faces.is_some() {
                    return validation("\"faces\" requires \"facets\"");
                }
                Polytope::from_vertices(&vertices)
            }
            Some(facets) => {
                let mut hs = Vec::with_capacity(facets.len());
                for f in facets {
                    if f.normal.len() != self.dim {
                        return validation("facet normal has the wrong dimension");
                    }
                    hs.push(HalfSpace::new(Vector::from_column_slice(&f.normal), f.offset)?);
                }
                let faces = match &self.faces {
                    None => None,
                    Some(map) => {
                        let mut out = Vec::with_capacity(map.len());
                        for (key, lists) in map {
                            let j: usize = key.parse().map_err(|_| {
                                crate::Error::Validation(format!("face dimension key {key:?} is not an integer"))
                            })?;
                            if j >= self.dim {
                                return validation(format!("face dimension {j} out of range"));
                            }
                            if lists.iter().flatten().any(|&i| i >= vertices.len()) {
                                return validation("face refers to a missing vertex");
                            }
                            out.push((j, lists.clone()));
                        }
                        Some(out)
                    }
                };
                Polytope::from_combinatorial(self.dim, vertices, hs, faces.as_deref())
            }
        }
    }

    /// Full description including facets and the face lattice.
    pub fn from_polytope(p: &Polytope) -> Self {
        let faces = (0..p.dim())
            .map(|j| {
                (
                    j.to_string(),
                    p.faces(j).iter().map(|f| f.vertex_ids.clone()).collect(),
                )
            })
            .collect();
        Self {
            dim: p.dim(),
            vertices: p.vertices().iter().map(|v| v.iter().copied().collect()).collect(),
            facets: Some(
                p.halfspaces()
                    .map(|h| FacetJson {
                        normal: h.normal.iter().copied().collect(),
                        offset: h.offset,
                    })
                    .collect(),
            ),
            faces: Some(faces),
        }
    }
}

impl Polytope {
    pub fn from_json(text: &str) -> Result<Polytope> {
        let doc: PolytopeJson = serde_json::from_str(text)?;
        doc.to_polytope()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PolytopeJson::from_polytope(self)).expect("plain data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn vertex_only_documents() {
        let p = Polytope::from_json(r#"{"dim":2,"vertices":[[0,0],[1,0],[1,1],[0,1]]}"#).unwrap();
        assert_eq!(p.f_vector(), vec![4, 4, 1]);
        assert!(Polytope::from_json(r#"{"dim":2,"vertices":[[0,0],[1,0,3]]}"#).is_err());
        assert!(Polytope::from_json(r#"{"dim":2,"vertices":"#).is_err());
    }

    #[test]
    fn round_trip_keeps_the_lattice() {
        let h = corpus::hypercube(4);
        let back = Polytope::from_json(&h.to_json()).unwrap();
        assert_eq!(back.f_vector(), h.f_vector());
        let cube = corpus::unit_cube();
        let back = Polytope::from_json(&cube.to_json()).unwrap();
        assert!((back.volume() - 1.0).abs() < 1e-12);
    }
}
