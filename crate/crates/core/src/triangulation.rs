//! Gluing tables of generalized triangulations and their JSON form.

use crate::perm::Perm4;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TriangulationError {
    #[error("malformed triangulation: {0}")]
    Malformed(String),
    #[error("tetrahedron {tet} face {face}: permutation {images:?} is not a bijection")]
    NonBijective { tet: usize, face: usize, images: Vec<i64> },
    #[error("gluing of tetrahedron {tet} face {face} is not involutive")]
    NonInvolutive { tet: usize, face: usize },
}

/// Face `f` of a tetrahedron is glued to face `perm(f)` of `tet`; vertex `i`
/// maps to vertex `perm(i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FaceGluing {
    pub tet: usize,
    pub perm: Perm4,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Tetrahedron {
    /// Entry `f` describes the face opposite vertex `f`; `None` is a boundary face.
    pub gluings: [Option<FaceGluing>; 4],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    pub name: String,
    tets: Vec<Tetrahedron>,
}

impl Triangulation {
    /// Wraps a gluing table after checking that every gluing is reciprocated.
    pub fn new(name: impl Into<String>, tets: Vec<Tetrahedron>) -> Result<Self, TriangulationError> {
        let tri = Triangulation { name: name.into(), tets };
        tri.check_involution()?;
        Ok(tri)
    }

    pub(crate) fn from_parts_unchecked(name: String, tets: Vec<Tetrahedron>) -> Self {
        Triangulation { name, tets }
    }

    fn check_involution(&self) -> Result<(), TriangulationError> {
        let n = self.tets.len();
        for (t, tet) in self.tets.iter().enumerate() {
            for f in 0..4 {
                let Some(g) = tet.gluings[f] else { continue };
                if g.tet >= n {
                    return Err(TriangulationError::Malformed(format!(
                        "tetrahedron {t} face {f} glued to missing tetrahedron {}",
                        g.tet
                    )));
                }
                let back_face = g.perm.apply(f);
                let ok = match self.tets[g.tet].gluings[back_face] {
                    Some(back) => back.tet == t && back.perm == g.perm.inverse(),
                    None => false,
                };
                if !ok || (g.tet == t && back_face == f) {
                    return Err(TriangulationError::NonInvolutive { tet: t, face: f });
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.tets.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.tets.is_empty()
    }

    pub fn tets(&self) -> &[Tetrahedron] {
        &self.tets
    }

    #[inline]
    pub fn gluing(&self, tet: usize, face: usize) -> Option<FaceGluing> {
        self.tets[tet].gluings[face]
    }

    pub fn is_closed(&self) -> bool {
        self.tets.iter().all(|t| t.gluings.iter().all(Option::is_some))
    }

    /// Tetrahedra reachable from tetrahedron 0 through face gluings.
    pub fn is_connected(&self) -> bool {
        if self.tets.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(t) = stack.pop() {
            for g in self.tets[t].gluings.iter().flatten() {
                if !seen[g.tet] {
                    seen[g.tet] = true;
                    stack.push(g.tet);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Relabels tetrahedra and vertices: old tetrahedron `t` becomes
    /// `tet_order[t]`, and its vertex `v` becomes `vertex_maps[t].apply(v)`.
    pub fn relabel(&self, tet_order: &[usize], vertex_maps: &[Perm4]) -> Triangulation {
        let n = self.len();
        assert_eq!(tet_order.len(), n);
        assert_eq!(vertex_maps.len(), n);
        let mut tets = vec![Tetrahedron::default(); n];
        for (t, tet) in self.tets.iter().enumerate() {
            let rho = vertex_maps[t];
            for f in 0..4 {
                let new_face = rho.apply(f);
                tets[tet_order[t]].gluings[new_face] = tet.gluings[f].map(|g| FaceGluing {
                    tet: tet_order[g.tet],
                    perm: vertex_maps[g.tet].compose(g.perm).compose(rho.inverse()),
                });
            }
        }
        Triangulation { name: self.name.clone(), tets }
    }

    pub fn from_json(text: &str) -> Result<Self, TriangulationError> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| TriangulationError::Malformed(e.to_string()))?;
        Self::from_json_value(&value)
    }

    pub fn from_json_value(value: &Value) -> Result<Self, TriangulationError> {
        let malformed = |msg: &str| TriangulationError::Malformed(msg.to_string());
        let obj = value.as_object().ok_or_else(|| malformed("expected an object"))?;
        let name = obj
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| malformed("missing string field \"name\""))?;
        let rows = obj
            .get("tets")
            .and_then(Value::as_array)
            .ok_or_else(|| malformed("missing array field \"tets\""))?;
        let mut tets = Vec::with_capacity(rows.len());
        for (t, row) in rows.iter().enumerate() {
            let faces = row
                .as_array()
                .filter(|a| a.len() == 4)
                .ok_or_else(|| malformed(&format!("tetrahedron {t} must list 4 faces")))?;
            let mut tet = Tetrahedron::default();
            for (f, entry) in faces.iter().enumerate() {
                if entry.is_null() {
                    continue;
                }
                let bad = || malformed(&format!("tetrahedron {t} face {f}: expected [t, [p0,p1,p2,p3]]"));
                let pair = entry.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
                let target = pair[0].as_u64().ok_or_else(bad)? as usize;
                let images: Vec<i64> = pair[1]
                    .as_array()
                    .filter(|a| a.len() == 4)
                    .ok_or_else(bad)?
                    .iter()
                    .map(|x| x.as_i64().ok_or_else(bad))
                    .collect::<Result<_, _>>()?;
                let perm = if images.iter().all(|&x| (0..4).contains(&x)) {
                    Perm4::new([images[0] as u8, images[1] as u8, images[2] as u8, images[3] as u8])
                } else {
                    None
                };
                let perm = perm.ok_or(TriangulationError::NonBijective { tet: t, face: f, images })?;
                tet.gluings[f] = Some(FaceGluing { tet: target, perm });
            }
            tets.push(tet);
        }
        Triangulation::new(name, tets)
    }

    pub fn to_json_value(&self) -> Value {
        let tets: Vec<Value> = self
            .tets
            .iter()
            .map(|tet| {
                Value::Array(
                    tet.gluings
                        .iter()
                        .map(|g| match g {
                            Some(g) => json!([g.tet, g.perm.images()]),
                            None => Value::Null,
                        })
                        .collect(),
                )
            })
            .collect();
        let mut map = serde_json::Map::new();
        map.insert("name".into(), Value::String(self.name.clone()));
        map.insert("tets".into(), Value::Array(tets));
        Value::Object(map)
    }

    /// Compact JSON with keys in the order `name`, `tets`.
    pub fn to_json(&self) -> String {
        let tets: Vec<String> = self
            .tets
            .iter()
            .map(|tet| {
                let faces: Vec<String> = tet
                    .gluings
                    .iter()
                    .map(|g| match g {
                        Some(g) => {
                            let p = g.perm.images();
                            format!("[{},[{},{},{},{}]]", g.tet, p[0], p[1], p[2], p[3])
                        }
                        None => "null".to_string(),
                    })
                    .collect();
                format!("[{}]", faces.join(","))
            })
            .collect();
        format!(
            "{{\"name\":{},\"tets\":[{}]}}",
            Value::String(self.name.clone()),
            tets.join(",")
        )
    }
}
