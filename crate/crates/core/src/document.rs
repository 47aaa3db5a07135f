//! The JSON tiling document: a schema-versioned, byte-stable serialization
//! of quad-graph patches with slope data and named function payloads.
//!
//! Canonical form: struct fields in declaration order, maps with sorted
//! keys, floats in shortest round-trip notation, one trailing newline.
//! `load(save(doc))` reproduces the document exactly.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Color, QuadGraph};
use crate::labeling::{labeling_from_realization, Realization, SlopeData, LABEL_TOL};
use crate::linear::VertexFunction;
use crate::C64;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: usize,
    pub color: Color,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopesRecord {
    /// Representatives `alpha_1..alpha_d` in circular order.
    pub labels: Vec<[f64; 2]>,
    /// Argument assigned to the first representative.
    pub theta1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringRecord {
    /// Unreduced sector index of the covering branch the payload was
    /// evaluated on.
    pub sector: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covering: Option<CoveringRecord>,
    /// Vertex id -> complex value.
    pub values: BTreeMap<usize, [f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TilingDocument {
    pub schema: u32,
    pub vertices: Vec<VertexRecord>,
    pub faces: Vec<[usize; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slopes: Option<SlopesRecord>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functions: BTreeMap<String, FunctionRecord>,
}

impl TilingDocument {
    pub fn from_graph(d: &QuadGraph, slopes: Option<&SlopeData>) -> Self {
        let vertices = (0..d.vertex_count())
            .map(|v| VertexRecord {
                id: v,
                color: d.color(v),
                position: d
                    .positions()
                    .and_then(|p| p[v])
                    .map(|z| [z.re, z.im]),
            })
            .collect();
        let faces = d.faces().iter().map(|f| f.corners()).collect();
        TilingDocument {
            schema: SCHEMA_VERSION,
            vertices,
            faces,
            slopes: slopes.map(|s| SlopesRecord {
                labels: s.labels().iter().map(|a| [a.re, a.im]).collect(),
                theta1: s.theta_m(1),
            }),
            functions: BTreeMap::new(),
        }
    }

    /// Rebuild the quad-graph and slope data, validating vertex references,
    /// color alternation, and (when both positions and slopes are present)
    /// that the realization fits the slope set within tolerance.
    pub fn to_graph(&self) -> Result<(QuadGraph, Option<SlopeData>)> {
        for (i, v) in self.vertices.iter().enumerate() {
            if v.id != i {
                return Err(Error::InvalidDocument(format!(
                    "vertex ids must be dense and sorted; found {} at index {i}",
                    v.id
                )));
            }
        }
        let colors: Vec<Color> = self.vertices.iter().map(|v| v.color).collect();
        let positions: Option<Vec<Option<C64>>> = if self
            .vertices
            .iter()
            .any(|v| v.position.is_some())
        {
            Some(
                self.vertices
                    .iter()
                    .map(|v| v.position.map(|[re, im]| C64::new(re, im)))
                    .collect(),
            )
        } else {
            None
        };
        let graph = QuadGraph::new(colors, self.faces.clone(), positions, None)?;
        let slopes = match &self.slopes {
            None => None,
            Some(rec) => {
                let labels: Vec<C64> = rec.labels.iter().map(|&[re, im]| C64::new(re, im)).collect();
                let slopes = SlopeData::from_representatives(labels)?;
                if (slopes.theta_m(1) - rec.theta1).abs() > 1e-9 {
                    return Err(Error::InvalidDocument(format!(
                        "theta1 = {} does not match the label arguments",
                        rec.theta1
                    )));
                }
                // Positions must realize the labels when both are present.
                if graph.positions().is_some() {
                    let p = Realization::from_graph(&graph)?;
                    let labeling = labeling_from_realization(&graph, &p)?;
                    for &alpha in labeling.values() {
                        if slopes.classify(alpha).is_err() {
                            return Err(Error::InvalidDocument(format!(
                                "edge vector {alpha} is not in the slope set (tolerance {LABEL_TOL:e})"
                            )));
                        }
                    }
                }
                Some(slopes)
            }
        };
        Ok((graph, slopes))
    }

    pub fn insert_function(&mut self, name: &str, values: &VertexFunction, sector: Option<i64>) {
        let record = FunctionRecord {
            covering: sector.map(|sector| CoveringRecord { sector }),
            values: values
                .iter()
                .map(|(&v, z)| (v, [z.re, z.im]))
                .collect(),
        };
        self.functions.insert(name.to_string(), record);
    }

    pub fn function(&self, name: &str) -> Result<VertexFunction> {
        let record = self
            .functions
            .get(name)
            .ok_or_else(|| Error::MissingPayload(name.to_string()))?;
        Ok(record
            .values
            .iter()
            .map(|(&v, &[re, im])| (v, C64::new(re, im)))
            .collect())
    }

    /// Canonical JSON text.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        // Check the version before insisting on the full shape, so version
        // mismatches are reported as such.
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("schema").and_then(|v| v.as_u64()) {
            Some(v) if v as u32 == SCHEMA_VERSION => {}
            Some(v) => {
                return Err(Error::UnsupportedVersion {
                    got: v as u32,
                    expected: SCHEMA_VERSION,
                })
            }
            None => {
                return Err(Error::InvalidDocument(
                    "missing schema version field".into(),
                ))
            }
        }
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling;

    fn doc_of(patch: &QuadGraph) -> TilingDocument {
        let p = Realization::from_graph(patch).unwrap();
        let labeling = labeling_from_realization(patch, &p).unwrap();
        let slopes = SlopeData::from_labeling(&labeling).unwrap();
        TilingDocument::from_graph(patch, Some(&slopes))
    }

    #[test]
    fn round_trips_are_exact_for_all_generators() {
        let patches = vec![
            tiling::square_patch(4, 3).unwrap(),
            tiling::dual_kagome_patch(2).unwrap(),
            tiling::penrose_patch(3, 42).unwrap().0,
        ];
        for patch in &patches {
            let mut doc = doc_of(patch);
            let mut f = VertexFunction::new();
            f.insert(0, C64::new(0.1234567890123, -2.5));
            f.insert(3, C64::new(1e-20, 3.7e19));
            doc.insert_function("probe", &f, Some(2));
            let text = doc.to_json().unwrap();
            let back = TilingDocument::from_json(&text).unwrap();
            assert_eq!(doc, back);
            // Byte stability.
            assert_eq!(text, back.to_json().unwrap());
            // Graph reconstruction validates.
            let (graph, slopes) = back.to_graph().unwrap();
            assert_eq!(graph.vertex_count(), patch.vertex_count());
            assert_eq!(graph.faces().len(), patch.faces().len());
            assert!(slopes.is_some());
            assert_eq!(back.function("probe").unwrap(), f);
        }
    }

    #[test]
    fn truncated_and_misversioned_documents_fail_clearly() {
        let doc = doc_of(&tiling::square_patch(2, 2).unwrap());
        let text = doc.to_json().unwrap();

        let truncated = text.replace("\"faces\"", "\"nofaces\"");
        let err = TilingDocument::from_json(&truncated).unwrap_err();
        assert!(err.to_string().contains("faces"), "error was: {err}");

        let misversioned = text.replace("\"schema\": 1", "\"schema\": 99");
        assert!(matches!(
            TilingDocument::from_json(&misversioned),
            Err(Error::UnsupportedVersion { got: 99, .. })
        ));
    }

    #[test]
    fn corrupted_positions_are_rejected_against_slopes() {
        let mut doc = doc_of(&tiling::square_patch(2, 2).unwrap());
        doc.vertices[0].position = Some([0.5, 0.25]);
        assert!(doc.to_graph().is_err());
    }
}
