//! JSON reading and writing of meshes.
//!
//! Three document shapes are accepted:
//!
//! * segment form: `{"domain": {"x": [x0, x1], "y": [y0, y1]}, "hsegments": [...], "vsegments": [...]}`
//! * cell form: `{"cells": [{"x0": .., "x1": .., "y0": .., "y1": ..}, ...]}`
//! * hierarchical form: `{"base": {"x": [...], "y": [...]}, "subdivide": [{"level": 0, "center": [cx, cy]}, ...]}`
//!
//! Rationals are integers or `"p/q"` strings.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::hierarchy::{HMesh, HMeshSpec, HierError};
use crate::mesh::{HLine, MeshError, Orientation, Rect, TMesh, VLine};
use crate::rational::{serde_rational_vec, Rational};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid mesh document: {0}")]
    Schema(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Hier(#[from] HierError),
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainSpec {
    #[serde(with = "serde_rational_vec")]
    pub x: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub y: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentDoc {
    pub domain: DomainSpec,
    #[serde(default)]
    pub hsegments: Vec<HLine>,
    #[serde(default)]
    pub vsegments: Vec<VLine>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDoc {
    pub cells: Vec<Rect>,
}

/// A mesh read from a document, keeping its hierarchy when it has one.
#[derive(Clone, Debug)]
pub enum MeshInput {
    Flat(Arc<TMesh>),
    Hierarchical(HMesh),
}

impl MeshInput {
    pub fn mesh(&self) -> &TMesh {
        match self {
            MeshInput::Flat(m) => m,
            MeshInput::Hierarchical(h) => h.mesh(),
        }
    }

    pub fn mesh_arc(&self) -> Arc<TMesh> {
        match self {
            MeshInput::Flat(m) => m.clone(),
            MeshInput::Hierarchical(h) => h.mesh_arc(),
        }
    }

    pub fn hierarchy(&self) -> Option<&HMesh> {
        match self {
            MeshInput::Flat(_) => None,
            MeshInput::Hierarchical(h) => Some(h),
        }
    }
}

fn schema<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> Result<T, IoError> {
    serde_json::from_value(v).map_err(|e| IoError::Schema(e.to_string()))
}

/// Parses any of the three document shapes.
pub fn parse_mesh(text: &str) -> Result<MeshInput, IoError> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| IoError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = v.as_object().ok_or_else(|| IoError::Schema("top level must be an object".into()))?;
    if obj.contains_key("base") {
        let spec: HMeshSpec = schema(v)?;
        return Ok(MeshInput::Hierarchical(HMesh::from_spec(&spec)?));
    }
    if obj.contains_key("cells") {
        let doc: CellDoc = schema(v)?;
        return Ok(MeshInput::Flat(Arc::new(TMesh::from_cells(doc.cells)?)));
    }
    if obj.contains_key("domain") {
        let doc: SegmentDoc = schema(v)?;
        return Ok(MeshInput::Flat(Arc::new(segment_doc_mesh(&doc)?)));
    }
    Err(IoError::Schema("expected one of the keys \"domain\", \"cells\" or \"base\"".into()))
}

fn segment_doc_mesh(doc: &SegmentDoc) -> Result<TMesh, IoError> {
    let (x, y) = (&doc.domain.x, &doc.domain.y);
    if x.len() != 2 || y.len() != 2 {
        return Err(IoError::Schema("domain x and y need exactly two values each".into()));
    }
    let domain = Rect::new(x[0].clone(), x[1].clone(), y[0].clone(), y[1].clone());
    Ok(TMesh::from_segments(&domain, &doc.hsegments, &doc.vsegments)?)
}

pub fn read_mesh(path: &Path) -> Result<MeshInput, IoError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| IoError::File { path: path.display().to_string(), source })?;
    parse_mesh(&text)
}

/// Segment form with one entry per interior l-edge.
pub fn segment_doc(mesh: &TMesh) -> SegmentDoc {
    let d = mesh.domain();
    let mut doc = SegmentDoc {
        domain: DomainSpec { x: vec![d.x0, d.x1], y: vec![d.y0, d.y1] },
        hsegments: Vec::new(),
        vsegments: Vec::new(),
    };
    for l in mesh.ledges().iter().filter(|l| !l.is_boundary) {
        match l.orientation {
            Orientation::H => doc.hsegments.push(HLine { y: l.line_coord.clone(), x0: l.lo.clone(), x1: l.hi.clone() }),
            Orientation::V => doc.vsegments.push(VLine { x: l.line_coord.clone(), y0: l.lo.clone(), y1: l.hi.clone() }),
        }
    }
    doc
}

pub fn mesh_to_json(mesh: &TMesh) -> String {
    serde_json::to_string_pretty(&segment_doc(mesh)).expect("mesh documents always serialize")
}

/// Hierarchical meshes keep their subdivision history; flat ones use the segment form.
pub fn input_to_json(input: &MeshInput) -> String {
    match input {
        MeshInput::Flat(m) => mesh_to_json(m),
        MeshInput::Hierarchical(h) => serde_json::to_string_pretty(&h.to_spec()).expect("hierarchy specs always serialize"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn segment_form_with_integers_and_strings() {
        let text = r#"{"domain": {"x": [0, "3"], "y": ["0", 3]},
            "hsegments": [{"y": "3/2", "x0": 0, "x1": 3}],
            "vsegments": [{"x": 1, "y0": 0, "y1": "3/2"}]}"#;
        let m = parse_mesh(text).unwrap();
        assert_eq!(m.mesh().cells().len(), 3);
        assert!(m.hierarchy().is_none());
    }

    #[test]
    fn round_trip_is_exact() {
        let text = r#"{"domain": {"x": ["0", "3"], "y": ["0", "3"]},
            "hsegments": [{"y": "1/3", "x0": "0", "x1": "3"}, {"y": "2", "x0": "1", "x1": "3"}],
            "vsegments": [{"x": "1", "y0": "0", "y1": "3"}, {"x": "7/5", "y0": "1/3", "y1": "2"}]}"#;
        let m = parse_mesh(text).unwrap();
        let again = parse_mesh(&mesh_to_json(m.mesh())).unwrap();
        assert_eq!(m.mesh(), again.mesh());
        assert_eq!(m.mesh().xs(), again.mesh().xs());
    }

    #[test]
    fn cell_form() {
        let text = r#"{"cells": [{"x0": 0, "x1": 1, "y0": 0, "y1": 1}, {"x0": 1, "x1": 2, "y0": 0, "y1": 1}]}"#;
        let m = parse_mesh(text).unwrap();
        assert_eq!(m.mesh().domain().x1, rat(2));
    }

    #[test]
    fn hierarchical_form_round_trips() {
        let text = r#"{"base": {"x": ["0","1","2","3"], "y": ["0","1","2","3"]},
            "subdivide": [{"level": 0, "center": ["3/2", "3/2"]}]}"#;
        let m = parse_mesh(text).unwrap();
        assert_eq!(m.mesh().cells().len(), 12);
        let again = parse_mesh(&input_to_json(&m)).unwrap();
        assert_eq!(again.hierarchy().unwrap().history(), m.hierarchy().unwrap().history());
    }

    #[test]
    fn malformed_json_reports_position() {
        match parse_mesh("{\n  \"cells\": [,]\n}") {
            Err(IoError::Parse { line, column, .. }) => assert_eq!((line, column), (2, 13)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn irregular_input_is_rejected() {
        let text = r#"{"domain": {"x": [0, 2], "y": [0, 2]}, "hsegments": [{"y": 1, "x0": 0, "x1": 1}]}"#;
        assert!(matches!(parse_mesh(text), Err(IoError::Mesh(_))));
    }
}
