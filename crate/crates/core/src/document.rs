//! The serialized analysis result.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::equilibria::{EdgeClass, EquilibriumKind, NondegeneracyReport};
use crate::error::Error;
use crate::flow::CurveRole;
use crate::geom::Point3;
use crate::mscomplex::{
    build_with_timings, validate, Cell, MSComplex, StepTimings, ValidationReport,
};
use crate::poly::{Carrier, Polyhedron, ReferencedPolyhedron};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshInfo {
    /// SHA-256 of the vertex coordinates and face cycles.
    pub checksum: String,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub simplicial: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OriginProvenance {
    Given,
    Centroid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OriginInfo {
    pub point: Point3,
    pub provenance: OriginProvenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceInfo {
    pub relative: f64,
    pub absolute: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeClassRecord {
    pub edge: [usize; 2],
    pub class: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub from: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub to: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumRecord {
    pub id: usize,
    pub kind: EquilibriumKind,
    pub position: Point3,
    pub carrier: Carrier,
    pub height: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub id: usize,
    pub role: CurveRole,
    pub origin: usize,
    pub destination: usize,
    pub polyline: Vec<Point3>,
    pub carriers: Vec<Carrier>,
    pub carrier_distances: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimingsMs {
    pub steps_1_3: f64,
    pub steps_4_5: f64,
}

impl From<StepTimings> for TimingsMs {
    fn from(t: StepTimings) -> Self {
        TimingsMs {
            steps_1_3: t.steps_1_3.as_secs_f64() * 1e3,
            steps_4_5: t.steps_4_5.as_secs_f64() * 1e3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisDocument {
    pub schema: u32,
    pub mesh: MeshInfo,
    pub origin: OriginInfo,
    pub tolerance: ToleranceInfo,
    pub nondegeneracy: NondegeneracyReport,
    pub warnings: Vec<String>,
    pub edge_classes: Vec<EdgeClassRecord>,
    pub equilibria: Vec<EquilibriumRecord>,
    pub curves: Vec<CurveRecord>,
    pub cells: Vec<Cell>,
    pub validation: ValidationReport,
    pub timings_ms: TimingsMs,
}

pub fn mesh_checksum(poly: &Polyhedron) -> String {
    let mut h = Sha256::new();
    for p in poly.vertices() {
        for c in p.to_array() {
            h.update(c.to_le_bytes());
        }
    }
    for f in poly.faces() {
        h.update((f.len() as u64).to_le_bytes());
        for &v in f {
            h.update((v as u64).to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl AnalysisDocument {
    pub fn new(
        rp: &ReferencedPolyhedron,
        msc: &MSComplex,
        validation: ValidationReport,
        timings: StepTimings,
    ) -> Self {
        let poly = rp.poly();
        let tol = rp.tol();
        AnalysisDocument {
            schema: SCHEMA_VERSION,
            mesh: MeshInfo {
                checksum: mesh_checksum(poly),
                vertices: poly.num_vertices(),
                edges: poly.num_edges(),
                faces: poly.num_faces(),
                simplicial: poly.is_simplicial(),
            },
            origin: OriginInfo {
                point: rp.origin(),
                provenance: if rp.origin_from_centroid() {
                    OriginProvenance::Centroid
                } else {
                    OriginProvenance::Given
                },
            },
            tolerance: ToleranceInfo {
                relative: tol.relative,
                absolute: tol.length(),
            },
            nondegeneracy: msc.nondegeneracy.clone(),
            warnings: msc.warnings.clone(),
            edge_classes: msc
                .edge_classes
                .iter()
                .enumerate()
                .map(|(e, c)| {
                    let edge = poly.edge(e).vertices;
                    match *c {
                        EdgeClass::Followed => EdgeClassRecord {
                            edge,
                            class: "followed".into(),
                            from: None,
                            to: None,
                        },
                        EdgeClass::Crossed { from_face, to_face } => EdgeClassRecord {
                            edge,
                            class: "crossed".into(),
                            from: Some(from_face),
                            to: Some(to_face),
                        },
                    }
                })
                .collect(),
            equilibria: msc
                .vertices
                .iter()
                .map(|e| EquilibriumRecord {
                    id: e.id,
                    kind: e.kind,
                    position: e.position(),
                    carrier: e.carrier,
                    height: e.height,
                })
                .collect(),
            curves: msc
                .edges
                .iter()
                .map(|c| CurveRecord {
                    id: c.id,
                    role: c.role,
                    origin: c.origin,
                    destination: c.destination,
                    polyline: c.polyline(),
                    carriers: c.carriers(),
                    carrier_distances: c.carrier_distances(),
                })
                .collect(),
            cells: msc.cells.clone(),
            validation,
            timings_ms: timings.into(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, Error> {
        Ok(serde_json::from_str(s)?)
    }

    /// `(stable, saddle, unstable)` counts.
    pub fn census(&self) -> (usize, usize, usize) {
        let n = |k| self.equilibria.iter().filter(|e| e.kind == k).count();
        (
            n(EquilibriumKind::Stable),
            n(EquilibriumKind::Saddle),
            n(EquilibriumKind::Unstable),
        )
    }
}

/// The full pipeline result.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub complex: MSComplex,
    pub validation: ValidationReport,
    pub timings: StepTimings,
}

impl Analysis {
    pub fn document(&self, rp: &ReferencedPolyhedron) -> AnalysisDocument {
        AnalysisDocument::new(rp, &self.complex, self.validation.clone(), self.timings)
    }
}

/// Classify edges, find equilibria, trace the isolated curves, assemble
/// and validate the complex.
pub fn analyze(rp: &ReferencedPolyhedron) -> Result<Analysis, Error> {
    let (complex, timings) = build_with_timings(rp)?;
    let validation = validate(&complex);
    Ok(Analysis {
        complex,
        validation,
        timings,
    })
}
