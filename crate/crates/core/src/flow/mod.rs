//! The extended gradient field on the boundary and the isolated ascending
//! curves through saddle points.

mod probe;
mod trace;

use serde::{Deserialize, Serialize};

pub use probe::{
    perturb_polyhedron, perturb_seeded, probe_genericity, GenericityVerdict, ProbeOptions,
    ProbeReport, TrialOutcome,
};
pub(crate) use trace::trace_curves;
pub use trace::{trace_all, trace_down_from_saddle, trace_up_from_saddle};

use crate::equilibria::{EdgeClass, Equilibria, Finding, FindingKind};
use crate::error::Error;
use crate::geom::{Point3, Vec3};
use crate::poly::ReferencedPolyhedron;
pub use crate::poly::{Carrier, SurfacePoint};

/// Which rule of the gradient table produced a vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum GradientSource {
    FaceInterior { face: usize },
    FollowedEdge { edge: usize },
    CrossedEdge { into: usize },
    VertexFace { face: usize },
    VertexEdge { edge: usize },
    ZeroAtEquilibrium,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtendedGradient {
    pub vector: Vec3,
    pub source: GradientSource,
    /// Set when a choice between candidates was within tolerance.
    pub tie: Option<Finding>,
}

impl ExtendedGradient {
    fn zero() -> Self {
        ExtendedGradient {
            vector: Vec3::ZERO,
            source: GradientSource::ZeroAtEquilibrium,
            tie: None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.source == GradientSource::ZeroAtEquilibrium
    }
}

/// Read-only view bundling a referenced polyhedron with its classified
/// edges and equilibria.
#[derive(Clone, Copy)]
pub struct GradientField<'a> {
    pub rp: &'a ReferencedPolyhedron,
    pub eq: &'a Equilibria,
}

impl<'a> GradientField<'a> {
    pub fn new(rp: &'a ReferencedPolyhedron, eq: &'a Equilibria) -> Self {
        GradientField { rp, eq }
    }

    pub fn face_foot(&self, f: usize) -> Point3 {
        self.eq.projections.face[f]
    }

    pub fn edge_foot(&self, e: usize) -> Point3 {
        self.eq.projections.edge[e].point
    }

    /// Distance from the reference point to the affine hull of a face or edge.
    pub fn carrier_distance(&self, c: Carrier) -> f64 {
        let o = self.rp.origin();
        match c {
            Carrier::Face(f) => self.face_foot(f).dist(o),
            Carrier::Edge(e) => self.edge_foot(e).dist(o),
            Carrier::Vertex(v) => self.rp.poly().vertex(v).dist(o),
        }
    }

    /// Gradient of the distance restricted to the plane of face `f`, at `q`.
    pub fn face_gradient(&self, f: usize, q: Point3) -> Vec3 {
        (q - self.face_foot(f)) / q.dist(self.rp.origin())
    }

    /// Gradient of the distance restricted to the line of edge `e`, at `q`.
    pub fn edge_gradient(&self, e: usize, q: Point3) -> Vec3 {
        (q - self.edge_foot(e)) / q.dist(self.rp.origin())
    }

    /// The extended gradient at a boundary point.
    pub fn extended_gradient(&self, q: &SurfacePoint) -> Result<ExtendedGradient, Error> {
        let eps = self.rp.tol().coincidence();
        let p = q.position;
        match q.carrier {
            Carrier::Face(f) => {
                if self.eq.stable_on(f).is_some() && p.dist(self.face_foot(f)) <= eps {
                    return Ok(ExtendedGradient::zero());
                }
                Ok(ExtendedGradient {
                    vector: self.face_gradient(f, p),
                    source: GradientSource::FaceInterior { face: f },
                    tie: None,
                })
            }
            Carrier::Edge(e) => match self.eq.class(e) {
                EdgeClass::Followed => {
                    if self.eq.saddle_on(e).is_some() && p.dist(self.edge_foot(e)) <= eps {
                        return Ok(ExtendedGradient::zero());
                    }
                    Ok(ExtendedGradient {
                        vector: self.edge_gradient(e, p),
                        source: GradientSource::FollowedEdge { edge: e },
                        tie: None,
                    })
                }
                EdgeClass::Crossed { to_face, .. } => Ok(ExtendedGradient {
                    vector: self.face_gradient(to_face, p),
                    source: GradientSource::CrossedEdge { into: to_face },
                    tie: None,
                }),
            },
            Carrier::Vertex(v) => self.vertex_gradient(v),
        }
    }

    /// Vertex rule: zero at an unstable vertex, else the unique face
    /// candidate if any, else the longest edge candidate.
    pub fn vertex_gradient(&self, v: usize) -> Result<ExtendedGradient, Error> {
        if self.eq.unstable_at(v).is_some() {
            return Ok(ExtendedGradient::zero());
        }
        let poly = self.rp.poly();
        let q = poly.vertex(v);
        let r = q.dist(self.rp.origin());
        let eps = self.rp.tol().gradient_tie();
        let mut tie = None;

        let mut face_candidate = None;
        for &f in poly.vertex_faces(v) {
            let Some(d) = (q - self.face_foot(f)).normalized() else {
                continue;
            };
            let j = poly.face(f).iter().position(|&x| x == v).unwrap();
            let n = poly.face(f).len();
            let a = poly.side_inward_normal(f, (j + n - 1) % n).dot(d);
            let b = poly.side_inward_normal(f, j).dot(d);
            if a > eps && b > eps {
                if let Some(other) = face_candidate {
                    return Err(Error::internal(format!(
                        "vertex {v}: faces {other} and {f} both generate candidate gradients"
                    )));
                }
                face_candidate = Some(f);
            } else if a.min(b) >= -eps && a.max(b) > eps {
                // Face gradient runs along one of the face's sides.
                tie = Some(Finding {
                    kind: FindingKind::GradientLengthTie,
                    entity: Carrier::Vertex(v),
                    margin: a.min(b),
                });
            }
        }
        if let Some(f) = face_candidate {
            return Ok(ExtendedGradient {
                vector: self.face_gradient(f, q),
                source: GradientSource::VertexFace { face: f },
                tie,
            });
        }

        let radial = (q - self.rp.origin()) / r;
        let mut best: Option<(usize, f64, Vec3)> = None;
        let mut second = f64::NEG_INFINITY;
        for &e in poly.vertex_edges(v) {
            let w = poly.vertex(poly.edge(e).other_vertex(v));
            let t = (w - q).normalized().unwrap();
            let slope = t.dot(radial);
            match best {
                Some((_, s, _)) if slope <= s => second = second.max(slope),
                _ => {
                    if let Some((_, s, _)) = best {
                        second = second.max(s);
                    }
                    best = Some((e, slope, t));
                }
            }
        }
        match best {
            Some((e, slope, t)) if slope > eps => {
                if slope - second <= eps {
                    tie = Some(Finding {
                        kind: FindingKind::GradientLengthTie,
                        entity: Carrier::Vertex(v),
                        margin: slope - second,
                    });
                }
                Ok(ExtendedGradient {
                    vector: t * slope,
                    source: GradientSource::VertexEdge { edge: e },
                    tie,
                })
            }
            Some((_, slope, _)) => Ok(ExtendedGradient {
                vector: Vec3::ZERO,
                source: GradientSource::ZeroAtEquilibrium,
                tie: Some(Finding {
                    kind: FindingKind::VertexTangency,
                    entity: Carrier::Vertex(v),
                    margin: slope,
                }),
            }),
            None => Err(Error::internal(format!("vertex {v} has no incident edges"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveRole {
    SaddleToUnstable,
    StableToSaddle,
}

/// One straight piece of a curve, inside a face or along a followed edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: SurfacePoint,
    pub end: SurfacePoint,
    pub carrier: Carrier,
    pub carrier_distance: f64,
}

/// A polygonal ascending curve, stored from origin to destination.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AscendingCurve {
    pub id: usize,
    pub role: CurveRole,
    /// Equilibrium ids.
    pub origin: usize,
    pub destination: usize,
    /// The saddle this curve belongs to (origin or destination).
    pub saddle: usize,
    pub segments: Vec<Segment>,
}

impl AscendingCurve {
    pub fn polyline(&self) -> Vec<Point3> {
        let mut pts = Vec::with_capacity(self.segments.len() + 1);
        if let Some(first) = self.segments.first() {
            pts.push(first.start.position);
        }
        pts.extend(self.segments.iter().map(|s| s.end.position));
        pts
    }

    pub fn carriers(&self) -> Vec<Carrier> {
        self.segments.iter().map(|s| s.carrier).collect()
    }

    pub fn carrier_distances(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.carrier_distance).collect()
    }

    /// Checks the structural invariants of an ascending curve and returns a
    /// description of each violation. `rel` scales the monotonicity slack.
    pub fn invariant_violations(&self, field: &GradientField, rel: f64) -> Vec<String> {
        let mut out = Vec::new();
        let o = field.rp.origin();
        let slack = rel * field.rp.poly().diameter();
        for w in self.segments.windows(2) {
            if w[0].end.position.dist(w[1].start.position) > slack {
                out.push(format!(
                    "curve {}: consecutive segments do not meet",
                    self.id
                ));
            }
            if w[0].carrier == w[1].carrier {
                out.push(format!(
                    "curve {}: consecutive segments share carrier {:?}",
                    self.id, w[0].carrier
                ));
            }
            if w[1].carrier_distance <= w[0].carrier_distance {
                out.push(format!(
                    "curve {}: carrier distance not increasing ({} then {})",
                    self.id, w[0].carrier_distance, w[1].carrier_distance
                ));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for s in &self.segments {
            if !seen.insert(s.carrier) {
                out.push(format!(
                    "curve {}: carrier {:?} repeats",
                    self.id, s.carrier
                ));
            }
        }
        let pts = self.polyline();
        for w in pts.windows(2) {
            let (h0, h1) = (w[0].dist(o), w[1].dist(o));
            if h1 < h0 - slack || (h1 <= h0 && w[0].dist(w[1]) > slack) {
                out.push(format!(
                    "curve {}: distance to reference point not increasing",
                    self.id
                ));
            }
        }
        for s in &self.segments {
            if let Carrier::Face(f) = s.carrier {
                let foot = field.face_foot(f);
                let (a, b) = (s.start.position, s.end.position);
                let area = (a - foot).cross(b - foot).norm();
                if area > slack * a.dist(b).max(slack) + slack * a.dist(foot).max(b.dist(foot)) {
                    out.push(format!(
                        "curve {}: segment in face {f} not aligned with the face foot",
                        self.id
                    ));
                }
            }
        }
        out
    }
}
