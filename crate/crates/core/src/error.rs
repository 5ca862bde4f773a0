use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point3;

/// Structural problems found while building a [`Polyhedron`](crate::poly::Polyhedron).
#[derive(Clone, Debug, Error, PartialEq)]
pub enum BuildError {
    #[error("empty mesh")]
    Empty,
    #[error("face {face} references missing vertex {vertex}")]
    BadIndex { face: usize, vertex: usize },
    #[error("face {face} has fewer than three distinct vertices")]
    DegenerateFace { face: usize },
    #[error("open surface: edge ({0}, {1}) has a single incident face")]
    OpenSurface(usize, usize),
    #[error("non-manifold edge ({0}, {1})")]
    NonManifoldEdge(usize, usize),
    #[error("inconsistent face orientation at edge ({0}, {1})")]
    Orientation(usize, usize),
    #[error("face {face} is not planar (deviation {deviation:e})")]
    NonPlanar { face: usize, deviation: f64 },
    #[error("not convex: vertex {vertex} lies {excess:e} outside the plane of face {face}")]
    NonConvex {
        vertex: usize,
        face: usize,
        excess: f64,
    },
    #[error("vertex {0} is not used by any face")]
    UnusedVertex(usize),
    #[error("vertex {0} has a non-manifold neighbourhood")]
    NonManifoldVertex(usize),
    #[error("Euler characteristic is {0}, expected 2")]
    Euler(i64),
    #[error("degenerate point set: {0}")]
    DegenerateHull(String),
}

/// Evidence that a polyhedron is not Morse-Smale (generic) with respect to
/// its reference point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NonGenericWitness {
    /// An ascending curve leaving one saddle terminates at another saddle.
    SaddleSaddleConnection {
        from_saddle: usize,
        to_saddle: usize,
        at: Point3,
    },
    /// A traced ray leaves a face through one of its vertices.
    VertexHit {
        vertex: usize,
        face: usize,
        distance: f64,
    },
    /// The backward trace from a saddle reaches a vertex or a followed edge.
    DescendingManifoldTouchesSkeleton { saddle: usize, entity: String },
    /// Two gradient candidates tie within tolerance.
    GradientTie { vertex: usize, margin: f64 },
    /// Two curves leave a stable point in the same direction.
    CoincidentCurves { stable: usize },
    /// Nondegeneracy failed; the findings are carried in the report.
    Degenerate { findings: usize },
    /// A perturbation trial changed the saddle pairing.
    PairingChanged { saddle: usize, trial: usize },
    /// A perturbation trial changed the equilibrium type census.
    CensusChanged { trial: usize },
}

impl std::fmt::Display for NonGenericWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NonGenericWitness::SaddleSaddleConnection { from_saddle, to_saddle, at } => write!(
                f,
                "saddle-saddle connection: ascending curve from saddle {from_saddle} ends at saddle {to_saddle} ({:.6}, {:.6}, {:.6})",
                at.x, at.y, at.z
            ),
            NonGenericWitness::VertexHit { vertex, face, distance } => {
                write!(f, "curve passes through vertex {vertex} while crossing face {face} (distance {distance:e})")
            }
            NonGenericWitness::DescendingManifoldTouchesSkeleton { saddle, entity } => {
                write!(f, "descending manifold of saddle {saddle} reaches {entity}")
            }
            NonGenericWitness::GradientTie { vertex, margin } => {
                write!(f, "gradient candidates tie at vertex {vertex} (margin {margin:e})")
            }
            NonGenericWitness::CoincidentCurves { stable } => {
                write!(f, "two curves leave stable point {stable} in the same direction")
            }
            NonGenericWitness::Degenerate { findings } => {
                write!(f, "polyhedron is degenerate ({findings} findings)")
            }
            NonGenericWitness::PairingChanged { saddle, trial } => {
                write!(f, "perturbation trial {trial} changed the endpoints of saddle {saddle}")
            }
            NonGenericWitness::CensusChanged { trial } => {
                write!(f, "perturbation trial {trial} changed the equilibrium census")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polyhedron: {0}")]
    Build(#[from] BuildError),
    #[error(
        "reference point is not strictly interior: face {face} at signed distance {distance:e}"
    )]
    NotInterior { face: usize, distance: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("non-generic polyhedron: {0}")]
    NonGeneric(NonGenericWitness),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("oracle inconclusive: {ambiguous} of {samples} samples did not converge")]
    OracleInconclusive { ambiguous: usize, samples: usize },
    #[error("genericity probe inconclusive: all {0} trials were discarded")]
    ProbeInconclusive(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
