//! Indexed convex polyhedron with full adjacency.
//!
//! Faces are vertex cycles, counterclockwise seen from outside. Edges are
//! derived; each edge records the face on its left (`faces[0]`, where the
//! edge appears as `vertices[0] -> vertices[1]`) and the face on its right.

mod fixtures;
pub mod hull;
mod reference;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use fixtures::{
    make_badguy, make_cube, make_pex, make_random_hull, make_tetrahedron, BADGUY_EPSILON,
    PEX_ORIGIN,
};
pub use reference::{solid_centroid, Origin, RadialHit, ReferencedPolyhedron};

use crate::error::{BuildError, Error};
use crate::geom::{Plane, Point3, Tolerance, TolerancePolicy, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    /// Endpoints with `vertices[0] < vertices[1]`.
    pub vertices: [usize; 2],
    /// `faces[0]` traverses the edge from `vertices[0]` to `vertices[1]`.
    pub faces: [usize; 2],
}

impl Edge {
    pub fn other_face(&self, f: usize) -> usize {
        if self.faces[0] == f {
            self.faces[1]
        } else {
            self.faces[0]
        }
    }

    pub fn other_vertex(&self, v: usize) -> usize {
        if self.vertices[0] == v {
            self.vertices[1]
        } else {
            self.vertices[0]
        }
    }
}

/// The entity of the boundary complex a point lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", content = "id", rename_all = "lowercase")]
pub enum Carrier {
    Face(usize),
    Edge(usize),
    Vertex(usize),
}

/// A point on the boundary tagged with the lowest-dimensional entity
/// containing it. For edge carriers `t` is the parameter from
/// `vertices[0]` (t = 0) to `vertices[1]` (t = 1); otherwise it is 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub position: Point3,
    pub carrier: Carrier,
    #[serde(default)]
    pub t: f64,
}

impl SurfacePoint {
    pub fn on_face(position: Point3, face: usize) -> Self {
        SurfacePoint {
            position,
            carrier: Carrier::Face(face),
            t: 0.0,
        }
    }

    pub fn on_vertex(position: Point3, vertex: usize) -> Self {
        SurfacePoint {
            position,
            carrier: Carrier::Vertex(vertex),
            t: 0.0,
        }
    }

    pub fn on_edge(position: Point3, edge: usize, t: f64) -> Self {
        SurfacePoint {
            position,
            carrier: Carrier::Edge(edge),
            t,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Polyhedron {
    vertices: Vec<Point3>,
    faces: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    face_edges: Vec<Vec<usize>>,
    vertex_faces: Vec<Vec<usize>>,
    vertex_edges: Vec<Vec<usize>>,
    edge_lookup: HashMap<(usize, usize), usize>,
    planes: Vec<Plane>,
    diameter: f64,
    tolerance: Tolerance,
}

impl Polyhedron {
    /// Validate a mesh and derive its adjacency.
    ///
    /// A consistently clockwise mesh is flipped rather than rejected.
    pub fn build(
        vertices: Vec<Point3>,
        faces: Vec<Vec<usize>>,
        policy: TolerancePolicy,
    ) -> Result<Polyhedron, BuildError> {
        if vertices.is_empty() || faces.is_empty() {
            return Err(BuildError::Empty);
        }
        let mut faces = faces;
        for (fi, f) in faces.iter().enumerate() {
            if let Some(&v) = f.iter().find(|&&v| v >= vertices.len()) {
                return Err(BuildError::BadIndex {
                    face: fi,
                    vertex: v,
                });
            }
            let distinct = (0..f.len()).all(|i| f[i] != f[(i + 1) % f.len()]);
            if f.len() < 3 || !distinct {
                return Err(BuildError::DegenerateFace { face: fi });
            }
        }
        let (lo, hi) = vertices
            .iter()
            .fold((vertices[0], vertices[0]), |(lo, hi), &p| {
                (lo.min(p), hi.max(p))
            });
        let diameter = lo.dist(hi);
        let tolerance = policy.resolve(diameter);

        // Directed half-edges: (a, b) -> face.
        let mut half: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for i in 0..f.len() {
                let key = (f[i], f[(i + 1) % f.len()]);
                if half.insert(key, fi).is_some() {
                    let (a, b) = key;
                    let shared = faces.iter().filter(|g| cycle_contains(g, a, b)).count();
                    return Err(if shared > 2 {
                        BuildError::NonManifoldEdge(a.min(b), a.max(b))
                    } else {
                        BuildError::Orientation(a.min(b), a.max(b))
                    });
                }
            }
        }

        let mut edges = Vec::new();
        let mut edge_lookup = HashMap::new();
        let mut face_edges: Vec<Vec<usize>> =
            faces.iter().map(|f| vec![usize::MAX; f.len()]).collect();
        for (fi, f) in faces.iter().enumerate() {
            for i in 0..f.len() {
                let (a, b) = (f[i], f[(i + 1) % f.len()]);
                let Some(&twin) = half.get(&(b, a)) else {
                    return Err(BuildError::OpenSurface(a.min(b), a.max(b)));
                };
                if a < b {
                    let id = edges.len();
                    edges.push(Edge {
                        vertices: [a, b],
                        faces: [fi, twin],
                    });
                    edge_lookup.insert((a, b), id);
                }
            }
        }
        for (fi, f) in faces.iter().enumerate() {
            for i in 0..f.len() {
                let (a, b) = (f[i], f[(i + 1) % f.len()]);
                face_edges[fi][i] = edge_lookup[&(a.min(b), a.max(b))];
            }
        }

        // Flip a clockwise mesh.
        let volume: f64 = faces
            .iter()
            .map(|f| {
                (1..f.len() - 1)
                    .map(|i| vertices[f[0]].dot(vertices[f[i]].cross(vertices[f[i + 1]])))
                    .sum::<f64>()
            })
            .sum();
        if volume < 0.0 {
            for f in faces.iter_mut() {
                f.reverse();
            }
            for fe in face_edges.iter_mut() {
                // edge i joined f[i], f[i+1]; after reversal position i joins the
                // reversed pair, which is the old edge at len-2-i.
                let n = fe.len();
                let old = fe.clone();
                for i in 0..n {
                    fe[i] = old[(2 * n - 2 - i) % n];
                }
            }
            for e in edges.iter_mut() {
                e.faces.swap(0, 1);
            }
        }

        let (vertex_faces, vertex_edges) = vertex_stars(&vertices, &faces, &edges, &edge_lookup)?;

        let planes: Vec<Plane> = faces
            .iter()
            .enumerate()
            .map(|(fi, f)| face_plane(&vertices, f).ok_or(BuildError::DegenerateFace { face: fi }))
            .collect::<Result<_, _>>()?;

        // Convexity against other faces' planes, then planarity.
        let eps = tolerance.length();
        for (fi, pl) in planes.iter().enumerate() {
            for (vi, &p) in vertices.iter().enumerate() {
                let d = pl.signed_distance(p);
                if d > eps && !faces[fi].contains(&vi) {
                    return Err(BuildError::NonConvex {
                        vertex: vi,
                        face: fi,
                        excess: d,
                    });
                }
            }
        }
        for (fi, f) in faces.iter().enumerate() {
            let dev = f
                .iter()
                .map(|&v| planes[fi].signed_distance(vertices[v]).abs())
                .fold(0.0, f64::max);
            if dev > eps {
                return Err(BuildError::NonPlanar {
                    face: fi,
                    deviation: dev,
                });
            }
        }

        let chi = vertices.len() as i64 - edges.len() as i64 + faces.len() as i64;
        if chi != 2 {
            return Err(BuildError::Euler(chi));
        }

        Ok(Polyhedron {
            vertices,
            faces,
            edges,
            face_edges,
            vertex_faces,
            vertex_edges,
            edge_lookup,
            planes,
            diameter,
            tolerance,
        })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point3 {
        self.vertices[v]
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> &[usize] {
        &self.faces[f]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    /// Edge ids of face `f`; entry `i` joins `face(f)[i]` and `face(f)[i + 1]`.
    pub fn face_edges(&self, f: usize) -> &[usize] {
        &self.face_edges[f]
    }

    /// Faces around `v` in cyclic order.
    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    /// Edges around `v`; entry `i` is shared by `vertex_faces(v)[i]` and
    /// `vertex_faces(v)[i + 1]`.
    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn plane(&self, f: usize) -> &Plane {
        &self.planes[f]
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tolerance
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn is_simplicial(&self) -> bool {
        self.faces.iter().all(|f| f.len() == 3)
    }

    /// Every vertex has exactly three incident faces.
    pub fn is_simple(&self) -> bool {
        self.vertex_faces.iter().all(|s| s.len() == 3)
    }

    pub fn edge_points(&self, e: usize) -> (Point3, Point3) {
        let [a, b] = self.edges[e].vertices;
        (self.vertices[a], self.vertices[b])
    }

    /// Mean of the face's vertices; strictly interior for a convex face.
    pub fn face_center(&self, f: usize) -> Point3 {
        let sum = self.faces[f]
            .iter()
            .fold(Vec3::ZERO, |acc, &v| acc + self.vertices[v]);
        sum / self.faces[f].len() as f64
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let vs = &self.faces[f];
        let p0 = self.vertices[vs[0]];
        (1..vs.len() - 1)
            .map(|i| {
                (self.vertices[vs[i]] - p0)
                    .cross(self.vertices[vs[i + 1]] - p0)
                    .norm()
                    / 2.0
            })
            .sum()
    }

    /// Unit inward normal, within the plane of `f`, of the side `i` of `f`.
    pub fn side_inward_normal(&self, f: usize, i: usize) -> Vec3 {
        let vs = &self.faces[f];
        let a = self.vertices[vs[i]];
        let b = self.vertices[vs[(i + 1) % vs.len()]];
        self.planes[f]
            .normal
            .cross(b - a)
            .normalized()
            .unwrap_or(Vec3::ZERO)
    }

    /// Position of edge `e` among the sides of face `f`.
    pub fn side_of(&self, f: usize, e: usize) -> Option<usize> {
        self.face_edges[f].iter().position(|&x| x == e)
    }

    /// Fan-triangulate every non-triangular face from its lowest-index vertex.
    pub fn triangulated(&self) -> Result<Polyhedron, BuildError> {
        let mut faces = Vec::new();
        for f in &self.faces {
            let start = (0..f.len()).min_by_key(|&i| f[i]).unwrap();
            let rot: Vec<usize> = (0..f.len()).map(|i| f[(start + i) % f.len()]).collect();
            for i in 1..rot.len() - 1 {
                faces.push(vec![rot[0], rot[i], rot[i + 1]]);
            }
        }
        Polyhedron::build(self.vertices.clone(), faces, self.tolerance.policy())
    }

    /// Same combinatorics with new vertex positions.
    pub fn with_vertices(&self, vertices: Vec<Point3>) -> Result<Polyhedron, BuildError> {
        Polyhedron::build(vertices, self.faces.clone(), self.tolerance.policy())
    }

    pub fn with_policy(&self, policy: TolerancePolicy) -> Result<Polyhedron, BuildError> {
        Polyhedron::build(self.vertices.clone(), self.faces.clone(), policy)
    }

    /// Attach an interior reference point.
    pub fn with_reference(self, origin: Origin) -> Result<ReferencedPolyhedron, Error> {
        ReferencedPolyhedron::new(self, origin)
    }
}

fn cycle_contains(f: &[usize], a: usize, b: usize) -> bool {
    (0..f.len()).any(|i| {
        let (x, y) = (f[i], f[(i + 1) % f.len()]);
        (x == a && y == b) || (x == b && y == a)
    })
}

/// Newell-normal plane through the face's vertex mean.
fn face_plane(vertices: &[Point3], f: &[usize]) -> Option<Plane> {
    let mut n = Vec3::ZERO;
    let mut c = Vec3::ZERO;
    for i in 0..f.len() {
        let a = vertices[f[i]];
        let b = vertices[f[(i + 1) % f.len()]];
        n += Vec3::new(
            (a.y - b.y) * (a.z + b.z),
            (a.z - b.z) * (a.x + b.x),
            (a.x - b.x) * (a.y + b.y),
        );
        c += a;
    }
    Plane::from_point_normal(c / f.len() as f64, n)
}

type Stars = (Vec<Vec<usize>>, Vec<Vec<usize>>);

fn vertex_stars(
    vertices: &[Point3],
    faces: &[Vec<usize>],
    edges: &[Edge],
    lookup: &HashMap<(usize, usize), usize>,
) -> Result<Stars, BuildError> {
    let n = vertices.len();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    // Position of each vertex inside each incident face.
    let mut slot: HashMap<(usize, usize), usize> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for (i, &v) in f.iter().enumerate() {
            incident[v].push(fi);
            slot.insert((fi, v), i);
        }
    }
    let mut vf = Vec::with_capacity(n);
    let mut ve = Vec::with_capacity(n);
    for v in 0..n {
        if incident[v].is_empty() {
            return Err(BuildError::UnusedVertex(v));
        }
        let start = incident[v][0];
        let mut ring_f = vec![start];
        let mut ring_e = Vec::new();
        let mut f = start;
        loop {
            // Leave `f` through the side entering `v`; cross to the face on its other side.
            let fv = &faces[f];
            let i = slot[&(f, v)];
            let prev = fv[(i + fv.len() - 1) % fv.len()];
            let e = lookup[&(prev.min(v), prev.max(v))];
            ring_e.push(e);
            let g = edges[e].other_face(f);
            if g == start {
                break;
            }
            if ring_f.len() > incident[v].len() {
                return Err(BuildError::NonManifoldVertex(v));
            }
            ring_f.push(g);
            f = g;
        }
        if ring_f.len() != incident[v].len() {
            return Err(BuildError::NonManifoldVertex(v));
        }
        vf.push(ring_f);
        ve.push(ring_e);
    }
    Ok((vf, ve))
}
