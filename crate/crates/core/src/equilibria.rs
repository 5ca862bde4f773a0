//! Edge classification and equilibrium points.
//!
//! Step 1 projects the reference point onto every face plane and edge line,
//! step 2 classifies each edge as followed or crossed, and step 3 collects
//! the stable (face), saddle (edge) and unstable (vertex) equilibria.
//! Margins that fall inside the tolerance are reported as findings instead
//! of being rounded to one side.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geom::{in_open_halfplane, project_to_line, project_to_plane, Line3, Point3, Side};
use crate::poly::{Carrier, ReferencedPolyhedron, SurfacePoint};

/// Foot of the reference point on an edge line, with its parameter from
/// `vertices[0]` (0) to `vertices[1]` (1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeFoot {
    pub point: Point3,
    pub t: f64,
}

/// Orthogonal projections of the reference point (step 1).
#[derive(Clone, Debug)]
pub struct Projections {
    pub face: Vec<Point3>,
    pub edge: Vec<EdgeFoot>,
}

impl Projections {
    pub fn compute(rp: &ReferencedPolyhedron) -> Self {
        let poly = rp.poly();
        let o = rp.origin();
        let face = (0..poly.num_faces())
            .map(|f| project_to_plane(o, poly.plane(f)))
            .collect();
        let edge = (0..poly.num_edges())
            .map(|e| {
                let (a, b) = poly.edge_points(e);
                let ln = Line3::through(a, b).expect("edges have positive length");
                let point = project_to_line(o, &ln);
                let t = (point - a).dot(b - a) / (b - a).norm_sq();
                EdgeFoot { point, t }
            })
            .collect();
        Projections { face, edge }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum EdgeClass {
    Followed,
    /// Flow passes over the edge from `from_face` into `to_face`.
    Crossed {
        from_face: usize,
        to_face: usize,
    },
}

impl EdgeClass {
    pub fn is_followed(&self) -> bool {
        matches!(self, EdgeClass::Followed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquilibriumKind {
    Stable,
    Saddle,
    Unstable,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub id: usize,
    pub kind: EquilibriumKind,
    pub location: SurfacePoint,
    pub carrier: Carrier,
    pub height: f64,
}

impl Equilibrium {
    pub fn position(&self) -> Point3 {
        self.location.position
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FindingKind {
    ProjectionOnFaceBoundary,
    ProjectionAtEdgeEndpoint,
    VertexTangency,
    GradientLengthTie,
    CurveHitsVertex,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub kind: FindingKind,
    pub entity: Carrier,
    /// Measured margin: a length for projections, a dimensionless
    /// derivative or gradient-length difference otherwise.
    pub margin: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NondegeneracyStatus {
    GenericCandidate,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyReport {
    pub status: NondegeneracyStatus,
    pub findings: Vec<Finding>,
    pub tolerance: f64,
}

impl NondegeneracyReport {
    pub fn new(findings: Vec<Finding>, tolerance: f64) -> Self {
        let status = if findings.is_empty() {
            NondegeneracyStatus::GenericCandidate
        } else {
            NondegeneracyStatus::Degenerate
        };
        NondegeneracyReport {
            status,
            findings,
            tolerance,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.status == NondegeneracyStatus::Degenerate
    }
}

/// Outcome of [`classify_edge`]. A finding means one of the half-plane
/// tests was within tolerance of the edge line; the class is then the one
/// obtained by treating the boundary as outside the open half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeClassification {
    pub class: EdgeClass,
    pub finding: Option<Finding>,
}

pub fn classify_edge(
    rp: &ReferencedPolyhedron,
    proj: &Projections,
    e: usize,
) -> Result<EdgeClassification, Error> {
    let poly = rp.poly();
    let tol = rp.tol();
    let edge = poly.edge(e);
    let (a, b) = poly.edge_points(e);
    let line = Line3::through(a, b).expect("edges have positive length");
    let mut sides = [(Side::Inside, 0.0); 2];
    for (k, &f) in edge.faces.iter().enumerate() {
        sides[k] = in_open_halfplane(proj.face[f], poly.plane(f), &line, poly.face_center(f), tol)?;
    }
    let [(s0, m0), (s1, m1)] = sides;
    let finding = [(s0, m0), (s1, m1)]
        .iter()
        .zip(edge.faces)
        .find(|((s, _), _)| *s == Side::OnBoundary)
        .map(|((_, m), f)| Finding {
            kind: FindingKind::ProjectionOnFaceBoundary,
            entity: Carrier::Face(f),
            margin: *m,
        });
    let inside0 = s0 == Side::Inside;
    let inside1 = s1 == Side::Inside;
    let class = match (inside0, inside1) {
        (true, true) => EdgeClass::Followed,
        (false, true) => EdgeClass::Crossed { from_face: edge.faces[1], to_face: edge.faces[0] },
        (true, false) => EdgeClass::Crossed { from_face: edge.faces[0], to_face: edge.faces[1] },
        // Both feet on the edge line: already degenerate, any class will do.
        (false, false) if finding.is_some() => EdgeClass::Followed,
        (false, false) => {
            return Err(Error::internal(format!(
                "edge {e}: both face projections lie outside their half-planes (margins {m0:e}, {m1:e})"
            )))
        }
    };
    Ok(EdgeClassification { class, finding })
}

/// Directional data at a vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexStatus {
    pub unstable: bool,
    /// `(edge, <unit edge direction out of the vertex, (q - o)/|q - o|>)`
    /// in the vertex's cyclic edge order.
    pub derivatives: Vec<(usize, f64)>,
    pub finding: Option<Finding>,
}

pub fn is_vertex_equilibrium(rp: &ReferencedPolyhedron, v: usize) -> VertexStatus {
    let poly = rp.poly();
    let q = poly.vertex(v);
    let radial = (q - rp.origin())
        .normalized()
        .expect("reference point is interior");
    let eps = rp.tol().gradient_tie();
    let derivatives: Vec<(usize, f64)> = poly
        .vertex_edges(v)
        .iter()
        .map(|&e| {
            let w = poly.vertex(poly.edge(e).other_vertex(v));
            (e, (w - q).normalized().unwrap().dot(radial))
        })
        .collect();
    let unstable = derivatives.iter().all(|&(_, d)| d < -eps);
    let finding = derivatives
        .iter()
        .filter(|(_, d)| d.abs() <= eps)
        .map(|&(_, d)| Finding {
            kind: FindingKind::VertexTangency,
            entity: Carrier::Vertex(v),
            margin: d,
        })
        .next();
    VertexStatus {
        unstable,
        derivatives,
        finding,
    }
}

/// Everything produced by steps 1 to 3.
#[derive(Clone, Debug)]
pub struct Equilibria {
    pub projections: Projections,
    pub classes: Vec<EdgeClass>,
    pub list: Vec<Equilibrium>,
    pub report: NondegeneracyReport,
    by_face: Vec<Option<usize>>,
    by_edge: Vec<Option<usize>>,
    by_vertex: Vec<Option<usize>>,
}

impl Equilibria {
    pub fn at(&self, c: Carrier) -> Option<&Equilibrium> {
        let id = match c {
            Carrier::Face(f) => self.by_face[f],
            Carrier::Edge(e) => self.by_edge[e],
            Carrier::Vertex(v) => self.by_vertex[v],
        }?;
        Some(&self.list[id])
    }

    pub fn stable_on(&self, f: usize) -> Option<usize> {
        self.by_face[f]
    }

    pub fn saddle_on(&self, e: usize) -> Option<usize> {
        self.by_edge[e]
    }

    pub fn unstable_at(&self, v: usize) -> Option<usize> {
        self.by_vertex[v]
    }

    pub fn of_kind(&self, kind: EquilibriumKind) -> impl Iterator<Item = &Equilibrium> {
        self.list.iter().filter(move |q| q.kind == kind)
    }

    pub fn count(&self, kind: EquilibriumKind) -> usize {
        self.of_kind(kind).count()
    }

    /// `(stable, saddle, unstable)`.
    pub fn census(&self) -> (usize, usize, usize) {
        (
            self.count(EquilibriumKind::Stable),
            self.count(EquilibriumKind::Saddle),
            self.count(EquilibriumKind::Unstable),
        )
    }

    pub fn class(&self, e: usize) -> EdgeClass {
        self.classes[e]
    }
}

/// Signed distance of `p` from the boundary of face `f`, measured inward
/// within the face plane (positive inside).
pub(crate) fn face_margin(rp: &ReferencedPolyhedron, f: usize, p: Point3) -> f64 {
    let poly = rp.poly();
    let vs = poly.face(f);
    (0..vs.len())
        .map(|i| poly.side_inward_normal(f, i).dot(p - poly.vertex(vs[i])))
        .fold(f64::INFINITY, f64::min)
}

/// Steps 2 and 3 over precomputed projections.
pub fn classify_all(
    rp: &ReferencedPolyhedron,
    projections: Projections,
) -> Result<Equilibria, Error> {
    let poly = rp.poly();
    let o = rp.origin();
    let eps = rp.tol().length();
    let mut findings = Vec::new();

    let mut classes = Vec::with_capacity(poly.num_edges());
    for e in 0..poly.num_edges() {
        let c = classify_edge(rp, &projections, e)?;
        findings.extend(c.finding);
        classes.push(c.class);
    }

    let mut list = Vec::new();
    let mut by_face = vec![None; poly.num_faces()];
    let mut by_edge = vec![None; poly.num_edges()];
    let mut by_vertex = vec![None; poly.num_vertices()];

    for f in 0..poly.num_faces() {
        let p = projections.face[f];
        let m = face_margin(rp, f, p);
        if m.abs() <= eps {
            findings.push(Finding {
                kind: FindingKind::ProjectionOnFaceBoundary,
                entity: Carrier::Face(f),
                margin: m,
            });
        } else if m > eps {
            by_face[f] = Some(list.len());
            list.push(Equilibrium {
                id: list.len(),
                kind: EquilibriumKind::Stable,
                location: SurfacePoint::on_face(p, f),
                carrier: Carrier::Face(f),
                height: p.dist(o),
            });
        }
    }
    for e in 0..poly.num_edges() {
        let foot = projections.edge[e];
        let (a, b) = poly.edge_points(e);
        let len = a.dist(b);
        let margin = foot.t.min(1.0 - foot.t) * len;
        if margin.abs() <= eps {
            findings.push(Finding {
                kind: FindingKind::ProjectionAtEdgeEndpoint,
                entity: Carrier::Edge(e),
                margin,
            });
        } else if margin > eps && classes[e].is_followed() {
            by_edge[e] = Some(list.len());
            list.push(Equilibrium {
                id: list.len(),
                kind: EquilibriumKind::Saddle,
                location: SurfacePoint::on_edge(foot.point, e, foot.t),
                carrier: Carrier::Edge(e),
                height: foot.point.dist(o),
            });
        }
    }
    for v in 0..poly.num_vertices() {
        let status = is_vertex_equilibrium(rp, v);
        findings.extend(status.finding);
        if status.unstable {
            by_vertex[v] = Some(list.len());
            let q = poly.vertex(v);
            list.push(Equilibrium {
                id: list.len(),
                kind: EquilibriumKind::Unstable,
                location: SurfacePoint::on_vertex(q, v),
                carrier: Carrier::Vertex(v),
                height: q.dist(o),
            });
        }
    }
    Ok(Equilibria {
        projections,
        classes,
        list,
        report: NondegeneracyReport::new(findings, eps),
        by_face,
        by_edge,
        by_vertex,
    })
}

/// Steps 1 to 3.
pub fn find_equilibria(rp: &ReferencedPolyhedron) -> Result<Equilibria, Error> {
    classify_all(rp, Projections::compute(rp))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::geom::{TolerancePolicy, Vec3};
    use crate::poly::{make_cube, make_pex, make_tetrahedron, Origin, Polyhedron, PEX_ORIGIN};

    /// Wedge with a crease between the top face z = 0 (x in [0, 1]) and a
    /// face sloping down to (2, y, -0.1).
    pub(crate) fn wedge() -> ReferencedPolyhedron {
        let v = vec![
            Vec3::new(0.0, -1.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(1.0, -1.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::new(2.0, -1.0, -0.1),
            Vec3::new(2.0, 1.0, -0.1),
            Vec3::new(0.0, -1.0, -1.0),
            Vec3::new(0.0, 1.0, -1.0),
            Vec3::new(2.0, -1.0, -1.0),
            Vec3::new(2.0, 1.0, -1.0),
        ];
        let pts = crate::poly::hull::halfspace_intersection(
            &[
                crate::geom::Plane::from_point_normal(v[0], Vec3::new(0.0, 0.0, 1.0)).unwrap(),
                crate::geom::Plane::from_point_normal(
                    v[2],
                    (v[3] - v[2]).cross(v[4] - v[2]) * -1.0,
                )
                .unwrap(),
                crate::geom::Plane::from_point_normal(v[0], Vec3::new(-1.0, 0.0, 0.0)).unwrap(),
                crate::geom::Plane::from_point_normal(v[4], Vec3::new(1.0, 0.0, 0.0)).unwrap(),
                crate::geom::Plane::from_point_normal(v[0], Vec3::new(0.0, -1.0, 0.0)).unwrap(),
                crate::geom::Plane::from_point_normal(v[1], Vec3::new(0.0, 1.0, 0.0)).unwrap(),
                crate::geom::Plane::from_point_normal(v[6], Vec3::new(0.0, 0.0, -1.0)).unwrap(),
            ],
            1e-12,
        )
        .unwrap();
        let poly = Polyhedron::build(pts.0, pts.1, TolerancePolicy::default()).unwrap();
        poly.with_reference(Origin::Given(Vec3::new(1.5, 0.0, -0.5)))
            .unwrap()
    }

    pub(crate) fn crease(rp: &ReferencedPolyhedron) -> usize {
        let poly = rp.poly();
        (0..poly.num_edges())
            .find(|&e| {
                let (a, b) = poly.edge_points(e);
                (a.x - 1.0).abs() < 1e-12
                    && (b.x - 1.0).abs() < 1e-12
                    && a.z.abs() < 1e-12
                    && b.z.abs() < 1e-12
            })
            .unwrap()
    }

    /// Independent check: the foot on face plane `f` is on the face side of
    /// the edge line iff it is on the same side as the far vertices.
    fn oracle_followed(rp: &ReferencedPolyhedron, e: usize) -> bool {
        let poly = rp.poly();
        let (a, b) = poly.edge_points(e);
        poly.edge(e).faces.iter().all(|&f| {
            let n = poly.plane(f).normal;
            let foot = rp.origin() - n * poly.plane(f).signed_distance(rp.origin());
            let far = poly
                .face(f)
                .iter()
                .map(|&v| poly.vertex(v))
                .find(|p| (*p - a).cross(b - a).norm() > 1e-9)
                .unwrap();
            let side = |p: Vec3| (b - a).cross(p - a).dot(n);
            side(foot) * side(far) > 0.0
        })
    }

    #[test]
    fn box_edges_all_followed() {
        let rp = make_cube(0.5)
            .with_reference(Origin::Given(Vec3::new(0.1, 0.07, 0.03)))
            .unwrap();
        let eq = find_equilibria(&rp).unwrap();
        for e in 0..rp.poly().num_edges() {
            assert!(oracle_followed(&rp, e));
            assert_eq!(eq.class(e), EdgeClass::Followed);
        }
    }

    #[test]
    fn wedge_crease_is_crossed_into_top_face() {
        let rp = wedge();
        let eq = find_equilibria(&rp).unwrap();
        let e = crease(&rp);
        let top = (0..rp.poly().num_faces())
            .find(|&f| rp.poly().plane(f).normal.z > 0.999)
            .unwrap();
        let slope = rp.poly().edge(e).other_face(top);
        assert!(!oracle_followed(&rp, e));
        assert_eq!(
            eq.class(e),
            EdgeClass::Crossed {
                from_face: slope,
                to_face: top
            }
        );
    }

    #[test]
    fn pex_has_crossed_lateral_edges() {
        let rp = make_pex()
            .with_reference(Origin::Given(PEX_ORIGIN))
            .unwrap();
        let eq = find_equilibria(&rp).unwrap();
        let poly = rp.poly();
        let lateral_crossed = (0..poly.num_edges()).filter(|&e| {
            let [a, b] = poly.edge(e).vertices;
            let ring = |v: usize| (1..=16).contains(&v);
            ring(a) && ring(b) && !eq.class(e).is_followed()
        });
        assert!(lateral_crossed.count() >= 1);
        for e in 0..poly.num_edges() {
            assert_eq!(
                oracle_followed(&rp, e),
                eq.class(e).is_followed(),
                "edge {e}"
            );
        }
    }

    #[test]
    fn cube_census() {
        let rp = make_cube(0.5)
            .with_reference(Origin::Given(Vec3::ZERO))
            .unwrap();
        let eq = find_equilibria(&rp).unwrap();
        assert_eq!(eq.census(), (6, 12, 8));
        assert!(!eq.report.is_degenerate());
        for q in &eq.list {
            match q.kind {
                EquilibriumKind::Stable => assert!((q.height - 0.5).abs() < 1e-12),
                EquilibriumKind::Saddle => assert!((q.height - 0.5f64.sqrt()).abs() < 1e-12),
                EquilibriumKind::Unstable => assert!((q.height - 0.75f64.sqrt()).abs() < 1e-12),
            }
        }
    }

    #[test]
    fn tetrahedron_census() {
        let rp = make_tetrahedron().with_reference(Origin::Centroid).unwrap();
        let eq = find_equilibria(&rp).unwrap();
        assert_eq!(eq.census(), (4, 6, 4));
    }

    #[test]
    fn pex_census_is_consistent() {
        let rp = make_pex()
            .with_reference(Origin::Given(PEX_ORIGIN))
            .unwrap();
        let eq = find_equilibria(&rp).unwrap();
        let (s, h, u) = eq.census();
        assert_eq!(s + u, h + 2);
        assert!(!eq.report.is_degenerate());
    }

    #[test]
    fn vertex_equilibrium_examples() {
        let rp = make_cube(0.5)
            .with_reference(Origin::Given(Vec3::ZERO))
            .unwrap();
        let v = 7; // (0.5, 0.5, 0.5)
        let st = is_vertex_equilibrium(&rp, v);
        assert!(st.unstable);
        assert_eq!(st.derivatives.len(), 3);
        for (_, d) in &st.derivatives {
            assert!((d + 1.0 / 3f64.sqrt()).abs() < 1e-12);
        }
        let rp = make_cube(0.5)
            .with_reference(Origin::Given(Vec3::new(0.3, 0.3, 0.3)))
            .unwrap();
        assert!(is_vertex_equilibrium(&rp, v).unstable);

        // Apex of the octagonal body: brute-force the sign pattern.
        let rp = make_pex()
            .with_reference(Origin::Given(PEX_ORIGIN))
            .unwrap();
        let st = is_vertex_equilibrium(&rp, 0);
        let q = rp.poly().vertex(0);
        let expect = (1..=8).all(|i| (rp.poly().vertex(i) - q).dot(q - PEX_ORIGIN) < 0.0);
        assert_eq!(st.derivatives.len(), 8);
        assert_eq!(st.unstable, expect);
    }

    #[test]
    fn tangency_is_reported() {
        // The edge from the apex (0,0,1.2) to (1,0,1) is perpendicular to q - o.
        let rp = make_pex()
            .with_reference(Origin::Given(Vec3::new(-0.2, 0.0, 0.2)))
            .unwrap();
        let eq = find_equilibria(&rp).unwrap();
        assert!(eq.report.is_degenerate());
        assert!(eq
            .report
            .findings
            .iter()
            .any(|f| f.kind == FindingKind::VertexTangency && f.entity == Carrier::Vertex(0)));
    }

    #[test]
    fn unique_equilibrium_per_entity() {
        let rp = make_pex()
            .with_reference(Origin::Given(PEX_ORIGIN))
            .unwrap();
        let eq = find_equilibria(&rp).unwrap();
        let mut seen = std::collections::HashSet::new();
        for q in &eq.list {
            assert!(seen.insert(q.carrier));
            assert_eq!(eq.at(q.carrier).unwrap().id, q.id);
        }
    }

    #[test]
    fn small_origin_moves_keep_census() {
        let base = find_equilibria(
            &make_pex()
                .with_reference(Origin::Given(PEX_ORIGIN))
                .unwrap(),
        )
        .unwrap();
        for k in 0..10 {
            let d = Vec3::new(1e-7 * k as f64, -0.5e-7 * k as f64, 0.3e-7);
            let rp = make_pex()
                .with_reference(Origin::Given(PEX_ORIGIN + d))
                .unwrap();
            assert_eq!(find_equilibria(&rp).unwrap().census(), base.census());
        }
    }
}
