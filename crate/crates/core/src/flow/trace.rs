use rayon::prelude::*;

use super::{AscendingCurve, CurveRole, GradientField, GradientSource, Segment};
use crate::equilibria::{find_equilibria, EdgeClass, Equilibria, EquilibriumKind};
use crate::error::{Error, NonGenericWitness};
use crate::geom::{Point3, Vec3};
use crate::poly::{Carrier, ReferencedPolyhedron, SurfacePoint};

enum Exit {
    Edge(SurfacePoint),
    Vertex { vertex: usize, distance: f64 },
}

/// Follow the ray `start + t dir` (t > 0) across face `f` and report where
/// it leaves. Sides containing the start point are skipped.
fn exit_face(
    field: &GradientField,
    f: usize,
    start: &SurfacePoint,
    dir: Vec3,
) -> Result<Exit, Error> {
    let poly = field.rp.poly();
    let vs = poly.face(f);
    let n = vs.len();
    let es = poly.face_edges(f);
    let skip = |i: usize| match start.carrier {
        Carrier::Edge(e) => es[i] == e,
        Carrier::Vertex(v) => vs[i] == v || vs[(i + 1) % n] == v,
        Carrier::Face(_) => false,
    };
    let x = start.position;
    let mut best: Option<(f64, usize)> = None;
    for i in 0..n {
        if skip(i) {
            continue;
        }
        let m = poly.side_inward_normal(f, i);
        let rate = m.dot(dir);
        if rate >= 0.0 {
            continue;
        }
        let t = m.dot(x - poly.vertex(vs[i])).max(0.0) / -rate;
        if best.is_none_or(|(bt, _)| t < bt) {
            best = Some((t, i));
        }
    }
    let (t, i) = best.ok_or_else(|| Error::internal(format!("ray does not leave face {f}")))?;
    let y = x + dir * t;
    let eps = field.rp.tol().vertex_hit();
    let start_vertex = match start.carrier {
        Carrier::Vertex(v) => Some(v),
        _ => None,
    };
    if let Some((v, d)) = vs
        .iter()
        .filter(|&&v| Some(v) != start_vertex)
        .map(|&v| (v, poly.vertex(v).dist(y)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
    {
        if d <= eps {
            return Ok(Exit::Vertex {
                vertex: v,
                distance: d,
            });
        }
    }
    let e = es[i];
    let (p0, p1) = poly.edge_points(e);
    let s = ((y - p0).dot(p1 - p0) / (p1 - p0).norm_sq()).clamp(0.0, 1.0);
    Ok(Exit::Edge(SurfacePoint::on_edge(y, e, s)))
}

fn segment(
    field: &GradientField,
    start: SurfacePoint,
    end: SurfacePoint,
    carrier: Carrier,
) -> Segment {
    Segment {
        start,
        end,
        carrier,
        carrier_distance: field.carrier_distance(carrier),
    }
}

fn saddle_edge(eq: &Equilibria, saddle: usize) -> Result<usize, Error> {
    let s = eq
        .list
        .get(saddle)
        .ok_or_else(|| Error::Precondition(format!("no equilibrium {saddle}")))?;
    match (s.kind, s.carrier) {
        (EquilibriumKind::Saddle, Carrier::Edge(e)) => Ok(e),
        _ => Err(Error::Precondition(format!(
            "equilibrium {saddle} is not a saddle"
        ))),
    }
}

/// The two ascending curves leaving a saddle, one along each half of its
/// edge, ordered by the edge's endpoint order.
pub fn trace_up_from_saddle(
    field: &GradientField,
    saddle: usize,
) -> Result<[AscendingCurve; 2], Error> {
    let e = saddle_edge(field.eq, saddle)?;
    let ends = field.rp.poly().edge(e).vertices;
    let a = trace_up(field, saddle, e, ends[0])?;
    let b = trace_up(field, saddle, e, ends[1])?;
    Ok([a, b])
}

enum State {
    AtVertex(usize),
    OnEdge {
        point: SurfacePoint,
        from_face: usize,
    },
}

fn trace_up(
    field: &GradientField,
    saddle: usize,
    e: usize,
    toward: usize,
) -> Result<AscendingCurve, Error> {
    let poly = field.rp.poly();
    let eq = field.eq;
    let budget = poly.num_edges() + poly.num_faces();
    let start = eq.list[saddle].location;
    let mut segments = vec![segment(
        field,
        start,
        SurfacePoint::on_vertex(poly.vertex(toward), toward),
        Carrier::Edge(e),
    )];
    let mut state = State::AtVertex(toward);
    loop {
        if segments.len() > budget {
            return Err(Error::internal(format!(
                "ascending curve from saddle {saddle} exceeded {budget} segments"
            )));
        }
        match state {
            State::AtVertex(v) => {
                if let Some(u) = eq.unstable_at(v) {
                    return Ok(AscendingCurve {
                        id: 0,
                        role: CurveRole::SaddleToUnstable,
                        origin: saddle,
                        destination: u,
                        saddle,
                        segments,
                    });
                }
                let g = field.vertex_gradient(v)?;
                if let Some(t) = g.tie {
                    return Err(Error::NonGeneric(NonGenericWitness::GradientTie {
                        vertex: v,
                        margin: t.margin,
                    }));
                }
                let here = SurfacePoint::on_vertex(poly.vertex(v), v);
                match g.source {
                    GradientSource::VertexFace { face } => {
                        match exit_face(field, face, &here, g.vector)? {
                            Exit::Vertex { vertex, distance } => {
                                return Err(Error::NonGeneric(NonGenericWitness::VertexHit {
                                    vertex,
                                    face,
                                    distance,
                                }))
                            }
                            Exit::Edge(p) => {
                                segments.push(segment(field, here, p, Carrier::Face(face)));
                                state = State::OnEdge {
                                    point: p,
                                    from_face: face,
                                };
                            }
                        }
                    }
                    GradientSource::VertexEdge { edge } => {
                        if !eq.class(edge).is_followed() {
                            return Err(Error::internal(format!(
                                "vertex {v} ascends along crossed edge {edge}"
                            )));
                        }
                        let w = poly.edge(edge).other_vertex(v);
                        segments.push(segment(
                            field,
                            here,
                            SurfacePoint::on_vertex(poly.vertex(w), w),
                            Carrier::Edge(edge),
                        ));
                        state = State::AtVertex(w);
                    }
                    _ => {
                        return Err(Error::internal(format!(
                            "no ascending direction at vertex {v}"
                        )))
                    }
                }
            }
            State::OnEdge { point, from_face } => {
                let Carrier::Edge(edge) = point.carrier else {
                    unreachable!()
                };
                match eq.class(edge) {
                    EdgeClass::Followed => {
                        let foot = field.edge_foot(edge);
                        if let Some(s2) = eq.saddle_on(edge) {
                            if point.position.dist(foot) <= field.rp.tol().vertex_hit() {
                                return Err(Error::NonGeneric(
                                    NonGenericWitness::SaddleSaddleConnection {
                                        from_saddle: saddle,
                                        to_saddle: s2,
                                        at: point.position,
                                    },
                                ));
                            }
                        }
                        let [a, b] = poly.edge(edge).vertices;
                        let (pa, pb) = poly.edge_points(edge);
                        let w = if (point.position - foot).dot(pb - pa) > 0.0 {
                            b
                        } else {
                            a
                        };
                        segments.push(segment(
                            field,
                            point,
                            SurfacePoint::on_vertex(poly.vertex(w), w),
                            Carrier::Edge(edge),
                        ));
                        state = State::AtVertex(w);
                    }
                    EdgeClass::Crossed {
                        from_face: f0,
                        to_face,
                    } => {
                        if f0 != from_face {
                            return Err(Error::internal(format!(
                                "curve leaves face {from_face} through edge {edge}, which is crossed into it"
                            )));
                        }
                        let dir = point.position - field.face_foot(to_face);
                        match exit_face(field, to_face, &point, dir)? {
                            Exit::Vertex { vertex, distance } => {
                                return Err(Error::NonGeneric(NonGenericWitness::VertexHit {
                                    vertex,
                                    face: to_face,
                                    distance,
                                }))
                            }
                            Exit::Edge(p) => {
                                segments.push(segment(field, point, p, Carrier::Face(to_face)));
                                state = State::OnEdge {
                                    point: p,
                                    from_face: to_face,
                                };
                            }
                        }
                    }
                }
            }
        }
    }
}

/// The two ascending curves arriving at a saddle, one through each face
/// adjacent to its edge, ordered like the edge's faces.
pub fn trace_down_from_saddle(
    field: &GradientField,
    saddle: usize,
) -> Result<[AscendingCurve; 2], Error> {
    let e = saddle_edge(field.eq, saddle)?;
    let faces = field.rp.poly().edge(e).faces;
    let a = trace_down(field, saddle, e, faces[0])?;
    let b = trace_down(field, saddle, e, faces[1])?;
    Ok([a, b])
}

fn trace_down(
    field: &GradientField,
    saddle: usize,
    e: usize,
    first: usize,
) -> Result<AscendingCurve, Error> {
    let poly = field.rp.poly();
    let eq = field.eq;
    let budget = poly.num_edges() + poly.num_faces();
    let mut pos = eq.list[saddle].location;
    let mut face = first;

    let (p0, p1) = poly.edge_points(e);
    let along = (p1 - p0).normalized().unwrap();
    let entry = field.face_foot(face) - pos.position;
    if along.dot(entry).abs() > field.rp.tol().coincidence().max(1e-9 * entry.norm()) {
        return Err(Error::internal(format!(
            "descent from saddle {saddle} is not perpendicular to edge {e}"
        )));
    }

    let mut rev: Vec<Segment> = Vec::new();
    let touches = |entity: String| {
        Error::NonGeneric(NonGenericWitness::DescendingManifoldTouchesSkeleton { saddle, entity })
    };
    loop {
        if rev.len() > budget {
            return Err(Error::internal(format!(
                "descending curve into saddle {saddle} exceeded {budget} segments"
            )));
        }
        let foot: Point3 = field.face_foot(face);
        if let Some(m) = eq.stable_on(face) {
            rev.push(segment(
                field,
                eq.list[m].location,
                pos,
                Carrier::Face(face),
            ));
            rev.reverse();
            return Ok(AscendingCurve {
                id: 0,
                role: CurveRole::StableToSaddle,
                origin: m,
                destination: saddle,
                saddle,
                segments: rev,
            });
        }
        match exit_face(field, face, &pos, foot - pos.position)? {
            Exit::Vertex { vertex, .. } => return Err(touches(format!("vertex {vertex}"))),
            Exit::Edge(p) => {
                rev.push(segment(field, p, pos, Carrier::Face(face)));
                let Carrier::Edge(hit) = p.carrier else {
                    unreachable!()
                };
                match eq.class(hit) {
                    EdgeClass::Followed => return Err(touches(format!("followed edge {hit}"))),
                    EdgeClass::Crossed { from_face, to_face } => {
                        if to_face != face {
                            return Err(Error::internal(format!(
                                "descending curve leaves face {face} through edge {hit}, which is crossed out of it"
                            )));
                        }
                        face = from_face;
                        pos = p;
                    }
                }
            }
        }
    }
}

/// Runs the equilibrium search and traces all four curves of every saddle.
/// Curves are numbered saddle by saddle: two downward, then two upward.
pub fn trace_all(rp: &ReferencedPolyhedron) -> Result<(Equilibria, Vec<AscendingCurve>), Error> {
    let eq = find_equilibria(rp)?;
    let curves = trace_curves(rp, &eq)?;
    Ok((eq, curves))
}

pub(crate) fn trace_curves(
    rp: &ReferencedPolyhedron,
    eq: &Equilibria,
) -> Result<Vec<AscendingCurve>, Error> {
    let field = GradientField::new(rp, eq);
    let saddles: Vec<usize> = eq.of_kind(EquilibriumKind::Saddle).map(|s| s.id).collect();
    let per_saddle: Vec<Result<[AscendingCurve; 4], Error>> = saddles
        .par_iter()
        .map(|&s| {
            let [d0, d1] = trace_down_from_saddle(&field, s)?;
            let [u0, u1] = trace_up_from_saddle(&field, s)?;
            Ok([d0, d1, u0, u1])
        })
        .collect();
    let mut out = Vec::with_capacity(4 * saddles.len());
    for r in per_saddle {
        for mut c in r? {
            c.id = out.len();
            out.push(c);
        }
    }
    Ok(out)
}
