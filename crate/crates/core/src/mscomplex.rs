//! Assembly of the Morse-Smale complex from equilibria and isolated curves,
//! and structural validation.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::equilibria::{
    find_equilibria, EdgeClass, Equilibria, Equilibrium, EquilibriumKind, NondegeneracyReport,
};
use crate::error::{Error, NonGenericWitness};
use crate::flow::trace_curves;
use crate::flow::{AscendingCurve, CurveRole};
use crate::geom::{Point3, Vec3};
use crate::poly::{Carrier, ReferencedPolyhedron};

/// A quadrilateral 2-cell. Corners run stable, saddle, unstable, saddle;
/// `edges[i]` joins `corners[i]` and `corners[(i + 1) % 4]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub corners: [usize; 4],
    pub edges: [usize; 4],
    /// Two boundary curves of the cell run together for a while.
    pub merged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MSComplex {
    pub vertices: Vec<Equilibrium>,
    pub edges: Vec<AscendingCurve>,
    pub cells: Vec<Cell>,
    pub edge_classes: Vec<EdgeClass>,
    pub nondegeneracy: NondegeneracyReport,
    pub warnings: Vec<String>,
}

/// Wall-clock time spent on edge classification and equilibria, and on
/// curve tracing and cell assembly.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepTimings {
    pub steps_1_3: Duration,
    pub steps_4_5: Duration,
}

impl MSComplex {
    /// `(stable, saddle, unstable)` counts.
    pub fn census(&self) -> (usize, usize, usize) {
        let n = |k| self.vertices.iter().filter(|e| e.kind == k).count();
        (
            n(EquilibriumKind::Stable),
            n(EquilibriumKind::Saddle),
            n(EquilibriumKind::Unstable),
        )
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.cells.len() as i64
    }
}

pub fn build_ms_complex(rp: &ReferencedPolyhedron) -> Result<MSComplex, Error> {
    build_with_timings(rp).map(|(m, _)| m)
}

pub fn build_with_timings(rp: &ReferencedPolyhedron) -> Result<(MSComplex, StepTimings), Error> {
    let t0 = Instant::now();
    let eq = find_equilibria(rp)?;
    let steps_1_3 = t0.elapsed();
    let t1 = Instant::now();
    let msc = assemble(rp, eq)?;
    let steps_4_5 = t1.elapsed();
    Ok((
        msc,
        StepTimings {
            steps_1_3,
            steps_4_5,
        },
    ))
}

/// Steps 4 and 5 on already classified equilibria.
pub fn assemble(rp: &ReferencedPolyhedron, eq: Equilibria) -> Result<MSComplex, Error> {
    if eq.report.is_degenerate() {
        return Err(Error::NonGeneric(NonGenericWitness::Degenerate {
            findings: eq.report.findings.len(),
        }));
    }
    let mut warnings = Vec::new();
    if !rp.poly().is_simplicial() {
        warnings.push("surface is not triangulated; genericity is not guaranteed".to_string());
    }
    let curves = trace_curves(rp, &eq)?;
    let cells = stitch(rp, &eq, &curves)?;
    Ok(MSComplex {
        vertices: eq.list,
        edges: curves,
        cells,
        edge_classes: eq.classes,
        nondegeneracy: eq.report,
        warnings,
    })
}

/// Per saddle, curve ids in the order: down through the left face, down
/// through the right face, up toward the first endpoint, up toward the
/// second endpoint. Counterclockwise seen from outside these come as
/// up-second, down-left, up-first, down-right.
fn saddle_slots(
    curves: &[AscendingCurve],
    n: usize,
    poly: &crate::poly::Polyhedron,
    eq: &Equilibria,
) -> Result<Vec<[usize; 4]>, Error> {
    let mut slots = vec![[usize::MAX; 4]; n];
    for c in curves {
        let s = c.saddle;
        let Carrier::Edge(e) = eq.list[s].carrier else {
            return Err(Error::internal(format!(
                "curve {} has non-saddle {s}",
                c.id
            )));
        };
        let edge = poly.edge(e);
        let k = match c.role {
            CurveRole::StableToSaddle => {
                let f = match c.segments.last().map(|g| g.carrier) {
                    Some(Carrier::Face(f)) => f,
                    _ => {
                        return Err(Error::internal(format!(
                            "curve {} does not end in a face",
                            c.id
                        )))
                    }
                };
                if f == edge.faces[0] {
                    0
                } else {
                    1
                }
            }
            CurveRole::SaddleToUnstable => {
                let end = c.segments[0].end.position;
                if end.dist(poly.vertex(edge.vertices[0])) < end.dist(poly.vertex(edge.vertices[1]))
                {
                    2
                } else {
                    3
                }
            }
        };
        if slots[s][k] != usize::MAX {
            return Err(Error::internal(format!(
                "saddle {s} has two curves in slot {k}"
            )));
        }
        slots[s][k] = c.id;
    }
    Ok(slots)
}

fn stitch(
    rp: &ReferencedPolyhedron,
    eq: &Equilibria,
    curves: &[AscendingCurve],
) -> Result<Vec<Cell>, Error> {
    let poly = rp.poly();
    let slots = saddle_slots(curves, eq.list.len(), poly, eq)?;
    let tol = rp.tol().length();

    let mut leaving = vec![Vec::new(); eq.list.len()];
    for c in curves
        .iter()
        .filter(|c| c.role == CurveRole::StableToSaddle)
    {
        leaving[c.origin].push(c.id);
    }
    let mut cells = Vec::new();
    for m in eq.of_kind(EquilibriumKind::Stable) {
        let Carrier::Face(f) = m.carrier else {
            unreachable!()
        };
        let n = poly.plane(f).normal;
        let u0 = any_perpendicular(n);
        let w0 = n.cross(u0);
        let mut around: Vec<(f64, usize)> = leaving[m.id]
            .iter()
            .map(|&c| {
                let c = &curves[c];
                let d = c.segments[0].end.position - c.segments[0].start.position;
                (d.dot(w0).atan2(d.dot(u0)), c.id)
            })
            .collect();
        around.sort_by(|a, b| a.0.total_cmp(&b.0));
        let k = around.len();
        for i in 0..k {
            let ci = around[i].1;
            let cj = around[(i + 1) % k].1;
            let (si, sj) = (curves[ci].saddle, curves[cj].saddle);
            let slot = |s: usize, c: usize| slots[s].iter().position(|&x| x == c).unwrap();
            // Clockwise neighbour of the incoming down-curve at each saddle.
            let xi = slots[si][if slot(si, ci) == 0 { 3 } else { 2 }];
            let xj = slots[sj][if slot(sj, cj) == 0 { 2 } else { 3 }];
            let (ui, uj) = (curves[xi].destination, curves[xj].destination);
            if ui != uj {
                return Err(Error::internal(format!(
                    "cell walk from stable {} does not close: saddle {si} reaches unstable {ui} by curve {xi}, \
                     saddle {sj} reaches unstable {uj} by curve {xj}",
                    m.id
                )));
            }
            let merged = si != sj && curves_overlap(rp, &curves[xi], &curves[xj], tol);
            cells.push(Cell {
                corners: [m.id, si, ui, sj],
                edges: [ci, xi, xj, cj],
                merged,
            });
        }
    }
    Ok(cells)
}

fn any_perpendicular(n: Vec3) -> Vec3 {
    let a = if n.x.abs() < 0.9 {
        Vec3::new(1.0, 0.0, 0.0)
    } else {
        Vec3::new(0.0, 1.0, 0.0)
    };
    (a - n * a.dot(n)).normalized().unwrap()
}

/// Whether two curves share a stretch of some polyhedron edge.
fn curves_overlap(
    rp: &ReferencedPolyhedron,
    a: &AscendingCurve,
    b: &AscendingCurve,
    tol: f64,
) -> bool {
    let poly = rp.poly();
    let param = |e: usize, p: Point3| {
        let (p0, p1) = poly.edge_points(e);
        (p - p0).dot(p1 - p0) / (p1 - p0).norm()
    };
    for sa in &a.segments {
        let Carrier::Edge(e) = sa.carrier else {
            continue;
        };
        for sb in b.segments.iter().filter(|s| s.carrier == sa.carrier) {
            let (a0, a1) = minmax(param(e, sa.start.position), param(e, sa.end.position));
            let (b0, b1) = minmax(param(e, sb.start.position), param(e, sb.end.position));
            if a1.min(b1) - a0.max(b0) > tol {
                return true;
            }
        }
    }
    false
}

fn minmax(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationFailure {
    pub check: String,
    pub entities: Vec<usize>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub failures: Vec<ValidationFailure>,
}

/// Checks the structural properties of a complex and lists every failure.
pub fn validate(msc: &MSComplex) -> ValidationReport {
    use EquilibriumKind::*;
    let mut failures = Vec::new();
    let mut fail = |check: &str, entities: Vec<usize>, message: String| {
        failures.push(ValidationFailure {
            check: check.into(),
            entities,
            message,
        })
    };
    let nv = msc.vertices.len();
    let kind = |i: usize| msc.vertices.get(i).map(|e| e.kind);

    let mut down = vec![0usize; nv];
    let mut up = vec![0usize; nv];
    for c in &msc.edges {
        let (o, d) = (kind(c.origin), kind(c.destination));
        let ok = match c.role {
            CurveRole::StableToSaddle => {
                o == Some(Stable) && d == Some(Saddle) && c.saddle == c.destination
            }
            CurveRole::SaddleToUnstable => {
                o == Some(Saddle) && d == Some(Unstable) && c.saddle == c.origin
            }
        };
        if !ok {
            fail(
                "endpoint-rule",
                vec![c.id],
                format!(
                    "curve {} joins {:?} {} to {:?} {}",
                    c.id, o, c.origin, d, c.destination
                ),
            );
            continue;
        }
        match c.role {
            CurveRole::StableToSaddle => down[c.destination] += 1,
            CurveRole::SaddleToUnstable => up[c.origin] += 1,
        }
    }
    for e in msc.vertices.iter().filter(|e| e.kind == Saddle) {
        if down[e.id] != 2 || up[e.id] != 2 {
            fail(
                "saddle-degree",
                vec![e.id],
                format!(
                    "saddle {} has {} stable-side and {} unstable-side curves",
                    e.id, down[e.id], up[e.id]
                ),
            );
        }
    }

    let (s, h, u) = msc.census();
    if s as i64 + u as i64 - h as i64 != 2 {
        fail(
            "census",
            vec![],
            format!("S + U - H = {} + {} - {} != 2", s, u, h),
        );
    }
    let chi = msc.euler_characteristic();
    if chi != 2 {
        fail(
            "euler",
            vec![],
            format!(
                "V - E + C = {} - {} + {} = {chi}",
                nv,
                msc.edges.len(),
                msc.cells.len()
            ),
        );
    }

    let pattern = [Stable, Saddle, Unstable, Saddle];
    let mut uses = vec![0usize; msc.edges.len()];
    for (ci, cell) in msc.cells.iter().enumerate() {
        let kinds: Vec<_> = cell.corners.iter().map(|&c| kind(c)).collect();
        if kinds.iter().zip(pattern).any(|(k, p)| *k != Some(p)) {
            fail(
                "cell-corners",
                vec![ci],
                format!(
                    "cell {ci} corners {:?} have kinds {:?}",
                    cell.corners, kinds
                ),
            );
        }
        for i in 0..4 {
            let Some(c) = msc.edges.get(cell.edges[i]) else {
                fail(
                    "cell-edges",
                    vec![ci],
                    format!("cell {ci} refers to missing curve {}", cell.edges[i]),
                );
                continue;
            };
            uses[c.id] += 1;
            let mut ends = [c.origin, c.destination];
            let mut want = [cell.corners[i], cell.corners[(i + 1) % 4]];
            ends.sort_unstable();
            want.sort_unstable();
            if ends != want {
                fail(
                    "cell-edges",
                    vec![ci, c.id],
                    format!("curve {} does not join corners {:?}", c.id, want),
                );
            }
        }
    }
    for (id, &n) in uses.iter().enumerate() {
        if n != 2 {
            fail(
                "curve-cells",
                vec![id],
                format!("curve {id} bounds {n} cells instead of 2"),
            );
        }
    }

    if nv > 1 {
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for c in &msc.edges {
            if c.origin < nv && c.destination < nv {
                let (a, b) = (
                    find(&mut parent, c.origin),
                    find(&mut parent, c.destination),
                );
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        let stray: Vec<usize> = (0..nv).filter(|&i| find(&mut parent, i) != root).collect();
        if !stray.is_empty() {
            fail(
                "connected",
                stray.clone(),
                format!(
                    "{} equilibria are not connected to equilibrium 0",
                    stray.len()
                ),
            );
        }
    }

    ValidationReport {
        pass: failures.is_empty(),
        failures,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Green,
    Blue,
    Red,
}

impl Color {
    pub fn of(kind: EquilibriumKind) -> Color {
        match kind {
            EquilibriumKind::Stable => Color::Green,
            EquilibriumKind::Saddle => Color::Blue,
            EquilibriumKind::Unstable => Color::Red,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Green => "green",
            Color::Blue => "blue",
            Color::Red => "red",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphVertex {
    pub id: usize,
    pub kind: EquilibriumKind,
    pub color: Color,
    pub position: Point3,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub id: usize,
    pub source: usize,
    pub target: usize,
    pub role: CurveRole,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub polyline: Option<Vec<Point3>>,
}

/// The colored multigraph of equilibria and isolated curves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MSGraph {
    pub vertices: Vec<GraphVertex>,
    pub edges: Vec<GraphEdge>,
}

pub fn to_graph(msc: &MSComplex, with_embedding: bool) -> MSGraph {
    MSGraph {
        vertices: msc
            .vertices
            .iter()
            .map(|e| GraphVertex {
                id: e.id,
                kind: e.kind,
                color: Color::of(e.kind),
                position: e.position(),
            })
            .collect(),
        edges: msc
            .edges
            .iter()
            .map(|c| GraphEdge {
                id: c.id,
                source: c.origin,
                target: c.destination,
                role: c.role,
                polyline: with_embedding.then(|| c.polyline()),
            })
            .collect(),
    }
}
