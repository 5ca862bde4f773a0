use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;
use crate::flow::CurveRole;
use crate::mscomplex::{to_graph, Cell, Color, MSComplex, MSGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    Json,
    Dot,
    Graphml,
}

impl FromStr for GraphFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(GraphFormat::Json),
            "dot" => Ok(GraphFormat::Dot),
            "graphml" => Ok(GraphFormat::Graphml),
            _ => Err(format!("unknown graph format '{s}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveFormat {
    ObjPolyline,
    Vtk,
}

impl CurveFormat {
    pub fn from_path(path: &Path) -> CurveFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("vtk") => CurveFormat::Vtk,
            _ => CurveFormat::ObjPolyline,
        }
    }
}

pub fn role_name(role: CurveRole) -> &'static str {
    match role {
        CurveRole::StableToSaddle => "stable-to-saddle",
        CurveRole::SaddleToUnstable => "saddle-to-unstable",
    }
}

/// Display color of a curve role: green towards stable points, red
/// towards unstable ones.
pub fn role_color(role: CurveRole) -> Color {
    match role {
        CurveRole::StableToSaddle => Color::Green,
        CurveRole::SaddleToUnstable => Color::Red,
    }
}

#[derive(Serialize)]
struct GraphJson<'a> {
    schema: u32,
    #[serde(flatten)]
    graph: MSGraph,
    cells: &'a [Cell],
}

pub fn graph_string(msc: &MSComplex, format: GraphFormat) -> String {
    let g = to_graph(msc, false);
    match format {
        GraphFormat::Json => {
            let mut s = serde_json::to_string_pretty(&GraphJson {
                schema: 1,
                graph: g,
                cells: &msc.cells,
            })
            .unwrap();
            s.push('\n');
            s
        }
        GraphFormat::Dot => {
            let mut s = String::from("graph ms {\n");
            for v in &g.vertices {
                let kind = format!("{:?}", v.kind).to_lowercase();
                writeln!(
                    s,
                    "  n{} [class={kind}, color={}, style=filled, fillcolor={}];",
                    v.id,
                    v.color.name(),
                    v.color.name()
                )
                .unwrap();
            }
            for e in &g.edges {
                writeln!(
                    s,
                    "  n{} -- n{} [id=c{}, role=\"{}\", color={}];",
                    e.source,
                    e.target,
                    e.id,
                    role_name(e.role),
                    role_color(e.role).name()
                )
                .unwrap();
            }
            s.push_str("}\n");
            s
        }
        GraphFormat::Graphml => {
            let mut s = String::from(concat!(
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
                "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n",
                "  <key id=\"kind\" for=\"node\" attr.name=\"kind\" attr.type=\"string\"/>\n",
                "  <key id=\"color\" for=\"node\" attr.name=\"color\" attr.type=\"string\"/>\n",
                "  <key id=\"x\" for=\"node\" attr.name=\"x\" attr.type=\"double\"/>\n",
                "  <key id=\"y\" for=\"node\" attr.name=\"y\" attr.type=\"double\"/>\n",
                "  <key id=\"z\" for=\"node\" attr.name=\"z\" attr.type=\"double\"/>\n",
                "  <key id=\"role\" for=\"edge\" attr.name=\"role\" attr.type=\"string\"/>\n",
                "  <graph id=\"ms\" edgedefault=\"undirected\">\n"
            ));
            for v in &g.vertices {
                let kind = format!("{:?}", v.kind).to_lowercase();
                writeln!(
                    s,
                    "    <node id=\"n{}\"><data key=\"kind\">{kind}</data><data key=\"color\">{}</data>\
                     <data key=\"x\">{:?}</data><data key=\"y\">{:?}</data><data key=\"z\">{:?}</data></node>",
                    v.id,
                    v.color.name(),
                    v.position.x,
                    v.position.y,
                    v.position.z
                )
                .unwrap();
            }
            for e in &g.edges {
                writeln!(
                    s,
                    "    <edge id=\"c{}\" source=\"n{}\" target=\"n{}\"><data key=\"role\">{}</data></edge>",
                    e.id,
                    e.source,
                    e.target,
                    role_name(e.role)
                )
                .unwrap();
            }
            s.push_str("  </graph>\n</graphml>\n");
            s
        }
    }
}

pub fn export_graph(msc: &MSComplex, format: GraphFormat, path: &Path) -> Result<(), Error> {
    Ok(std::fs::write(path, graph_string(msc, format))?)
}

/// Every isolated curve as its own polyline, tagged with its role.
pub fn curves_string(msc: &MSComplex, format: CurveFormat) -> String {
    let mut s = String::new();
    match format {
        CurveFormat::ObjPolyline => {
            s.push_str("# isolated ascending curves; group = role, green stable-to-saddle, red saddle-to-unstable\n");
            let mut next = 1;
            for c in &msc.edges {
                let pts = c.polyline();
                writeln!(s, "o curve_{}", c.id).unwrap();
                writeln!(s, "g {}", role_name(c.role)).unwrap();
                writeln!(
                    s,
                    "# role={} color={} origin={} destination={}",
                    role_name(c.role),
                    role_color(c.role).name(),
                    c.origin,
                    c.destination
                )
                .unwrap();
                for p in &pts {
                    writeln!(s, "v {:?} {:?} {:?}", p.x, p.y, p.z).unwrap();
                }
                s.push('l');
                for k in 0..pts.len() {
                    write!(s, " {}", next + k).unwrap();
                }
                s.push('\n');
                next += pts.len();
            }
        }
        CurveFormat::Vtk => {
            let lines: Vec<_> = msc.edges.iter().map(|c| c.polyline()).collect();
            let npts: usize = lines.iter().map(Vec::len).sum();
            s.push_str(
                "# vtk DataFile Version 3.0\nisolated ascending curves\nASCII\nDATASET POLYDATA\n",
            );
            writeln!(s, "POINTS {npts} double").unwrap();
            for p in lines.iter().flatten() {
                writeln!(s, "{:?} {:?} {:?}", p.x, p.y, p.z).unwrap();
            }
            writeln!(s, "LINES {} {}", lines.len(), npts + lines.len()).unwrap();
            let mut next = 0;
            for l in &lines {
                write!(s, "{}", l.len()).unwrap();
                for k in 0..l.len() {
                    write!(s, " {}", next + k).unwrap();
                }
                s.push('\n');
                next += l.len();
            }
            writeln!(
                s,
                "CELL_DATA {}\nSCALARS role int 1\nLOOKUP_TABLE default",
                lines.len()
            )
            .unwrap();
            for c in &msc.edges {
                writeln!(
                    s,
                    "{}",
                    if c.role == CurveRole::StableToSaddle {
                        0
                    } else {
                        1
                    }
                )
                .unwrap();
            }
        }
    }
    s
}

pub fn export_curves(msc: &MSComplex, format: CurveFormat, path: &Path) -> Result<(), Error> {
    Ok(std::fs::write(path, curves_string(msc, format))?)
}
