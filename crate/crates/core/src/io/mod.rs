//! Mesh files in, graphs and curves out.

mod export;
mod mesh;

pub use export::{
    curves_string, export_curves, export_graph, graph_string, role_color, role_name, CurveFormat,
    GraphFormat,
};
pub use mesh::{
    load_mesh, off_string, parse_mesh, parse_obj, parse_off, write_off, MeshFormat, RawMesh,
};
