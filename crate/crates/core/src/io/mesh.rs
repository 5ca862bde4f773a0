use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use crate::error::Error;
use crate::geom::{Point3, TolerancePolicy, Vec3};
use crate::poly::Polyhedron;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    /// Guess from the file extension; anything but `.obj` is read as OFF.
    pub fn from_path(path: &Path) -> MeshFormat {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("obj") => MeshFormat::Obj,
            _ => MeshFormat::Off,
        }
    }
}

pub type RawMesh = (Vec<Point3>, Vec<Vec<usize>>);

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, Error> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {what} '{tok}'")))
}

/// Reads an OFF file: `OFF` header, counts, vertex lines, face lines.
/// Comments start with `#`. Per-face colors after the indices are ignored.
pub fn parse_off(text: &str) -> Result<RawMesh, Error> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let rest = header
        .strip_prefix("OFF")
        .ok_or_else(|| parse_err(hl, "missing OFF header"))?
        .trim();
    let (cl, counts) = if rest.is_empty() {
        lines
            .next()
            .ok_or_else(|| parse_err(hl + 1, "missing element counts"))?
    } else {
        (hl, rest)
    };
    let c: Vec<&str> = counts.split_whitespace().collect();
    if c.len() < 2 {
        return Err(parse_err(cl, "expected vertex and face counts"));
    }
    let nv: usize = number(c[0], cl, "vertex count")?;
    let nf: usize = number(c[1], cl, "face count")?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("expected {nv} vertices")))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() < 3 {
            return Err(parse_err(ln, "vertex needs three coordinates"));
        }
        let p = Vec3::new(
            number(t[0], ln, "coordinate")?,
            number(t[1], ln, "coordinate")?,
            number(t[2], ln, "coordinate")?,
        );
        if !p.is_finite() {
            return Err(parse_err(ln, "non-finite coordinate"));
        }
        vertices.push(p);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("expected {nf} faces")))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        let k: usize = number(t[0], ln, "face size")?;
        if t.len() < k + 1 {
            return Err(parse_err(ln, format!("face lists fewer than {k} indices")));
        }
        let mut f = Vec::with_capacity(k);
        for tok in &t[1..=k] {
            let i: usize = number(tok, ln, "vertex index")?;
            if i >= nv {
                return Err(parse_err(ln, format!("vertex index {i} out of range")));
            }
            f.push(i);
        }
        faces.push(f);
    }
    Ok((vertices, faces))
}

/// Reads `v` and `f` records of an OBJ file. Face corners may carry
/// texture and normal references, which are dropped; negative indices count
/// back from the latest vertex.
pub fn parse_obj(text: &str) -> Result<RawMesh, Error> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        let mut t = l.split_whitespace();
        match t.next() {
            Some("v") => {
                let c: Vec<&str> = t.collect();
                if c.len() < 3 {
                    return Err(parse_err(ln, "vertex needs three coordinates"));
                }
                let p = Vec3::new(
                    number(c[0], ln, "coordinate")?,
                    number(c[1], ln, "coordinate")?,
                    number(c[2], ln, "coordinate")?,
                );
                if !p.is_finite() {
                    return Err(parse_err(ln, "non-finite coordinate"));
                }
                vertices.push(p);
            }
            Some("f") => {
                let mut f = Vec::new();
                for corner in t {
                    let idx = corner.split('/').next().unwrap_or("");
                    let k: i64 = number(idx, ln, "vertex index")?;
                    let n = vertices.len() as i64;
                    let resolved = match k {
                        k if k > 0 && k <= n => k - 1,
                        k if k < 0 && -k <= n => n + k,
                        _ => return Err(parse_err(ln, format!("vertex index {k} out of range"))),
                    };
                    f.push(resolved as usize);
                }
                if f.len() < 3 {
                    return Err(parse_err(ln, "face needs at least three corners"));
                }
                faces.push(f);
            }
            _ => {}
        }
    }
    Ok((vertices, faces))
}

pub fn parse_mesh(text: &str, format: MeshFormat) -> Result<RawMesh, Error> {
    match format {
        MeshFormat::Off => parse_off(text),
        MeshFormat::Obj => parse_obj(text),
    }
}

/// Loads and validates a mesh. The path `-` reads OFF from standard input.
pub fn load_mesh(
    path: &Path,
    format: Option<MeshFormat>,
    policy: TolerancePolicy,
) -> Result<Polyhedron, Error> {
    let (text, format) = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        (s, format.unwrap_or(MeshFormat::Off))
    } else {
        (
            std::fs::read_to_string(path)?,
            format.unwrap_or_else(|| MeshFormat::from_path(path)),
        )
    };
    let (v, f) = parse_mesh(&text, format)?;
    Ok(Polyhedron::build(v, f, policy)?)
}

/// OFF text with shortest round-trip coordinates.
pub fn off_string(poly: &Polyhedron) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "OFF\n{} {} {}",
        poly.num_vertices(),
        poly.num_faces(),
        poly.num_edges()
    )
    .unwrap();
    for p in poly.vertices() {
        writeln!(s, "{:?} {:?} {:?}", p.x, p.y, p.z).unwrap();
    }
    for f in poly.faces() {
        write!(s, "{}", f.len()).unwrap();
        for v in f {
            write!(s, " {v}").unwrap();
        }
        s.push('\n');
    }
    s
}

pub fn write_off(poly: &Polyhedron, path: &Path) -> Result<(), Error> {
    Ok(std::fs::write(path, off_string(poly))?)
}
