//! Convex hulls: an incremental builder for large point sets, a brute-force
//! enumerator for small ones, and a half-space intersector.
//!
//! All three refuse configurations where more than three points share a
//! supporting plane, except the half-space builder which emits polygons.

use std::collections::HashMap;

use crate::error::BuildError;
use crate::geom::{Plane, Point3, Vec3};

/// Triangles (outward counterclockwise) of the hull of `points`, plus the
/// points actually used, renumbered.
pub type HullMesh = (Vec<Point3>, Vec<Vec<usize>>);

fn scale_eps(points: &[Point3], rel: f64) -> f64 {
    let (lo, hi) = points.iter().fold((points[0], points[0]), |(lo, hi), &p| {
        (lo.min(p), hi.max(p))
    });
    rel * lo.dist(hi).max(f64::MIN_POSITIVE)
}

fn compact(points: &[Point3], faces: Vec<[usize; 3]>) -> HullMesh {
    // Keep surviving points in their original order.
    let mut used = vec![false; points.len()];
    for f in &faces {
        for &v in f {
            used[v] = true;
        }
    }
    let mut remap = vec![usize::MAX; points.len()];
    let mut kept = Vec::new();
    for (i, &u) in used.iter().enumerate() {
        if u {
            remap[i] = kept.len();
            kept.push(points[i]);
        }
    }
    let out = faces
        .into_iter()
        .map(|f| f.iter().map(|&v| remap[v]).collect())
        .collect();
    (kept, out)
}

/// O(n^4) enumeration of supporting triangles. Used for tiny fixtures and
/// as a test oracle for [`incremental_hull`].
pub fn brute_force_hull(points: &[Point3], rel_eps: f64) -> Result<HullMesh, BuildError> {
    if points.len() < 4 {
        return Err(BuildError::DegenerateHull("fewer than four points".into()));
    }
    let eps = scale_eps(points, rel_eps);
    let n = points.len();
    let mut faces = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let normal = (points[j] - points[i]).cross(points[k] - points[i]);
                let Some(pl) = Plane::from_point_normal(points[i], normal) else {
                    continue;
                };
                let (mut above, mut below, mut on) = (0, 0, 0);
                for (m, &p) in points.iter().enumerate() {
                    if m == i || m == j || m == k {
                        continue;
                    }
                    let d = pl.signed_distance(p);
                    if d > eps {
                        above += 1;
                    } else if d < -eps {
                        below += 1;
                    } else {
                        on += 1;
                    }
                }
                if above > 0 && below > 0 {
                    continue;
                }
                if on > 0 {
                    return Err(BuildError::DegenerateHull(format!(
                        "four or more points on a supporting plane near point {i}"
                    )));
                }
                faces.push(if above == 0 { [i, j, k] } else { [i, k, j] });
            }
        }
    }
    if faces.len() < 4 {
        return Err(BuildError::DegenerateHull("coplanar point set".into()));
    }
    Ok(compact(points, faces))
}

struct HullFace {
    v: [usize; 3],
    plane: Plane,
    alive: bool,
}

/// Incremental hull, deterministic in the input order. Points inside the
/// current hull are dropped; a point within tolerance of a supporting plane
/// is reported as degenerate.
pub fn incremental_hull(points: &[Point3], rel_eps: f64) -> Result<HullMesh, BuildError> {
    let n = points.len();
    if n < 4 {
        return Err(BuildError::DegenerateHull("fewer than four points".into()));
    }
    let eps = scale_eps(points, rel_eps);
    let degenerate = |msg: &str| BuildError::DegenerateHull(msg.to_string());

    let i0 = 0;
    let i1 = (1..n)
        .max_by(|&a, &b| {
            points[a]
                .dist(points[i0])
                .total_cmp(&points[b].dist(points[i0]))
        })
        .unwrap();
    let dir = (points[i1] - points[i0])
        .normalized()
        .ok_or_else(|| degenerate("coincident points"))?;
    let off_line = |p: Point3| (p - points[i0]).cross(dir).norm();
    let i2 = (0..n)
        .max_by(|&a, &b| off_line(points[a]).total_cmp(&off_line(points[b])))
        .unwrap();
    if off_line(points[i2]) <= eps {
        return Err(degenerate("collinear point set"));
    }
    let base = Plane::from_point_normal(
        points[i0],
        (points[i1] - points[i0]).cross(points[i2] - points[i0]),
    )
    .unwrap();
    let i3 = (0..n)
        .max_by(|&a, &b| {
            base.signed_distance(points[a])
                .abs()
                .total_cmp(&base.signed_distance(points[b]).abs())
        })
        .unwrap();
    if base.signed_distance(points[i3]).abs() <= eps {
        return Err(degenerate("coplanar point set"));
    }

    let mut faces: Vec<HullFace> = Vec::new();
    let mut half: HashMap<(usize, usize), usize> = HashMap::new();
    let make = |v: [usize; 3]| -> Option<HullFace> {
        let pl = Plane::from_point_normal(
            points[v[0]],
            (points[v[1]] - points[v[0]]).cross(points[v[2]] - points[v[0]]),
        )?;
        Some(HullFace {
            v,
            plane: pl,
            alive: true,
        })
    };
    let interior = (points[i0] + points[i1] + points[i2] + points[i3]) / 4.0;
    for tri in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let mut f = make(tri).ok_or_else(|| degenerate("flat initial simplex"))?;
        if f.plane.signed_distance(interior) > 0.0 {
            f = make([tri[0], tri[2], tri[1]]).unwrap();
        }
        let id = faces.len();
        for k in 0..3 {
            half.insert((f.v[k], f.v[(k + 1) % 3]), id);
        }
        faces.push(f);
    }

    let seed = [i0, i1, i2, i3];
    for p in 0..n {
        if seed.contains(&p) {
            continue;
        }
        let q = points[p];
        let mut visible = Vec::new();
        for (fi, f) in faces.iter().enumerate() {
            if !f.alive {
                continue;
            }
            let d = f.plane.signed_distance(q);
            if d > eps {
                visible.push(fi);
            }
        }
        if visible.is_empty() {
            continue;
        }
        let is_visible =
            |fi: usize, faces: &[HullFace]| !faces[fi].alive || visible.binary_search(&fi).is_ok();
        let mut horizon = Vec::new();
        for &fi in &visible {
            let v = faces[fi].v;
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                let twin = half[&(b, a)];
                if !is_visible(twin, &faces) {
                    if faces[twin].plane.signed_distance(q).abs() <= eps {
                        return Err(degenerate("point coplanar with a hull face"));
                    }
                    horizon.push((a, b));
                }
            }
        }
        for &fi in &visible {
            faces[fi].alive = false;
            let v = faces[fi].v;
            for k in 0..3 {
                half.remove(&(v[k], v[(k + 1) % 3]));
            }
        }
        for (a, b) in horizon {
            let f = make([a, b, p]).ok_or_else(|| degenerate("sliver face"))?;
            let id = faces.len();
            for k in 0..3 {
                half.insert((f.v[k], f.v[(k + 1) % 3]), id);
            }
            faces.push(f);
        }
    }
    let tris = faces.into_iter().filter(|f| f.alive).map(|f| f.v).collect();
    Ok(compact(points, tris))
}

/// Polyhedron `{x : n_i · x <= c_i}` for outward unit-normal planes, with
/// polygonal faces. Planes that do not support a 2-face are dropped.
pub fn halfspace_intersection(planes: &[Plane], rel_eps: f64) -> Result<HullMesh, BuildError> {
    let m = planes.len();
    let mut verts: Vec<Point3> = Vec::new();
    let mut scale = 1.0f64;
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let Some(p) = intersect3(&planes[i], &planes[j], &planes[k]) else {
                    continue;
                };
                scale = scale.max(p.norm());
                verts.push(p);
            }
        }
    }
    let eps = rel_eps * scale;
    let mut feasible: Vec<Point3> = Vec::new();
    for p in verts {
        if planes.iter().all(|pl| pl.signed_distance(p) <= eps)
            && !feasible.iter().any(|q| q.dist(p) <= eps)
        {
            feasible.push(p);
        }
    }
    let mut faces = Vec::new();
    for pl in planes {
        let mut on: Vec<usize> = (0..feasible.len())
            .filter(|&v| pl.signed_distance(feasible[v]).abs() <= eps)
            .collect();
        if on.len() < 3 {
            continue;
        }
        let c = on.iter().fold(Vec3::ZERO, |acc, &v| acc + feasible[v]) / on.len() as f64;
        let u = (feasible[on[0]] - c)
            .normalized()
            .ok_or_else(|| BuildError::DegenerateHull("collapsed face".into()))?;
        let w = pl.normal.cross(u);
        on.sort_by(|&a, &b| {
            let ang = |v: usize| {
                let d = feasible[v] - c;
                d.dot(w).atan2(d.dot(u))
            };
            ang(a).total_cmp(&ang(b))
        });
        faces.push(on);
    }
    if faces.len() < 4 {
        return Err(BuildError::DegenerateHull(
            "unbounded or flat half-space intersection".into(),
        ));
    }
    Ok((feasible, faces))
}

fn intersect3(a: &Plane, b: &Plane, c: &Plane) -> Option<Point3> {
    let det = a.normal.dot(b.normal.cross(c.normal));
    if det.abs() < 1e-12 {
        return None;
    }
    let p = (b.normal.cross(c.normal) * a.offset
        + c.normal.cross(a.normal) * b.offset
        + a.normal.cross(b.normal) * c.offset)
        / det;
    Some(p)
}
