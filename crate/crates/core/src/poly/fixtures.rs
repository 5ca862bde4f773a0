//! Canonical test polyhedra.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hull::{brute_force_hull, halfspace_intersection, incremental_hull};
use super::Polyhedron;
use crate::error::BuildError;
use crate::geom::{Plane, Point3, TolerancePolicy, Vec3};

/// Reference point used with [`make_pex`].
pub const PEX_ORIGIN: Point3 = Vec3::new(0.5, 0.5, 0.5);

/// Offset of the truncating plane in [`make_badguy`].
pub const BADGUY_EPSILON: f64 = 0.05;

const HULL_RETRIES: usize = 8;

/// Axis-aligned cube `[-h, h]^3` with six quadrilateral faces.
pub fn make_cube(half_extent: f64) -> Polyhedron {
    let h = half_extent;
    let vertices: Vec<Point3> = (0..8)
        .map(|i| {
            let s = |bit: usize| if i & bit != 0 { h } else { -h };
            Vec3::new(s(1), s(2), s(4))
        })
        .collect();
    let faces = vec![
        vec![0, 2, 3, 1], // z = -h
        vec![4, 5, 7, 6], // z = +h
        vec![0, 1, 5, 4], // y = -h
        vec![2, 6, 7, 3], // y = +h
        vec![0, 4, 6, 2], // x = -h
        vec![1, 3, 7, 5], // x = +h
    ];
    Polyhedron::build(vertices, faces, TolerancePolicy::default()).expect("cube is valid")
}

/// Regular tetrahedron centred at the origin with circumradius sqrt(3).
pub fn make_tetrahedron() -> Polyhedron {
    let vertices = vec![
        Vec3::new(1.0, 1.0, 1.0),
        Vec3::new(1.0, -1.0, -1.0),
        Vec3::new(-1.0, 1.0, -1.0),
        Vec3::new(-1.0, -1.0, 1.0),
    ];
    let faces = vec![vec![0, 1, 2], vec![0, 3, 1], vec![0, 2, 3], vec![1, 3, 2]];
    Polyhedron::build(vertices, faces, TolerancePolicy::default()).expect("tetrahedron is valid")
}

/// The 18 points of the octagonal example body: two unit-radius octagons at
/// z = 1 and z = -1, the lower one turned by pi/20 clockwise, and apexes at
/// z = +-1.2. Vertex `i` is the point `v_i`.
pub fn pex_points() -> Vec<Point3> {
    let mut pts = vec![Vec3::new(0.0, 0.0, 1.2)];
    for i in 0..8 {
        let a = i as f64 * PI / 4.0;
        pts.push(Vec3::new(a.cos(), a.sin(), 1.0));
    }
    for i in 0..8 {
        let a = i as f64 * PI / 4.0 - PI / 20.0;
        pts.push(Vec3::new(a.cos(), a.sin(), -1.0));
    }
    pts.push(Vec3::new(0.0, 0.0, -1.2));
    pts
}

/// Convex hull of [`pex_points`], enumerated face by face.
pub fn make_pex() -> Polyhedron {
    let (vertices, faces) =
        brute_force_hull(&pex_points(), 1e-9).expect("example hull is non-degenerate");
    Polyhedron::build(vertices, faces, TolerancePolicy::default()).expect("example hull is valid")
}

/// A wedge truncated so that an ascending curve runs from one saddle to
/// another when the reference point is the origin.
///
/// Two planes at +-30 degrees meet in the ridge `{(1, t, 0)}`. A vertical plane
/// through `(1 + eps, 0, 0)` and `(1, 1, 0)` cuts the ridge at `(1, 1, 0)`;
/// `y = 2` caps it so that the vertical edge through `(1 - eps, 2, 0)` carries
/// a second saddle. `y = -2` and `x = -1` close the body.
pub fn make_badguy() -> Polyhedron {
    let eps = BADGUY_EPSILON;
    let (s, c) = (PI / 6.0).sin_cos();
    let plane = |n: Vec3, through: Point3| Plane::from_point_normal(through, n).unwrap();
    let planes = vec![
        plane(Vec3::new(c, 0.0, s), Vec3::new(1.0, 0.0, 0.0)),
        plane(Vec3::new(c, 0.0, -s), Vec3::new(1.0, 0.0, 0.0)),
        plane(Vec3::new(1.0, eps, 0.0), Vec3::new(1.0, 1.0, 0.0)),
        plane(Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 2.0, 0.0)),
        plane(Vec3::new(0.0, -1.0, 0.0), Vec3::new(0.0, -2.0, 0.0)),
        plane(Vec3::new(-1.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0)),
    ];
    let (vertices, faces) = halfspace_intersection(&planes, 1e-12).expect("bounded truncation");
    Polyhedron::build(vertices, faces, TolerancePolicy::default())
        .expect("truncated wedge is valid")
}

/// Hull of `n` points drawn uniformly on the unit sphere. Deterministic per
/// seed; a degenerate draw is redrawn from the same stream.
pub fn make_random_hull(n: usize, seed: u64) -> Result<Polyhedron, BuildError> {
    if n < 4 {
        return Err(BuildError::DegenerateHull(format!(
            "need at least 4 points, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = BuildError::DegenerateHull("no attempt".into());
    for _ in 0..HULL_RETRIES {
        let pts: Vec<Point3> = (0..n)
            .map(|_| {
                let z: f64 = rng.gen_range(-1.0..1.0);
                let phi: f64 = rng.gen_range(0.0..2.0 * PI);
                let r = (1.0 - z * z).sqrt();
                Vec3::new(r * phi.cos(), r * phi.sin(), z)
            })
            .collect();
        match incremental_hull(&pts, 1e-10)
            .and_then(|(v, f)| Polyhedron::build(v, f, TolerancePolicy::default()))
        {
            Ok(p) => return Ok(p),
            Err(e) => last = e,
        }
    }
    Err(last)
}
