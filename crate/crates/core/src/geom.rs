//! Geometric primitives and the tolerance policy shared by every predicate.
//!
//! Nothing here knows about polyhedra. All tolerance-dependent decisions go
//! through [`Tolerance`], which is resolved once per mesh from a single
//! relative epsilon and the mesh bounding-box diameter.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A point or free vector in three-space.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub type Point3 = Vec3;
pub type Vector3 = Vec3;

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction, or `None` for a (numerically) zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n > f64::MIN_POSITIVE && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn min(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn lerp(self, o: Vec3, t: f64) -> Vec3 {
        self + (o - self) * t
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        v.to_array()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

/// The plane `{x : normal · x = offset}` with a unit normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane {
    pub normal: Vector3,
    pub offset: f64,
}

impl Plane {
    /// Plane through `point` with the given (not necessarily unit) normal.
    pub fn from_point_normal(point: Point3, normal: Vector3) -> Option<Plane> {
        let normal = normal.normalized()?;
        Some(Plane {
            normal,
            offset: normal.dot(point),
        })
    }

    pub fn signed_distance(&self, p: Point3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// The line `{anchor + t·direction}` with a unit direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line3 {
    pub anchor: Point3,
    pub direction: Vector3,
}

impl Line3 {
    pub fn through(a: Point3, b: Point3) -> Option<Line3> {
        Some(Line3 {
            anchor: a,
            direction: (b - a).normalized()?,
        })
    }
}

pub fn project_to_plane(p: Point3, pl: &Plane) -> Point3 {
    p - pl.normal * pl.signed_distance(p)
}

pub fn project_to_line(p: Point3, ln: &Line3) -> Point3 {
    ln.anchor + ln.direction * ln.direction.dot(p - ln.anchor)
}

/// Distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance(p: Point3, a: Point3, b: Point3) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Outcome of a tolerance-aware side test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Inside,
    Outside,
    OnBoundary,
}

/// Tests whether `q` lies in the open half-plane of `pl` bounded by
/// `boundary` on the side of `witness`.
///
/// Returns the side together with the signed in-plane distance of `q` from
/// the boundary line (positive on the witness side).
pub fn in_open_halfplane(
    q: Point3,
    pl: &Plane,
    boundary: &Line3,
    witness: Point3,
    tol: &Tolerance,
) -> Result<(Side, f64), Error> {
    let inward = pl.normal.cross(boundary.direction);
    let w = inward.dot(witness - boundary.anchor);
    if w.abs() <= tol.halfplane() {
        return Err(Error::Precondition(format!(
            "half-plane witness lies on the boundary line (distance {w:e})"
        )));
    }
    let s = inward.dot(q - boundary.anchor) * w.signum();
    let side = if s.abs() <= tol.halfplane() {
        Side::OnBoundary
    } else if s > 0.0 {
        Side::Inside
    } else {
        Side::Outside
    };
    Ok((side, s))
}

/// The single tolerance knob: a dimensionless relative epsilon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    pub relative: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy { relative: 1e-9 }
    }
}

impl TolerancePolicy {
    pub fn new(relative: f64) -> Result<Self, Error> {
        if relative > 0.0 && relative.is_finite() {
            Ok(TolerancePolicy { relative })
        } else {
            Err(Error::Precondition(format!(
                "relative tolerance must be positive, got {relative}"
            )))
        }
    }

    /// Resolve against a length scale (the mesh bounding-box diameter).
    pub fn resolve(&self, scale: f64) -> Tolerance {
        let scale = if scale > 0.0 && scale.is_finite() {
            scale
        } else {
            1.0
        };
        Tolerance {
            relative: self.relative,
            scale,
        }
    }
}

/// Tolerances resolved for one mesh. Length-valued epsilons scale with the
/// mesh diameter; ratio-valued ones (derivatives, gradient lengths) do not.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub relative: f64,
    pub scale: f64,
}

impl Tolerance {
    pub fn policy(&self) -> TolerancePolicy {
        TolerancePolicy {
            relative: self.relative,
        }
    }

    pub fn length(&self) -> f64 {
        self.relative * self.scale
    }

    pub fn coincidence(&self) -> f64 {
        self.length()
    }

    pub fn halfplane(&self) -> f64 {
        self.length()
    }

    pub fn vertex_hit(&self) -> f64 {
        self.length()
    }

    /// Ties between gradient lengths and directional derivatives; these are
    /// dimensionless (bounded by 1).
    pub fn gradient_tie(&self) -> f64 {
        self.relative
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        TolerancePolicy::default().resolve(1.0)
    }
}
