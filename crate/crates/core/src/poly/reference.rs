use serde::{Deserialize, Serialize};

use super::{Carrier, Polyhedron, SurfacePoint};
use crate::error::Error;
use crate::geom::{Point3, Tolerance, Vec3};

/// How the reference point is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Given(Point3),
    Centroid,
}

/// A polyhedron together with a strictly interior reference point.
#[derive(Clone, Debug)]
pub struct ReferencedPolyhedron {
    poly: Polyhedron,
    origin: Point3,
    from_centroid: bool,
}

/// Result of shooting a ray from the reference point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialHit {
    pub distance: f64,
    pub point: SurfacePoint,
}

impl ReferencedPolyhedron {
    pub fn new(poly: Polyhedron, origin: Origin) -> Result<Self, Error> {
        let (o, from_centroid) = match origin {
            Origin::Given(p) => (p, false),
            Origin::Centroid => (solid_centroid(&poly), true),
        };
        if !o.is_finite() {
            return Err(Error::Precondition("reference point is not finite".into()));
        }
        let eps = poly.tolerance().length();
        for f in 0..poly.num_faces() {
            let d = poly.plane(f).signed_distance(o);
            if d >= -eps {
                return Err(Error::NotInterior {
                    face: f,
                    distance: d,
                });
            }
        }
        Ok(ReferencedPolyhedron {
            poly,
            origin: o,
            from_centroid,
        })
    }

    pub fn poly(&self) -> &Polyhedron {
        &self.poly
    }

    pub fn origin(&self) -> Point3 {
        self.origin
    }

    pub fn origin_from_centroid(&self) -> bool {
        self.from_centroid
    }

    pub fn tol(&self) -> &Tolerance {
        self.poly.tolerance()
    }

    /// Distance from the reference point to the boundary along the unit
    /// direction `u`, with the boundary entity that is hit.
    pub fn radial_function(&self, u: Vec3) -> RadialHit {
        let o = self.origin;
        let mut best = f64::INFINITY;
        let mut face = 0;
        for f in 0..self.poly.num_faces() {
            let pl = self.poly.plane(f);
            let nu = pl.normal.dot(u);
            if nu <= 0.0 {
                continue;
            }
            let lambda = -pl.signed_distance(o) / nu;
            if lambda < best {
                best = lambda;
                face = f;
            }
        }
        let hit = o + u * best;
        RadialHit {
            distance: best,
            point: self.locate_on_face(hit, face),
        }
    }

    /// Classify a point of face `f` as a vertex, edge or interior point.
    pub fn locate_on_face(&self, p: Point3, f: usize) -> SurfacePoint {
        let poly = &self.poly;
        let eps = self.tol().coincidence();
        let vs = poly.face(f);
        for &v in vs {
            if poly.vertex(v).dist(p) <= eps {
                return SurfacePoint::on_vertex(poly.vertex(v), v);
            }
        }
        for (i, &e) in poly.face_edges(f).iter().enumerate() {
            let a = poly.vertex(vs[i]);
            if poly.side_inward_normal(f, i).dot(p - a).abs() <= eps {
                let (p0, p1) = poly.edge_points(e);
                let t = (p - p0).dot(p1 - p0) / (p1 - p0).norm_sq();
                if (0.0..=1.0).contains(&t) {
                    return SurfacePoint::on_edge(p, e, t);
                }
            }
        }
        SurfacePoint {
            position: p,
            carrier: Carrier::Face(f),
            t: 0.0,
        }
    }
}

/// Centre of mass of the solid with uniform density.
pub fn solid_centroid(poly: &Polyhedron) -> Point3 {
    let anchor =
        poly.vertices().iter().fold(Vec3::ZERO, |acc, &p| acc + p) / poly.num_vertices() as f64;
    let mut volume = 0.0;
    let mut moment = Vec3::ZERO;
    for f in poly.faces() {
        let a = poly.vertex(f[0]);
        for i in 1..f.len() - 1 {
            let b = poly.vertex(f[i]);
            let c = poly.vertex(f[i + 1]);
            let v = (a - anchor).dot((b - anchor).cross(c - anchor)) / 6.0;
            volume += v;
            moment += (anchor + a + b + c) * (v / 4.0);
        }
    }
    if volume.abs() > 0.0 {
        moment / volume
    } else {
        anchor
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::TolerancePolicy;
    use crate::poly::{make_cube, make_pex, make_tetrahedron, PEX_ORIGIN};

    #[test]
    fn reference_point_checks() {
        assert!(make_cube(0.5)
            .with_reference(Origin::Given(Vec3::ZERO))
            .is_ok());
        let err = make_cube(0.5)
            .with_reference(Origin::Given(Vec3::new(0.5, 0.0, 0.0)))
            .unwrap_err();
        assert!(matches!(err, Error::NotInterior { .. }));
        assert!(make_pex().with_reference(Origin::Given(PEX_ORIGIN)).is_ok());
    }

    #[test]
    fn centroids() {
        assert!(solid_centroid(&make_cube(0.5)).norm() < 1e-12);
        let t = make_tetrahedron();
        let mean = t.vertices().iter().fold(Vec3::ZERO, |a, &p| a + p) / 4.0;
        assert!(solid_centroid(&t).dist(mean) < 1e-12);
        let shift = Vec3::new(1.0, 2.0, 3.0);
        let c = make_cube(0.5);
        let moved = Polyhedron::build(
            c.vertices().iter().map(|&p| p + shift).collect(),
            c.faces().to_vec(),
            TolerancePolicy::default(),
        )
        .unwrap();
        assert!(solid_centroid(&moved).dist(shift) < 1e-12);
    }

    #[test]
    fn centroid_ignores_vertex_order() {
        let p = make_pex();
        let n = p.num_vertices();
        let perm: Vec<usize> = (0..n).rev().collect();
        let mut verts = vec![Vec3::ZERO; n];
        for (old, &new) in perm.iter().enumerate() {
            verts[new] = p.vertex(old);
        }
        let faces = p
            .faces()
            .iter()
            .map(|f| f.iter().map(|&v| perm[v]).collect())
            .collect();
        let q = Polyhedron::build(verts, faces, TolerancePolicy::default()).unwrap();
        assert!(solid_centroid(&p).dist(solid_centroid(&q)) < 1e-12);
    }

    #[test]
    fn radial_function_examples() {
        let rp = make_cube(0.5)
            .with_reference(Origin::Given(Vec3::ZERO))
            .unwrap();
        let h = rp.radial_function(Vec3::new(1.0, 0.0, 0.0));
        assert!((h.distance - 0.5).abs() < 1e-12);
        assert!(matches!(h.point.carrier, Carrier::Face(_)));
        let h = rp.radial_function(Vec3::new(1.0, 1.0, 1.0).normalized().unwrap());
        assert!((h.distance - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(matches!(h.point.carrier, Carrier::Vertex(_)));
        let h = rp.radial_function(Vec3::new(1.0, 1.0, 0.0).normalized().unwrap());
        assert!((h.distance - 2f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(matches!(h.point.carrier, Carrier::Edge(_)));
    }

    #[test]
    fn radial_hits_lie_on_their_face() {
        let rp = make_pex()
            .with_reference(Origin::Given(PEX_ORIGIN))
            .unwrap();
        for i in 0..200 {
            let a = i as f64 * 0.731;
            let b = i as f64 * 0.377;
            let u = Vec3::new(a.cos() * b.sin(), a.sin() * b.sin(), b.cos());
            let hit = rp.radial_function(u);
            let p = hit.point.position;
            assert!((p.dist(rp.origin()) - hit.distance).abs() < 1e-12);
            let on_some_face = (0..rp.poly().num_faces())
                .any(|f| rp.poly().plane(f).signed_distance(p).abs() < 1e-9);
            assert!(on_some_face);
            for f in 0..rp.poly().num_faces() {
                assert!(rp.poly().plane(f).signed_distance(p) < 1e-9);
            }
        }
    }
}
