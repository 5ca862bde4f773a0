//! Brute-force basins by dense sampling. Each sample is pushed along the
//! extended gradient in small Euclidean steps, re-projected to the boundary
//! along the ray from the reference point, until it settles near an
//! unstable point (ascent) or a stable point (descent). Nothing here uses
//! the curve tracer.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::document::AnalysisDocument;
use crate::equilibria::{Equilibria, EquilibriumKind};
use crate::error::Error;
use crate::flow::GradientField;
use crate::geom::{point_segment_distance, Point3};
use crate::mscomplex::MSComplex;
use crate::poly::{ReferencedPolyhedron, SurfacePoint};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleOptions {
    pub samples: usize,
    /// Step length; `None` picks a small fraction of the shortest edge.
    pub step: Option<f64>,
    pub seed: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            samples: 10_000,
            step: None,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSample {
    pub position: Point3,
    /// Unstable equilibrium reached by ascent.
    pub destination: Option<usize>,
    /// Stable equilibrium reached by descent.
    pub origin: Option<usize>,
}

impl OracleSample {
    pub fn is_ambiguous(&self) -> bool {
        self.destination.is_none() || self.origin.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub step: f64,
    /// Typical distance between neighbouring samples.
    pub spacing: f64,
    pub samples: Vec<OracleSample>,
    pub ambiguous: usize,
    /// Samples per unstable destination.
    pub census: BTreeMap<usize, usize>,
    /// Observed `(stable, unstable)` pairs.
    pub adjacency: BTreeSet<(usize, usize)>,
}

pub fn default_step(rp: &ReferencedPolyhedron) -> f64 {
    let poly = rp.poly();
    let shortest = (0..poly.num_edges())
        .map(|e| {
            let (a, b) = poly.edge_points(e);
            a.dist(b)
        })
        .fold(f64::INFINITY, f64::min);
    (1e-3 * poly.diameter()).min(5e-3 * shortest)
}

/// Area-weighted uniform points on the boundary.
pub fn sample_surface(rp: &ReferencedPolyhedron, n: usize, seed: u64) -> Vec<SurfacePoint> {
    let poly = rp.poly();
    let mut tris = Vec::new();
    let mut cum = Vec::new();
    let mut total = 0.0;
    for f in 0..poly.num_faces() {
        let vs = poly.face(f);
        let a = poly.vertex(vs[0]);
        for i in 1..vs.len() - 1 {
            let (b, c) = (poly.vertex(vs[i]), poly.vertex(vs[i + 1]));
            total += (b - a).cross(c - a).norm() / 2.0;
            tris.push((f, a, b, c));
            cum.push(total);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r: f64 = rng.gen_range(0.0..total);
            let k = cum.partition_point(|&c| c < r).min(tris.len() - 1);
            let (f, a, b, c) = tris[k];
            let (mut s, mut t): (f64, f64) = (rng.gen(), rng.gen());
            if s + t > 1.0 {
                s = 1.0 - s;
                t = 1.0 - t;
            }
            SurfacePoint::on_face(a + (b - a) * s + (c - a) * t, f)
        })
        .collect()
}

fn surface_area(rp: &ReferencedPolyhedron) -> f64 {
    (0..rp.poly().num_faces())
        .map(|f| rp.poly().face_area(f))
        .sum()
}

/// Walks from `start` with `sign` = 1 (ascent) or -1 (descent) until within
/// two steps of an equilibrium of kind `target`.
fn settle(
    field: &GradientField,
    start: SurfacePoint,
    sign: f64,
    step: f64,
    target: EquilibriumKind,
    budget: usize,
) -> Option<usize> {
    let rp = field.rp;
    let o = rp.origin();
    let capture = 2.0 * step;
    let targets: Vec<(usize, Point3)> = field
        .eq
        .of_kind(target)
        .map(|e| (e.id, e.position()))
        .collect();
    let mut q = start;
    for _ in 0..budget {
        if let Some(&(id, _)) = targets.iter().find(|(_, p)| p.dist(q.position) <= capture) {
            return Some(id);
        }
        let g = field.extended_gradient(&q).ok()?;
        let dir = (g.vector * sign).normalized()?;
        let moved = q.position + dir * step;
        let u = (moved - o).normalized()?;
        q = rp.radial_function(u).point;
    }
    None
}

/// Ascends and descends from `opts.samples` boundary points.
pub fn oracle_basins(
    rp: &ReferencedPolyhedron,
    eq: &Equilibria,
    opts: &OracleOptions,
) -> Result<OracleResult, Error> {
    let step = opts.step.unwrap_or_else(|| default_step(rp));
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::Precondition(format!(
            "oracle step must be positive, got {step}"
        )));
    }
    let field = GradientField::new(rp, eq);
    let budget = (50.0 * rp.poly().diameter() / step).ceil() as usize;
    let starts = sample_surface(rp, opts.samples, opts.seed);
    let samples: Vec<OracleSample> = starts
        .par_iter()
        .map(|&s| OracleSample {
            position: s.position,
            destination: settle(&field, s, 1.0, step, EquilibriumKind::Unstable, budget),
            origin: settle(&field, s, -1.0, step, EquilibriumKind::Stable, budget),
        })
        .collect();
    let ambiguous = samples.iter().filter(|s| s.is_ambiguous()).count();
    if ambiguous * 100 > samples.len() {
        return Err(Error::OracleInconclusive {
            ambiguous,
            samples: samples.len(),
        });
    }
    let mut census = BTreeMap::new();
    let mut adjacency = BTreeSet::new();
    for s in &samples {
        if let Some(d) = s.destination {
            *census.entry(d).or_insert(0) += 1;
        }
        if let (Some(m), Some(u)) = (s.origin, s.destination) {
            adjacency.insert((m, u));
        }
    }
    let spacing = (surface_area(rp) / opts.samples.max(1) as f64).sqrt();
    Ok(OracleResult {
        step,
        spacing,
        samples,
        ambiguous,
        census,
        adjacency,
    })
}

/// What the oracle is compared against: the `(stable, unstable)` pair of
/// every cell and the polylines of all isolated curves.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ComplexView {
    pub pairs: BTreeSet<(usize, usize)>,
    pub polylines: Vec<Vec<Point3>>,
}

impl From<&MSComplex> for ComplexView {
    fn from(m: &MSComplex) -> Self {
        ComplexView {
            pairs: m
                .cells
                .iter()
                .map(|c| (c.corners[0], c.corners[2]))
                .collect(),
            polylines: m.edges.iter().map(|c| c.polyline()).collect(),
        }
    }
}

impl From<&AnalysisDocument> for ComplexView {
    fn from(d: &AnalysisDocument) -> Self {
        ComplexView {
            pairs: d
                .cells
                .iter()
                .map(|c| (c.corners[0], c.corners[2]))
                .collect(),
            polylines: d.curves.iter().map(|c| c.polyline.clone()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub sample: usize,
    pub origin: usize,
    pub destination: usize,
    /// Distance from the sample to the nearest isolated curve.
    pub curve_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// Samples whose pair is not a cell of the complex.
    pub disagreements: Vec<Disagreement>,
    /// Disagreements farther than the guard distance from every curve.
    pub far_disagreements: usize,
    /// Cell pairs of the complex never observed.
    pub missing_pairs: Vec<(usize, usize)>,
    /// Observed pairs, from samples beyond the guard distance, that are not cells.
    pub extra_pairs: Vec<(usize, usize)>,
    pub guard: f64,
}

impl Comparison {
    pub fn agrees(&self) -> bool {
        self.far_disagreements == 0 && self.missing_pairs.is_empty() && self.extra_pairs.is_empty()
    }
}

pub fn curve_distances(samples: &[OracleSample], polylines: &[Vec<Point3>]) -> Vec<f64> {
    samples
        .par_iter()
        .map(|s| {
            polylines
                .iter()
                .flat_map(|l| l.windows(2))
                .map(|w| point_segment_distance(s.position, w[0], w[1]))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Compares sampled pairs with the complex's cells. Samples within `guard`
/// of a curve may legitimately land on the wrong side.
pub fn compare(result: &OracleResult, view: &ComplexView, guard: f64) -> Comparison {
    let dist = curve_distances(&result.samples, &view.polylines);
    let mut disagreements = Vec::new();
    let mut far_pairs = BTreeSet::new();
    for (i, s) in result.samples.iter().enumerate() {
        let (Some(m), Some(u)) = (s.origin, s.destination) else {
            continue;
        };
        if dist[i] > guard {
            far_pairs.insert((m, u));
        }
        if !view.pairs.contains(&(m, u)) {
            disagreements.push(Disagreement {
                sample: i,
                origin: m,
                destination: u,
                curve_distance: dist[i],
            });
        }
    }
    let far_disagreements = disagreements
        .iter()
        .filter(|d| d.curve_distance > guard)
        .count();
    Comparison {
        far_disagreements,
        disagreements,
        missing_pairs: view.pairs.difference(&result.adjacency).copied().collect(),
        extra_pairs: far_pairs.difference(&view.pairs).copied().collect(),
        guard,
    }
}

/// Samples farther than `guard` from every curve that have a neighbour
/// within `radius` with a different destination.
pub fn openness_violations(
    result: &OracleResult,
    polylines: &[Vec<Point3>],
    guard: f64,
    radius: f64,
) -> Vec<usize> {
    let dist = curve_distances(&result.samples, polylines);
    let key = |p: Point3| {
        (
            (p.x / radius).floor() as i64,
            (p.y / radius).floor() as i64,
            (p.z / radius).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (i, s) in result.samples.iter().enumerate() {
        if s.destination.is_some() {
            grid.entry(key(s.position)).or_default().push(i);
        }
    }
    let mut bad = Vec::new();
    for (i, s) in result.samples.iter().enumerate() {
        let Some(d) = s.destination else { continue };
        if dist[i] <= guard {
            continue;
        }
        let (x, y, z) = key(s.position);
        let mut clash = false;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    for &j in grid.get(&(x + dx, y + dy, z + dz)).into_iter().flatten() {
                        let t = &result.samples[j];
                        if t.position.dist(s.position) <= radius && t.destination != Some(d) {
                            clash = true;
                        }
                    }
                }
            }
        }
        if clash {
            bad.push(i);
        }
    }
    bad
}
