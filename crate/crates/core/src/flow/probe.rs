//! Genericity by experiment: perturb the vertices slightly and check that
//! the equilibria and the saddle connections do not change.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::trace::trace_all;
use super::CurveRole;
use crate::equilibria::{Equilibria, EquilibriumKind};
use crate::error::{Error, NonGenericWitness};
use crate::geom::{Plane, Point3, Vec3};
use crate::poly::{Origin, Polyhedron, ReferencedPolyhedron};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeOptions {
    pub trials: usize,
    /// Absolute perturbation size; `None` means ten times the length tolerance.
    pub magnitude: Option<f64>,
    pub seed: u64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            trials: 20,
            magnitude: None,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum GenericityVerdict {
    Generic,
    NonGeneric { witness: NonGenericWitness },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum TrialOutcome {
    Agreed,
    Discarded { reason: String },
    Disagreed { witness: NonGenericWitness },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub verdict: GenericityVerdict,
    pub magnitude: f64,
    pub trials: Vec<TrialOutcome>,
}

impl ProbeReport {
    pub fn is_generic(&self) -> bool {
        self.verdict == GenericityVerdict::Generic
    }
}

/// Moves the polyhedron by at most `magnitude` per coordinate while keeping
/// its combinatorics. Triangulated surfaces get independent vertex offsets;
/// surfaces with only degree-3 vertices get perturbed face planes, so that
/// polygonal faces stay planar.
pub fn perturb_polyhedron(
    poly: &Polyhedron,
    magnitude: f64,
    rng: &mut impl Rng,
) -> Result<Polyhedron, Error> {
    let mut jitter = || {
        Vec3::new(
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        ) * magnitude
    };
    if poly.is_simplicial() {
        let verts = poly.vertices().iter().map(|&p| p + jitter()).collect();
        return Ok(poly.with_vertices(verts)?);
    }
    if !poly.is_simple() {
        return Err(Error::Precondition(
            "perturbation needs a triangulated surface or one with only degree-3 vertices".into(),
        ));
    }
    let planes: Vec<Plane> = (0..poly.num_faces())
        .map(|f| {
            let anchor = poly.face_center(f) + jitter();
            let scale = poly.diameter().max(f64::MIN_POSITIVE);
            let normal = poly.plane(f).normal + jitter() / scale;
            Plane::from_point_normal(anchor, normal).unwrap()
        })
        .collect();
    let mut verts = Vec::with_capacity(poly.num_vertices());
    for v in 0..poly.num_vertices() {
        let fs = poly.vertex_faces(v);
        let p = meet(&planes[fs[0]], &planes[fs[1]], &planes[fs[2]]).ok_or_else(|| {
            Error::Precondition(format!("perturbed planes around vertex {v} are parallel"))
        })?;
        verts.push(p);
    }
    Ok(poly.with_vertices(verts)?)
}

/// [`perturb_polyhedron`] with a seeded generator.
pub fn perturb_seeded(poly: &Polyhedron, magnitude: f64, seed: u64) -> Result<Polyhedron, Error> {
    perturb_polyhedron(poly, magnitude, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn meet(a: &Plane, b: &Plane, c: &Plane) -> Option<Point3> {
    let det = a.normal.dot(b.normal.cross(c.normal));
    if det.abs() < 1e-300 {
        return None;
    }
    Some(
        (b.normal.cross(c.normal) * a.offset
            + c.normal.cross(a.normal) * b.offset
            + a.normal.cross(b.normal) * c.offset)
            / det,
    )
}

/// Per saddle: sorted stable origins and sorted unstable destinations.
type Pairing = Vec<([usize; 2], [usize; 2])>;

fn pairing(
    eq: &Equilibria,
    curves: &[super::AscendingCurve],
    map: &dyn Fn(usize) -> usize,
) -> Pairing {
    let mut out = vec![([usize::MAX; 2], [usize::MAX; 2]); eq.list.len()];
    let mut fill = vec![(0, 0); eq.list.len()];
    for c in curves {
        let s = c.saddle;
        match c.role {
            CurveRole::StableToSaddle => {
                out[s].0[fill[s].0] = map(c.origin);
                fill[s].0 += 1;
            }
            CurveRole::SaddleToUnstable => {
                out[s].1[fill[s].1] = map(c.destination);
                fill[s].1 += 1;
            }
        }
    }
    for p in &mut out {
        p.0.sort_unstable();
        p.1.sort_unstable();
    }
    out
}

/// Nearest base equilibrium of the same kind for each trial equilibrium.
fn correspond(base: &Equilibria, trial: &Equilibria) -> Vec<usize> {
    trial
        .list
        .iter()
        .map(|t| {
            base.of_kind(t.kind)
                .min_by(|a, b| {
                    a.position()
                        .dist(t.position())
                        .total_cmp(&b.position().dist(t.position()))
                })
                .map(|b| b.id)
                .unwrap_or(usize::MAX)
        })
        .collect()
}

/// Runs the full trace on `trials` perturbed copies and compares the census
/// and the saddle pairing against the unperturbed polyhedron.
pub fn probe_genericity(
    rp: &ReferencedPolyhedron,
    opts: &ProbeOptions,
) -> Result<ProbeReport, Error> {
    let magnitude = opts.magnitude.unwrap_or(10.0 * rp.tol().length());
    let (eq, curves) = match trace_all(rp) {
        Ok(r) => r,
        Err(Error::NonGeneric(witness)) => {
            return Ok(ProbeReport {
                verdict: GenericityVerdict::NonGeneric { witness },
                magnitude,
                trials: vec![],
            })
        }
        Err(e) => return Err(e),
    };
    if eq.report.is_degenerate() {
        let witness = NonGenericWitness::Degenerate {
            findings: eq.report.findings.len(),
        };
        return Ok(ProbeReport {
            verdict: GenericityVerdict::NonGeneric { witness },
            magnitude,
            trials: vec![],
        });
    }
    let base = pairing(&eq, &curves, &|i| i);
    let census = eq.census();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut trials = Vec::with_capacity(opts.trials);
    let mut verdict = GenericityVerdict::Generic;
    for k in 0..opts.trials {
        let outcome = run_trial(rp, &eq, &base, census, magnitude, k, &mut rng)?;
        if let (GenericityVerdict::Generic, TrialOutcome::Disagreed { witness }) =
            (&verdict, &outcome)
        {
            verdict = GenericityVerdict::NonGeneric {
                witness: witness.clone(),
            };
        }
        trials.push(outcome);
    }
    if opts.trials > 0
        && trials
            .iter()
            .all(|t| matches!(t, TrialOutcome::Discarded { .. }))
    {
        return Err(Error::ProbeInconclusive(opts.trials));
    }
    Ok(ProbeReport {
        verdict,
        magnitude,
        trials,
    })
}

fn run_trial(
    rp: &ReferencedPolyhedron,
    eq: &Equilibria,
    base: &Pairing,
    census: (usize, usize, usize),
    magnitude: f64,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<TrialOutcome, Error> {
    let poly = match perturb_polyhedron(rp.poly(), magnitude, rng) {
        Ok(p) => p,
        Err(Error::Build(e)) => {
            return Ok(TrialOutcome::Discarded {
                reason: e.to_string(),
            })
        }
        Err(e) => return Err(e),
    };
    let trp = match poly.with_reference(Origin::Given(rp.origin())) {
        Ok(r) => r,
        Err(e @ Error::NotInterior { .. }) => {
            return Ok(TrialOutcome::Discarded {
                reason: e.to_string(),
            })
        }
        Err(e) => return Err(e),
    };
    let (teq, tcurves) = match trace_all(&trp) {
        Ok(r) => r,
        Err(Error::NonGeneric(witness)) => return Ok(TrialOutcome::Disagreed { witness }),
        Err(e) => return Err(e),
    };
    if teq.census() != census {
        return Ok(TrialOutcome::Disagreed {
            witness: NonGenericWitness::CensusChanged { trial: k },
        });
    }
    let map = correspond(eq, &teq);
    let mut seen = map.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != map.len() {
        return Ok(TrialOutcome::Disagreed {
            witness: NonGenericWitness::CensusChanged { trial: k },
        });
    }
    let trial = pairing(&teq, &tcurves, &|i| map[i]);
    for (ts, pair) in trial.iter().enumerate() {
        if teq.list[ts].kind != EquilibriumKind::Saddle {
            continue;
        }
        if *pair != base[map[ts]] {
            return Ok(TrialOutcome::Disagreed {
                witness: NonGenericWitness::PairingChanged {
                    saddle: map[ts],
                    trial: k,
                },
            });
        }
    }
    Ok(TrialOutcome::Agreed)
}
