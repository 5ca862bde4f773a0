//! Acceptance criteria. Prints one line per criterion and exits non-zero if
//! any fails.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polymorse::document::AnalysisDocument;
use polymorse::flow::{probe_genericity, GradientField, ProbeOptions};
use polymorse::io::off_string;
use polymorse::oracle::{
    compare, openness_violations, oracle_basins, sample_surface, ComplexView, OracleOptions,
    OracleResult,
};
use polymorse::poly::{make_cube, make_pex, make_random_hull, make_tetrahedron, PEX_ORIGIN};
use polymorse::timing::{scaling_sweep, within_power_growth, DEFAULT_REPETITIONS, DEFAULT_SIZES};
use polymorse::{
    analyze, build_ms_complex, find_equilibria, CurveRole, EquilibriumKind, Origin, Polyhedron,
    ReferencedPolyhedron, SurfacePoint, Vec3,
};

type Outcome = Result<String, String>;

const RANDOM_HULLS: u64 = 50;
const ORACLE_SAMPLES: usize = 10_000;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polymorse"))
}

fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn cli");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn run_file(args: &[&str], path: &Path) -> Output {
    bin().args(args).arg(path).output().expect("run cli")
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn census_case(
    rp: &ReferencedPolyhedron,
    census: (usize, usize, usize),
    sizes: (usize, usize, usize),
) -> Outcome {
    let t = Instant::now();
    let a = analyze(rp).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let m = &a.complex;
    let got = (m.vertices.len(), m.edges.len(), m.cells.len());
    let detail = format!(
        "census {:?}, V/E/cells {:?}, validation {}, {:.4} s",
        m.census(),
        got,
        if a.validation.pass { "pass" } else { "fail" },
        secs
    );
    check(
        m.census() == census && got == sizes && a.validation.pass && secs < 0.1,
        detail,
    )
}

fn criterion_1() -> Outcome {
    let rp = make_cube(0.5)
        .with_reference(Origin::Given(Vec3::ZERO))
        .unwrap();
    census_case(&rp, (6, 12, 8), (26, 48, 24))
}

fn criterion_2() -> Outcome {
    let rp = make_tetrahedron().with_reference(Origin::Centroid).unwrap();
    census_case(&rp, (4, 6, 4), (14, 24, 12))
}

fn pex() -> ReferencedPolyhedron {
    make_pex()
        .with_reference(Origin::Given(PEX_ORIGIN))
        .unwrap()
}

fn oracle_of(rp: &ReferencedPolyhedron) -> Result<OracleResult, String> {
    let eq = find_equilibria(rp).map_err(|e| e.to_string())?;
    oracle_basins(
        rp,
        &eq,
        &OracleOptions {
            samples: ORACLE_SAMPLES,
            step: None,
            seed: 11,
        },
    )
    .map_err(|e| e.to_string())
}

fn criterion_3(pex_oracle: &OracleResult) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("pex.off");
    std::fs::write(&mesh, off_string(&make_pex())).unwrap();
    let t = Instant::now();
    let out = bin()
        .args(["analyze", "--origin", "0.5,0.5,0.5"])
        .arg(&mesh)
        .output()
        .unwrap();
    let secs = t.elapsed().as_secs_f64();
    if out.status.code() != Some(0) {
        return Err(format!(
            "analyze exited {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let doc = AnalysisDocument::from_json(&String::from_utf8(out.stdout).unwrap())
        .map_err(|e| e.to_string())?;

    let rp = pex();
    let probe = probe_genericity(
        &rp,
        &ProbeOptions {
            trials: 20,
            magnitude: None,
            seed: 0,
        },
    )
    .map_err(|e| e.to_string())?;
    let (s, h, u) = doc.census();
    let identity = s as i64 + u as i64 - h as i64 == 2;
    let per_saddle = doc
        .equilibria
        .iter()
        .filter(|e| e.kind == EquilibriumKind::Saddle)
        .all(|e| {
            let up = doc
                .curves
                .iter()
                .filter(|c| c.role == CurveRole::SaddleToUnstable && c.origin == e.id)
                .count();
            let down = doc
                .curves
                .iter()
                .filter(|c| c.role == CurveRole::StableToSaddle && c.destination == e.id)
                .count();
            up == 2 && down == 2
        });
    let cmp = compare(
        pex_oracle,
        &ComplexView::from(&doc),
        2.0 * pex_oracle.spacing,
    );
    let detail = format!(
        "exit 0, probe {}, census {s}/{h}/{u}, 2+2 per saddle {per_saddle}, oracle far disagreements {} missing {} extra {} ({} near curves), cli {:.3} s, analysis {:.4} s",
        if probe.is_generic() { "generic" } else { "non-generic" },
        cmp.far_disagreements,
        cmp.missing_pairs.len(),
        cmp.extra_pairs.len(),
        cmp.disagreements.len(),
        secs,
        doc.timings_ms.steps_1_3 / 1e3 + doc.timings_ms.steps_4_5 / 1e3,
    );
    check(
        probe.is_generic() && identity && per_saddle && cmp.agrees() && secs < 1.0,
        detail,
    )
}

fn criterion_4() -> Outcome {
    let gen = bin().args(["gen", "badguy"]).output().unwrap();
    let out = run_with_stdin(
        &["analyze", "-", "--origin", "0,0,0"],
        &String::from_utf8(gen.stdout).unwrap(),
    );
    let stderr = String::from_utf8_lossy(&out.stderr);
    let witness = stderr.contains("\"kind\":\"saddle-saddle-connection\"");
    check(
        out.status.code() == Some(3) && witness,
        format!(
            "exit {:?}, saddle-saddle witness {}",
            out.status.code(),
            witness
        ),
    )
}

fn random_hulls() -> Vec<ReferencedPolyhedron> {
    (0..RANDOM_HULLS)
        .map(|s| {
            make_random_hull(100, s)
                .unwrap()
                .with_reference(Origin::Centroid)
                .unwrap()
        })
        .collect()
}

fn criterion_5(hulls: &[ReferencedPolyhedron]) -> Outcome {
    let t = Instant::now();
    let mut curves = 0;
    let mut violations = Vec::new();
    let mut rejected = 0;
    for (k, rp) in hulls.iter().enumerate() {
        let eq = find_equilibria(rp).unwrap();
        let m = match build_ms_complex(rp) {
            Ok(m) => m,
            Err(_) => {
                rejected += 1;
                continue;
            }
        };
        let field = GradientField::new(rp, &eq);
        let budget = rp.poly().num_edges() + rp.poly().num_faces();
        for c in &m.edges {
            curves += 1;
            for v in c.invariant_violations(&field, 1e-9) {
                violations.push(format!("hull {k}: {v}"));
            }
            if c.segments.len() > budget {
                violations.push(format!(
                    "hull {k}: curve {} has {} steps",
                    c.id,
                    c.segments.len()
                ));
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let first = violations.first().cloned().unwrap_or_default();
    check(
        violations.is_empty() && rejected == 0 && secs < 10.0,
        format!(
            "{curves} curves on {} hulls, {} violations, {rejected} non-generic, {:.2} s {first}",
            hulls.len(),
            violations.len(),
            secs
        ),
    )
}

fn fd(o: Vec3, q: Vec3, d: Vec3, h: f64) -> f64 {
    ((q + d * h).dist(o) - q.dist(o)) / h
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if let Some(u) = v.normalized() {
            return u;
        }
    }
}

/// Unit tangent directions at `q` pointing into the surface.
fn tangent_directions(
    poly: &Polyhedron,
    q: &SurfacePoint,
    rng: &mut ChaCha8Rng,
    count: usize,
) -> Vec<Vec3> {
    let in_face = |f: usize, rng: &mut ChaCha8Rng| {
        let n = poly.plane(f).normal;
        let v = random_unit(rng);
        (v - n * v.dot(n)).normalized().unwrap()
    };
    let mut out = Vec::new();
    match q.carrier {
        polymorse::Carrier::Face(f) => {
            for _ in 0..count {
                out.push(in_face(f, rng));
            }
        }
        polymorse::Carrier::Edge(e) => {
            let edge = poly.edge(e);
            let (a, b) = poly.edge_points(e);
            let along = (b - a).normalized().unwrap();
            out.extend([along, -along]);
            for &f in &edge.faces {
                let inward = poly.side_inward_normal(f, poly.side_of(f, e).unwrap());
                for _ in 0..count / 2 {
                    let d = in_face(f, rng);
                    out.push(if d.dot(inward) >= 0.0 {
                        d
                    } else {
                        (d - inward * (2.0 * d.dot(inward))).normalized().unwrap()
                    });
                }
            }
        }
        polymorse::Carrier::Vertex(v) => {
            let p = poly.vertex(v);
            for &f in poly.vertex_faces(v) {
                let vs = poly.face(f);
                let i = vs.iter().position(|&x| x == v).unwrap();
                let a = (poly.vertex(vs[(i + 1) % vs.len()]) - p)
                    .normalized()
                    .unwrap();
                let b = (poly.vertex(vs[(i + vs.len() - 1) % vs.len()]) - p)
                    .normalized()
                    .unwrap();
                for _ in 0..count.div_ceil(poly.vertex_faces(v).len()) {
                    let s: f64 = rng.gen();
                    out.push((a * s + b * (1.0 - s)).normalized().unwrap());
                }
            }
        }
    }
    out
}

/// Worst relative error of the own-direction difference, count of points
/// beyond the bare relative tolerance, count beyond the tolerance plus the
/// difference quotient's own error bound, and worst maximality excess.
struct GradientStats {
    points: usize,
    worst_rel: f64,
    beyond_rel: usize,
    beyond_bound: usize,
    worst_excess: f64,
}

fn gradient_case(rp: &ReferencedPolyhedron, seed: u64) -> GradientStats {
    const H: f64 = 1e-6;
    let poly = rp.poly();
    let eq = find_equilibria(rp).unwrap();
    let field = GradientField::new(rp, &eq);
    let o = rp.origin();
    let mut points = sample_surface(rp, 1000, seed);
    for e in 0..poly.num_edges() {
        let (a, b) = poly.edge_points(e);
        points.push(SurfacePoint::on_edge(a.lerp(b, 0.37), e, 0.37));
    }
    for v in 0..poly.num_vertices() {
        points.push(SurfacePoint::on_vertex(poly.vertex(v), v));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = GradientStats {
        points: points.len(),
        worst_rel: 0.0,
        beyond_rel: 0,
        beyond_bound: 0,
        worst_excess: f64::NEG_INFINITY,
    };
    for q in &points {
        let g = field.extended_gradient(q).unwrap();
        let len = g.vector.norm();
        let r = q.position.dist(o);
        if let Some(d) = g.vector.normalized() {
            let err = (fd(o, q.position, d, H) - len).abs();
            st.worst_rel = st.worst_rel.max(err / len);
            // Truncation h (1 - |g|^2) / 2r plus cancellation in |q + h d - o| - |q - o|.
            let bound = H * (1.0 - len * len) / (2.0 * r) + 4.0 * f64::EPSILON * r / H;
            if err > 1e-4 * len {
                st.beyond_rel += 1;
                if err > 1e-4 * len + bound {
                    st.beyond_bound += 1;
                }
            }
        }
        for d in tangent_directions(poly, q, &mut rng, 16) {
            st.worst_excess = st.worst_excess.max(fd(o, q.position, d, H) - len);
        }
    }
    st
}

fn criterion_6(hulls: &[ReferencedPolyhedron]) -> Outcome {
    let mut cases = vec![
        (
            "cube".to_string(),
            make_cube(0.5)
                .with_reference(Origin::Given(Vec3::ZERO))
                .unwrap(),
        ),
        ("pex".to_string(), pex()),
    ];
    cases.extend(
        hulls
            .iter()
            .take(5)
            .enumerate()
            .map(|(k, rp)| (format!("hull{k}"), rp.clone())),
    );
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, (name, rp)) in cases.iter().enumerate() {
        let st = gradient_case(rp, 100 + k as u64);
        ok &= st.beyond_bound == 0 && st.worst_excess <= 1e-6;
        parts.push(format!(
            "{name}: {} pts, worst rel {:.1e}, {} beyond 1e-4 rel ({} beyond rel + difference error bound), excess {:.1e}",
            st.points, st.worst_rel, st.beyond_rel, st.beyond_bound, st.worst_excess
        ));
    }
    check(ok, parts.join("; "))
}

fn criterion_7(hulls: &[ReferencedPolyhedron]) -> Outcome {
    let mut fixtures = vec![
        make_cube(0.5)
            .with_reference(Origin::Given(Vec3::ZERO))
            .unwrap(),
        make_tetrahedron().with_reference(Origin::Centroid).unwrap(),
        pex(),
        make_pex().with_reference(Origin::Centroid).unwrap(),
    ];
    fixtures.extend(hulls.iter().cloned());
    let mut bad = Vec::new();
    let mut checked = 0;
    for (k, rp) in fixtures.iter().enumerate() {
        let Ok(m) = build_ms_complex(rp) else {
            continue;
        };
        checked += 1;
        let (s, h, u) = m.census();
        if s as i64 + u as i64 - h as i64 != 2 {
            bad.push(k);
        }
    }
    check(
        bad.is_empty() && checked == fixtures.len(),
        format!(
            "{checked}/{} complexes checked, failures {bad:?}",
            fixtures.len()
        ),
    )
}

fn openness(rp: &ReferencedPolyhedron, r: &OracleResult) -> usize {
    let m = build_ms_complex(rp).unwrap();
    let view = ComplexView::from(&m);
    openness_violations(r, &view.polylines, 2.0 * r.spacing, 1.5 * r.spacing).len()
}

fn criterion_8(pex_oracle: &OracleResult) -> Outcome {
    let cube = make_cube(0.5)
        .with_reference(Origin::Given(Vec3::ZERO))
        .unwrap();
    let cube_oracle = oracle_of(&cube)?;
    let a = openness(&cube, &cube_oracle);
    let b = openness(&pex(), pex_oracle);
    check(
        a == 0 && b == 0 && cube_oracle.ambiguous == 0 && pex_oracle.ambiguous == 0,
        format!(
            "cube {a} violations ({} ambiguous), pex {b} violations ({} ambiguous), {ORACLE_SAMPLES} samples each",
            cube_oracle.ambiguous, pex_oracle.ambiguous
        ),
    )
}

fn criterion_9() -> Outcome {
    let r = scaling_sweep(&DEFAULT_SIZES, DEFAULT_REPETITIONS, 2024).map_err(|e| e.to_string())?;
    let a: Vec<(usize, f64)> = r.rows.iter().map(|x| (x.n, x.steps_1_3_ms)).collect();
    let linear = within_power_growth(&a, 1.0, 2.0);

    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("big.off");
    std::fs::write(&mesh, off_string(&make_random_hull(10_000, 99).unwrap())).unwrap();
    let t = Instant::now();
    let out = run_file(
        &[
            "analyze",
            "--out",
            dir.path().join("big.json").to_str().unwrap(),
        ],
        &mesh,
    );
    let total = t.elapsed().as_secs_f64();

    let rows: Vec<String> = r
        .rows
        .iter()
        .map(|x| format!("n={} {:.2}/{:.2} ms", x.n, x.steps_1_3_ms, x.steps_4_5_ms))
        .collect();
    check(
        linear && r.slope_4_5 <= 2.2 && out.status.success() && total < 10.0,
        format!(
            "{}; slopes {:.2}/{:.2}; linear within x2 {linear}; n=10^4 end to end {:.2} s",
            rows.join(", "),
            r.slope_1_3,
            r.slope_4_5,
            total
        ),
    )
}

/// Removes the `"timings_ms": { ... }` block.
fn without_timings(s: &str) -> String {
    let Some(start) = s.find("\"timings_ms\"") else {
        return s.to_string();
    };
    let end = start
        + s[start..]
            .find('}')
            .map(|i| i + 1)
            .unwrap_or(s.len() - start);
    format!("{}{}", &s[..start], &s[end..])
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut same = true;
    let mut names = Vec::new();
    for (name, poly, origin) in [
        ("pex", make_pex(), "0.5,0.5,0.5"),
        ("hull", make_random_hull(500, 5).unwrap(), "centroid"),
    ] {
        let mesh = dir.path().join(format!("{name}.off"));
        std::fs::write(&mesh, off_string(&poly)).unwrap();
        let a = run_file(&["analyze", "--origin", origin], &mesh);
        let b = run_file(&["analyze", "--origin", origin], &mesh);
        let (a, b) = (
            String::from_utf8(a.stdout).unwrap(),
            String::from_utf8(b.stdout).unwrap(),
        );
        let eq = !a.is_empty() && without_timings(&a) == without_timings(&b);
        same &= eq;
        names.push(format!("{name} identical {eq} ({} bytes)", a.len()));
    }
    check(same, names.join(", "))
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut record = |n, name, r| {
        let line = match &r {
            Ok(d) => format!("criterion {n:>2} PASS {name}: {d}"),
            Err(d) => format!("criterion {n:>2} FAIL {name}: {d}"),
        };
        println!("{line}");
        results.push((n, name, r));
    };
    let hulls = random_hulls();
    let pex_oracle = oracle_of(&pex());

    record(1, "cube census", criterion_1());
    record(2, "tetrahedron census", criterion_2());
    record(
        3,
        "P_ex reproduction",
        pex_oracle
            .as_ref()
            .map_err(Clone::clone)
            .and_then(criterion_3),
    );
    record(4, "non-generic detection", criterion_4());
    record(5, "curve invariants", criterion_5(&hulls));
    record(6, "gradient correctness", criterion_6(&hulls));
    record(7, "S + U - H = 2", criterion_7(&hulls));
    record(
        8,
        "oracle basin openness",
        pex_oracle
            .as_ref()
            .map_err(Clone::clone)
            .and_then(criterion_8),
    );
    record(9, "complexity trend", criterion_9());
    record(10, "determinism", criterion_10());

    let failed = results.iter().filter(|r| r.2.is_err()).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
