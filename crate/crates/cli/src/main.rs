use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use polymorse::document::AnalysisDocument;
use polymorse::flow::{perturb_seeded, probe_genericity, GenericityVerdict, ProbeOptions};
use polymorse::io::{
    export_curves, graph_string, load_mesh, off_string, CurveFormat, GraphFormat, MeshFormat,
};
use polymorse::oracle::{compare, openness_violations, oracle_basins, ComplexView, OracleOptions};
use polymorse::poly::{make_badguy, make_cube, make_pex, make_random_hull, make_tetrahedron};
use polymorse::timing::{scaling_sweep, DEFAULT_REPETITIONS, DEFAULT_SIZES};
use polymorse::{
    analyze, find_equilibria, Error, Origin, Polyhedron, ReferencedPolyhedron, TolerancePolicy,
    Vec3,
};

#[derive(Parser)]
#[command(
    name = "polymorse",
    version,
    about = "Morse-Smale complexes of convex polyhedra under the radial distance function"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct MeshArgs {
    /// Mesh file (OFF or OBJ); `-` reads OFF from stdin.
    mesh: PathBuf,
    /// Reference point `x,y,z`, or `centroid`.
    #[arg(long, default_value = "centroid")]
    origin: String,
    /// Relative tolerance, scaled by the mesh diameter.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Build and validate the Morse-Smale complex.
    Analyze {
        #[command(flatten)]
        mesh: MeshArgs,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the isolated curves as polylines (`.vtk` for VTK, else OBJ).
        #[arg(long)]
        curves: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: GraphFormatArg,
        /// Also run a perturbation probe with this many trials.
        #[arg(long, default_value_t = 0)]
        probe: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Classify edges and list equilibria only.
    Equilibria {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a fixture polyhedron as OFF.
    Gen {
        kind: Fixture,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Basins by dense sampling, optionally checked against an analysis.
    Oracle {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Step length; defaults to a small fraction of the shortest edge.
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Analysis JSON to compare with.
        #[arg(long)]
        against: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Move every vertex by at most `eps` per coordinate.
    Perturb {
        mesh: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time both algorithm phases over random hulls.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SIZES)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormatArg {
    Json,
    Dot,
    Graphml,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    Cube,
    Tetra,
    Pex,
    Badguy,
    Random,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonGeneric(_) => 3,
        Error::Internal(_) | Error::OracleInconclusive { .. } | Error::ProbeInconclusive(_) => 4,
        _ => 2,
    }
}

fn parse_origin(s: &str) -> Result<Origin, Failure> {
    if s == "centroid" {
        return Ok(Origin::Centroid);
    }
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("bad --origin '{s}'")))?;
    match parts[..] {
        [x, y, z] => Ok(Origin::Given(Vec3::new(x, y, z))),
        _ => Err(Failure::Usage(format!(
            "--origin needs three coordinates, got '{s}'"
        ))),
    }
}

fn load(args: &MeshArgs) -> Result<ReferencedPolyhedron, Failure> {
    let origin = parse_origin(&args.origin)?;
    let policy = TolerancePolicy::new(args.tol).map_err(|e| Failure::Usage(e.to_string()))?;
    let poly = load_mesh(&args.mesh, None, policy)?;
    Ok(poly.with_reference(origin)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze {
            mesh,
            out,
            curves,
            format,
            probe,
            seed,
        } => {
            let rp = load(&mesh)?;
            let analysis = analyze(&rp)?;
            for w in &analysis.complex.warnings {
                eprintln!("warning: {w}");
            }
            if let Some(p) = &curves {
                export_curves(&analysis.complex, CurveFormat::from_path(p), p)?;
            }
            let text = match format {
                GraphFormatArg::Json => analysis.document(&rp).to_json(),
                GraphFormatArg::Dot => graph_string(&analysis.complex, GraphFormat::Dot),
                GraphFormatArg::Graphml => graph_string(&analysis.complex, GraphFormat::Graphml),
            };
            emit(out.as_deref(), &text)?;
            if !analysis.validation.pass {
                let lines: Vec<String> = analysis
                    .validation
                    .failures
                    .iter()
                    .map(|f| format!("{}: {}", f.check, f.message))
                    .collect();
                return Err(Error::Internal(format!(
                    "validation failed\n  {}",
                    lines.join("\n  ")
                ))
                .into());
            }
            if probe > 0 {
                let report = probe_genericity(
                    &rp,
                    &ProbeOptions {
                        trials: probe,
                        magnitude: None,
                        seed,
                    },
                )?;
                if let GenericityVerdict::NonGeneric { witness } = report.verdict {
                    return Err(Error::NonGeneric(witness).into());
                }
                eprintln!("probe: generic in {probe} trials");
            }
        }
        Command::Equilibria { mesh, out } => {
            let rp = load(&mesh)?;
            let eq = find_equilibria(&rp)?;
            let poly = rp.poly();
            let doc = json!({
                "schema": 1,
                "origin": rp.origin(),
                "tolerance": rp.tol().length(),
                "census": { "stable": eq.census().0, "saddle": eq.census().1, "unstable": eq.census().2 },
                "edge_classes": eq.classes.iter().enumerate().map(|(e, c)| {
                    let mut v = serde_json::to_value(c).unwrap();
                    v["edge"] = json!(poly.edge(e).vertices);
                    v
                }).collect::<Vec<_>>(),
                "equilibria": eq.list.iter().map(|e| json!({
                    "id": e.id, "kind": e.kind, "position": e.position(), "carrier": e.carrier, "height": e.height,
                })).collect::<Vec<_>>(),
                "nondegeneracy": eq.report,
            });
            emit(
                out.as_deref(),
                &(serde_json::to_string_pretty(&doc).map_err(Error::from)? + "\n"),
            )?;
        }
        Command::Gen { kind, n, seed, out } => {
            let poly: Polyhedron = match kind {
                Fixture::Cube => make_cube(0.5),
                Fixture::Tetra => make_tetrahedron(),
                Fixture::Pex => make_pex(),
                Fixture::Badguy => make_badguy(),
                Fixture::Random => make_random_hull(n, seed).map_err(Error::from)?,
            };
            emit(out.as_deref(), &off_string(&poly))?;
        }
        Command::Oracle {
            mesh,
            samples,
            step,
            seed,
            against,
            out,
        } => {
            let rp = load(&mesh)?;
            let eq = find_equilibria(&rp)?;
            let r = oracle_basins(
                &rp,
                &eq,
                &OracleOptions {
                    samples,
                    step,
                    seed,
                },
            )?;
            let mut doc = json!({
                "samples": r.samples.len(),
                "step": r.step,
                "spacing": r.spacing,
                "ambiguous": r.ambiguous,
                "census": r.census.iter().map(|(u, c)| json!({"unstable": u, "samples": c})).collect::<Vec<_>>(),
                "adjacency": r.adjacency.iter().map(|(m, u)| json!([m, u])).collect::<Vec<_>>(),
            });
            let mut agrees = true;
            if let Some(path) = against {
                let d = AnalysisDocument::from_json(&std::fs::read_to_string(path)?)?;
                let view = ComplexView::from(&d);
                let guard = 2.0 * r.spacing;
                let cmp = compare(&r, &view, guard);
                let open = openness_violations(&r, &view.polylines, guard, 1.5 * r.spacing);
                agrees = cmp.agrees() && open.is_empty();
                doc["comparison"] = serde_json::to_value(&cmp).map_err(Error::from)?;
                doc["openness_violations"] = json!(open);
            }
            emit(
                out.as_deref(),
                &(serde_json::to_string_pretty(&doc).map_err(Error::from)? + "\n"),
            )?;
            if !agrees {
                return Err(Error::Internal("oracle disagrees with the complex".into()).into());
            }
        }
        Command::Perturb {
            mesh,
            eps,
            seed,
            out,
        } => {
            let poly = load_mesh(&mesh, None::<MeshFormat>, TolerancePolicy::default())?;
            let p = perturb_seeded(&poly, eps, seed)?;
            emit(out.as_deref(), &off_string(&p))?;
        }
        Command::Bench {
            sizes,
            reps,
            seed,
            json,
        } => {
            let r = scaling_sweep(&sizes, reps, seed)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&r).map_err(Error::from)?);
            } else {
                println!(
                    "{:>8} {:>8} {:>14} {:>14}",
                    "n", "faces", "steps1-3 ms", "steps4-5 ms"
                );
                for row in &r.rows {
                    println!(
                        "{:>8} {:>8} {:>14.3} {:>14.3}",
                        row.n, row.faces, row.steps_1_3_ms, row.steps_4_5_ms
                    );
                }
                println!(
                    "log-log slope: steps 1-3 {:.2}, steps 4-5 {:.2}",
                    r.slope_1_3, r.slope_4_5
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            if let Error::NonGeneric(w) = &e {
                eprintln!("witness: {}", serde_json::to_string(w).unwrap_or_default());
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
