//! `certqi` command-line driver.
//!
//! ```text
//! certqi run --case smooth --degree 1 --levels 4 --out results/smooth
//! certqi constants --mesh crisscross:4:square2 --degree 1
//! certqi interpolate --mesh crisscross:8:square2 --function smooth
//! ```

use std::error::Error;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use certqi::constants::certified_constants;
use certqi::errorlab::{
    benchmark_case, circle, convergence_study, fit_slope, lshape, slope_window, smooth, Approximants, ErrorReport,
    FieldFunction, MeshSource, Study, StudyOptions,
};
use certqi::mesh::{build_crisscross, read_medit, Domain, Mesh};
use certqi::quasinterp::{quasi_interpolate, quasi_interpolate_broken, ConformingField, ConformingSpace};
use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

type CliResult<T> = Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "certqi", version, about = "Certified quasi-interpolation benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence study and write the error tables.
    Run(RunArgs),
    /// Per-vertex constants ρ_a, λ_a as CSV.
    Constants {
        /// `crisscross:N:DOMAIN` (DOMAIN: unit_square, square2, lshape) or a MEDIT file.
        #[arg(long)]
        mesh: String,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nodal values of the quasi-interpolant of a builtin function as CSV.
    Interpolate {
        #[arg(long)]
        mesh: String,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        /// smooth, circle, lshape or zero.
        #[arg(long)]
        function: String,
        #[arg(long, default_value_t = 12)]
        quad_exactness: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// smooth, circle, lshape or lshape_adapted.
    #[arg(long)]
    case: String,
    #[arg(long, default_value_t = 1)]
    degree: usize,
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// `builtin` for the case's own mesh family, or a MEDIT file refined
    /// uniformly twice per level.
    #[arg(long, default_value = "builtin")]
    mesh: String,
    #[arg(long, default_value_t = 12)]
    quad_exactness: usize,
    #[arg(long, default_value_t = 1e-10)]
    cg_tol: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    grading_const: f64,
    /// Seed of the randomized projection audit.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_mesh(arg: &str) -> CliResult<Mesh> {
    if let Some(rest) = arg.strip_prefix("crisscross:") {
        let (n, domain) = rest.split_once(':').ok_or("expected crisscross:N:DOMAIN")?;
        let domain = match domain {
            "unit_square" => Domain::UnitSquare,
            "square2" => Domain::Square2,
            "lshape" => Domain::LShape,
            other => return Err(format!("unknown domain `{other}`").into()),
        };
        return Ok(build_crisscross(n.parse()?, domain)?);
    }
    let text = fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))?;
    Ok(read_medit(&text)?)
}

fn builtin_function(name: &str) -> CliResult<FieldFunction> {
    Ok(match name {
        "smooth" => smooth(),
        "circle" => circle(),
        "lshape" => lshape(),
        "zero" => FieldFunction::zero(),
        other => return Err(format!("unknown function `{other}`").into()),
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct Range {
    min: f64,
    max: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        values.fold(Range { min: f64::INFINITY, max: f64::NEG_INFINITY }, |r, v| Range { min: r.min.min(v), max: r.max.max(v) })
    }
}

#[derive(Serialize)]
struct ApproxSlopes {
    lb: f64,
    gb: f64,
    qi: f64,
    li: f64,
}

#[derive(Serialize)]
struct SlopeSummary {
    window: usize,
    h1: ApproxSlopes,
    l2: ApproxSlopes,
    expected_h1: f64,
    expected_l2: f64,
    h1_tol: f64,
    l2_tol: f64,
    within_tolerance: bool,
}

#[derive(Serialize)]
struct LevelSummary {
    nrdofs: usize,
    elements: usize,
    h_max: f64,
    c_omega: f64,
    cg_iterations: usize,
    local_h1_ratio: f64,
    local_l2_ratio: f64,
}

#[derive(Serialize)]
struct Audits {
    global_bounds: bool,
    local_bounds: bool,
    ordering: bool,
    max_local_h1_ratio: f64,
    max_local_l2_ratio: f64,
}

#[derive(Serialize)]
struct QuadratureConsistency {
    exactness: [usize; 2],
    /// Per level, `|QI error at the higher exactness − QI error at the lower|`.
    h1_diff: Vec<f64>,
    l2_diff: Vec<f64>,
}

#[derive(Serialize)]
struct ProjectionAudit {
    seed: u64,
    samples: usize,
    max_relative_error: f64,
}

#[derive(Serialize)]
struct Summary {
    case: String,
    degree: usize,
    levels: usize,
    mesh: String,
    quad_exactness: usize,
    cg_tol: f64,
    grading_const: f64,
    rows: Vec<LevelSummary>,
    slopes: SlopeSummary,
    effectivity_h1: Range,
    effectivity_l2: Range,
    audits: Audits,
    quadrature_consistency: QuadratureConsistency,
    projection_audit: ProjectionAudit,
}

const BOUND_SLACK: f64 = 1e-8;
const REFERENCE_EXACTNESS: usize = 16;

fn table(rows: &[ErrorReport], pick: impl Fn(&ErrorReport) -> &Approximants) -> String {
    let mut s = String::from("nrdofs LB GB QI LI\n");
    for r in rows {
        let a = pick(r);
        writeln!(s, "{} {:.10e} {:.10e} {:.10e} {:.10e}", r.n_dofs, a.lb, a.gb, a.qi, a.li).unwrap();
    }
    s
}

fn ratios(rows: &[ErrorReport]) -> String {
    let mut s = String::from("nrdofs eH1 EH1 eL2 EL2\n");
    for r in rows {
        writeln!(s, "{} {:.10e} {:.10e} {:.10e} {:.10e}", r.n_dofs, r.h1.qi, r.eta_h1, r.l2.qi, r.eta_l2).unwrap();
    }
    s
}

fn approx_slopes(rows: &[ErrorReport], pick: impl Fn(&ErrorReport) -> &Approximants) -> ApproxSlopes {
    let n: Vec<f64> = rows.iter().map(|r| r.n_dofs as f64).collect();
    let fit = |f: &dyn Fn(&Approximants) -> f64| fit_slope(&n, &rows.iter().map(|r| f(pick(r))).collect::<Vec<_>>());
    ApproxSlopes { lb: fit(&|a| a.lb), gb: fit(&|a| a.gb), qi: fit(&|a| a.qi), li: fit(&|a| a.li) }
}

/// Largest relative energy error of `J` on random conforming fields of the finest mesh.
fn projection_audit(study: &Study, seed: u64) -> CliResult<ProjectionAudit> {
    const SAMPLES: usize = 5;
    let mesh = study.meshes.last().ok_or("empty study")?;
    let space = ConformingSpace::new(mesh, study.options.degree)?;
    let a = space.stiffness(mesh)?;
    let energy = |x: &[f64]| a.matvec(x).iter().zip(x).map(|(u, v)| u * v).sum::<f64>().sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let u = ConformingField {
            degree: space.degree(),
            coeffs: (0..space.n_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        };
        let ju = quasi_interpolate_broken(mesh, &space, &space.to_broken(&u)?)?;
        let diff: Vec<f64> = ju.coeffs.iter().zip(&u.coeffs).map(|(x, y)| x - y).collect();
        worst = worst.max(energy(&diff) / energy(&u.coeffs));
    }
    Ok(ProjectionAudit { seed, samples: SAMPLES, max_relative_error: worst })
}

fn run(args: &RunArgs) -> CliResult<bool> {
    let case = benchmark_case(&args.case).ok_or_else(|| format!("unknown case `{}`", args.case))?;
    if args.levels < 2 || args.degree == 0 || args.quad_exactness == 0 {
        return Err("levels must be at least 2; degree and quadrature exactness must be positive".into());
    }
    if !(args.cg_tol > 0.0 && args.grading_const > 0.0) {
        return Err("cg-tol and grading-const must be positive".into());
    }
    let source = match args.mesh.as_str() {
        "builtin" => MeshSource::Builtin,
        path => MeshSource::Given(parse_mesh(path)?),
    };
    let opts = StudyOptions {
        degree: args.degree,
        levels: args.levels,
        exactness: args.quad_exactness,
        cg_tol: args.cg_tol,
        grading_const: args.grading_const,
        ..StudyOptions::default()
    };
    let study = convergence_study(&case, &source, &opts)?;
    let rows = &study.rows;
    let reference = study.reevaluate(&case.function, REFERENCE_EXACTNESS)?;

    let global = rows.iter().all(|r| r.bounds_hold(BOUND_SLACK));
    let max_h1 = rows.iter().map(|r| r.local_h1_ratio).fold(0.0, f64::max);
    let max_l2 = rows.iter().map(|r| r.local_l2_ratio).fold(0.0, f64::max);
    let local = max_h1 <= 1.0 + BOUND_SLACK && max_l2 <= 1.0 + BOUND_SLACK;
    let window = slope_window(rows.len());
    let tail = &rows[rows.len() - window..];
    let h1 = approx_slopes(tail, |r| &r.h1);
    let l2 = approx_slopes(tail, |r| &r.l2);
    let within = (h1.qi - case.expected_h1_slope).abs() <= case.h1_slope_tol
        && (l2.qi - case.expected_l2_slope).abs() <= case.l2_slope_tol;

    let summary = Summary {
        case: case.name.to_string(),
        degree: args.degree,
        levels: args.levels,
        mesh: args.mesh.clone(),
        quad_exactness: args.quad_exactness,
        cg_tol: args.cg_tol,
        grading_const: args.grading_const,
        rows: rows
            .iter()
            .map(|r| LevelSummary {
                nrdofs: r.n_dofs,
                elements: r.n_elements,
                h_max: r.h_max,
                c_omega: r.c_omega,
                cg_iterations: r.cg_iterations,
                local_h1_ratio: r.local_h1_ratio,
                local_l2_ratio: r.local_l2_ratio,
            })
            .collect(),
        slopes: SlopeSummary {
            window,
            h1,
            l2,
            expected_h1: case.expected_h1_slope,
            expected_l2: case.expected_l2_slope,
            h1_tol: case.h1_slope_tol,
            l2_tol: case.l2_slope_tol,
            within_tolerance: within,
        },
        effectivity_h1: Range::of(rows.iter().map(ErrorReport::effectivity_h1)),
        effectivity_l2: Range::of(rows.iter().map(ErrorReport::effectivity_l2)),
        audits: Audits {
            global_bounds: global,
            local_bounds: local,
            ordering: rows.iter().all(|r| r.ordering_holds(BOUND_SLACK)),
            max_local_h1_ratio: max_h1,
            max_local_l2_ratio: max_l2,
        },
        quadrature_consistency: QuadratureConsistency {
            exactness: [args.quad_exactness, REFERENCE_EXACTNESS],
            h1_diff: rows.iter().zip(&reference).map(|(a, b)| (a.h1.qi - b.h1.qi).abs()).collect(),
            l2_diff: rows.iter().zip(&reference).map(|(a, b)| (a.l2.qi - b.l2.qi).abs()).collect(),
        },
        projection_audit: projection_audit(&study, args.seed)?,
    };

    fs::create_dir_all(&args.out)?;
    let write = |name: &str, text: &str| fs::write(Path::new(&args.out).join(name), text);
    write("errors_H1.txt", &table(rows, |r| &r.h1))?;
    write("errors_L2.txt", &table(rows, |r| &r.l2))?;
    write("ratios.txt", &ratios(rows))?;
    write("summary.json", &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    for r in rows {
        eprintln!(
            "N = {:>7}  H1 QI {:.4e} <= {:.4e}  L2 QI {:.4e} <= {:.4e}",
            r.n_dofs, r.h1.qi, r.eta_h1, r.l2.qi, r.eta_l2
        );
    }
    if !(global && local) {
        eprintln!("bound audit failed");
    }
    Ok(global && local)
}

fn execute(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Run(args) => run(&args),
        Command::Constants { mesh, degree, out } => {
            let mesh = parse_mesh(&mesh)?;
            emit(&out, &certified_constants(&mesh, degree)?.to_csv())?;
            Ok(true)
        }
        Command::Interpolate { mesh, degree, function, quad_exactness, out } => {
            let mesh = parse_mesh(&mesh)?;
            let u = builtin_function(&function)?;
            let space = ConformingSpace::new(&mesh, degree)?;
            let ju = quasi_interpolate(&u, &mesh, &space, quad_exactness)?;
            emit(&out, &space.field_csv(&mesh, &ju))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
