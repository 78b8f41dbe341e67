use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hsflow::config::ExperimentConfig;
use hsflow::emit::{read_curve, to_json, QuadratureJson, SchwarzJson};
use hsflow::experiment::{run, RunError};
use hsflow::field::{eval_sum, FieldTerm};
use hsflow::verify::{run_suite, Suite};
use hsflow_core::cauchy::schwarz_construct;
use hsflow_core::momentflow::{moment_derivative, NormalField};
use hsflow_core::potentials::{glue_potential, standard_psi, BumpFunction};
use hsflow_core::quadrature::{polynomial_map_curve, quad_check};
use hsflow_core::{Complex, DensityField};
use serde::Serialize;

/// Hele-Shaw flow laboratory: weak and classical solvers, Schwarz functions,
/// quadrature domains and moment checks.
#[derive(Parser)]
#[command(name = "hsflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON config.
    Run {
        config: PathBuf,
    },
    /// Run acceptance criteria and print one line per criterion.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Seed of the randomized checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Schwarz data of a curve file for `ρ ≡ rho`, as JSON.
    Schwarz {
        curve: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Residual of a quadrature identity over monomials up to `--degree`.
    Quadcheck {
        /// Curve JSON file (with `--quad`).
        #[arg(long, requires = "quad", conflicts_with = "poly_map")]
        curve: Option<PathBuf>,
        /// Quadrature JSON file.
        #[arg(long)]
        quad: Option<PathBuf>,
        /// Image of the unit disc under `a·w + b·w²` with its exact data.
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
        poly_map: Option<Vec<f64>>,
        #[arg(long, default_value_t = 512)]
        markers: usize,
        #[arg(long, default_value_t = 6)]
        degree: usize,
    },
    /// Moment derivatives for a normal field on a curve.
    Momentflow {
        /// Curve JSON file; the unit circle when omitted.
        #[arg(long)]
        curve: Option<PathBuf>,
        /// Field term: cos:m[:amp], sin:m[:amp] or const:c; terms add.
        #[arg(long = "field", required = true, allow_hyphen_values = true)]
        fields: Vec<FieldTerm>,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
        #[arg(long, default_value_t = 256)]
        markers: usize,
    },
    /// Regularized maximum of two values, or the gluing check with `--glue`.
    Regmax(RegmaxArgs),
}

#[derive(Args)]
struct OutArg {
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RegmaxArgs {
    #[arg(long, allow_negative_numbers = true, required_unless_present = "glue")]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true, required_unless_present = "glue")]
    beta: Option<f64>,
    /// Bump half-width.
    #[arg(long, default_value_t = 0.1)]
    a: f64,
    /// Glue `|z|² + c·Re z³` onto the standard radial potential instead.
    #[arg(long, conflicts_with_all = ["alpha", "beta"])]
    glue: bool,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Coefficient `c` of the cubic term.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    cubic: f64,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<hsflow_core::Error> for Failure {
    fn from(e: hsflow_core::Error) -> Self {
        Self::Runtime(e.to_string())
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(text: &str, out: &OutArg) -> Result<(), Failure> {
    match &out.out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct MomentflowOutput {
    k: Vec<usize>,
    direct: Vec<[f64; 2]>,
    tail: Vec<[f64; 2]>,
    max_difference: f64,
}

#[derive(Serialize)]
struct GlueOutput {
    eps: f64,
    big_r: f64,
    r: f64,
    delta1: f64,
    delta2: f64,
    a: f64,
    equal_near_origin: bool,
    equal_to_psi_outside: bool,
    c2_distance: f64,
    min_laplacian: f64,
    all_pass: bool,
}

fn execute(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config).map_err(|e| Failure::Usage(e.to_string()))?;
            let (dir, report) = run(&cfg).map_err(|e| match e {
                RunError::Config(e) => Failure::Usage(e.to_string()),
                e => Failure::Runtime(e.to_string()),
            })?;
            println!("wrote {} frames to {}", report.frames.len(), dir.display());
            if let Some(last) = report.frames.last() {
                println!(
                    "final t = {}: area = {:.6}, equivalent radius = {:.6}, mean radius = {:.6}",
                    last.t, last.area, last.equivalent_radius, last.mean_radius
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, seed } => {
            let mut all = true;
            for c in run_suite(suite, seed) {
                println!("{}", c.line());
                all &= c.passed();
            }
            Ok(if all { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Schwarz { curve, rho, out } => {
            let curve = read_curve(&curve).map_err(|e| Failure::Usage(format!("{}: {e}", curve.display())))?;
            let density = DensityField::constant(rho).map_err(|e| Failure::Usage(format!("--rho: {e}")))?;
            let g = curve.markers().iter().map(|z| density.potential_dz(*z).expect("constant density")).collect();
            let sd = schwarz_construct(curve, g)?;
            emit(&to_json(&SchwarzJson::from_data(&sd)), &out)
                .map(|_| ExitCode::SUCCESS)
        }
        Command::Quadcheck { curve, quad, poly_map, markers, degree } => {
            let (curve, qd) = match (curve, quad, poly_map) {
                (_, _, Some(ab)) => polynomial_map_curve(ab[0], ab[1], markers)?,
                (Some(c), Some(q), None) => {
                    let curve = read_curve(&c).map_err(|e| Failure::Usage(format!("{}: {e}", c.display())))?;
                    let json: QuadratureJson = serde_json::from_str(&read_input(&q)?)
                        .map_err(|e| Failure::Usage(format!("{}: {e}", q.display())))?;
                    (curve, json.to_data().map_err(|e| Failure::Usage(format!("{}: {e}", q.display())))?)
                }
                _ => return Err(Failure::Usage("give --curve with --quad, or --poly-map A B".into())),
            };
            let residual = quad_check(&curve, &qd, degree)?;
            println!("{}", to_json(&QuadratureJson::from_data(&qd)).trim_end());
            println!("max residual over degrees 0..={degree}: {residual:e}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Momentflow { curve, fields, kmax, markers } => {
            let curve = match curve {
                Some(p) => read_curve(&p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
                None => hsflow_core::MarkerCurve::circle(Complex::new(0.0, 0.0), 1.0, markers)?,
            };
            let nf = NormalField::from_parameter(curve, |t| eval_sum(&fields, t))?;
            let d = moment_derivative(&nf, &DensityField::Constant(1.0), kmax)?;
            let out = MomentflowOutput {
                k: (0..=kmax).collect(),
                direct: d.direct.iter().map(|z| [z.re, z.im]).collect(),
                tail: d.tail.iter().map(|z| [z.re, z.im]).collect(),
                max_difference: d.max_difference(),
            };
            print!("{}", to_json(&out));
            Ok(ExitCode::SUCCESS)
        }
        Command::Regmax(args) => {
            if args.glue {
                let cubic = args.cubic;
                let g = glue_potential(move |z: Complex| z.norm_sqr() + cubic * (z * z * z).re, standard_psi, args.eps)?;
                let p = g.params;
                let out = GlueOutput {
                    eps: p.eps,
                    big_r: p.big_r,
                    r: p.r,
                    delta1: p.delta1,
                    delta2: p.delta2,
                    a: p.a,
                    equal_near_origin: g.checks.equal_near_origin,
                    equal_to_psi_outside: g.checks.equal_to_psi_outside,
                    c2_distance: g.checks.c2_distance,
                    min_laplacian: g.checks.min_laplacian,
                    all_pass: g.checks.all_pass(),
                };
                print!("{}", to_json(&out));
                return Ok(if out.all_pass { ExitCode::SUCCESS } else { ExitCode::FAILURE });
            }
            let f = BumpFunction::new(args.a).map_err(|e| Failure::Usage(format!("--a: {e}")))?;
            let (alpha, beta) = (args.alpha.unwrap_or_default(), args.beta.unwrap_or_default());
            println!("{}", f.reg_max(alpha, beta));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
