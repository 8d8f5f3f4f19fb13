use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use spinspec_core::angle::{theta_apply, theta_build, Variant, DEFAULT_DENSE_CAP};
use spinspec_core::box_vector::BoxVector;
use spinspec_core::engine::run_identity_suite;
use spinspec_core::hadamard::{fourier, kron, paley, petrescu, validate, HadamardMatrix, PaleyKind};
use spinspec_core::reports::{
    abelianness_check, amenability_compare, depth_evidence, graph_spectrum_report, relcomm_dims, sweep_petrescu,
    theta_spectrum, variant_spectra_check, DepthOpts, PrincipalGraph, SweepOpts,
};
use spinspec_core::spectral::DEFAULT_WINDOW;
use spinspec_core::{Result, SpinError};

const THREADS_ENV: &str = "SPINSPEC_THREADS";
const DEFAULT_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(name = "spinspec", version, about = "Angle operators of complex Hadamard matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a Hadamard matrix.
    #[command(subcommand)]
    Gen(Gen),
    /// Validate a matrix file; prints PASS or FAIL and the report.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive)]
        tol: f64,
    },
    /// Build, diagonalize or apply theta.
    #[command(subcommand)]
    Angle(Angle),
    /// Subfactor readouts.
    #[command(subcommand)]
    Report(Report),
    /// Parameter sweeps.
    #[command(subcommand)]
    Sweep(Sweep),
    /// Principal-graph utilities.
    #[command(subcommand)]
    Graph(Graph),
    /// Diagram engine diagnostics.
    #[command(subcommand)]
    Engine(Engine),
}

#[derive(Args, Debug)]
struct Out {
    /// Output path; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Float,
    Exact,
    Real,
}

#[derive(Args, Debug)]
struct GenOut {
    #[command(flatten)]
    out: Out,
    #[arg(long, value_enum, default_value_t = Format::Float)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Gen {
    Fourier {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4096))]
        q: u32,
        #[command(flatten)]
        out: GenOut,
    },
    /// The 7x7 family at t = exp(i * t_angle).
    Petrescu {
        #[arg(long, allow_negative_numbers = true)]
        t_angle: f64,
        #[command(flatten)]
        out: GenOut,
    },
    /// Paley type I, order q + 1 (q = 3 mod 4).
    Paley1 {
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        out: GenOut,
    },
    /// Paley type II, order 2(q + 1) (q = 1 mod 4).
    Paley2 {
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        out: GenOut,
    },
    /// Kronecker product, left factor outer.
    Kron {
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        out: GenOut,
    },
}

#[derive(Args, Debug)]
struct ThetaArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    level: u32,
    #[arg(long, default_value = "U")]
    variant: Variant,
    /// Largest dense dimension Q^n.
    #[arg(long, default_value_t = DEFAULT_DENSE_CAP)]
    cap: usize,
}

#[derive(Subcommand, Debug)]
enum Angle {
    /// Write theta as a dense JSON matrix.
    Build {
        #[command(flatten)]
        theta: ThetaArgs,
        #[command(flatten)]
        out: Out,
    },
    /// Ascending eigenvalues of theta.
    Spectrum {
        #[command(flatten)]
        theta: ThetaArgs,
        #[command(flatten)]
        out: Out,
    },
    /// Apply theta to a box file without forming the matrix.
    Apply {
        file: PathBuf,
        #[arg(long = "box")]
        input: PathBuf,
        #[arg(long, default_value = "U")]
        variant: Variant,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Subcommand, Debug)]
enum Report {
    /// Relative commutant dimensions d_1..d_n.
    Dims {
        file: PathBuf,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        max_level: u32,
        #[arg(long, default_value_t = DEFAULT_WINDOW, value_parser = positive)]
        window: f64,
        #[arg(long, default_value_t = DEFAULT_DENSE_CAP)]
        cap: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Infinite-depth evidence from the spectrum of Q*theta.
    Depth {
        file: PathBuf,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        level: u32,
        #[arg(long, default_value_t = DepthOpts::default().tol, value_parser = positive)]
        tol: f64,
        #[arg(long, default_value_t = DepthOpts::default().max_den, value_parser = clap::value_parser!(u64).range(1..))]
        max_den: u64,
        #[arg(long, default_value_t = DEFAULT_WINDOW, value_parser = positive)]
        window: f64,
        #[arg(long, default_value_t = DEFAULT_DENSE_CAP)]
        cap: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Nonzero spectra of the four variants.
    Variants {
        file: PathBuf,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        level: u32,
        #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Commutators within the level-2 flat space.
    Abelian {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_WINDOW, value_parser = positive)]
        window: f64,
        #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Compare the graph spectrum with the Q*theta spectra.
    Amenable {
        file: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        max_level: u32,
        #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Subcommand, Debug)]
enum Sweep {
    /// Spectra at t = exp(2 pi i k / samples).
    Petrescu {
        #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..))]
        samples: u32,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        level: u32,
        #[arg(long, default_value_t = SweepOpts::default().tol, value_parser = positive)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_WINDOW, value_parser = positive)]
        window: f64,
        /// Emit CSV instead of JSON.
        #[arg(long)]
        csv: bool,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Subcommand, Debug)]
enum Graph {
    /// Eigenvalues of the even-side Gram matrix.
    Spectrum {
        file: PathBuf,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Subcommand, Debug)]
enum Engine {
    /// Identity suite against a matrix file (F3 when absent).
    Selftest {
        file: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(format!("must be a positive number, got {s}"))
    }
}

/// Text to emit and the exit code it carries.
struct Emit {
    text: String,
    code: u8,
}

impl Emit {
    fn ok(text: String) -> Self {
        Emit { text, code: 0 }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| SpinError::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

/// Reads a matrix and rejects it unless it validates at the default tolerance.
fn load_valid(path: &Path) -> Result<HadamardMatrix> {
    let h = HadamardMatrix::from_json(&read(path)?)?;
    let r = validate(&h, DEFAULT_TOL);
    if !r.pass {
        return Err(SpinError::ValidationFailed(format!(
            "{}: max modulus deviation {:e}, residual {:e}",
            path.display(),
            r.max_modulus_deviation.0,
            r.frobenius_residual.0
        )));
    }
    Ok(h)
}

fn level(n: u32) -> usize {
    n as usize
}

fn matrix_json(h: &HadamardMatrix, format: Format) -> Result<String> {
    let none = |what: &str| SpinError::NoExactForm(format!("matrix has no {what} form"));
    match format {
        Format::Float => Ok(h.to_json()),
        Format::Exact => h.to_json_exact().ok_or_else(|| none("exact cyclotomic")),
        Format::Real => h.to_json_real().ok_or_else(|| none("real +-1")),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("report serialization")
}

fn gen(g: Gen) -> Result<(Emit, Out)> {
    let (h, out) = match g {
        Gen::Fourier { q, out } => (fourier(q as usize)?, out),
        Gen::Petrescu { t_angle, out } => (petrescu(Complex64::from_polar(1.0, t_angle))?, out),
        Gen::Paley1 { q, out } => (paley(PaleyKind::I, q)?, out),
        Gen::Paley2 { q, out } => (paley(PaleyKind::II, q)?, out),
        Gen::Kron { left, right, out } => (kron(&load_valid(&left)?, &load_valid(&right)?), out),
    };
    Ok((Emit::ok(matrix_json(&h, out.format)?), out.out))
}

fn check(file: &Path, tol: f64) -> Result<Emit> {
    let h = HadamardMatrix::from_json(&read(file)?)?;
    let r = validate(&h, tol);
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    Ok(Emit { text: format!("{verdict}\n{}", to_json(&r)), code: if r.pass { 0 } else { 2 } })
}

fn angle(a: Angle) -> Result<(Emit, Out)> {
    match a {
        Angle::Build { theta: t, out } => {
            let h = load_valid(&t.file)?;
            let op = theta_build(&h, level(t.level), t.variant, t.cap)?;
            Ok((Emit::ok(op.to_json().expect("theta_build is dense")), out))
        }
        Angle::Spectrum { theta: t, out } => {
            let h = load_valid(&t.file)?;
            Ok((Emit::ok(theta_spectrum(&h, level(t.level), t.variant, t.cap)?.to_json()), out))
        }
        Angle::Apply { file, input, variant, out } => {
            let h = load_valid(&file)?;
            let v = BoxVector::from_json(&read(&input)?)?;
            Ok((Emit::ok(theta_apply(&h, v.level, variant, &v)?.to_json()), out))
        }
    }
}

fn report(r: Report) -> Result<(Emit, Out)> {
    match r {
        Report::Dims { file, max_level, window, cap, out } => {
            let h = load_valid(&file)?;
            Ok((Emit::ok(relcomm_dims(&h, level(max_level), window, cap)?.to_json()), out))
        }
        Report::Depth { file, level: n, tol, max_den, window, cap, out } => {
            let h = load_valid(&file)?;
            let opts = DepthOpts { tol, max_den, window, cap };
            Ok((Emit::ok(depth_evidence(&h, level(n), opts)?.to_json()), out))
        }
        Report::Variants { file, level: n, tol, out } => {
            let h = load_valid(&file)?;
            Ok((Emit::ok(variant_spectra_check(&h, level(n), tol)?.to_json()), out))
        }
        Report::Abelian { file, window, tol, out } => {
            let h = load_valid(&file)?;
            Ok((Emit::ok(abelianness_check(&h, window, tol)?.to_json()), out))
        }
        Report::Amenable { file, graph, max_level, tol, out } => {
            let h = load_valid(&file)?;
            let g = PrincipalGraph::parse(&read(&graph)?)?;
            Ok((Emit::ok(amenability_compare(&h, &g, level(max_level), tol)?.to_json()), out))
        }
    }
}

fn dispatch(cmd: Command) -> Result<(Emit, Option<PathBuf>)> {
    let (emit, out) = match cmd {
        Command::Gen(g) => gen(g)?,
        Command::Check { file, tol } => return Ok((check(&file, tol)?, None)),
        Command::Angle(a) => angle(a)?,
        Command::Report(r) => report(r)?,
        Command::Sweep(Sweep::Petrescu { samples, level: n, tol, window, csv, out }) => {
            let opts = SweepOpts { window, tol, ..SweepOpts::default() };
            let s = sweep_petrescu(samples as usize, level(n), opts)?;
            let text = if csv { s.to_csv().trim_end().to_string() } else { s.to_json() };
            (Emit::ok(text), out)
        }
        Command::Graph(Graph::Spectrum { file, out }) => {
            let g = PrincipalGraph::parse(&read(&file)?)?;
            (Emit::ok(graph_spectrum_report(&g)?.to_json()), out)
        }
        Command::Engine(Engine::Selftest { file, out }) => {
            let h = match file {
                Some(f) => load_valid(&f)?,
                None => fourier(3)?,
            };
            let r = run_identity_suite(&h)?;
            // a failing identity means the engine conventions are broken, not the input
            (Emit { text: to_json(&r), code: if r.all_pass { 0 } else { 1 } }, out)
        }
    };
    Ok((emit, out.output))
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| SpinError::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| SpinError::Internal(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<u8> {
    configure_threads()?;
    let (emit, output) = dispatch(cli.command)?;
    let text = format!("{}\n", emit.text);
    match output {
        Some(path) => fs::write(&path, text)?,
        None => print!("{text}"),
    }
    Ok(emit.code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("spinspec: {msg}");
            ExitCode::from(if e.is_precondition() { 2 } else { 1 })
        }
    }
}
