//! `hessian-radial` command line.
//!
//! Exit codes: 0 ok, 1 numerical failure, 2 admissibility rejection,
//! 3 blow-up before `r_end`, 4 inconclusive verdict, 10 I/O, 64 usage.

pub mod grid;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use hessian_radial::io::{self as hio, fmt_f64, SCHEMA};
use hessian_radial::subsolution::default_radii;
use hessian_radial::{
    detect_blowup, existence_verdict, ko_classify, ko_classify_numeric, mu_zero, verify_subsolution, BlowupStatus,
    Error, KoClass, Method, Nonlinearity, ProblemParams,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_ADMISSIBILITY: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;
pub const EXIT_IO: i32 = 10;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "hessian-radial",
    version,
    about = "Radial k-Hessian subsolutions with a gradient term"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the radial Cauchy problem and write the profile.
    Solve(SolveArgs),
    /// March outward until r_max or blow-up.
    Blowup(BlowupArgs),
    /// Classify the Keller-Osserman integral and report existence.
    Ko(KoArgs),
    /// Check the Gaussian e^{A|x|^2} as a subsolution on a radius grid.
    Verify(VerifyArgs),
    /// Print the gradient threshold mu0(n, k).
    Mu0(Mu0Args),
    /// Blow-up radii over a grid of (f, mu, a).
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SolverKind {
    Picard,
    Euler,
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// const:<c> | exp:<alpha> | pow:<q>
    #[arg(long)]
    pub f: String,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long)]
    pub r_end: f64,
    #[arg(long, default_value = "1e-3")]
    pub h: f64,
    #[arg(long, default_value = "1e-10")]
    pub tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    #[arg(long, default_value = "1e300")]
    pub phi_cap: f64,
    #[arg(long, value_enum, default_value_t = SolverKind::Picard)]
    pub method: SolverKind,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BlowupArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long)]
    pub f: String,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, default_value_t = 50.0)]
    pub r_max: f64,
    #[arg(long, default_value = "1e-3")]
    pub h: f64,
    #[arg(long, default_value = "1e300")]
    pub phi_cap: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct KoArgs {
    #[arg(long)]
    pub k: usize,
    /// Defaults to max(2, k).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long)]
    pub f: String,
    /// Use the numerical tail fit even for built-in families.
    #[arg(long)]
    pub numeric: bool,
    #[arg(long, default_value_t = 1.0)]
    pub tau_lo: f64,
    #[arg(long, default_value = "1e6")]
    pub tau_hi: f64,
    #[arg(long, default_value_t = 2000)]
    pub nodes: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long = "A")]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 10.0)]
    pub r_max: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct Mu0Args {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Family with a parameter grid, e.g. exp:0:2:5.
    #[arg(long)]
    pub f: String,
    /// Initial values, `start:stop:count` or a single value.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub mu: String,
    #[arg(long, default_value_t = 50.0)]
    pub r_max: f64,
    #[arg(long, default_value = "1e-3")]
    pub h: f64,
    #[arg(long, default_value = "1e300")]
    pub phi_cap: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// A failure carrying its exit code and message.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Admissibility { .. } => EXIT_ADMISSIBILITY,
            Error::Domain(_) | Error::Parse(_) | Error::Contract(_) | Error::Unsupported(_) => EXIT_USAGE,
            _ => EXIT_NUMERIC,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<i32, Failure>;

fn parse_f(spec: &str) -> Result<Nonlinearity, Failure> {
    spec.parse().map_err(Failure::from)
}

fn problem(args: &ProblemArgs) -> Result<ProblemParams, Failure> {
    Ok(ProblemParams::new(args.n, args.k, args.mu)?)
}

/// Writes to `--out` or the provided stdout.
fn emit(output: &OutputArgs, stdout: &mut dyn Write, body: &str) -> Result<(), Failure> {
    let io_fail = |e: std::io::Error| Failure {
        code: EXIT_IO,
        message: format!("write failed: {e}"),
    };
    match &output.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure {
                code: EXIT_IO,
                message: format!("cannot create {}: {e}", path.display()),
            })?;
            let mut w = BufWriter::new(file);
            w.write_all(body.as_bytes()).map_err(io_fail)?;
            w.flush().map_err(io_fail)
        }
        None => stdout.write_all(body.as_bytes()).map_err(io_fail),
    }
}

fn bracket_message(status: &BlowupStatus) -> String {
    match status {
        BlowupStatus::FiniteBlowup { r_estimate, bracket } => format!(
            "blow-up at r = {} (bracket [{}, {}])",
            fmt_f64(*r_estimate),
            fmt_f64(bracket[0]),
            fmt_f64(bracket[1])
        ),
        other => format!("{other:?}"),
    }
}

fn cmd_solve(args: &SolveArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    let p = problem(&args.problem)?;
    let f = parse_f(&args.f)?;
    if !p.admissible_regime() {
        return Err(Error::Admissibility { k: p.k, mu: p.mu }.into());
    }
    let scan = detect_blowup(&p, &f, args.a, args.r_end, args.phi_cap, args.h.min(args.r_end))?;
    if matches!(scan.status, BlowupStatus::FiniteBlowup { .. }) {
        let _ = writeln!(stderr, "{}", bracket_message(&scan.status));
        return Ok(EXIT_BLOWUP);
    }
    let method = match args.method {
        SolverKind::Picard => Method::Picard {
            tol: args.tol,
            max_iter: args.max_iter,
        },
        SolverKind::Euler => Method::EulerBreakLine,
    };
    let profile = method.solve(&p, &f, args.a, args.r_end, args.h)?;
    let body = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => hio::profile_csv_string(&profile),
        Format::Json => hio::to_pretty(&hio::profile_json(&profile)),
    };
    emit(&args.output, stdout, &body)?;
    Ok(EXIT_OK)
}

fn cmd_blowup(args: &BlowupArgs, stdout: &mut dyn Write) -> Outcome {
    let p = problem(&args.problem)?;
    let f = parse_f(&args.f)?;
    let report = detect_blowup(&p, &f, args.a, args.r_max, args.phi_cap, args.h)?;
    let body = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => hio::to_pretty(&hio::blowup_json(&report)),
        Format::Csv => {
            let mut s = String::from("n,k,mu,f,a,status,r_estimate,r_lo,r_hi\n");
            s.push_str(&sweep_row(&p, &f, args.a, &report.status));
            s.push('\n');
            s
        }
    };
    emit(&args.output, stdout, &body)?;
    Ok(match report.status {
        BlowupStatus::AdmissibilityFailure { .. } => EXIT_ADMISSIBILITY,
        _ => EXIT_OK,
    })
}

fn cmd_ko(args: &KoArgs, stdout: &mut dyn Write) -> Outcome {
    let n = args.n.unwrap_or(args.k.max(2));
    let p = ProblemParams::new(n, args.k, args.mu)?;
    let f = parse_f(&args.f)?;
    let verdict = if args.numeric {
        ko_classify_numeric(&f, args.k, args.tau_lo, args.tau_hi, args.nodes)?
    } else {
        ko_classify(&f, args.k)?
    };
    let existence = existence_verdict(&p, &f, &verdict);
    let doc = json!({
        "schema": SCHEMA,
        "kind": "ko",
        "params": p,
        "f": f.to_string(),
        "verdict": verdict,
        "existence": existence,
    });
    if matches!(args.output.format, Some(Format::Csv)) {
        return Err(Failure::usage("ko emits JSON only"));
    }
    emit(&args.output, stdout, &hio::to_pretty(&doc))?;
    Ok(if verdict.classification == KoClass::Inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    })
}

fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Outcome {
    let p = problem(&args.problem)?;
    let radii = default_radii(&p, args.a, args.r_max)?;
    let report = verify_subsolution(&p, args.a, args.alpha, &radii)?;
    let body = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => hio::to_pretty(&hio::document("verify", &report)?),
        Format::Csv => {
            let mut s = String::from("r,pass,margin,gamma_k_ok\n");
            for c in &report.points {
                let margin = c.margin.map(fmt_f64).unwrap_or_default();
                s.push_str(&format!("{},{},{},{}\n", fmt_f64(c.r), c.pass, margin, c.gamma_k_ok));
            }
            s
        }
    };
    emit(&args.output, stdout, &body)?;
    Ok(EXIT_OK)
}

fn cmd_mu0(args: &Mu0Args, stdout: &mut dyn Write) -> Outcome {
    let v = mu_zero(args.n, args.k)?;
    writeln!(stdout, "{v}").map_err(|e| Failure {
        code: EXIT_IO,
        message: e.to_string(),
    })?;
    Ok(EXIT_OK)
}

fn sweep_row(p: &ProblemParams, f: &Nonlinearity, a: f64, status: &BlowupStatus) -> String {
    let (name, est, lo, hi) = match status {
        BlowupStatus::Global { .. } => ("global", String::new(), String::new(), String::new()),
        BlowupStatus::FiniteBlowup { r_estimate, bracket } => (
            "finite_blowup",
            fmt_f64(*r_estimate),
            fmt_f64(bracket[0]),
            fmt_f64(bracket[1]),
        ),
        BlowupStatus::AdmissibilityFailure { r_fail } => {
            ("admissibility_failure", fmt_f64(*r_fail), String::new(), String::new())
        }
    };
    format!(
        "{},{},{},{},{},{name},{est},{lo},{hi}",
        p.n,
        p.k,
        fmt_f64(p.mu),
        f,
        fmt_f64(a)
    )
}

fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Outcome {
    let families = grid::parse_family_axis(&args.f).map_err(Failure::usage)?;
    let a_axis = grid::parse_axis(&args.a).map_err(Failure::usage)?;
    let mu_axis = grid::parse_axis(&args.mu).map_err(Failure::usage)?;
    let mut tuples = Vec::new();
    for f in &families {
        for &mu in &mu_axis {
            let p = ProblemParams::new(args.n, args.k, mu)?;
            for &a in &a_axis {
                tuples.push((p, f, a));
            }
        }
    }
    // order of `tuples` is the output order; collect keeps it
    let rows = tuples
        .par_iter()
        .map(|(p, f, a)| detect_blowup(p, f, *a, args.r_max, args.phi_cap, args.h).map(|r| (p, *f, *a, r.status)))
        .collect::<Result<Vec<_>, Error>>()?;
    let body = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("n,k,mu,f,a,status,r_estimate,r_lo,r_hi\n");
            for (p, f, a, status) in &rows {
                s.push_str(&sweep_row(p, f, *a, status));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|(p, f, a, status)| json!({ "params": p, "f": f.to_string(), "a": a, "result": status }))
                .collect();
            hio::to_pretty(&json!({ "schema": SCHEMA, "kind": "sweep", "rows": rows }))
        }
    };
    emit(&args.output, stdout, &body)?;
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    run(&cli, stdout, stderr)
}

pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let outcome = match &cli.command {
        Command::Solve(a) => cmd_solve(a, stdout, stderr),
        Command::Blowup(a) => cmd_blowup(a, stdout),
        Command::Ko(a) => cmd_ko(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Mu0(a) => cmd_mu0(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            let _ = writeln!(stderr, "error: {message}");
            code
        }
    }
}
