//! `nkspin`: run the spinor, Lagrangian and geometry checks and emit a JSON
//! report. Exit codes: 0 pass, 1 fail, 2 usage error, 3 degenerate geometry.

mod commands;
mod family;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nkspin::acceptance::AcceptanceConfig;
use nkspin::s3calc::DerivMode;
use nkspin::sampling::{DEFAULT_FD_STEP, DEFAULT_RESIDUAL_SAMPLES, DEFAULT_VOLUME_SAMPLES};
use nkspin::{uniform_s3, ImQuat};

use commands::Context;
use family::{orthonormal_ab, parse_family, unit_vector, FamilySpec, UsageError};
use report::{ConfigEcho, Metrics, Report, Tolerances, SCHEMA_VERSION};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;

#[derive(Parser)]
#[command(name = "nkspin", version, about = "Generalized Killing spinors on S3 and Lagrangians in the nearly Kaehler S3xS3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generalized-Killing diagnostics and (V, alpha) system residuals of a map
    VerifySpinor(FamilyArgs),
    /// Largest |Omega| on the tangent spaces of a Lagrangian family
    Lagrangian(FamilyArgs),
    /// Induced metric, volume and radius admissibility of a Lagrangian family
    Geometry(FamilyArgs),
    /// Spinor to frame to spinor round trip
    Frame(FamilyArgs),
    /// Volume classes of the built-in families
    Components(Common),
    /// The full acceptance suite
    All(Common),
}

#[derive(Args)]
struct FamilyArgs {
    /// const:w,x,y,z | inv | conjb:x,y,z | binv:x,y,z | identity | randpoly:<seed> |
    /// gamma1 | gamma2 | gamma3:x,y,z | gamma4:x,y,z | lab | graphinv:<map>
    #[arg(long)]
    family: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Parameter a of lab, as x,y,z
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Parameter b of lab (and of gamma3/gamma4 in components), as x,y,z
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Number of sample points for residual sweeps
    #[arg(long, default_value_t = DEFAULT_RESIDUAL_SAMPLES)]
    samples: usize,
    /// Number of sample points for volumes
    #[arg(long, default_value_t = DEFAULT_VOLUME_SAMPLES)]
    volume_samples: usize,
    #[arg(long, default_value_t = AcceptanceConfig::default().seed)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Deriv::Analytic)]
    deriv: Deriv,
    /// Finite-difference step
    #[arg(long, default_value_t = DEFAULT_FD_STEP)]
    h: f64,
    /// Tolerance override name=value (repeatable); names: skew, divergence,
    /// constant_length, divergence_identity, killing, system, lagrangian, fit,
    /// volume, roundtrip
    #[arg(long = "tol")]
    tol: Vec<String>,
    /// Output path, or - for standard output
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Deriv {
    Analytic,
    Fd,
    Richardson,
}

impl Deriv {
    fn name(self) -> &'static str {
        match self {
            Deriv::Analytic => "analytic",
            Deriv::Fd => "fd",
            Deriv::Richardson => "richardson",
        }
    }
}

enum Failure {
    Usage(String),
    Degenerate(String),
    Io(String),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<nkspin::Error> for Failure {
    fn from(e: nkspin::Error) -> Self {
        if e.is_degeneracy() {
            Failure::Degenerate(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("NKSPIN_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Usage(format!("NKSPIN_THREADS: '{v}' is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("NKSPIN_THREADS: {e}")))
}

fn vector_arg(arg: &Option<String>, what: &str, default: ImQuat, warn: &mut Vec<String>) -> Result<ImQuat, Failure> {
    match arg {
        Some(text) => Ok(unit_vector(text, what, warn)?),
        None => Ok(default),
    }
}

fn run(cli: Cli, start: Instant) -> Result<Report, Failure> {
    let (name, family, common) = match &cli.command {
        Command::VerifySpinor(f) => ("verify-spinor", Some(&f.family), &f.common),
        Command::Lagrangian(f) => ("lagrangian", Some(&f.family), &f.common),
        Command::Geometry(f) => ("geometry", Some(&f.family), &f.common),
        Command::Frame(f) => ("frame", Some(&f.family), &f.common),
        Command::Components(c) => ("components", None, c),
        Command::All(c) => ("all", None, c),
    };
    if common.samples == 0 || common.volume_samples == 0 {
        return Err(Failure::Usage("sample counts must be positive".into()));
    }
    if !(common.h > 0.0 && common.h.is_finite()) {
        return Err(Failure::Usage(format!("--h must be a positive real, got {}", common.h)));
    }
    let mode = match common.deriv {
        Deriv::Analytic => DerivMode::Analytic,
        Deriv::Fd => DerivMode::Fd { h: common.h },
        Deriv::Richardson => DerivMode::Richardson { h: common.h },
    };
    let mut tol = Tolerances::for_mode(mode.is_analytic());
    for t in &common.tol {
        tol.set(t).map_err(Failure::Usage)?;
    }

    let mut warn = Vec::new();
    let spec = family.map(|f| parse_family(f, &mut warn)).transpose()?;
    let a_given = common.a.is_some();
    let b_given = common.b.is_some();
    let a = vector_arg(&common.a, "--a", ImQuat::I, &mut warn)?;
    let b = vector_arg(&common.b, "--b", ImQuat::J, &mut warn)?;
    let wants_ab = name == "components" || spec == Some(FamilySpec::Lab);
    let (a, b) = if wants_ab { orthonormal_ab(a, b, &mut warn)? } else { (a, b) };
    if spec == Some(FamilySpec::Lab) && !(a_given && b_given) {
        return Err(Failure::Usage("lab needs --a and --b".into()));
    }
    for w in &warn {
        eprintln!("warning: {w}");
    }

    let cx = Context {
        samples: uniform_s3(common.seed, common.samples).with_fd_step(common.h),
        volume_samples: common.volume_samples,
        seed: common.seed,
        mode,
        tol,
    };
    let mut m = Metrics::default();
    let pass = match (&cli.command, &spec) {
        (Command::VerifySpinor(_) | Command::Frame(_), Some(FamilySpec::Map(map))) => {
            if matches!(cli.command, Command::Frame(_)) {
                commands::frame(&cx, map, &mut m)?
            } else {
                commands::verify_spinor(&cx, map, &mut m)?
            }
        }
        (Command::VerifySpinor(_) | Command::Frame(_), _) => {
            return Err(Failure::Usage(format!("{name} expects a map (const, inv, conjb, binv, identity, randpoly)")))
        }
        (Command::Lagrangian(_) | Command::Geometry(_), Some(s)) => {
            let fam = s.lagrangian(Some((a, b)), &cx.samples.points)?;
            if matches!(cli.command, Command::Lagrangian(_)) {
                commands::lagrangian(&cx, &fam, &mut m)?
            } else {
                commands::geometry(&cx, &fam, &mut m)?
            }
        }
        (Command::Components(_), _) => commands::components(&cx, a, b, &mut m)?,
        (Command::All(_), _) => commands::all(&cx, &mut m),
        (_, None) => unreachable!("family commands always carry a spec"),
    };

    Ok(Report {
        schema_version: SCHEMA_VERSION,
        config: ConfigEcho {
            command: name.into(),
            family: family.cloned(),
            a: wants_ab.then(|| a.to_array()),
            b: wants_ab.then(|| b.to_array()),
            samples: common.samples,
            volume_samples: common.volume_samples,
            seed: common.seed,
            deriv: common.deriv.name().into(),
            h: common.h,
            tolerances: tol,
            out: common.out.clone(),
        },
        metrics: m.0,
        pass,
        duration_seconds: start.elapsed().as_secs_f64(),
    })
}

fn emit(report: &Report) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Failure::Io(e.to_string()))?;
    text.push('\n');
    let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", report.config.out));
    if report.config.out == "-" {
        std::io::stdout().lock().write_all(text.as_bytes()).map_err(io)
    } else {
        std::fs::write(&report.config.out, text).map_err(io)
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let outcome = configure_threads().and_then(|_| run(cli, start)).and_then(|r| emit(&r).map(|_| r.pass));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Degenerate(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DEGENERATE)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_errors_map_to_exit_classes() {
        let degenerate = [
            nkspin::Error::Degenerate("det".into()),
            nkspin::Error::Consistency("re".into()),
            nkspin::Error::Evaluation { point: "g".into(), value: f64::NAN },
        ];
        for e in degenerate {
            assert!(matches!(Failure::from(e), Failure::Degenerate(_)));
        }
        let usage = [nkspin::Error::Domain("b".into()), nkspin::Error::Config("h".into()), nkspin::Error::Branch];
        for e in usage {
            assert!(matches!(Failure::from(e), Failure::Usage(_)));
        }
    }

    #[test]
    fn tolerance_defaults_follow_the_mode() {
        let a = Tolerances::for_mode(true);
        let f = Tolerances::for_mode(false);
        assert_eq!((a.skew, a.volume), (1e-8, 1e-3));
        assert_eq!((f.skew, f.volume), (1e-4, 1e-3));
        let mut t = a;
        t.set("fit=0.5").unwrap();
        assert_eq!(t.fit, 0.5);
        assert!(t.set("fit=-1").is_err());
        assert!(t.set("fit").is_err());
    }
}
