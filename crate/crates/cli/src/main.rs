//! Command-line front end: evaluate single quantities from the library
//! (quasi-norms, mixed norms, oscillation seminorms, atoms, pairings) and
//! run the seeded property suites with JSON reports.
//!
//! Exit codes: 0 success, 1 verification failure (suite found violating
//! cases), 2 usage or configuration error, 3 numerical failure
//! (non-convergence, degenerate input, sampling breakdown).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use anisomix::anisotropy::{s_min, AnisotropicBall, AnisotropyVector, ExponentVector};
use anisomix::atoms::{make_atom, validate_atom, AtomParams};
use anisomix::campanato::{campanato_seminorm, BallSearchDomain, CampanatoParams};
use anisomix::config::Config;
use anisomix::duality::pairing;
use anisomix::error::{Error, Result};
use anisomix::grid::{AxisBox, FunctionFamily, GridFunction, Lattice};
use anisomix::mixed_norm::mixed_norm;
use anisomix::report::Report;
use anisomix::suite::{run_suite, SuiteName};

#[derive(Parser)]
#[command(
    name = "anisomix",
    version,
    about = "Anisotropic mixed-norm analysis toolkit",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the anisotropic quasi-norm of a point.
    Quasinorm(QuasinormArgs),
    /// Mixed Lebesgue norm of a grid function.
    MixedNorm(MixedNormArgs),
    /// Oscillation seminorm of a grid function, with its witness ball.
    Campanato(CampanatoArgs),
    /// Build an atom from a grid function and re-validate it.
    Atom(AtomArgs),
    /// Quadrature pairing of two grid functions from CSV files.
    Pair(PairArgs),
    /// Run a seeded property suite and write its JSON report.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct QuasinormArgs {
    /// Anisotropy exponents, comma separated (each at least 1).
    #[arg(long)]
    a: String,
    /// The point, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
}

#[derive(Args)]
struct MixedNormArgs {
    #[command(flatten)]
    function: FunctionArgs,
    /// Norm exponents per axis, comma separated ("inf" allowed).
    #[arg(long)]
    p: String,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct CampanatoArgs {
    #[command(flatten)]
    function: FunctionArgs,
    /// Anisotropy exponents (default isotropic).
    #[arg(long)]
    a: Option<String>,
    /// Weight exponents per axis (default 1 on every axis).
    #[arg(long)]
    p: Option<String>,
    /// Inner integration exponent ("inf" allowed, default 2).
    #[arg(long, default_value = "2")]
    q: String,
    /// Polynomial degree (default: the admissible minimum).
    #[arg(long)]
    s: Option<usize>,
    /// Candidate ball centers per axis (default from config).
    #[arg(long)]
    centers_per_axis: Option<usize>,
    /// Candidate radii per center (default from config).
    #[arg(long)]
    radius_count: Option<usize>,
    /// Local refinement rounds around the best ball (default from config).
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct AtomArgs {
    #[command(flatten)]
    function: FunctionArgs,
    /// Ball center, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    ball_center: String,
    /// Ball radius.
    #[arg(long)]
    ball_radius: f64,
    /// Anisotropy exponents (default isotropic).
    #[arg(long)]
    a: Option<String>,
    /// Weight exponents per axis (default 1 on every axis).
    #[arg(long)]
    p: Option<String>,
    /// Size exponent in (1, inf] ("inf" allowed, default inf).
    #[arg(long, default_value = "inf")]
    r: String,
    /// Vanishing-moment degree (default: the admissible minimum).
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct PairArgs {
    /// First factor; the quadrature runs on this function's lattice.
    f: PathBuf,
    /// Second factor, evaluated at the first factor's nodes.
    g: PathBuf,
}

#[derive(Args)]
struct SuiteArgs {
    /// geometry, norms, projection, atoms, campanato, duality, or all.
    #[arg(long)]
    name: String,
    /// Master seed; case i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report path (default report-<name>.json).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Source of a grid function: a CSV file or a built-in sample family on an
/// axis-aligned box.
#[derive(Args)]
struct FunctionArgs {
    /// Grid file in the CSV exchange format.
    #[arg(long, conflicts_with = "family")]
    csv: Option<PathBuf>,
    /// gaussian, polynomial, sign, trig, abs, coordinate, or constant.
    #[arg(long)]
    family: Option<String>,
    /// Lower box corner, comma separated (family input only).
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<String>,
    /// Upper box corner, comma separated (family input only).
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<String>,
    /// Nodes per axis (default from config by dimension).
    #[arg(long)]
    resolution: Option<String>,
    /// Bump center (gaussian; default box midpoint).
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    /// Bump width (gaussian).
    #[arg(long, default_value_t = 0.3)]
    sigma: f64,
    /// Polynomial degree (polynomial family).
    #[arg(long, default_value_t = 1)]
    degree: usize,
    /// Seed for randomized families (polynomial, trig).
    #[arg(long, default_value_t = 0)]
    family_seed: u64,
    /// Axis selector (sign, coordinate families).
    #[arg(long, default_value_t = 0)]
    axis: usize,
    /// Step location (sign family).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    threshold: f64,
    /// Number of summands (trig family).
    #[arg(long, default_value_t = 3)]
    terms: usize,
    /// Largest angular frequency (trig family).
    #[arg(long, default_value_t = 2.0)]
    max_frequency: f64,
    /// Constant value (constant family).
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    value: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Quasinorm(args) => cmd_quasinorm(args),
        Command::MixedNorm(args) => cmd_mixed_norm(args),
        Command::Campanato(args) => cmd_campanato(args),
        Command::Atom(args) => cmd_atom(args),
        Command::Pair(args) => cmd_pair(args),
        Command::Suite(args) => cmd_suite(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            if e.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

fn cmd_quasinorm(args: QuasinormArgs) -> Result<ExitCode> {
    let a = AnisotropyVector::new(parse_vector(&args.a, "--a")?)?;
    let x = parse_vector(&args.x, "--x")?;
    println!("{}", format_sig(a.quasi_norm(&x)?, 12));
    Ok(ExitCode::SUCCESS)
}

fn cmd_mixed_norm(args: MixedNormArgs) -> Result<ExitCode> {
    let config = load_config(args.config.as_deref())?;
    let f = args.function.load(&config)?;
    let p = ExponentVector::new(parse_vector(&args.p, "--p")?)?;
    println!("{}", format_sig(mixed_norm(&f, &p)?, 12));
    println!("resolution {}", join_usize(f.lattice().resolution()));
    Ok(ExitCode::SUCCESS)
}

fn cmd_campanato(args: CampanatoArgs) -> Result<ExitCode> {
    let config = load_config(args.config.as_deref())?;
    let g = args.function.load(&config)?;
    let n = g.lattice().dim();
    let a = optional_anisotropy(args.a.as_deref(), n)?;
    let p = optional_exponents(args.p.as_deref(), n)?;
    let q = parse_exponent(&args.q, "--q")?;
    let s = match args.s {
        Some(s) => s,
        None => s_min(&a, &p)?,
    };
    let params = CampanatoParams::new(a.clone(), p, q, s)?;
    let domain = BallSearchDomain::over_box(
        &g.lattice().bounds(),
        &a,
        args.centers_per_axis.unwrap_or(config.centers_per_axis),
        args.radius_count.unwrap_or(config.radius_count),
        args.rounds.unwrap_or(config.refinement_rounds),
    )?;
    let out = campanato_seminorm(&g, &params, &domain)?;
    println!("{}", format_sig(out.value, 12));
    println!("witness_center {}", join_f64(out.witness.center()));
    println!("witness_radius {}", format_sig(out.witness.radius(), 12));
    println!("evaluated {}", out.evaluated);
    println!("skipped {}", out.skipped);
    println!("resolution {}", join_usize(g.lattice().resolution()));
    Ok(ExitCode::SUCCESS)
}

fn cmd_atom(args: AtomArgs) -> Result<ExitCode> {
    let config = load_config(args.config.as_deref())?;
    let f = args.function.load(&config)?;
    let n = f.lattice().dim();
    let a = optional_anisotropy(args.a.as_deref(), n)?;
    let p = optional_exponents(args.p.as_deref(), n)?;
    let r = parse_exponent(&args.r, "--r")?;
    let ball = AnisotropicBall::new(a.clone(), parse_vector(&args.ball_center, "--ball-center")?, args.ball_radius)?;
    let s = match args.s {
        Some(s) => s,
        None => s_min(&a, &p)?,
    };
    let params = AtomParams::new(p, r, s)?;
    let atom = match make_atom(&f, &ball, &params) {
        Ok(atom) => atom,
        Err(Error::DegenerateInput(_)) => {
            eprintln!("degenerate: input is polynomial on ball");
            return Ok(ExitCode::from(3));
        }
        Err(e) => return Err(e),
    };
    let validation = validate_atom(&atom)?;
    println!("{}", format_sig(validation.size.measured, 12));
    println!("support_max {}", format_sig(validation.support.measured, 12));
    println!("moment_residual {}", format_sig(validation.moments.measured, 12));
    println!("all_pass {}", validation.all_pass());
    println!("resolution {}", join_usize(f.lattice().resolution()));
    if validation.all_pass() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("atom failed re-validation");
        Ok(ExitCode::from(3))
    }
}

fn cmd_pair(args: PairArgs) -> Result<ExitCode> {
    let f = GridFunction::from_csv_path(&args.f)?;
    let g = GridFunction::from_csv_path(&args.g)?;
    println!("{}", format_sig(pairing(&f, &g)?, 12));
    println!("resolution {}", join_usize(f.lattice().resolution()));
    Ok(ExitCode::SUCCESS)
}

fn cmd_suite(args: SuiteArgs) -> Result<ExitCode> {
    let name = SuiteName::parse(&args.name)?;
    let config = load_config(args.config.as_deref())?;
    let report = run_suite(name, args.seed, &config)?;
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("report-{}.json", name.as_str())));
    std::fs::write(&out, report.to_json())?;
    print_summary(&report, &out);
    if report.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn print_summary(report: &Report, out: &std::path::Path) {
    println!(
        "suite {} seed {} cases {} failed {} max_violation {:.3e} report {}",
        report.suite,
        report.seed,
        report.summary.total,
        report.summary.failed,
        report.summary.max_violation,
        out.display()
    );
}

impl FunctionArgs {
    fn load(&self, config: &Config) -> Result<GridFunction> {
        if let Some(path) = &self.csv {
            return GridFunction::from_csv_path(path);
        }
        let family = self.family.as_deref().ok_or_else(|| {
            Error::InvalidInput("provide a function via --csv or --family".into())
        })?;
        let lo = parse_vector(
            self.lo.as_deref().ok_or_else(|| Error::InvalidInput("--family needs --lo".into()))?,
            "--lo",
        )?;
        let hi = parse_vector(
            self.hi.as_deref().ok_or_else(|| Error::InvalidInput("--family needs --hi".into()))?,
            "--hi",
        )?;
        let bounds = AxisBox::new(lo, hi)?;
        let n = bounds.dim();
        let resolution = match &self.resolution {
            Some(text) => parse_resolution(text)?,
            None => default_resolution_from(config, n)?,
        };
        let lattice = Lattice::from_box(&bounds, &resolution)?;
        match family {
            "gaussian" => {
                let center = match &self.center {
                    Some(text) => parse_vector(text, "--center")?,
                    None => (0..n).map(|k| 0.5 * (bounds.lo()[k] + bounds.hi()[k])).collect(),
                };
                let family = FunctionFamily::GaussianBump { center, sigma: self.sigma };
                GridFunction::sample(&family, &lattice)
            }
            "polynomial" => GridFunction::sample(
                &FunctionFamily::RandomPolynomial { degree: self.degree, seed: self.family_seed },
                &lattice,
            ),
            "sign" => GridFunction::sample(
                &FunctionFamily::SignStep { axis: self.axis, threshold: self.threshold },
                &lattice,
            ),
            "trig" => GridFunction::sample(
                &FunctionFamily::TrigMixture {
                    terms: self.terms,
                    max_frequency: self.max_frequency,
                    seed: self.family_seed,
                },
                &lattice,
            ),
            "abs" => Ok(synthesize(&lattice, |x| {
                x.iter().map(|v| v * v).sum::<f64>().sqrt()
            })),
            "coordinate" => {
                if self.axis >= n {
                    return Err(Error::InvalidInput(format!(
                        "--axis {} out of range for dimension {n}",
                        self.axis
                    )));
                }
                let axis = self.axis;
                Ok(synthesize(&lattice, |x| x[axis]))
            }
            "constant" => Ok(GridFunction::constant(&lattice, self.value)),
            other => Err(Error::InvalidInput(format!(
                "unknown family '{other}'; expected gaussian, polynomial, sign, trig, abs, coordinate, or constant"
            ))),
        }
    }
}

fn synthesize(lattice: &Lattice, f: impl Fn(&[f64]) -> f64) -> GridFunction {
    let values: Vec<f64> = (0..lattice.node_count()).map(|i| f(&lattice.node(i))).collect();
    GridFunction::new(lattice.clone(), values).expect("one value per node")
}

fn load_config(path: Option<&std::path::Path>) -> Result<Config> {
    let config = match path {
        Some(path) => Config::from_json_path(path)?,
        None => Config::default(),
    };
    config.validate()?;
    Ok(config)
}

fn default_resolution_from(config: &Config, n: usize) -> Result<Vec<usize>> {
    match n {
        1 => Ok(vec![config.resolution_1d]),
        2 => Ok(vec![config.resolution_2d; 2]),
        3 => Ok(vec![config.resolution_3d; 3]),
        _ => Err(Error::InvalidInput(format!("no default resolution for dimension {n}"))),
    }
}

fn optional_anisotropy(text: Option<&str>, n: usize) -> Result<AnisotropyVector> {
    match text {
        Some(text) => AnisotropyVector::new(parse_vector(text, "--a")?),
        None => AnisotropyVector::isotropic(n),
    }
}

fn optional_exponents(text: Option<&str>, n: usize) -> Result<ExponentVector> {
    match text {
        Some(text) => ExponentVector::new(parse_vector(text, "--p")?),
        None => ExponentVector::constant(n, 1.0),
    }
}

/// Parses a comma-separated float list; "inf" (any case) is accepted.
fn parse_vector(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|field| parse_exponent(field, what))
        .collect()
}

fn parse_exponent(text: &str, what: &str) -> Result<f64> {
    let field = text.trim();
    if field.eq_ignore_ascii_case("inf") || field.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    field
        .parse::<f64>()
        .map_err(|_| Error::InvalidInput(format!("{what}: cannot parse number from {field:?}")))
}

fn parse_resolution(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|field| {
            field.trim().parse::<usize>().map_err(|_| {
                Error::InvalidInput(format!("--resolution: cannot parse count from {field:?}"))
            })
        })
        .collect()
}

fn join_f64(values: &[f64]) -> String {
    values.iter().map(|v| format_sig(*v, 12)).collect::<Vec<_>>().join(",")
}

fn join_usize(values: &[usize]) -> String {
    values.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// Decimal rendering with the given number of significant digits.
fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exponent = v.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    format!("{v:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors_parse_with_infinity() {
        assert_eq!(parse_vector("1,2.5", "--a").unwrap(), vec![1.0, 2.5]);
        let p = parse_vector("inf, 2", "--p").unwrap();
        assert!(p[0].is_infinite() && p[1] == 2.0);
        assert!(parse_vector("1,abc", "--x").is_err());
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(5.0, 12), "5.00000000000");
        assert_eq!(format_sig(0.25, 12), "0.250000000000");
        assert_eq!(format_sig(-1.272019649514, 7), "-1.272020");
        assert_eq!(format_sig(0.0, 12), "0");
    }
}
