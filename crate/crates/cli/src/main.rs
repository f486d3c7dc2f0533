//! `ct-forge`: verify constant-term identities, extract constant terms of
//! user-supplied integrands, and run the numeric cross-checks.
//!
//! Exit codes: 0 verified/agreed, 1 computed but mismatched or unconverged,
//! 2 usage or engine error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ct_forge::contour::{self, ChainForm, OracleValue, QuadratureConfig};
use ct_forge::exact::{self, rational_string, Rational};
use ct_forge::identities::{self, IdentityFamily, IdentitySpec, PairOrientation, VerificationReport};
use ct_forge::{CtError, CtOrder, FactoredRational, Scalar};
use rayon::prelude::*;
use serde::Serialize;

const DEFAULT_MAX_N: u64 = 5;
const ORACLE_TOL: f64 = 1e-8;
const CHAIN_TOL: f64 = 1e-9;
const CHAIN_AGREEMENT: f64 = 1e-5;
const START_POINTS: usize = 32;

#[derive(Parser)]
#[command(name = "ct-forge", version, about = "Exact and numeric constant-term identity checks")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the exact constant term with the closed form.
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        /// Extraction order as a comma list, e.g. `2,1` (default 1..n).
        #[arg(long)]
        order: Option<String>,
        /// JSON list of specs; one report per line, in input order.
        #[arg(long, conflicts_with = "family")]
        grid: Option<PathBuf>,
    },
    /// Exact constant term of an integrand given as `{"num": ..., "den": [[poly, exp], ...]}`.
    Ct {
        file: PathBuf,
        #[arg(long)]
        order: Option<String>,
    },
    /// Trapezoidal estimate of the constant term on `|x_j| = j epsilon`.
    Oracle {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// The four change-of-variables forms of the type-D integral.
    Chain {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        a: u64,
        #[arg(long, default_value_t = 1)]
        twoc: u64,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Gamma-product identities behind the Catalan evaluation.
    GammaCheck {
        /// Largest n to check.
        #[arg(long, default_value_t = 10)]
        n: u64,
    },
}

#[derive(Args)]
struct SpecArgs {
    /// cry, mm, morris or thm.
    #[arg(long)]
    family: Option<IdentityFamily>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, default_value_t = 2)]
    a: u64,
    #[arg(long, default_value_t = 0)]
    b: u64,
    /// Twice the half-integer c.
    #[arg(long, default_value_t = 1)]
    twoc: u64,
    /// Pair factor orientation in the type-D family.
    #[arg(long, default_value = "kj")]
    orientation: PairOrientation,
}

impl SpecArgs {
    fn spec(&self) -> Result<IdentitySpec, Failure> {
        let (Some(family), Some(n)) = (self.family, self.n) else {
            return Err(Failure::usage("--family and --n are required"));
        };
        let spec = IdentitySpec { family, n, a: self.a, b: self.b, twoc: self.twoc, orientation: self.orientation };
        Ok(spec.normalized()?)
    }
}

#[derive(Args)]
struct QuadArgs {
    /// Contour radius unit (family default if omitted).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Fixed point count: compares N against 2N only.
    #[arg(long)]
    points: Option<usize>,
}

impl QuadArgs {
    fn plan(&self, default: QuadratureConfig, n: u64) -> (QuadratureConfig, usize) {
        let eps = self.epsilon.unwrap_or(default.epsilon);
        match self.points {
            Some(p) => (QuadratureConfig::new(eps, p).parallel(true), p.saturating_mul(2)),
            None => (QuadratureConfig::new(eps, START_POINTS).parallel(true), contour::max_points_for(n)),
        }
    }
}

/// A non-success outcome with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<CtError> for Failure {
    fn from(e: CtError) -> Self {
        Failure::usage(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn max_n() -> Result<u64, Failure> {
    match std::env::var("CT_FORGE_MAX_N") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::usage(format!("CT_FORGE_MAX_N must be an integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_MAX_N),
    }
}

fn guard_n(n: u64) -> Result<(), Failure> {
    let limit = max_n()?;
    if n > limit {
        return Err(Failure::usage(format!("n = {n} exceeds CT_FORGE_MAX_N = {limit}")));
    }
    Ok(())
}

fn parse_order(order: Option<&str>, n: usize) -> Result<CtOrder, Failure> {
    let Some(src) = order else {
        return Ok(CtOrder::natural(n));
    };
    let order = CtOrder::parse(src)?;
    if order.len() != n {
        return Err(Failure::usage(format!("--order lists {} variables, integrand has {n}", order.len())));
    }
    if !order.is_natural() {
        eprintln!("warning: non-default extraction order {src}; only 1..n is the contractual order");
    }
    Ok(order)
}

fn emit<T: Serialize + std::fmt::Display>(format: Format, value: &T) {
    match format {
        Format::Text => println!("{value}"),
        Format::Json => println!("{}", serde_json::to_string(value).expect("serializable output")),
    }
}

fn run_verify(format: Format, args: &SpecArgs, order: Option<&str>) -> Outcome {
    let spec = args.spec()?;
    guard_n(spec.n)?;
    let order = parse_order(order, spec.n as usize)?;
    let report = identities::verify_with_order(&spec, &order)?;
    emit(format, &report);
    Ok(if report.equal { 0 } else { 1 })
}

#[derive(Serialize)]
struct GridError {
    spec: IdentitySpec,
    error: String,
}

fn run_grid(format: Format, path: &PathBuf) -> Outcome {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let specs: Vec<IdentitySpec> =
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let limit = max_n()?;
    let results: Vec<Result<VerificationReport, CtError>> = specs
        .par_iter()
        .map(|spec| {
            if spec.n > limit {
                return Err(CtError::Config(format!("n = {} exceeds CT_FORGE_MAX_N = {limit}", spec.n)));
            }
            identities::verify(spec)
        })
        .collect();
    let mut code = 0;
    for (spec, result) in specs.iter().zip(results) {
        match result {
            Ok(report) => {
                if !report.equal {
                    code = code.max(1);
                }
                emit(format, &report);
            }
            Err(e) => {
                code = 2;
                eprintln!("error: {spec}: {e}");
                match format {
                    Format::Text => println!("{spec}: ERROR {e}"),
                    Format::Json => println!(
                        "{}",
                        serde_json::to_string(&GridError { spec: *spec, error: e.to_string() }).expect("serializable")
                    ),
                }
            }
        }
    }
    Ok(code)
}

#[derive(Serialize)]
struct CtResult {
    value: String,
}

impl std::fmt::Display for CtResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.value)
    }
}

fn run_ct(format: Format, file: &PathBuf, order: Option<&str>) -> Outcome {
    let text = std::fs::read_to_string(file).map_err(|e| Failure::usage(format!("{}: {e}", file.display())))?;
    let f = FactoredRational::from_json_str(&text)?;
    let n = f.variables().last().map_or(0, |v| v + 1);
    guard_n(n as u64)?;
    let order = parse_order(order, n)?;
    let value = f.ct_iterated(&order)?;
    emit(format, &CtResult { value: rational_string(&value) });
    Ok(0)
}

fn run_oracle(format: Format, args: &SpecArgs, quad: &QuadArgs) -> Outcome {
    let spec = args.spec()?;
    let (cfg, max_points) = quad.plan(QuadratureConfig::default_x(spec.n), spec.n);
    let value = contour::contour_ct_converged(&spec, &cfg, ORACLE_TOL, max_points)?;
    emit(format, &value);
    Ok(if value.converged { 0 } else { 1 })
}

#[derive(Serialize)]
struct ChainReport {
    n: u64,
    a: u64,
    twoc: u64,
    #[serde(with = "exact::rational_serde")]
    exact: Rational,
    forms: BTreeMap<ChainForm, OracleValue>,
    deltas: BTreeMap<String, f64>,
    errors: BTreeMap<ChainForm, f64>,
    agreed: bool,
}

impl std::fmt::Display for ChainReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "chain n={} a={} twoc={} exact={}", self.n, self.a, self.twoc, self.exact)?;
        for (form, value) in &self.forms {
            writeln!(f, "  {form:<7} {value}  rel.err={:.3e}", self.errors[form])?;
        }
        for (pair, delta) in &self.deltas {
            writeln!(f, "  delta {pair:<15} {delta:.3e}")?;
        }
        write!(f, "{}", if self.agreed { "agreed" } else { "NOT agreed" })
    }
}

fn run_chain(format: Format, n: u64, a: u64, twoc: u64, quad: &QuadArgs) -> Outcome {
    let (cfg, max_points) = quad.plan(QuadratureConfig::default_chain(n), n);
    let forms = contour::chain_values_converged(n, a, twoc, &cfg, CHAIN_TOL, max_points)?;
    let exact_value = exact::thm_rhs(n, a, twoc)?;
    let target = exact_value.to_f64_lossy();
    let errors: BTreeMap<ChainForm, f64> =
        forms.iter().map(|(k, v)| (*k, contour::relative_diff(v.value(), target.into()))).collect();
    let mut deltas = BTreeMap::new();
    let list: Vec<_> = forms.iter().collect();
    for (i, (fa, va)) in list.iter().enumerate() {
        for (fb, vb) in &list[i + 1..] {
            deltas.insert(format!("{fa}/{fb}"), contour::relative_diff(va.value(), vb.value()));
        }
    }
    let agreed = forms.values().all(|v| v.converged)
        && errors.values().all(|e| *e <= CHAIN_AGREEMENT)
        && deltas.values().all(|d| *d <= CHAIN_AGREEMENT);
    let report = ChainReport { n, a, twoc, exact: exact_value, forms, deltas, errors, agreed };
    emit(format, &report);
    Ok(if agreed { 0 } else { 1 })
}

#[derive(Serialize)]
struct GammaRow {
    n: u64,
    catalan: bool,
    ratio: bool,
}

#[derive(Serialize)]
#[serde(transparent)]
struct GammaTable(Vec<GammaRow>);

impl std::fmt::Display for GammaTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
        for (i, row) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "n={:<3} catalan={:<4} ratio={}", row.n, mark(row.catalan), mark(row.ratio))?;
        }
        Ok(())
    }
}

fn run_gamma_check(format: Format, max: u64) -> Outcome {
    if max < 1 {
        return Err(Failure::usage("--n must be at least 1"));
    }
    let table = GammaTable(
        (1..=max)
            .map(|n| GammaRow { n, catalan: identities::check_cat_identity(n), ratio: identities::check_ratio_identity(n) })
            .collect(),
    );
    emit(format, &table);
    Ok(if table.0.iter().all(|r| r.catalan && r.ratio) { 0 } else { 1 })
}

fn run(cli: &Cli) -> Outcome {
    let format = cli.format;
    match &cli.command {
        Command::Verify { grid: Some(path), .. } => run_grid(format, path),
        Command::Verify { spec, order, grid: None } => run_verify(format, spec, order.as_deref()),
        Command::Ct { file, order } => run_ct(format, file, order.as_deref()),
        Command::Oracle { spec, quad } => run_oracle(format, spec, quad),
        Command::Chain { n, a, twoc, quad } => run_chain(format, *n, *a, *twoc, quad),
        Command::GammaCheck { n } => run_gamma_check(format, *n),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
