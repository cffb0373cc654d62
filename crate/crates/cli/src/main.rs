//! `degenpoi` — command-line front end for the exact degenerate-Poisson
//! toolkit: triangle tables, Bell/Lah-Bell polynomial evaluation, pmf/cdf
//! emission, deterministic sampling, and the identity verification suites.
//!
//! Exit codes are a stable contract: 0 success, 1 verification checks
//! failed, 2 usage or regime error. All machine-readable output is
//! deterministic given the flags; rationals cross the boundary as "p/q"
//! strings (a `--float` flag appends approximate columns but never replaces
//! the exact value).

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use degenpoi::bell::{
    bell_deg, dimorphic_bell, fully_degen_bell, lah_bell, lah_bell_deg, lah_bell_zt,
};
use degenpoi::dist::{cdf, pmf_csv, pmf_deg, pmf_zt, sample, PoissonParams};
use degenpoi::moments::{run_suite, MomentError, SuiteConfig};
use degenpoi::triangles::{lah, stirling1_classical, stirling1_deg, stirling2_deg, MAX_ROW};
use degenpoi::{BellError, DegenParam, Rational, TruncationBudget, Value};

#[derive(Parser)]
#[command(
    name = "degenpoi",
    version,
    about = "Exact degenerate-Poisson combinatorics: tables, polynomials, distributions, identity checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a triangle of change-of-basis coefficients as CSV or JSON.
    Table(TableArgs),
    /// Evaluate one member of a Bell/Lah-Bell polynomial family.
    Poly(PolyArgs),
    /// Emit pmf/cdf rows of a (zero-truncated) degenerate Poisson law.
    Pmf(PmfArgs),
    /// Draw deterministic samples; one draw per line plus a JSON footer.
    Sample(SampleArgs),
    /// Run an identity verification suite and emit its JSON report.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableKind {
    /// Degenerate Stirling numbers of the first kind S_{1,λ}(n,k).
    Stirling1Deg,
    /// Degenerate Stirling numbers of the second kind S_{2,λ}(n,k).
    Stirling2Deg,
    /// Classical signed Stirling numbers of the first kind s(n,k).
    Stirling1,
    /// Classical unsigned (cycle-count) Stirling numbers |s(n,k)|.
    Stirling1Unsigned,
    /// Lah numbers L(n,k).
    Lah,
}

impl TableKind {
    fn uses_lambda(self) -> bool {
        matches!(self, TableKind::Stirling1Deg | TableKind::Stirling2Deg)
    }

    fn name(self) -> &'static str {
        match self {
            TableKind::Stirling1Deg => "stirling1-deg",
            TableKind::Stirling2Deg => "stirling2-deg",
            TableKind::Stirling1 => "stirling1",
            TableKind::Stirling1Unsigned => "stirling1-unsigned",
            TableKind::Lah => "lah",
        }
    }

    fn entry(self, n: u32, k: u32, lambda: &DegenParam) -> Rational {
        match self {
            TableKind::Stirling1Deg => stirling1_deg(n, k, lambda),
            TableKind::Stirling2Deg => stirling2_deg(n, k, lambda),
            TableKind::Stirling1 => stirling1_classical(n, k, true),
            TableKind::Stirling1Unsigned => stirling1_classical(n, k, false),
            TableKind::Lah => lah(n, k),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Degenerate Bell polynomial Bel_{n,λ}(x) (Dobinski route).
    BellDeg,
    /// Fully degenerate Bell polynomial β_{n,λ}(x) (finite triangle sum).
    FullyDegenBell,
    /// Dimorphic degenerate Bell polynomial B_{n,λ}(x).
    DimorphicBell,
    /// Classical Lah-Bell polynomial B^L_n(x).
    LahBell,
    /// Degenerate Lah-Bell polynomial B^L_{n,λ}(x).
    LahBellDeg,
    /// Zero-truncated degenerate Lah-Bell polynomial B^{(L,0)}_{n,λ}(x).
    LahBellZt,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::BellDeg => "bell-deg",
            Family::FullyDegenBell => "fully-degen-bell",
            Family::DimorphicBell => "dimorphic-bell",
            Family::LahBell => "lah-bell",
            Family::LahBellDeg => "lah-bell-deg",
            Family::LahBellZt => "lah-bell-zt",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct TableArgs {
    /// Which triangle to emit.
    #[arg(long, value_enum)]
    kind: TableKind,
    /// Deformation parameter λ as "p/q" or "p"; 0 is the classical limit.
    /// Ignored by the λ-independent triangles.
    #[arg(long, default_value = "0", value_parser = rational, allow_hyphen_values = true)]
    lambda: Rational,
    /// Emit rows for 0 ≤ k ≤ n ≤ n_max.
    #[arg(long)]
    n_max: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Append an approximate decimal column next to each exact value.
    #[arg(long)]
    float: bool,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PolyArgs {
    /// Which polynomial family to evaluate.
    #[arg(long, value_enum)]
    family: Family,
    /// Deformation parameter λ; ignored by the classical lah-bell family.
    #[arg(long, default_value = "0", value_parser = rational, allow_hyphen_values = true)]
    lambda: Rational,
    /// Evaluation point x as "p/q" or "p".
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    x: Rational,
    /// Polynomial degree n.
    #[arg(long)]
    n: u32,
    /// Bare value by default; csv/json add the full evaluation record.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Append an approximate decimal rendering.
    #[arg(long)]
    float: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PmfArgs {
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    lambda: Rational,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    alpha: Rational,
    /// Emit rows for 0 ≤ i ≤ upto.
    #[arg(long)]
    upto: u64,
    /// Zero-truncated law instead of the full one.
    #[arg(long)]
    truncated: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Append approximate pmf/cdf columns.
    #[arg(long)]
    float: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    lambda: Rational,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    alpha: Rational,
    /// Number of draws.
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Zero-truncated law instead of the full one.
    #[arg(long)]
    truncated: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// `exact-default` (the full λ × α grid), `exact` (one point, needs
    /// --lambda/--alpha), or `mc` (Monte Carlo at one point).
    #[arg(long)]
    suite: Option<String>,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    lambda: Option<Rational>,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    alpha: Option<Rational>,
    /// Highest moment/polynomial degree checked (default 8 exact, 3 mc).
    #[arg(long)]
    n_max: Option<u32>,
    /// Monte Carlo master seed (mc suite only).
    #[arg(long)]
    seed: Option<u64>,
    /// Draws per Monte Carlo check (mc suite only).
    #[arg(long)]
    count: Option<usize>,
    /// Write the JSON report to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// clap value parser for "p/q" rationals.
fn rational(s: &str) -> Result<Rational, String> {
    s.parse::<Rational>().map_err(|e| e.to_string())
}

enum Failure {
    /// Bad flags, unsupported regime, or an evaluation that cannot proceed.
    Usage(String),
    /// The verification suite ran and at least one check failed.
    ChecksFailed,
}

impl From<degenpoi::dist::DistError> for Failure {
    fn from(e: degenpoi::dist::DistError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<BellError> for Failure {
    fn from(e: BellError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ChecksFailed) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Table(args) => cmd_table(args),
        Command::Poly(args) => cmd_poly(args),
        Command::Pmf(args) => cmd_pmf(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn approx(v: &Rational) -> String {
    format!("{:.17e}", v.to_f64())
}

fn cmd_table(args: TableArgs) -> Result<(), Failure> {
    if args.n_max > MAX_ROW {
        return Err(Failure::Usage(format!(
            "--n-max {} exceeds the table cap {MAX_ROW}",
            args.n_max
        )));
    }
    let lambda = DegenParam::new(args.lambda.clone());
    match args.format {
        Format::Csv => {
            let mut out = String::from(if args.float {
                "n,k,value,approx\n"
            } else {
                "n,k,value\n"
            });
            for n in 0..=args.n_max {
                for k in 0..=n {
                    let v = args.kind.entry(n, k, &lambda);
                    if args.float {
                        let _ = writeln!(out, "{n},{k},{v},{}", approx(&v));
                    } else {
                        let _ = writeln!(out, "{n},{k},{v}");
                    }
                }
            }
            emit(&args.output, &out)
        }
        Format::Json => {
            let mut rows = Vec::new();
            for n in 0..=args.n_max {
                for k in 0..=n {
                    let v = args.kind.entry(n, k, &lambda);
                    let mut row = json!({"n": n, "k": k, "value": v.to_string()});
                    if args.float {
                        row["approx"] = json!(v.to_f64());
                    }
                    rows.push(row);
                }
            }
            let doc = json!({
                "kind": args.kind.name(),
                "lambda": if args.kind.uses_lambda() {
                    serde_json::Value::String(args.lambda.to_string())
                } else {
                    serde_json::Value::Null
                },
                "rows": rows,
            });
            emit(
                &args.output,
                &format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializes")),
            )
        }
    }
}

fn cmd_poly(args: PolyArgs) -> Result<(), Failure> {
    let lambda = DegenParam::new(args.lambda.clone());
    let budget = TruncationBudget::default();
    let value: Value = match args.family {
        Family::FullyDegenBell => Value::exact(fully_degen_bell(args.n, &args.x, &lambda)),
        Family::LahBell => Value::exact(lah_bell(args.n, &args.x)),
        Family::BellDeg | Family::DimorphicBell | Family::LahBellDeg | Family::LahBellZt => {
            let point = degenpoi::EvalPoint::new(args.x.clone(), lambda.clone())?;
            match args.family {
                Family::BellDeg => bell_deg(args.n, &point, &budget)?,
                Family::DimorphicBell => dimorphic_bell(args.n, &point, &budget)?,
                Family::LahBellDeg => lah_bell_deg(args.n, &point, &budget)?,
                Family::LahBellZt => lah_bell_zt(args.n, &point, &budget)?,
                _ => unreachable!(),
            }
        }
    };
    let content = match args.format {
        None => {
            if args.float {
                format!("{value} (~{:.17e})\n", value.midpoint().to_f64())
            } else {
                format!("{value}\n")
            }
        }
        Some(Format::Csv) => {
            let mut out = String::from(if args.float {
                "family,n,lambda,x,value,approx\n"
            } else {
                "family,n,lambda,x,value\n"
            });
            if args.float {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{value},{:.17e}",
                    args.family.name(),
                    args.n,
                    args.lambda,
                    args.x,
                    value.midpoint().to_f64()
                );
            } else {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{value}",
                    args.family.name(),
                    args.n,
                    args.lambda,
                    args.x
                );
            }
            out
        }
        Some(Format::Json) => {
            let mut doc = json!({
                "family": args.family.name(),
                "n": args.n,
                "lambda": args.lambda.to_string(),
                "x": args.x.to_string(),
                "value": value.to_json(),
            });
            if args.float {
                doc["approx"] = json!(value.midpoint().to_f64());
            }
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializes"))
        }
    };
    emit(&args.output, &content)
}

fn cmd_pmf(args: PmfArgs) -> Result<(), Failure> {
    let params = PoissonParams::new(DegenParam::new(args.lambda.clone()), args.alpha.clone())?;
    let content = match args.format {
        Format::Csv => pmf_csv(&params, args.truncated, args.upto, args.float),
        Format::Json => {
            let mut rows = Vec::new();
            for i in 0..=args.upto {
                let p = if args.truncated {
                    pmf_zt(&params, i)
                } else {
                    pmf_deg(&params, i)
                };
                let c = cdf(&params, args.truncated, i);
                let mut row = json!({
                    "i": i,
                    "pmf": p.to_string(),
                    "cdf": c.to_string(),
                });
                if args.float {
                    row["pmf_float"] = json!(p.to_f64());
                    row["cdf_float"] = json!(c.to_f64());
                }
                rows.push(row);
            }
            let doc = json!({
                "lambda": args.lambda.to_string(),
                "alpha": args.alpha.to_string(),
                "truncated": args.truncated,
                "rows": rows,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializes"))
        }
    };
    emit(&args.output, &content)
}

fn cmd_sample(args: SampleArgs) -> Result<(), Failure> {
    let params = PoissonParams::new(DegenParam::new(args.lambda.clone()), args.alpha.clone())?;
    let batch = sample(&params, args.truncated, args.seed, args.count)?;
    let mut out = String::new();
    for draw in &batch.draws {
        let _ = writeln!(out, "{draw}");
    }
    let _ = writeln!(out, "{}", batch.footer_json());
    emit(&args.output, &out)
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let suite = match &args.suite {
        Some(s) => s.clone(),
        None => {
            if args.lambda.is_some() || args.alpha.is_some() {
                "exact".to_string()
            } else {
                "exact-default".to_string()
            }
        }
    };
    let point = |missing: &str| -> Result<(DegenParam, Rational), Failure> {
        match (&args.lambda, &args.alpha) {
            (Some(l), Some(a)) => Ok((DegenParam::new(l.clone()), a.clone())),
            _ => Err(Failure::Usage(format!(
                "--suite {missing} needs both --lambda and --alpha"
            ))),
        }
    };
    let config = match suite.as_str() {
        "exact-default" => {
            if args.lambda.is_some() || args.alpha.is_some() {
                return Err(Failure::Usage(
                    "exact-default sweeps its own grid; drop --lambda/--alpha or use --suite exact"
                        .into(),
                ));
            }
            let mut c = SuiteConfig::exact_default();
            if let Some(n) = args.n_max {
                c.n_max = n;
            }
            c
        }
        "exact" => {
            let (l, a) = point("exact")?;
            SuiteConfig::exact_at(l, a, args.n_max.unwrap_or(8))
        }
        "mc" => {
            let (l, a) = point("mc")?;
            SuiteConfig::mc_at(
                l,
                a,
                args.n_max.unwrap_or(3),
                args.seed.unwrap_or(0),
                args.count.unwrap_or(10_000),
            )
        }
        other => {
            return Err(Failure::Usage(format!(
                "unknown suite `{other}` (expected exact-default, exact, or mc)"
            )))
        }
    };
    if config.mc_count.is_none() && (args.seed.is_some() || args.count.is_some()) {
        return Err(Failure::Usage(
            "--seed/--count only apply to --suite mc".into(),
        ));
    }
    let report = run_suite(&config).map_err(|e| match e {
        MomentError::Dist(inner) => Failure::Usage(inner.to_string()),
        MomentError::Bell(inner) => Failure::Usage(inner.to_string()),
        other => Failure::Usage(other.to_string()),
    })?;
    emit(&args.output, &format!("{}\n", report.to_json_string()))?;
    if report.all_pass() {
        Ok(())
    } else {
        Err(Failure::ChecksFailed)
    }
}
