//! `powersum` command-line frontend.
//!
//! Exit codes: 0 success (`Found`, `Exists`, `IsMinimizer`, and inconclusive
//! outcomes such as `BudgetExceeded`), 1 negative verdicts (`NoneExists`,
//! `Excluded`, `NotMinimizer`, invalid set), 2 inputs outside the domain of
//! an operation, 64 usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::minimax::{minimize, OptimizerConfig, OptimizerReport};
use crate::pds::{
    self, canonical_form, exhaustive_search, exhaustive_search_parallel, feasibility,
    order_for_modulus, singer_construct, FeasibilityVerdict, SearchOutcome,
};
use crate::powersum::{self, recover_structure, RecoveryStatus, UnimodularTuple};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Significant digits of every float written by the CLI.
pub const FLOAT_DIGITS: usize = 12;

#[derive(Debug, Parser)]
#[command(
    name = "powersum",
    version,
    about = "Power-sum minimizers and perfect difference sets"
)]
pub struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Singer difference set of prime-power order q.
    Singer {
        #[arg(long)]
        q: u64,
    },
    /// Check whether a residue list is a perfect difference set.
    Verify(VerifyArgs),
    /// Prime-power, Bruck-Ryser, Wilbrink and search verdicts for an order.
    Feasibility {
        #[arg(long)]
        order: u64,
        #[arg(long, default_value_t = pds::DEFAULT_FEASIBILITY_BUDGET)]
        budget: u64,
    },
    /// |S(ν)| and ε_ν over ν = 1..n²−n.
    Profile(ProfileArgs),
    /// Recover the difference set behind a minimizing tuple.
    Recover {
        #[arg(long)]
        tuple_file: PathBuf,
        #[arg(long, default_value_t = powersum::RECOVERY_TOL)]
        tol: f64,
    },
    /// Multi-start minimization of max |S(ν)|.
    Optimize(OptimizeArgs),
    /// Exhaustive search for a difference set of the given order.
    Search {
        #[arg(long)]
        order: u64,
        #[arg(long, default_value_t = pds::DEFAULT_BUDGET)]
        budget: u64,
        /// Worker threads; without it the search runs sequentially.
        #[arg(long)]
        parallel: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated residues.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        required = true
    )]
    pub set: Vec<i64>,
    #[arg(long, conflicts_with = "modulus", required_unless_present = "modulus")]
    pub q: Option<u64>,
    /// q² + q + 1, as an alternative to --q.
    #[arg(long)]
    pub modulus: Option<u64>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct ProfileSource {
    /// Tuple as JSON {"n","alpha_turns","thetas"} or CSV with a theta_turns column.
    #[arg(long)]
    pub tuple_file: Option<PathBuf>,
    /// Fabrykowski tuple of the Singer set of order q, given as `q=Q` or `Q`.
    #[arg(long)]
    pub from_pds: Option<String>,
    /// Uniform random tuple of this size.
    #[arg(long)]
    pub random: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub source: ProfileSource,
    /// Global phase for --from-pds.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Last ν; defaults to n² − n.
    #[arg(long)]
    pub nu_max: Option<usize>,
    #[arg(long, env = "POWERSUM_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub restarts: usize,
    #[arg(long, env = "POWERSUM_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    /// Basin-hopping moves per restart.
    #[arg(long, default_value_t = 10)]
    pub hops: usize,
    #[arg(long)]
    pub parallel: Option<usize>,
    /// Write per-iteration traces as CSV (restart, iter, beta, value).
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

/// Failure of a command after argument parsing.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn domain(message: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_DOMAIN,
            message: message.to_string(),
        }
    }
}

/// Rounds to [`FLOAT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", FLOAT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            if let Some(r) = serde_json::Number::from_f64(x) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// JSON with floats rounded to [`FLOAT_DIGITS`] significant digits.
pub fn stable_json<S: Serialize>(value: &S, pretty: bool) -> String {
    let mut v = serde_json::to_value(value).expect("serializable");
    round_floats(&mut v);
    if pretty {
        serde_json::to_string_pretty(&v).expect("json")
    } else {
        serde_json::to_string(&v).expect("json")
    }
}

fn fmt_float(x: f64) -> String {
    format!("{}", round_sig(x))
}

fn emit<S: Serialize>(out: &mut dyn Write, value: &S, format: Format) -> std::io::Result<()> {
    writeln!(out, "{}", stable_json(value, format == Format::Human))
}

/// Reads a tuple from JSON, or from CSV with a `theta_turns` header.
pub fn read_tuple(path: &Path) -> Result<UnimodularTuple<f64>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::domain(format!("cannot read {}: {e}", path.display())))?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        return serde_json::from_str(trimmed)
            .map_err(|e| Failure::domain(format!("invalid tuple file {}: {e}", path.display())));
    }
    let mut lines = trimmed.lines().map(str::trim).filter(|l| !l.is_empty());
    match lines.next() {
        Some("theta_turns") => {}
        _ => {
            return Err(Failure::domain(format!(
                "{}: expected JSON or CSV with header theta_turns",
                path.display()
            )))
        }
    }
    let thetas = lines
        .map(|l| {
            l.parse::<f64>()
                .map_err(|e| Failure::domain(format!("bad angle {l:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    UnimodularTuple::new(thetas, 0.0).map_err(Failure::domain)
}

fn parse_pds_order(s: &str) -> Result<u64, Failure> {
    let digits = s.strip_prefix("q=").unwrap_or(s);
    digits
        .trim()
        .parse()
        .map_err(|_| Failure::usage(format!("--from-pds expects q=<order>, got {s:?}")))
}

fn profile_tuple(args: &ProfileArgs) -> Result<UnimodularTuple<f64>, Failure> {
    let src = &args.source;
    if let Some(path) = &src.tuple_file {
        return read_tuple(path);
    }
    if let Some(text) = &src.from_pds {
        let q = parse_pds_order(text)?;
        let set = singer_construct(q).map_err(Failure::domain)?;
        return Ok(powersum::fabrykowski_tuple(&set, args.alpha));
    }
    let n = src.random.expect("clap enforces one source");
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    UnimodularTuple::random(n, &mut rng).map_err(Failure::domain)
}

#[derive(Serialize)]
struct SearchJson<'a> {
    #[serde(flatten)]
    report: &'a pds::SearchReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    canonical: Option<pds::CanonicalForm>,
}

fn write_trace(path: &Path, report: &OptimizerReport<f64>) -> std::io::Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "restart,iter,beta,value")?;
    for row in &report.traces {
        let beta = row.beta.map(fmt_float).unwrap_or_default();
        writeln!(
            f,
            "{},{},{},{}",
            row.restart,
            row.iter,
            beta,
            fmt_float(row.value)
        )?;
    }
    f.flush()
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let io = |e: std::io::Error| Failure::domain(format!("write failed: {e}"));
    let json_or = |f: Option<Format>| f.unwrap_or(Format::Json);
    match cli.command {
        Command::Singer { q } => {
            let set = singer_construct(q).map_err(Failure::domain)?;
            emit(out, &set, json_or(cli.format)).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Verify(args) => {
            let q = match (args.q, args.modulus) {
                (Some(q), _) => q,
                (None, Some(m)) => order_for_modulus(m)
                    .ok_or_else(|| Failure::domain(format!("{m} is not of the form q² + q + 1")))?,
                (None, None) => return Err(Failure::usage("one of --q or --modulus is required")),
            };
            let verdict = pds::verify(&args.set, q);
            emit(out, &verdict, json_or(cli.format)).map_err(io)?;
            Ok(if verdict.valid {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            })
        }
        Command::Feasibility { order, budget } => {
            if order == 0 {
                return Err(Failure::domain("order must be at least 1"));
            }
            let report = feasibility(order, budget);
            emit(out, &report, json_or(cli.format)).map_err(io)?;
            Ok(match report.verdict {
                FeasibilityVerdict::Excluded => EXIT_NEGATIVE,
                _ => EXIT_OK,
            })
        }
        Command::Profile(args) => {
            let t = profile_tuple(&args)?;
            let nu_max = args.nu_max.unwrap_or_else(|| powersum::horizon(t.n()));
            if nu_max == 0 {
                return Err(Failure::usage("--nu-max must be at least 1"));
            }
            let p = powersum::power_sums(&t, nu_max);
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    writeln!(out, "nu,abs,epsilon").map_err(io)?;
                    for (i, (a, e)) in p.abs_values.iter().zip(&p.epsilons).enumerate() {
                        writeln!(out, "{},{},{}", i + 1, fmt_float(*a), fmt_float(*e))
                            .map_err(io)?;
                    }
                }
                f => emit(out, &p, f).map_err(io)?,
            }
            Ok(EXIT_OK)
        }
        Command::Recover { tuple_file, tol } => {
            if tol.is_nan() || tol <= 0.0 {
                return Err(Failure::usage("--tol must be positive"));
            }
            let t = read_tuple(&tuple_file)?;
            let r = recover_structure(&t, tol);
            emit(out, &r, json_or(cli.format)).map_err(io)?;
            Ok(match r.status {
                RecoveryStatus::IsMinimizer => EXIT_OK,
                RecoveryStatus::NotMinimizer => EXIT_NEGATIVE,
            })
        }
        Command::Optimize(args) => {
            let mut cfg = OptimizerConfig::<f64>::new(args.n);
            cfg.restarts = args.restarts;
            cfg.seed = args.seed;
            cfg.max_iters = args.max_iters;
            cfg.hops = args.hops;
            cfg.threads = args.parallel.unwrap_or(0);
            cfg.trace = args.trace.is_some();
            let report = minimize(&cfg).map_err(Failure::domain)?;
            if let Some(path) = &args.trace {
                write_trace(path, &report).map_err(|e| {
                    Failure::domain(format!("cannot write {}: {e}", path.display()))
                })?;
            }
            let _ = writeln!(
                err,
                "n = {}: best {} vs bound {} (gap {:e})",
                args.n,
                fmt_float(report.best_value),
                fmt_float(report.lower_bound),
                report.gap_to_bound
            );
            let mut shown = report.clone();
            shown.traces.clear();
            emit(out, &shown, json_or(cli.format)).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Search {
            order,
            budget,
            parallel,
        } => {
            if order == 0 {
                return Err(Failure::domain("order must be at least 1"));
            }
            if order > 1000 {
                return Err(Failure::domain("order too large for exhaustive search"));
            }
            let report = match parallel {
                Some(threads) => exhaustive_search_parallel(order, budget, threads),
                None => exhaustive_search(order, budget),
            };
            let canonical = match &report.outcome {
                SearchOutcome::Found { set } => Some(canonical_form(set)),
                _ => None,
            };
            emit(
                out,
                &SearchJson {
                    report: &report,
                    canonical,
                },
                json_or(cli.format),
            )
            .map_err(io)?;
            Ok(match report.outcome {
                SearchOutcome::NoneExists => EXIT_NEGATIVE,
                _ => EXIT_OK,
            })
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("powersum").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn rounding() {
        assert_eq!(round_sig(2f64.sqrt()).to_string(), "1.41421356237");
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(-1.0 / 3.0), -0.333333333333);
        assert_eq!(round_sig(123_456_789.012_345_67), 123456789.012);
    }

    #[test]
    fn singer_and_errors() {
        let (code, out, _) = call(&["singer", "--q", "2"]);
        assert_eq!(code, 0);
        assert!(out.starts_with(r#"{"q":2,"m":7,"residues":["#));
        let (code, _, err) = call(&["singer", "--q", "6"]);
        assert_eq!(code, EXIT_DOMAIN);
        assert!(err.contains("not a prime power"));
        let (code, _, _) = call(&["singer"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = call(&["frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("singer"));
    }

    #[test]
    fn verify_command() {
        assert_eq!(
            call(&["verify", "--set", "0,1,3", "--q", "2"]),
            (0, "{\"valid\":true}\n".into(), String::new())
        );
        let (code, out, _) = call(&["verify", "--set", "0,1,2", "--q", "2"]);
        assert_eq!(code, EXIT_NEGATIVE);
        assert!(out.contains(r#""witness":{"kind":"repeated","difference":1,"count":2}"#));
        assert_eq!(
            call(&["verify", "--set", "0,1,4,14,16", "--modulus", "21"]).0,
            0
        );
        assert_eq!(
            call(&["verify", "--set", "0,1,3", "--modulus", "8"]).0,
            EXIT_DOMAIN
        );
        assert_eq!(call(&["verify", "--set", "0,1,3"]).0, EXIT_USAGE);
        assert_eq!(
            call(&["verify", "--set", "0,x,3", "--q", "2"]).0,
            EXIT_USAGE
        );
    }

    #[test]
    fn profile_from_pds_csv() {
        let (code, out, _) = call(&["profile", "--from-pds", "q=2"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "nu,abs,epsilon");
        assert_eq!(lines.len(), 7);
        for l in &lines[1..] {
            let abs: f64 = l.split(',').nth(1).unwrap().parse().unwrap();
            assert!((abs - 2f64.sqrt()).abs() < 1e-11);
        }
        assert_eq!(call(&["profile", "--from-pds", "q=6"]).0, EXIT_DOMAIN);
        assert_eq!(call(&["profile", "--from-pds", "two"]).0, EXIT_USAGE);
        assert_eq!(call(&["profile"]).0, EXIT_USAGE);
        assert_eq!(
            call(&["profile", "--random", "3", "--from-pds", "2"]).0,
            EXIT_USAGE
        );
    }

    #[test]
    fn random_profile_is_reproducible() {
        let a = call(&["profile", "--random", "4", "--seed", "17"]);
        let b = call(&["profile", "--random", "4", "--seed", "17"]);
        let c = call(&["profile", "--random", "4", "--seed", "18"]);
        assert_eq!(a, b);
        assert_ne!(a.1, c.1);
        assert_eq!(a.1.lines().count(), 13);
    }

    #[test]
    fn search_and_feasibility() {
        let (code, out, _) = call(&["search", "--order", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains(r#""result":"Found""#));
        let (code, out, _) = call(&["search", "--order", "6"]);
        assert_eq!(code, EXIT_NEGATIVE);
        assert!(out.contains("NoneExists"));
        let (code, out, _) = call(&["search", "--order", "20", "--budget", "10"]);
        assert_eq!(code, 0);
        assert!(out.contains("BudgetExceeded"));
        let (code, out, _) = call(&["feasibility", "--order", "6"]);
        assert_eq!(code, EXIT_NEGATIVE);
        assert!(out.contains(r#""verdict":"Excluded""#));
        let (code, out, _) = call(&["feasibility", "--order", "5"]);
        assert_eq!(code, 0);
        assert!(out.contains(r#""verdict":"Exists""#));
        let (code, out, _) = call(&["feasibility", "--order", "10"]);
        assert_eq!(code, 0);
        assert!(out.contains("OpenByTheseTests"));
        assert_eq!(call(&["feasibility", "--order", "0"]).0, EXIT_DOMAIN);
    }
}
