//! The `qcard` command line.
//!
//! Exit codes: `0` success, `1` I/O failure, `2` a reproduced value is out
//! of tolerance, `64` usage error. Machine formats (`json`, `csv`) print
//! every number with full round-trip precision; `text` rounds to ten
//! significant digits.

use std::f64::consts::{FRAC_PI_6, PI};
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::alice::{self, AliceAngle, AliceStrategy};
use crate::bob_collective::{
    self, success_combined, success_polynomial, CoefficientSet, GuessChoice,
};
use crate::bob_separate::{self, enumerate_sequential, SequentialProtocol};
use crate::engine::{self, Method, SimulationConfig, StrategyReport, StrategySpec};
use crate::tolerances;
use crate::QcardError;

pub const SCHEMA: &str = "qcard/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_BREACH: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "qcard", version, about = "Guessing strategies in the three-card quantum game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reproduce every headline value and check it against its closed form.
    Report(ReportArgs),
    /// Tabulate success probability (and entropy) over an angle range.
    Sweep(SweepArgs),
    /// Optimize one player's strategy.
    Optimize(OptimizeArgs),
    /// Monte Carlo estimate of a strategy's success probability.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ActorArg {
    Alice,
    BobSeparate,
    BobCollective,
    FullFrame,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChoiceArg {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    Ii,
    #[value(name = "III")]
    Iii,
}

impl ChoiceArg {
    fn choice(self) -> GuessChoice {
        match self {
            Self::I => GuessChoice::I,
            Self::Ii => GuessChoice::II,
            Self::Iii => GuessChoice::III,
        }
    }
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Restarts for the collective optimization included in the report.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    restarts: u32,
    #[arg(long, env = "QCARD_SEED", default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value_t = ActorArg::Alice)]
    actor: ActorArg,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    strategy: u8,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_angle, default_value = "-pi/6")]
    from: f64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_angle, default_value = "pi/6")]
    to: f64,
    #[arg(long, default_value_t = 61)]
    steps: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[arg(long, value_enum)]
    actor: ActorArg,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    strategy: u8,
    #[arg(long, value_enum, default_value_t = ChoiceArg::Iii)]
    choice: ChoiceArg,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
    restarts: u32,
    #[arg(long, env = "QCARD_SEED", default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    actor: ActorArg,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    strategy: u8,
    /// Alice's angle, or the first-card angle for bob-separate.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_angle, default_value = "pi/12")]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = ChoiceArg::Iii)]
    choice: ChoiceArg,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, env = "QCARD_SEED", default_value_t = 42)]
    seed: u64,
    /// Parallel streams; defaults to min(4, trials).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    shards: Option<u32>,
    #[command(flatten)]
    output: Output,
}

/// Parses radians, accepting `pi` multiples such as `pi/12`, `-pi/6`,
/// `2pi/3` or `3*pi/4`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let Some(at) = t.find("pi") else {
        return t
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("invalid angle {s:?}"));
    };
    let (head, tail) = (&t[..at], &t[at + 2..]);
    let head = head.trim_end_matches('*');
    let factor = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| format!("invalid angle {s:?}"))?,
    };
    let divisor = match tail {
        "" => 1.0,
        d => d
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .filter(|&d| d != 0.0 && d.is_finite())
            .ok_or_else(|| format!("invalid angle {s:?}"))?,
    };
    Ok(factor * PI / divisor)
}

/// Ten significant digits, for the text format.
fn sig10(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = 9 - magnitude;
    if (0..=12).contains(&decimals) {
        format!("{:.*}", decimals as usize, x)
    } else {
        format!("{x:.9e}")
    }
}

enum CliError {
    Usage(String),
    Io(io::Error),
}

impl From<QcardError> for CliError {
    fn from(e: QcardError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

/// A rendered command result: the JSON document plus a flat table for the
/// CSV and text formats.
struct Rendered {
    doc: Value,
    header: Vec<String>,
    rows: Vec<Vec<Value>>,
}

fn cell(v: &Value, text: bool) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if text && !n.is_i64() && !n.is_u64() => sig10(x),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn emit(r: &Rendered, output: &Output, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut buf: Vec<u8> = Vec::new();
    match output.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, &r.doc).map_err(io::Error::other)?;
            buf.push(b'\n');
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut buf);
            w.write_record(&r.header)?;
            for row in &r.rows {
                w.write_record(row.iter().map(|v| cell(v, false)))?;
            }
            w.flush()?;
        }
        Format::Text => {
            let widths: Vec<usize> = r
                .header
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    r.rows
                        .iter()
                        .map(|row| cell(&row[i], true).len())
                        .chain([h.len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: Vec<String>| -> String {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            writeln!(buf, "{}", line(r.header.clone()))?;
            for row in &r.rows {
                writeln!(buf, "{}", line(row.iter().map(|v| cell(v, true)).collect()))?;
            }
        }
    }
    match &output.out {
        Some(path) => File::create(path)?.write_all(&buf)?,
        None => stdout.write_all(&buf)?,
    }
    Ok(())
}

fn report(args: &ReportArgs) -> Result<(Rendered, Vec<String>), CliError> {
    let s3 = 3f64.sqrt();
    let p_alice_ref = (2.0 + s3) / 6.0;
    let p_comb_ref = (3.0 + 2f64.sqrt()) / 6.0;

    let a1 = alice::optimize_alice(AliceStrategy::Strategy1, 1e-3, 1e-12)?;
    let a2 = alice::optimize_alice(AliceStrategy::Strategy2, 1e-3, 1e-12)?;
    let (entropy_alpha, entropy_min) =
        alice::entropy_argmin(AliceStrategy::Strategy1, tolerances::ENTROPY_GRID)?;

    let formulas = bob_separate::closed_forms();
    let protocol = SequentialProtocol::standard();
    let p_sep_enum = enumerate_sequential(&protocol)?;

    let coeffs = CoefficientSet::known_optimum();
    let p_comb = success_combined(&coeffs, GuessChoice::III)?;
    let p_comb_poly = success_polynomial(&coeffs);
    let gram = bob_collective::build_basis(&coeffs)?.gram_residual;
    let opt = bob_collective::optimize_collective(GuessChoice::III, args.restarts as usize, args.seed)?;

    let eps = 4.0 * f64::EPSILON;
    let entries = vec![
        StrategyReport::new("p_alice", a1.probability, Method::Optimization, p_alice_ref,
            tolerances::ALICE_VALUE, json!({"strategy": 1, "alpha": a1.alpha})),
        StrategyReport::new("alpha_alice", a1.alpha, Method::Optimization, PI / 12.0,
            tolerances::ALICE_ANGLE, json!({"strategy": 1})),
        StrategyReport::new("p_alice_mirror", a2.probability, Method::Optimization, p_alice_ref,
            tolerances::ALICE_VALUE, json!({"strategy": 2, "alpha": a2.alpha})),
        StrategyReport::new("alpha_alice_mirror", a2.alpha, Method::Optimization, -PI / 12.0,
            tolerances::ALICE_ANGLE, json!({"strategy": 2})),
        StrategyReport::new("entropy_argmin", entropy_alpha, Method::Enumeration, PI / 12.0,
            tolerances::ENTROPY_ARGMIN, json!({"grid": tolerances::ENTROPY_GRID, "entropy": entropy_min})),
        StrategyReport::new("p_bob_p12", formulas.p12, Method::ClosedForm, (7.0 + 4.0 * s3) / 24.0,
            eps, json!({"p1": formulas.p1, "p2": formulas.p2})),
        StrategyReport::new("p_bob_p21", formulas.p21, Method::ClosedForm, (4.0 - s3) / 24.0,
            eps, json!({})),
        StrategyReport::new("p_bob_separate", formulas.p_sep, Method::ClosedForm,
            (11.0 + 3.0 * s3) / 24.0, eps, json!({})),
        StrategyReport::new("p_bob_separate_enumeration", p_sep_enum, Method::Enumeration,
            formulas.p_sep, tolerances::SEPARATE_GAP,
            json!({"first_alpha": PI / 12.0, "first_strategy": 1, "second": "helstrom",
                   "signed_difference": p_sep_enum - formulas.p_sep})),
        StrategyReport::new("p_bob_combined", p_comb, Method::Enumeration, p_comb_ref,
            tolerances::COLLECTIVE_VALUE, json!({"choice": "III", "coefficients": coeffs, "gram_residual": gram})),
        StrategyReport::new("p_bob_combined_polynomial", p_comb_poly, Method::ClosedForm, p_comb_ref,
            tolerances::COLLECTIVE_VALUE, json!({"choice": "III"})),
        StrategyReport::new("p_bob_combined_optimized", opt.probability, Method::Optimization,
            p_comb_ref, tolerances::OPTIMIZER,
            json!({"choice": "III", "restarts": args.restarts, "seed": args.seed,
                   "coefficients": opt.coefficients})),
    ];
    let dominance = a1.probability < p_sep_enum
        && a1.probability < formulas.p_sep
        && p_sep_enum < p_comb
        && formulas.p_sep < p_comb;

    let mut failures: Vec<String> = entries
        .iter()
        .filter(|e| !e.pass)
        .map(|e| format!("{}: {} vs {} (deviation {:e} > {:e})", e.name, e.value, e.reference, e.deviation, e.tolerance))
        .collect();
    if !dominance {
        failures.push("dominance: expected P_alice < P_separate < P_combined".into());
    }

    let doc = json!({
        "schema": SCHEMA,
        "command": "report",
        "p_alice": a1.probability,
        "alpha_alice": a1.alpha,
        "entropy_argmin": entropy_alpha,
        "p_bob_p12": formulas.p12,
        "p_bob_p21": formulas.p21,
        "p_bob_separate": formulas.p_sep,
        "p_bob_separate_enumeration": p_sep_enum,
        "p_bob_separate_difference": p_sep_enum - formulas.p_sep,
        "p_bob_combined": p_comb,
        "p_bob_combined_optimized": opt.probability,
        "dominance": dominance,
        "pass": failures.is_empty(),
        "entries": entries,
    });
    let header = ["name", "value", "method", "reference", "deviation", "tolerance", "pass"]
        .map(String::from)
        .to_vec();
    let mut rows: Vec<Vec<Value>> = entries
        .iter()
        .map(|e| {
            vec![
                json!(e.name),
                json!(e.value),
                serde_json::to_value(e.method).expect("enum"),
                json!(e.reference),
                json!(e.deviation),
                json!(e.tolerance),
                json!(e.pass),
            ]
        })
        .collect();
    rows.push(vec![json!("dominance"), json!(dominance), json!("comparison"),
        Value::Null, Value::Null, Value::Null, json!(dominance)]);
    Ok((Rendered { doc, header, rows }, failures))
}

fn sweep(args: &SweepArgs) -> Result<Rendered, CliError> {
    if args.steps < 2 {
        return Err(CliError::Usage(format!("--steps must be at least 2, got {}", args.steps)));
    }
    if args.from.is_nan() || args.to.is_nan() || args.from >= args.to {
        return Err(CliError::Usage(format!("empty range: --from {} --to {}", args.from, args.to)));
    }
    let limit = FRAC_PI_6 + 1e-12;
    if args.from < -limit || args.to > limit {
        return Err(CliError::Usage("angle range must lie within [-pi/6, pi/6]".into()));
    }
    let strategy = AliceStrategy::from_number(args.strategy)?;
    let grid: Vec<f64> = (0..args.steps)
        .map(|i| args.from + (args.to - args.from) * i as f64 / (args.steps - 1) as f64)
        .collect();
    let (header, rows, actor) = match args.actor {
        ActorArg::Alice => {
            let mut rows = Vec::with_capacity(grid.len());
            for &x in &grid {
                let a = AliceAngle::new(x)?;
                rows.push(vec![
                    json!(a.radians()),
                    json!(alice::success_probability(a, strategy)),
                    json!(alice::shannon_entropy(a, strategy)),
                    json!(strategy.in_domain(a)),
                ]);
            }
            (vec!["alpha", "probability", "entropy", "in_domain"], rows, "alice")
        }
        ActorArg::BobSeparate => {
            let mut rows = Vec::with_capacity(grid.len());
            for &x in &grid {
                let a = AliceAngle::new(x)?;
                let p = enumerate_sequential(&SequentialProtocol::with_first(a, strategy))?;
                rows.push(vec![json!(a.radians()), json!(p), json!(strategy.in_domain(a))]);
            }
            (vec!["alpha", "probability", "in_domain"], rows, "bob-separate")
        }
        other => {
            return Err(CliError::Usage(format!(
                "sweep supports --actor alice or bob-separate, not {other:?}"
            )))
        }
    };
    let header: Vec<String> = header.into_iter().map(String::from).collect();
    let objects: Vec<Value> = rows
        .iter()
        .map(|r| Value::Object(header.iter().cloned().zip(r.iter().cloned()).collect()))
        .collect();
    let doc = json!({
        "schema": SCHEMA,
        "command": "sweep",
        "actor": actor,
        "strategy": args.strategy,
        "rows": objects,
    });
    Ok(Rendered { doc, header, rows })
}

fn optimize(args: &OptimizeArgs) -> Result<Rendered, CliError> {
    let strategy = AliceStrategy::from_number(args.strategy)?;
    let (doc, header, rows) = match args.actor {
        ActorArg::Alice => {
            let o = alice::optimize_alice(strategy, 1e-3, 1e-12)?;
            let doc = json!({"schema": SCHEMA, "command": "optimize", "actor": "alice",
                "strategy": args.strategy, "alpha": o.alpha, "probability": o.probability,
                "grid_points": o.grid_points});
            (doc, vec!["actor", "strategy", "alpha", "probability"],
                vec![vec![json!("alice"), json!(args.strategy), json!(o.alpha), json!(o.probability)]])
        }
        ActorArg::BobSeparate => {
            let (alpha, p) = bob_separate::optimize_first_stage(strategy, 1e-12)?;
            let doc = json!({"schema": SCHEMA, "command": "optimize", "actor": "bob-separate",
                "strategy": args.strategy, "alpha": alpha, "probability": p});
            (doc, vec!["actor", "strategy", "alpha", "probability"],
                vec![vec![json!("bob-separate"), json!(args.strategy), json!(alpha), json!(p)]])
        }
        ActorArg::BobCollective => {
            let choice = args.choice.choice();
            let o = bob_collective::optimize_collective(choice, args.restarts as usize, args.seed)?;
            let c = o.coefficients;
            let doc = json!({"schema": SCHEMA, "command": "optimize", "actor": "bob-collective",
                "choice": choice.name(), "seed": args.seed, "probability": o.probability,
                "coefficients": c, "restarts": o.stats});
            let mut row = vec![json!("bob-collective"), json!(choice.name()), json!(o.probability)];
            row.extend(c.rows().iter().flatten().map(|x| json!(x)));
            row.extend([json!(o.stats.restarts), json!(o.stats.failed), json!(o.stats.best_restart)]);
            let mut header = vec!["actor", "choice", "probability"];
            header.extend(["a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4", "c1", "c2", "c3", "c4"]);
            header.extend(["restarts", "failed", "best_restart"]);
            (doc, header, vec![row])
        }
        ActorArg::FullFrame => {
            let o = bob_collective::optimize_full_frame(args.restarts as usize, args.seed)?;
            let guesses: Vec<u8> = o.guesses.iter().map(|l| l.value()).collect();
            let doc = json!({"schema": SCHEMA, "command": "optimize", "actor": "full-frame",
                "seed": args.seed, "probability": o.probability, "angles": o.angles,
                "frame": o.frame, "guesses": guesses, "restarts": o.stats});
            let mut row = vec![json!("full-frame"), json!(o.probability)];
            row.extend(o.angles.iter().map(|x| json!(x)));
            row.extend([json!(o.stats.restarts), json!(o.stats.failed), json!(o.stats.best_restart)]);
            (doc, vec!["actor", "probability", "t01", "t02", "t03", "t12", "t13", "t23",
                "restarts", "failed", "best_restart"], vec![row])
        }
    };
    Ok(Rendered { doc, header: header.into_iter().map(String::from).collect(), rows })
}

fn simulate(args: &SimulateArgs) -> Result<Rendered, CliError> {
    let strategy = AliceStrategy::from_number(args.strategy)?;
    let (spec, params) = match args.actor {
        ActorArg::Alice => (
            StrategySpec::Alice { alpha: AliceAngle::new(args.alpha)?, strategy },
            json!({"strategy": args.strategy, "alpha": args.alpha}),
        ),
        ActorArg::BobSeparate => (
            StrategySpec::BobSeparate(SequentialProtocol::with_first(AliceAngle::new(args.alpha)?, strategy)),
            json!({"strategy": args.strategy, "alpha": args.alpha, "second": "helstrom"}),
        ),
        ActorArg::BobCollective => (
            StrategySpec::bob_collective(&CoefficientSet::known_optimum(), args.choice.choice())?,
            json!({"choice": args.choice.choice().name(), "coefficients": CoefficientSet::known_optimum()}),
        ),
        ActorArg::FullFrame => {
            return Err(CliError::Usage("simulate supports alice, bob-separate or bob-collective".into()))
        }
    };
    let shards = args.shards.unwrap_or_else(|| args.trials.min(4) as u32);
    let config = SimulationConfig::new(args.trials, args.seed, shards)?;
    let r = engine::simulate(&spec, &config)?;
    let actor = serde_json::to_value(spec.actor()).expect("enum");
    let doc = json!({"schema": SCHEMA, "command": "simulate", "actor": actor,
        "parameters": params, "report": r});
    let header = ["actor", "trials", "seed", "shards", "successes", "estimate", "std_error",
        "exact_reference", "z_score"].map(String::from).to_vec();
    let rows = vec![vec![actor, json!(r.trials), json!(r.seed), json!(r.shards), json!(r.successes),
        json!(r.estimate), json!(r.std_error), json!(r.exact_reference), json!(r.z_score)]];
    Ok(Rendered { doc, header, rows })
}

/// Runs the CLI against explicit argument and output streams; returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == EXIT_OK { stdout } else { stderr };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    let mut failures = Vec::new();
    let result = match &cli.command {
        Command::Report(a) => report(a).and_then(|(r, f)| {
            failures = f;
            emit(&r, &a.output, stdout)
        }),
        Command::Sweep(a) => sweep(a).and_then(|r| emit(&r, &a.output, stdout)),
        Command::Optimize(a) => optimize(a).and_then(|r| emit(&r, &a.output, stdout)),
        Command::Simulate(a) => simulate(a).and_then(|r| emit(&r, &a.output, stdout)),
    };
    match result {
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_IO
        }
        Ok(()) if !failures.is_empty() => {
            for f in &failures {
                let _ = writeln!(stderr, "out of tolerance: {f}");
            }
            EXIT_BREACH
        }
        Ok(()) => EXIT_OK,
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_parsing() {
        assert_eq!(parse_angle("pi/12").unwrap(), PI / 12.0);
        assert_eq!(parse_angle("-pi/6").unwrap(), -PI / 6.0);
        assert_eq!(parse_angle("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("PI").unwrap(), PI);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("pie").is_err());
        assert!(parse_angle("abc").is_err());
    }

    #[test]
    fn ten_significant_digits() {
        assert_eq!(sig10(0.6220084679281462), "0.6220084679");
        assert_eq!(sig10(1.0 / 3.0), "0.3333333333");
        assert_eq!(sig10(12.5), "12.50000000");
        assert_eq!(sig10(0.0), "0");
        assert_eq!(sig10(1e-30), "1.000000000e-30");
        assert_eq!(sig10(1e-9), "1.000000000e-9");
    }

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("qcard").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, err) = run_capture(&["sweep", "--bogus"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(!err.is_empty());
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("report"));
    }
}
