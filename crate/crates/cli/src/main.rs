//! `antibracket`: tables, identity suites and the closed-formula check.

mod verify;

use std::io::Write;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use antibracket::algebra::{random_endo, Algebra, Parity, Signature};
use antibracket::antibrackets::{default_method, hierarchy, Method};
use antibracket::combinatorics::{factorial_q, koszul_numbers_chain, koszul_numbers_recursive};
use antibracket::series::koszul_numbers_itlog;
use antibracket::universal::{conjecture_coefficients, conjecture_report, solve_coefficients};
use antibracket::{Error, Rational};

#[derive(Parser, Debug)]
#[command(name = "antibracket", version, about = "Exact higher antibrackets on free superalgebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: Config,
}

#[derive(Args, Debug, Clone)]
pub struct Config {
    /// Number of even generators.
    #[arg(long = "even", global = true, default_value_t = 2)]
    pub p: usize,
    /// Number of odd generators.
    #[arg(long = "odd", global = true, default_value_t = 2)]
    pub q: usize,
    /// Truncation degree of the algebra.
    #[arg(long = "degree", global = true, default_value_t = 5)]
    pub d: usize,
    /// Largest arity or table index.
    #[arg(long = "max-n", global = true, default_value_t = 5)]
    pub n: usize,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    /// Free associative instead of free graded commutative algebra.
    #[arg(long, global = true)]
    pub noncommutative: bool,
    /// Drop the unit from the algebra.
    #[arg(long = "non-unital", global = true)]
    pub non_unital: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// K_n and n! K_n, from three independent routes.
    KoszulNumbers,
    /// The table of x_i^n = (-1)^n n! c_i^n for 2 <= n <= N.
    Coefficients,
    /// Run an identity suite; exit status 1 on the first failing check.
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
    },
    /// Solver against the closed formula for 2 <= n <= N. Mismatches are reported, not failures.
    Conjecture,
    /// Print the brackets Phi^1..Phi^N of a seeded random operator.
    Hierarchy {
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Parity of the random operator.
        #[arg(long, value_enum, default_value_t = ParityArg::Odd)]
        parity: ParityArg,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum MethodArg {
    Direct,
    Akman,
    Corollary,
    Exponential,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Direct => Method::Direct,
            MethodArg::Akman => Method::Akman,
            MethodArg::Corollary => Method::Corollary,
            MethodArg::Exponential => Method::Exponential,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
}

/// Outcome of a command: `Usage` maps to exit code 2, `Failed` to 1.
pub enum Failure {
    Usage(String),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

pub type Outcome = Result<(), Failure>;

impl Config {
    pub fn signature(&self) -> Signature {
        let sig = if self.noncommutative {
            Signature::noncommutative(self.p, self.q, self.d)
        } else {
            Signature::commutative(self.p, self.q, self.d)
        };
        if self.non_unital {
            sig.non_unital()
        } else {
            sig
        }
    }

    pub fn algebra(&self) -> Result<Arc<Algebra>, Failure> {
        Ok(Algebra::new(self.signature())?)
    }
}

pub fn emit_json<T: Serialize>(out: &mut impl Write, value: &T) {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    writeln!(out, "{text}").expect("stdout");
}

fn join(v: &[Rational]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn koszul_numbers(cfg: &Config, out: &mut impl Write) -> Outcome {
    let n = cfg.n;
    if n == 0 {
        return Err(Failure::Usage("--max-n must be at least 1".into()));
    }
    let rec = koszul_numbers_recursive(n);
    for (name, other) in [("chain", koszul_numbers_chain(n)), ("itlog", koszul_numbers_itlog(n))] {
        if let Some(i) = rec.first_mismatch(&other) {
            return Err(Failure::Failed(format!("recursive and {name} routes disagree first at n = {i}")));
        }
    }
    #[derive(Serialize)]
    struct Row {
        n: usize,
        k: Rational,
        scaled: Rational,
    }
    let rows: Vec<Row> =
        (1..=n).map(|i| Row { n: i, k: rec.get(i).clone(), scaled: rec.get(i) * &factorial_q(i as u64) }).collect();
    match cfg.format {
        Format::Plain => {
            for r in &rows {
                writeln!(out, "{}  {}  {}", r.n, r.k, r.scaled).unwrap();
            }
        }
        Format::Csv => {
            writeln!(out, "n,k,scaled").unwrap();
            for r in &rows {
                writeln!(out, "{},{},{}", r.n, r.k, r.scaled).unwrap();
            }
        }
        Format::Json => emit_json(out, &rows),
    }
    Ok(())
}

fn coefficients(cfg: &Config, out: &mut impl Write) -> Outcome {
    if cfg.n < 2 {
        return Err(Failure::Usage("--max-n must be at least 2".into()));
    }
    #[derive(Serialize)]
    struct Row {
        n: usize,
        x: Vec<Rational>,
        b: Rational,
        #[serde(rename = "match")]
        matches: bool,
    }
    let mut rows = Vec::new();
    for n in 2..=cfg.n {
        let sol = solve_coefficients(n).map_err(|e| Failure::Failed(format!("n = {n}: {e}")))?;
        if !sol.b_is_zero() {
            return Err(Failure::Failed(format!("n = {n}: b_n = {} is not zero", sol.b)));
        }
        let matches = conjecture_coefficients(n).map(|c| c == sol.c).unwrap_or(false);
        rows.push(Row { n, x: sol.scaled(), b: sol.b.clone(), matches });
    }
    let tag = |m: bool| if m { "match" } else { "MISMATCH" };
    match cfg.format {
        Format::Plain => {
            for r in &rows {
                writeln!(out, "{}  {}  {}", r.n, join(&r.x), tag(r.matches)).unwrap();
            }
        }
        Format::Csv => {
            writeln!(out, "n,i,x,conjecture").unwrap();
            for r in &rows {
                for (i, x) in r.x.iter().enumerate() {
                    writeln!(out, "{},{},{},{}", r.n, i + 1, x, tag(r.matches)).unwrap();
                }
            }
        }
        Format::Json => emit_json(out, &rows),
    }
    Ok(())
}

fn conjecture(cfg: &Config, out: &mut impl Write) -> Outcome {
    if cfg.n < 2 {
        return Err(Failure::Usage("--max-n must be at least 2".into()));
    }
    let mut reports = Vec::new();
    for n in 2..=cfg.n {
        reports.push(conjecture_report(n).map_err(|e| Failure::Failed(format!("n = {n}: {e}")))?);
    }
    match cfg.format {
        Format::Plain => {
            for r in &reports {
                writeln!(
                    out,
                    "n = {}: {}  positive: {}  b_n = 0: {}",
                    r.n,
                    if r.matches { "match" } else { "MISMATCH" },
                    r.positive,
                    r.bn_zero
                )
                .unwrap();
                writeln!(out, "  solved:      {}", join(&r.solved)).unwrap();
                writeln!(out, "  conjectured: {}", join(&r.conjectured)).unwrap();
            }
        }
        Format::Csv => {
            writeln!(out, "n,i,solved,conjectured,match,positive,bn_zero").unwrap();
            for r in &reports {
                for (i, (s, c)) in r.solved.iter().zip(&r.conjectured).enumerate() {
                    writeln!(out, "{},{},{},{},{},{},{}", r.n, i + 1, s, c, r.matches, r.positive, r.bn_zero).unwrap();
                }
            }
        }
        Format::Json => emit_json(out, &reports),
    }
    Ok(())
}

fn dump_hierarchy(cfg: &Config, method: Option<MethodArg>, parity: ParityArg, out: &mut impl Write) -> Outcome {
    if cfg.n == 0 {
        return Err(Failure::Usage("--max-n must be at least 1".into()));
    }
    let alg = cfg.algebra()?;
    let method = method.map(Method::from).unwrap_or_else(|| default_method(&alg));
    if method.needs_commutative() && cfg.noncommutative {
        return Err(Failure::Usage(format!("method {method:?} needs a commutative signature")));
    }
    let parity = match parity {
        ParityArg::Even => Parity::Even,
        ParityArg::Odd => Parity::Odd,
    };
    let f = random_endo(&alg, cfg.seed, parity);
    let h = hierarchy(&f, cfg.n, method)?;
    match cfg.format {
        Format::Plain => {
            for (k, op) in h.brackets().iter().enumerate() {
                writeln!(out, "Phi^{} ({} entries)", k + 1, op.len()).unwrap();
                for line in op.dump_lines() {
                    writeln!(out, "  {line}").unwrap();
                }
            }
        }
        Format::Csv => {
            writeln!(out, "n,tuple,value").unwrap();
            for (k, op) in h.brackets().iter().enumerate() {
                for line in op.dump_lines() {
                    let (t, v) = line.split_once(" -> ").expect("dump line");
                    writeln!(out, "{},\"{}\",\"{}\"", k + 1, t, v).unwrap();
                }
            }
        }
        Format::Json => emit_json(out, &h.dump()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    antibracket::exec::init_workers();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let cfg = &cli.config;
    let result = match &cli.command {
        Command::KoszulNumbers => koszul_numbers(cfg, &mut out),
        Command::Coefficients => coefficients(cfg, &mut out),
        Command::Verify { suite } => verify::run(*suite, cfg, &mut out),
        Command::Conjecture => conjecture(cfg, &mut out),
        Command::Hierarchy { method, parity } => dump_hierarchy(cfg, *method, *parity, &mut out),
    };
    out.flush().ok();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Failed(msg)) => {
            eprintln!("antibracket: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("antibracket: {msg}");
            ExitCode::from(2)
        }
    }
}
