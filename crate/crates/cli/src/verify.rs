//! Identity suites behind `antibracket verify`.

use std::io::Write;
use std::sync::Arc;

use clap::ValueEnum;
use serde::Serialize;

use antibracket::algebra::{
    bv_laplacian, odd_derivative_endo, random_element, random_endo, seeded_rng, Algebra, EndoOp, Parity,
};
use antibracket::antibrackets::{hierarchy_with, identity_hierarchy, inversion_check_with, jacobi_sum, linfinity_check, Method};
use antibracket::multiop::{MultiOp, Multiplications};
use antibracket::series::{
    exp_koszul_r_check, itlog, julia_check, shadrin_identity_check, stirling_derivative_check, TruncatedSeries,
};
use antibracket::universal::solve_coefficients;
use antibracket::Rational;

use crate::{emit_json, Config, Failure, Format, Outcome};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Jacobi,
    Universal,
    Inversion,
    Linf,
    Series,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    suite: &'static str,
    check: String,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

struct Report {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Report {
    fn new(suite: &'static str) -> Self {
        Report { suite, checks: Vec::new() }
    }

    fn push(&mut self, check: impl Into<String>, ok: bool, detail: Option<String>) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.checks.push(Check { suite: self.suite, check: check.into(), status, detail: if ok { None } else { detail } });
    }

    fn flag(&mut self, check: impl Into<String>, ok: bool) {
        self.push(check, ok, None);
    }

    /// Compares two operator tables; a failure records the first differing tuple.
    fn tables(&mut self, check: impl Into<String>, left: &MultiOp, right: &MultiOp) {
        let diff = left.first_difference(right);
        let detail = diff.as_ref().map(|(t, a, b)| format!("at {t}: {a} vs {b}"));
        self.push(check, diff.is_none(), detail);
    }

    fn skip(&mut self, check: impl Into<String>, why: &str) {
        self.checks.push(Check { suite: self.suite, check: check.into(), status: Status::Skip, detail: Some(why.into()) });
    }
}

struct Context {
    cfg: Config,
    alg: Arc<Algebra>,
    mults: Multiplications,
}

impl Context {
    fn commutative(&self) -> bool {
        self.alg.signature().commutative
    }

    /// The fast construction for the signature.
    fn method(&self) -> Method {
        if self.commutative() {
            Method::Akman
        } else {
            Method::Corollary
        }
    }
}

pub fn run(suite: Suite, cfg: &Config, out: &mut impl Write) -> Outcome {
    if cfg.n == 0 {
        return Err(Failure::Usage("--max-n must be at least 1".into()));
    }
    let alg = cfg.algebra()?;
    let ctx = Context { cfg: cfg.clone(), mults: Multiplications::new(&alg), alg };
    let suites: Vec<Suite> = match suite {
        Suite::All => vec![Suite::Series, Suite::Universal, Suite::Inversion, Suite::Jacobi, Suite::Linf],
        s => vec![s],
    };
    let mut checks = Vec::new();
    for s in suites {
        let report = match s {
            Suite::Jacobi => jacobi(&ctx),
            Suite::Universal => universal(&ctx),
            Suite::Inversion => inversion(&ctx),
            Suite::Linf => linf(&ctx),
            Suite::Series => series(),
            Suite::All => unreachable!(),
        }?;
        checks.extend(report.checks);
    }
    let passed = checks.iter().all(|c| c.status != Status::Fail);
    match cfg.format {
        Format::Plain => {
            for c in &checks {
                let tag = match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Skip => "SKIP",
                };
                match &c.detail {
                    Some(d) => writeln!(out, "{tag} {}: {} ({d})", c.suite, c.check).unwrap(),
                    None => writeln!(out, "{tag} {}: {}", c.suite, c.check).unwrap(),
                }
            }
            let n_pass = checks.iter().filter(|c| c.status == Status::Pass).count();
            writeln!(out, "{n_pass} of {} checks passed", checks.len()).unwrap();
        }
        Format::Csv => {
            writeln!(out, "suite,check,status,detail").unwrap();
            for c in &checks {
                let status = serde_json::to_value(c.status).unwrap();
                writeln!(out, "{},\"{}\",{},\"{}\"", c.suite, c.check, status.as_str().unwrap(), c.detail.as_deref().unwrap_or("")).unwrap();
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Summary<'a> {
                passed: bool,
                checks: &'a [Check],
            }
            emit_json(out, &Summary { passed, checks: &checks });
        }
    }
    match checks.iter().find(|c| c.status == Status::Fail) {
        None => Ok(()),
        Some(c) => Err(Failure::Failed(format!(
            "{}: {} failed{}",
            c.suite,
            c.check,
            c.detail.as_ref().map(|d| format!(" {d}")).unwrap_or_default()
        ))),
    }
}

fn operators(ctx: &Context) -> [(&'static str, EndoOp); 2] {
    [
        ("odd f", random_endo(&ctx.alg, ctx.cfg.seed, Parity::Odd)),
        ("even f", random_endo(&ctx.alg, ctx.cfg.seed.wrapping_add(1), Parity::Even)),
    ]
}

fn jacobi(ctx: &Context) -> Result<Report, Failure> {
    let mut r = Report::new("jacobi");
    let n_max = ctx.cfg.n;
    let seed = ctx.cfg.seed;
    let pairs = [
        ("odd f, even g", Parity::Odd, Parity::Even),
        ("odd f, odd g", Parity::Odd, Parity::Odd),
    ];
    for (k, (label, pf, pg)) in pairs.into_iter().enumerate() {
        let s = seed.wrapping_add(10 + 2 * k as u64);
        let f = random_endo(&ctx.alg, s, pf);
        let g = random_endo(&ctx.alg, s + 1, pg);
        let fg = f.supercommutator(&g)?;
        let hf = hierarchy_with(&f, n_max, ctx.method(), &ctx.mults)?;
        let hg = hierarchy_with(&g, n_max, ctx.method(), &ctx.mults)?;
        let hfg = hierarchy_with(&fg, n_max, ctx.method(), &ctx.mults)?;
        for n in 1..=n_max {
            r.tables(format!("{label}, n = {n}"), hfg.get(n), &jacobi_sum(&hf, &hg, n)?);
        }
    }
    Ok(r)
}

fn universal(ctx: &Context) -> Result<Report, Failure> {
    let mut r = Report::new("universal");
    let n_max = ctx.cfg.n;
    let methods: &[Method] = if ctx.commutative() { &Method::ALL } else { &[Method::Corollary, Method::Exponential] };
    for (label, f) in operators(ctx) {
        let hs = methods
            .iter()
            .map(|&m| hierarchy_with(&f, n_max, m, &ctx.mults))
            .collect::<Result<Vec<_>, _>>()?;
        for h in &hs[1..] {
            for n in 1..=n_max {
                r.tables(format!("{label}: {:?} = {:?}, n = {n}", h.method(), hs[0].method()), h.get(n), hs[0].get(n));
            }
        }
        if ctx.commutative() {
            for n in 1..n_max {
                let c = solve_coefficients(n)?;
                r.tables(format!("{label}: standard form of Phi^{}", n + 1), &c.apply(&f, &ctx.mults)?, hs[0].get(n + 1));
            }
        } else {
            r.skip(format!("{label}: standard form"), "commutative signatures only");
        }
    }
    let id = identity_hierarchy(&ctx.alg, n_max)?;
    for n in 0..n_max {
        let sign = if n % 2 == 0 { Rational::one() } else { -Rational::one() };
        r.tables(format!("Phi^{}_Id = (-1)^{n} mu_{n}", n + 1), id.get(n + 1), &ctx.mults.get(n).scale(&sign));
    }
    Ok(r)
}

fn inversion(ctx: &Context) -> Result<Report, Failure> {
    let mut r = Report::new("inversion");
    if !ctx.commutative() {
        r.skip("inversion formula", "commutative signatures only");
        return Ok(r);
    }
    let n_max = ctx.cfg.n;
    let mut rng = seeded_rng(ctx.cfg.seed.wrapping_add(100));
    for (label, f) in operators(ctx) {
        let h = hierarchy_with(&f, n_max, Method::Akman, &ctx.mults)?;
        for n in 1..=n_max {
            let args: Vec<_> = (0..n)
                .map(|k| random_element(&ctx.alg, &mut rng, if k % 2 == 0 { Parity::Odd } else { Parity::Even }))
                .collect();
            r.flag(format!("{label}, n = {n}"), inversion_check_with(&h, &args)?);
        }
    }
    Ok(r)
}

fn linf(ctx: &Context) -> Result<Report, Failure> {
    let mut r = Report::new("linf");
    let n_max = ctx.cfg.n;
    r.flag("Delta = 0", linfinity_check(&EndoOp::zero(&ctx.alg), n_max)?);
    if !ctx.commutative() {
        r.skip("odd derivations", "commutative signatures only");
        return Ok(r);
    }
    let sig = ctx.alg.signature();
    if sig.odd >= 1 && sig.unital {
        r.flag("Delta = d/dth1", linfinity_check(&odd_derivative_endo(&ctx.alg, 0)?, n_max)?);
    } else {
        r.skip("Delta = d/dth1", "needs an odd generator and a unit");
    }
    if sig.odd >= 1 && sig.even >= 1 && sig.unital {
        r.flag("Delta = BV Laplacian", linfinity_check(&bv_laplacian(&ctx.alg)?, n_max)?);
    } else {
        r.skip("Delta = BV Laplacian", "needs even and odd generators and a unit");
    }
    Ok(r)
}

fn series() -> Result<Report, Failure> {
    let mut r = Report::new("series");
    let a = itlog(&TruncatedSeries::exp_minus_one(20))?;
    r.flag("Julia equation for itlog(e^t - 1), order 20", julia_check(&a, 20)?);
    for d in 0..=6 {
        r.flag(format!("psi(a_{d}) = (e^t - 1)^{}/{}!, order 15", d + 1, d + 1), shadrin_identity_check(d, 15));
    }
    for d in 0..=4 {
        r.flag(format!("exp(sum K_n r_n) t_{d}, D = 10"), exp_koszul_r_check(d, 10)?);
    }
    let f = TruncatedSeries::from_fn(12, |k| Rational::new(if k % 3 == 0 { -1 } else { 2 }, k as i64 + 1));
    for n in 1..=4 {
        r.flag(format!("Stirling derivative identity, n = {n}"), stirling_derivative_check(&f, n, 12)?);
    }
    Ok(r)
}
