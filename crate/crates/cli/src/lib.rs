//! Command-line front end: argument parsing, dispatch and report rendering.
//!
//! [`run`] never panics on bad input; every outcome maps to an exit code:
//! 0 when all checks pass, 1 when a verification fails (the report is still
//! written), 2 on usage errors.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mirrorint::corpus::{self, Fault};
use mirrorint::json::document;
use mirrorint::landau::FactorialRatioSpec;
use mirrorint::mirror::{self, MirrorMaps, DEFAULT_ORDER, KNOWN_WOLSTENHOLME_PRIMES};
use mirrorint::padic::{self, ScanBounds};
use mirrorint::series::TruncatedSeries;
use mirrorint::{zhou, Error};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "MIRRORINT_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "mirrorint", version, about = "Exact integrality checks for mirror maps")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short = 'o', global = true, alias = "out")]
    pub output: Option<PathBuf>,
    /// Not supported: every computation is deterministic.
    #[arg(long, global = true, hide = true)]
    pub seed: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Landau function profile and case classification.
    Delta {
        #[arg(long)]
        spec: FactorialRatioSpec,
        /// Also evaluate the Landau function at this rational, e.g. 1/5.
        #[arg(long)]
        x: Option<String>,
    },
    /// Coefficients of F, G, G_L, z^-1 q or q_L.
    Series {
        #[arg(long)]
        spec: FactorialRatioSpec,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[arg(long, value_enum, default_value = "q")]
        which: Which,
        #[arg(long = "L")]
        l: Option<u64>,
    },
    /// Integrality of a root of z^-1 q or of q_L.
    Verify {
        #[arg(long)]
        spec: FactorialRatioSpec,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[arg(long, value_enum, default_value = "q")]
        target: VerifyTarget,
        #[arg(long = "L")]
        l: Option<u64>,
        /// Root exponent; defaults to D_L for q_L.
        #[arg(long)]
        root: Option<u64>,
    },
    /// Root exponents D_L next to the reference exponents.
    Exponents {
        #[arg(long)]
        spec: FactorialRatioSpec,
        /// Wolstenholme primes to assume, comma separated.
        #[arg(long, value_delimiter = ',')]
        wolstenholme: Option<Vec<u64>>,
    },
    /// p-adic predicates.
    Padic {
        #[command(subcommand)]
        action: PadicAction,
    },
    /// Unit-fraction decompositions and their root checks.
    Zhou {
        #[arg(long, default_value_t = 4)]
        n_max: u64,
        #[arg(long, default_value_t = 30)]
        order: usize,
    },
    /// Built-in regression corpus.
    Corpus {
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        /// Restrict to these entry keys, separated by ';'. Empty runs nothing.
        #[arg(long)]
        entries: Option<String>,
        /// Corrupt a root coefficient: KEY@INDEX sets it to 1/2.
        #[arg(long)]
        inject: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum PadicAction {
    /// Scan a membership predicate over a grid.
    Scan(ScanArgs),
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub spec: FactorialRatioSpec,
    /// Primes, comma separated; defaults to every prime <= 7.
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<u64>>,
    #[arg(long, value_enum)]
    pub what: ScanKind,
    /// Restrict to one L; defaults to every L in 1..=M.
    #[arg(long = "L")]
    pub l: Option<u64>,
    /// Grid bounds such as `K=10,s=2,m=10,j=15,a=3`.
    #[arg(long)]
    pub bounds: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanKind {
    Phi,
    S,
    Harmonic,
    /// Runs of fractional parts `{(a + m p^s)/p^l} >= 1/M`.
    #[value(name = "fraction-run")]
    FractionRun,
    /// `p H_(L(a+jp)) - H_(Lj) - sum 1/(Lj+i)` in `p Z_p`.
    #[value(name = "harmonic-shift")]
    HarmonicShift,
    /// `Phi` plus its harmonic correction in `p D_L Z_p`.
    #[value(name = "phi-correction")]
    PhiCorrection,
    Decomposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Which {
    #[value(name = "F")]
    #[serde(rename = "F")]
    F,
    #[value(name = "G")]
    #[serde(rename = "G")]
    G,
    #[value(name = "GL")]
    #[serde(rename = "GL")]
    Gl,
    #[value(name = "q")]
    #[serde(rename = "q")]
    Q,
    #[value(name = "qL")]
    #[serde(rename = "qL")]
    Ql,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum VerifyTarget {
    #[value(name = "q")]
    #[serde(rename = "q")]
    Q,
    #[value(name = "qL")]
    #[serde(rename = "qL")]
    Ql,
}

/// Usage errors abort before any report is produced.
#[derive(Debug)]
struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

impl From<io::Error> for Usage {
    fn from(e: io::Error) -> Self {
        Usage(format!("I/O error: {e}"))
    }
}

impl From<csv::Error> for Usage {
    fn from(e: csv::Error) -> Self {
        Usage(format!("CSV error: {e}"))
    }
}

type Outcome = Result<i32, Usage>;

/// Parses arguments; `Err` carries the exit code and the message clap produced.
pub fn parse_args<I, T>(args: I) -> Result<RunConfig, (i32, String)>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    RunConfig::try_parse_from(args).map_err(|e| {
        let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        (code, e.render().to_string())
    })
}

pub fn parse_spec(text: &str) -> mirrorint::Result<FactorialRatioSpec> {
    text.parse()
}

/// Worker count from `MIRRORINT_THREADS`, if set.
pub fn threads_from_env() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV} must be a positive integer, got {v:?}")),
        },
    }
}

/// Runs `config`, writing the report to `out` (or to `--output`).
pub fn run(config: &RunConfig, out: &mut dyn Write) -> i32 {
    let threads = match threads_from_env() {
        Ok(t) => t,
        Err(msg) => return usage(&msg),
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => return usage(&format!("cannot start worker pool: {e}")),
    };
    // Reports are assembled in memory so the worker pool never touches `out`.
    let mut buf = Vec::new();
    let code = match pool.install(|| dispatch(config, &mut buf)) {
        Ok(code) => code,
        Err(Usage(msg)) => return usage(&msg),
    };
    match out.write_all(&buf).and_then(|_| out.flush()) {
        Ok(()) => code,
        Err(e) => usage(&format!("cannot write report: {e}")),
    }
}

fn usage(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn dispatch(config: &RunConfig, out: &mut dyn Write) -> Outcome {
    if config.seed.is_some() {
        return Err(Usage("--seed is not accepted; all computations are deterministic".into()));
    }
    let mut file;
    let sink: &mut dyn Write = match &config.output {
        Some(path) => {
            file = File::create(path)
                .map_err(|e| Usage(format!("cannot create {}: {e}", path.display())))?;
            &mut file
        }
        None => out,
    };
    let fmt = config.format;
    match &config.command {
        Command::Delta { spec, x } => delta(spec, x.as_deref(), fmt, sink),
        Command::Series {
            spec,
            order,
            which,
            l,
        } => series(spec, *order, *which, *l, fmt, sink),
        Command::Verify {
            spec,
            order,
            target,
            l,
            root,
        } => verify(spec, *order, *target, *l, *root, fmt, sink),
        Command::Exponents { spec, wolstenholme } => exponents(spec, wolstenholme.as_deref(), fmt, sink),
        Command::Padic {
            action: PadicAction::Scan(args),
        } => scan(args, fmt, sink),
        Command::Zhou { n_max, order } => zhou_batch(*n_max, *order, fmt, sink),
        Command::Corpus {
            order,
            entries,
            inject,
        } => run_corpus(*order, entries.as_deref(), inject.as_deref(), fmt, sink),
    }
}

fn ensure_order(order: usize) -> Result<(), Usage> {
    if order == 0 {
        Err(Usage("--order must be >= 1".into()))
    } else {
        Ok(())
    }
}

fn no_csv(fmt: Format, command: &str) -> Result<(), Usage> {
    if fmt == Format::Csv {
        Err(Usage(format!("{command} has no CSV output; use json or text")))
    } else {
        Ok(())
    }
}

fn emit_json<T: Serialize>(sink: &mut dyn Write, command: &str, payload: &T) -> Result<(), Usage> {
    let doc = document(command, payload);
    serde_json::to_writer_pretty(&mut *sink, &doc).map_err(|e| Usage(e.to_string()))?;
    writeln!(sink)?;
    Ok(())
}

fn parse_rational(text: &str) -> Result<BigRational, Usage> {
    let bad = || Usage(format!("cannot parse {text:?} as a rational"));
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

fn delta(spec: &FactorialRatioSpec, x: Option<&str>, fmt: Format, sink: &mut dyn Write) -> Outcome {
    let profile = spec.profile();
    let class = spec.classify();
    let value = x.map(parse_rational).transpose()?.map(|x| {
        json!({
            "x": mirrorint::json::RationalRepr::from(&x),
            "delta": spec.delta_at(&x).to_string(),
        })
    });
    match fmt {
        Format::Json => emit_json(
            sink,
            "delta",
            &json!({
                "spec": spec,
                "m": spec.m(),
                "balanced": spec.is_balanced(),
                "disjoint": spec.is_disjoint(),
                "classification": class,
                "profile": profile,
                "value": value,
            }),
        )?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *sink);
            w.write_record(["num", "den", "value"])?;
            for (b, v) in profile.breakpoints.iter().zip(&profile.values) {
                w.write_record([b.numer().to_string(), b.denom().to_string(), v.to_string()])?;
            }
            w.flush()?;
        }
        Format::Text => {
            writeln!(sink, "spec {spec}  M = {}", spec.m())?;
            for (b, v) in profile.breakpoints.iter().zip(&profile.values) {
                writeln!(sink, "  [{b}, ...)  {v}")?;
            }
            writeln!(
                sink,
                "landau_integral {}  case_i {}",
                class.landau_integral, class.case_i
            )?;
            if let Some(w) = class.case_i_witnesses.first() {
                writeln!(sink, "first case (i) witness {w}")?;
            }
            if let Some(v) = value {
                writeln!(sink, "delta({}) = {}", x.unwrap_or_default(), v["delta"].as_str().unwrap_or(""))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn series(
    spec: &FactorialRatioSpec,
    order: usize,
    which: Which,
    l: Option<u64>,
    fmt: Format,
    sink: &mut dyn Write,
) -> Outcome {
    ensure_order(order)?;
    let maps = MirrorMaps::new(spec, order)?;
    let need_l = || l.ok_or_else(|| Usage("--L is required for GL and qL".into()));
    let s: TruncatedSeries = match which {
        Which::F => maps.f().clone(),
        Which::G => maps.g(),
        Which::Gl => maps.g_l(need_l()?)?,
        Which::Q => maps.q_reduced(),
        Which::Ql => maps.q_l(need_l()?)?,
    };
    match fmt {
        Format::Json => emit_json(
            sink,
            "series",
            &json!({
                "spec": spec,
                "which": which,
                "L": l.filter(|_| matches!(which, Which::Gl | Which::Ql)),
                "order": order,
                "coefficients": s,
            }),
        )?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *sink);
            w.write_record(["index", "num", "den"])?;
            for (i, c) in s.coeffs().iter().enumerate() {
                w.write_record([i.to_string(), c.numer().to_string(), c.denom().to_string()])?;
            }
            w.flush()?;
        }
        Format::Text => {
            for (i, c) in s.coeffs().iter().enumerate() {
                writeln!(sink, "{i}\t{c}")?;
            }
        }
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn verify(
    spec: &FactorialRatioSpec,
    order: usize,
    target: VerifyTarget,
    l: Option<u64>,
    root: Option<u64>,
    fmt: Format,
    sink: &mut dyn Write,
) -> Outcome {
    ensure_order(order)?;
    no_csv(fmt, "verify")?;
    spec.ensure_balanced()?;
    if root == Some(0) {
        return Err(Usage("--root must be >= 1".into()));
    }
    if let Some(l) = l {
        spec.ensure_l(l)?;
    }
    let class = spec.classify();
    if !class.case_i {
        let reason = match spec.ensure_case_i() {
            Err(e) => e.to_string(),
            Ok(_) => unreachable!("case (i) already ruled out"),
        };
        let payload = json!({
            "spec": spec,
            "verdict": "refused",
            "reason": reason,
            "classification": class,
        });
        match fmt {
            Format::Json => emit_json(sink, "verify", &payload)?,
            _ => writeln!(sink, "refused: {reason}")?,
        }
        return Ok(EXIT_FAILED);
    }
    let maps = MirrorMaps::new(spec, order)?;
    let mut checks = Vec::new();
    match (target, l) {
        (VerifyTarget::Q, _) => {
            let v = root.unwrap_or(1);
            let report = maps.q_reduced().vth_root(v)?.integrality();
            checks.push(json!({ "target": "q", "exponent": v, "report": report }));
        }
        (VerifyTarget::Ql, Some(l)) => {
            let v = match root {
                Some(v) => v,
                None => dl_u64(spec, l)?,
            };
            let report = maps.q_l(l)?.vth_root(v)?.integrality();
            checks.push(json!({ "target": format!("q_{l}"), "L": l, "exponent": v, "report": report }));
        }
        (VerifyTarget::Ql, None) => {
            for l in 1..=spec.m() {
                let v = match root {
                    Some(v) => v,
                    None => dl_u64(spec, l)?,
                };
                let report = maps.q_l(l)?.vth_root(v)?.integrality();
                checks.push(json!({ "target": format!("q_{l}"), "L": l, "exponent": v, "report": report }));
            }
        }
    }
    let all = checks.iter().all(|c| c["report"]["integral"] == Value::Bool(true));
    match fmt {
        Format::Json => emit_json(
            sink,
            "verify",
            &json!({
                "spec": spec,
                "order": order,
                "verdict": if all { "integral" } else { "not_integral" },
                "checks": checks,
            }),
        )?,
        _ => {
            for c in &checks {
                let r = &c["report"];
                writeln!(
                    sink,
                    "{}^(1/{}) through order {}: {}",
                    c["target"].as_str().unwrap_or(""),
                    c["exponent"],
                    order,
                    if r["integral"] == Value::Bool(true) {
                        "integral".to_string()
                    } else {
                        format!("not integral at index {}", r["first_bad_index"])
                    }
                )?;
            }
        }
    }
    Ok(if all { EXIT_OK } else { EXIT_FAILED })
}

fn dl_u64(spec: &FactorialRatioSpec, l: u64) -> Result<u64, Usage> {
    let d = spec.root_bound_dl(l)?;
    u64::try_from(&d).map_err(|_| Usage(format!("D_{l} = {d} does not fit in 64 bits")))
}

fn exponents(
    spec: &FactorialRatioSpec,
    wolstenholme: Option<&[u64]>,
    fmt: Format,
    sink: &mut dyn Write,
) -> Outcome {
    no_csv(fmt, "exponents")?;
    let w = wolstenholme.unwrap_or(&KNOWN_WOLSTENHOLME_PRIMES);
    let r = mirror::reference_exponents(spec, w)?;
    match fmt {
        Format::Json => emit_json(sink, "exponents", &json!({ "spec": spec, "exponents": r }))?,
        _ => {
            writeln!(sink, "L\tD_L\tTheta_L\tQ(1)/Theta_L")?;
            for e in &r.entries {
                let kr = e.kr_exponent.as_ref().map_or("-".to_string(), |k| k.to_string());
                writeln!(sink, "{}\t{}\t{}\t{}", e.l, e.d_l, e.theta_l, kr)?;
            }
            if let Some(x) = &r.xi {
                writeln!(sink, "Xi_{} = {}  root exponent {}", x.n, x.factor, x.root_exponent)?;
            }
            if let Some(o) = &r.omega {
                writeln!(sink, "Omega_{} = {}  root exponent {}", o.n, o.factor, o.root_exponent)?;
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parses `K=10,s=2,m=10,j=15,a=3` on top of the defaults.
pub fn parse_bounds(text: &str) -> Result<ScanBounds, String> {
    let mut b = ScanBounds::default();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("bound {part:?} is not KEY=VALUE"))?;
        let value: u64 = value
            .trim()
            .parse()
            .map_err(|_| format!("bound {part:?} needs a nonnegative integer"))?;
        match key.trim() {
            "K" | "k" => b.k_max = value,
            "s" => b.s_max = u32::try_from(value).map_err(|_| format!("s = {value} too large"))?,
            "m" => b.m_max = value,
            "j" => b.j_max = value,
            "a" => b.a_max = Some(value),
            other => return Err(format!("unknown bound {other:?}; expected K, s, m, j or a")),
        }
    }
    Ok(b)
}

fn scan(args: &ScanArgs, fmt: Format, sink: &mut dyn Write) -> Outcome {
    no_csv(fmt, "padic scan")?;
    let spec = &args.spec;
    let bounds = match &args.bounds {
        Some(text) => parse_bounds(text).map_err(Usage)?,
        None => ScanBounds::default(),
    };
    let primes = args.p.clone().unwrap_or_else(|| vec![2, 3, 5, 7]);
    for &p in &primes {
        padic::ensure_prime(p)?;
    }
    let ls: Vec<u64> = match args.l {
        Some(l) => {
            spec.ensure_l(l)?;
            vec![l]
        }
        None => (1..=spec.m()).collect(),
    };
    let what = args.what;
    let mut reports = Vec::new();
    let mut decompositions = Vec::new();
    for &p in &primes {
        match what {
            ScanKind::S => reports.push((None, padic::s_membership_scan(spec, p, &bounds)?)),
            ScanKind::FractionRun => reports.push((
                None,
                padic::fraction_run_scan(spec.m(), p, bounds.s_max.max(1), bounds.m_max)?,
            )),
            ScanKind::Decomposition => {
                for &l in &ls {
                    decompositions.push(padic::decomposition_scan(spec, l, p, &bounds)?);
                }
            }
            _ => {
                for &l in &ls {
                    let r = match what {
                        ScanKind::Phi => padic::phi_membership_scan(spec, l, p, &bounds)?,
                        ScanKind::Harmonic => padic::harmonic_block_scan(spec, l, p, &bounds)?,
                        ScanKind::HarmonicShift => padic::harmonic_shift_scan(spec, l, p, &bounds)?,
                        ScanKind::PhiCorrection => padic::phi_correction_scan(spec, l, p, &bounds)?,
                        _ => unreachable!("handled above"),
                    };
                    reports.push((Some(l), r));
                }
            }
        }
    }
    let all = reports.iter().all(|(_, r)| r.member) && decompositions.iter().all(|d| d.all_equal);
    match fmt {
        Format::Json => {
            let items: Vec<Value> = if what == ScanKind::Decomposition {
                decompositions.iter().map(|d| json!(d)).collect()
            } else {
                reports
                    .iter()
                    .map(|(l, r)| {
                        let mut v = json!(r);
                        v["L"] = json!(l);
                        v
                    })
                    .collect()
            };
            emit_json(
                sink,
                "padic",
                &json!({
                    "spec": spec,
                    "what": what.to_possible_value().map(|v| v.get_name().to_string()),
                    "bounds": bounds,
                    "all_member": all,
                    "reports": items,
                }),
            )?
        }
        _ => {
            for (l, r) in &reports {
                writeln!(
                    sink,
                    "p={} L={} {}: v = {} (need {}) at {:?} over {} points",
                    r.prime,
                    l.map_or("-".to_string(), |l| l.to_string()),
                    if r.member { "member" } else { "VIOLATION" },
                    r.actual_valuation,
                    r.required_valuation,
                    r.witness.as_deref().unwrap_or(&[]),
                    r.points_checked
                )?;
            }
            for d in &decompositions {
                writeln!(
                    sink,
                    "p={} L={} decomposition {} over {} points",
                    d.prime,
                    d.l,
                    if d.all_equal { "exact" } else { "MISMATCH" },
                    d.points_checked
                )?;
            }
        }
    }
    Ok(if all { EXIT_OK } else { EXIT_FAILED })
}

fn join(xs: &[u64], sep: &str) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(sep)
}

fn zhou_batch(n_max: u64, order: usize, fmt: Format, sink: &mut dyn Write) -> Outcome {
    ensure_order(order)?;
    if n_max == 0 {
        return Err(Usage("--n-max must be >= 1".into()));
    }
    let b = zhou::batch(n_max, order)?;
    match fmt {
        Format::Json => emit_json(sink, "zhou", &b)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *sink);
            w.write_record(["ks", "k", "ws", "disjoint", "case_i", "exponent", "order", "integral", "first_bad_index"])?;
            for r in &b.rows {
                w.write_record([
                    join(&r.ks, " "),
                    r.k.to_string(),
                    join(&r.ws, " "),
                    r.disjoint.to_string(),
                    r.case_i.to_string(),
                    r.exponent.to_string(),
                    r.order.to_string(),
                    r.integral.to_string(),
                    r.first_bad_index.map_or(String::new(), |i| i.to_string()),
                ])?;
            }
            w.flush()?;
        }
        Format::Text => {
            for r in &b.rows {
                writeln!(
                    sink,
                    "({})  k={}  {}{}",
                    join(&r.ks, ","),
                    r.k,
                    if r.passed() { "pass" } else { "FAIL" },
                    if r.disjoint { "" } else { "  (e and f overlap)" }
                )?;
            }
            writeln!(sink, "{} of {} passed", b.passed, b.instances)?;
        }
    }
    Ok(if b.all_passed() { EXIT_OK } else { EXIT_FAILED })
}

fn parse_fault(text: &str) -> Result<Fault, Usage> {
    let (key, index) = text
        .rsplit_once('@')
        .ok_or_else(|| Usage(format!("--inject expects KEY@INDEX, got {text:?}")))?;
    let index = index
        .parse()
        .map_err(|_| Usage(format!("bad coefficient index in {text:?}")))?;
    Ok(Fault {
        key: key.to_string(),
        index,
        value: BigRational::new(1.into(), 2.into()),
    })
}

fn run_corpus(
    order: usize,
    entries: Option<&str>,
    inject: Option<&str>,
    fmt: Format,
    sink: &mut dyn Write,
) -> Outcome {
    ensure_order(order)?;
    let mut selected = corpus::builtin();
    if let Some(list) = entries {
        let keys: Vec<&str> = list.split(';').map(str::trim).filter(|k| !k.is_empty()).collect();
        if let Some(missing) = keys.iter().find(|k| !selected.iter().any(|e| e.key == **k)) {
            return Err(Usage(format!("unknown corpus entry {missing:?}")));
        }
        selected.retain(|e| keys.contains(&e.key.as_str()));
    }
    let fault = inject.map(parse_fault).transpose()?;
    let summary = corpus::run(&selected, order, fault.as_ref())?;
    match fmt {
        Format::Json => emit_json(sink, "corpus", &summary)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *sink);
            w.write_record(["key", "check", "passed", "witness"])?;
            for r in &summary.results {
                for c in &r.checks {
                    w.write_record([
                        r.key.as_str(),
                        c.name.as_str(),
                        if c.passed { "true" } else { "false" },
                        c.witness.as_deref().unwrap_or(""),
                    ])?;
                }
            }
            w.flush()?;
        }
        Format::Text => {
            for r in &summary.results {
                let marks: Vec<String> = r
                    .checks
                    .iter()
                    .map(|c| format!("{}:{}", c.name, if c.passed { "ok" } else { "FAIL" }))
                    .collect();
                writeln!(sink, "{:<16} {}  {}", r.key, if r.passed { "pass" } else { "FAIL" }, marks.join(" "))?;
            }
            writeln!(sink, "{} of {} entries passed", summary.passed, summary.entries)?;
        }
    }
    Ok(if summary.all_passed() { EXIT_OK } else { EXIT_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_parse() {
        let b = parse_bounds("K=4, s=1,a=2").unwrap();
        assert_eq!((b.k_max, b.s_max, b.a_max, b.m_max), (4, 1, Some(2), 10));
        assert!(parse_bounds("q=1").is_err());
        assert!(parse_bounds("K").is_err());
        assert_eq!(parse_bounds("").unwrap(), ScanBounds::default());
    }

    #[test]
    fn rationals_parse() {
        assert_eq!(parse_rational("2/10").unwrap(), BigRational::new(1.into(), 5.into()));
        assert_eq!(parse_rational("-3").unwrap(), BigRational::from_integer((-3).into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn seed_is_rejected() {
        let cfg = parse_args(["mirrorint", "delta", "--spec", "6/3,2,1", "--seed", "1"]).unwrap();
        let mut out = Vec::new();
        assert_eq!(run(&cfg, &mut out), EXIT_USAGE);
        assert!(out.is_empty());
    }

    #[test]
    fn zero_entry_is_a_usage_error() {
        let err = parse_args(["mirrorint", "delta", "--spec", "6/0,2"]).unwrap_err();
        assert_eq!(err.0, EXIT_USAGE);
    }

    #[test]
    fn fault_syntax() {
        let f = parse_fault("2/1,1@4").unwrap();
        assert_eq!((f.key.as_str(), f.index), ("2/1,1", 4));
        assert!(parse_fault("2/1,1").is_err());
    }
}
