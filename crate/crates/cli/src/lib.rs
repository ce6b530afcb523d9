//! Command-line front end for the qtqft engine.
//!
//! [`run`] parses an argument vector, dispatches one subcommand and returns
//! the process exit status: 0 on success, 1 for argument errors, 2 when an
//! integrity check fails.

pub mod cache;
pub mod check;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use qtqft_core::spectrum::{
    closed_invariant_spectral, coupling_a, holla_spectral, spectral_points, vand, verlinde_sine, ComplexJson,
};
use qtqft_core::tqft::DEFAULT_MAX_ENTRIES;
use qtqft_core::{BoxContext, LaurentInt, Partition, QClass, QuantumRing, TqftTensor, WeightedTqft};
use serde_json::{json, Value};

use crate::check::{run_suite, Suite};

/// Relative tolerance when an exact count is compared with its spectral formula.
const RECONCILE_TOL: f64 = 1e-4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Core(#[from] qtqft_core::Error),
    #[error("integrity check failed: {0}")]
    Integrity(String),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_integrity() => 2,
            CliError::Integrity(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qtqft", version, about = "Quantum cohomology of Grassmannians and its weighted TQFT")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    /// Number of rows of the box (Gr(r, r+s)).
    #[arg(long, global = true, default_value_t = 2)]
    pub r: usize,
    /// Number of columns of the box.
    #[arg(long, global = true, default_value_t = 2)]
    pub s: usize,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Evaluate every Laurent polynomial at q = 1.
    #[arg(long = "q-at-one", global = true)]
    pub q_at_one: bool,
    /// Directory for the structure-constant cache.
    #[arg(long = "cache-dir", global = true, env = "QTQFT_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Refuse to build tensors with more entries than this.
    #[arg(long = "max-entries", global = true, default_value_t = DEFAULT_MAX_ENTRIES)]
    pub max_entries: u128,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantum product σ_A * σ_B.
    Product { a: String, b: String },
    /// Poincaré pairing of σ_A and σ_B.
    Pair { a: String, b: String },
    /// Genus-g, degree-d integral of the given insertions.
    #[command(allow_negative_numbers = true)]
    Gw { g: u32, d: i64, insertions: Vec<String> },
    /// The tensor of the surface with genus g, degree d, m inputs, n outputs.
    #[command(allow_negative_numbers = true)]
    Tensor { g: u32, d: i64, m: usize, n: usize },
    /// Verlinde number at genus g.
    Verlinde { g: u32 },
    /// Holla point count at genus g for the given gamma.
    Holla { g: u32, gamma: usize },
    /// Closed invariant of genus g and degree d.
    #[command(allow_negative_numbers = true)]
    Closed { g: u32, d: i64 },
    /// η class of genus g and degree d on N slots.
    #[command(allow_negative_numbers = true)]
    Eta { g: u32, d: i64, n: usize },
    /// Spectral points with their Vandermonde factors and couplings.
    Spectrum,
    /// Run the invariant self-checks.
    Check {
        #[arg(long, value_enum, default_value_t = Suite::Fast)]
        suite: Suite,
    },
}

/// Parses `"2,1"`, `"(2,1)"` or `"2 1"`; short input is padded with zeros.
pub fn parse_partition(ctx: BoxContext, text: &str) -> Result<Partition, CliError> {
    let body = text.trim().trim_start_matches('(').trim_end_matches(')');
    let parts = body
        .split(|ch: char| ch == ',' || ch.is_whitespace())
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Usage(format!("invalid partition syntax {text:?}: expected comma-separated integers")))?;
    Ok(Partition::from_loose(ctx, &parts)?)
}

struct Session {
    ctx: BoxContext,
    json: bool,
    q_at_one: bool,
    cache_dir: Option<PathBuf>,
    max_entries: u128,
    warnings: Vec<String>,
}

impl Session {
    fn tqft(&mut self) -> WeightedTqft {
        let ring = match &self.cache_dir {
            Some(dir) => {
                let warnings = &mut self.warnings;
                QuantumRing::with_table(cache::load_or_build(self.ctx, dir, &mut |w| warnings.push(w)))
            }
            None => QuantumRing::new(self.ctx),
        };
        WeightedTqft::with_ring(Arc::new(ring)).with_max_entries(self.max_entries)
    }

    fn laurent(&self, v: &LaurentInt) -> Value {
        if self.q_at_one {
            Value::String(v.at_one().to_string())
        } else {
            serde_json::to_value(v).expect("Laurent polynomials serialize")
        }
    }

    fn laurent_text(&self, v: &LaurentInt) -> String {
        if self.q_at_one {
            v.at_one().to_string()
        } else {
            v.to_string()
        }
    }

    fn class(&self, x: &QClass) -> Value {
        if self.q_at_one {
            let records: Vec<Value> =
                x.at_one().iter().map(|(p, c)| json!({ "partition": p, "coeff": c.to_string() })).collect();
            Value::Array(records)
        } else {
            serde_json::to_value(x).expect("classes serialize")
        }
    }

    fn class_text(&self, x: &QClass) -> String {
        if !self.q_at_one {
            return x.to_string();
        }
        let terms: Vec<String> = x
            .at_one()
            .iter()
            .map(|(p, c)| if *c == BigInt::from(1) { format!("s{p}") } else { format!("{c}*s{p}") })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    fn tensor(&self, t: &TqftTensor) -> Value {
        if !self.q_at_one {
            return serde_json::to_value(t).expect("tensors serialize");
        }
        let entries: Vec<Value> = t
            .at_one()
            .iter()
            .map(|(k, v)| json!({ "in": k.inputs, "out": k.outputs, "value": v.to_string() }))
            .collect();
        json!({ "signature": t.signature(), "entries": entries })
    }

    fn tensor_text(&self, t: &TqftTensor) -> String {
        let mut lines = vec![format!("{} ({} nonzero entries)", t.signature(), t.entries().len())];
        for (k, v) in t.entries() {
            let show = |ps: &[Partition]| ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ");
            lines.push(format!("[{}] -> [{}]: {}", show(&k.inputs), show(&k.outputs), self.laurent_text(v)));
        }
        lines.join("\n")
    }

    fn header(&self) -> BTreeMap<&'static str, Value> {
        BTreeMap::from([("r", json!(self.ctx.r())), ("s", json!(self.ctx.s()))])
    }
}

/// Text and JSON renderings of one command's result.
struct Output {
    text: String,
    json: Value,
    /// Set when the command computed something but an integrity check failed.
    integrity: Option<String>,
}

fn relative(exact: &BigInt, approx: f64) -> f64 {
    let e = exact.to_f64().unwrap_or(f64::INFINITY);
    (e - approx).abs() / e.abs().max(1.0)
}

fn reconcile(what: String, exact: &BigInt, spectral: f64) -> Option<String> {
    let dev = relative(exact, spectral);
    (dev.is_nan() || dev >= RECONCILE_TOL).then(|| format!("{what}: exact {exact} vs spectral {spectral}"))
}

fn with_header(session: &Session, fields: Value) -> Value {
    let mut map: serde_json::Map<String, Value> =
        session.header().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    if let Value::Object(extra) = fields {
        map.extend(extra);
    }
    Value::Object(map)
}

fn dispatch(session: &mut Session, command: &Command) -> Result<Output, CliError> {
    let ctx = session.ctx;
    let plain = |text: String, json: Value| Output { text, json, integrity: None };
    Ok(match command {
        Command::Product { a, b } => {
            let (pa, pb) = (parse_partition(ctx, a)?, parse_partition(ctx, b)?);
            let tqft = session.tqft();
            let prod = tqft.ring().basis_product(&pa, &pb)?;
            plain(session.class_text(&prod), json!({ "a": pa, "b": pb, "product": session.class(&prod) }))
        }
        Command::Pair { a, b } => {
            let (pa, pb) = (parse_partition(ctx, a)?, parse_partition(ctx, b)?);
            let tqft = session.tqft();
            let v = tqft.ring().poincare_pair(&QClass::basis(ctx, pa.clone()), &QClass::basis(ctx, pb.clone()))?;
            plain(session.laurent_text(&v), json!({ "a": pa, "b": pb, "pairing": session.laurent(&v) }))
        }
        Command::Gw { g, d, insertions } => {
            let parts = insertions.iter().map(|p| parse_partition(ctx, p)).collect::<Result<Vec<_>, _>>()?;
            let v = session.tqft().integrate(*g, *d, &parts)?;
            plain(
                session.laurent_text(&v),
                json!({ "g": g, "d": d, "insertions": parts, "value": session.laurent(&v) }),
            )
        }
        Command::Tensor { g, d, m, n } => {
            let t = session.tqft().weighted_map(*g, *d, *m, *n)?;
            plain(session.tensor_text(&t), json!({ "tensor": session.tensor(&t) }))
        }
        Command::Eta { g, d, n } => {
            let t = session.tqft().eta_class(*g, *d, *n)?;
            plain(session.tensor_text(&t), json!({ "eta": session.tensor(&t) }))
        }
        Command::Verlinde { g } => {
            if *g == 0 {
                return Err(CliError::Usage("verlinde: genus must be at least 1".into()));
            }
            let exact = session.tqft().verlinde_exact(*g)?;
            let spectral = verlinde_sine(ctx, *g);
            Output {
                text: exact.to_string(),
                json: json!({ "g": g, "verlinde": exact.to_string(), "spectral": spectral }),
                integrity: reconcile(format!("Verlinde number at g={g}"), &exact, spectral),
            }
        }
        Command::Holla { g, gamma } => {
            let spectral = holla_spectral(ctx, *g, *gamma)?;
            let exact = session.tqft().holla_exact(*g, *gamma)?;
            Output {
                text: exact.to_string(),
                json: json!({ "g": g, "gamma": gamma, "count": exact.to_string(), "spectral": spectral }),
                integrity: reconcile(format!("Holla count at g={g}, gamma={gamma}"), &exact, spectral),
            }
        }
        Command::Closed { g, d } => {
            let tqft = session.tqft();
            let value = tqft.integrate(*g, *d, &[])?;
            let count = tqft.finite_count(*g, *d)?;
            let spectral = closed_invariant_spectral(ctx, *g, *d);
            let exact = value.at_one();
            let dev = (spectral.re - exact.to_f64().unwrap_or(f64::INFINITY)).abs().max(spectral.im.abs())
                / exact.to_f64().unwrap_or(f64::INFINITY).abs().max(1.0);
            let integrity = (dev.is_nan() || dev >= RECONCILE_TOL)
                .then(|| format!("closed invariant at g={g}, d={d}: exact {exact} vs spectral {spectral}"));
            let count_json = count
                .as_ref()
                .map(|fc| json!({ "e": fc.e, "count": fc.count.to_string() }))
                .unwrap_or(Value::Null);
            Output {
                text: session.laurent_text(&value),
                json: json!({
                    "g": g,
                    "d": d,
                    "invariant": session.laurent(&value),
                    "finite_count": count_json,
                    "spectral": ComplexJson::from(spectral),
                }),
                integrity,
            }
        }
        Command::Spectrum => {
            let points = spectral_points(ctx);
            let mut rows = Vec::new();
            let mut lines = vec![format!("{:<16} {:>16} {:>16}", "subset", "Vand", "a_I")];
            for p in &points {
                let (v, a) = (vand(p), coupling_a(ctx, p));
                lines.push(format!("{:<16} {:>16.8e} {:>16.8e}", format!("{:?}", p.subset), v, a));
                let mut row = serde_json::to_value(p).expect("points serialize");
                if let Value::Object(map) = &mut row {
                    map.insert("vand".into(), json!(v));
                    map.insert("a".into(), json!(a));
                }
                rows.push(row);
            }
            plain(lines.join("\n"), json!({ "points": rows }))
        }
        Command::Check { suite } => {
            let report = run_suite(&session.tqft(), *suite);
            let mut lines: Vec<String> = report
                .checks
                .iter()
                .map(|c| {
                    let mark = if c.passed { "PASS" } else { "FAIL" };
                    format!("[{mark}] {:<34} deviation={:.3e}  {}", c.name, c.deviation, c.detail)
                })
                .collect();
            lines.push(format!(
                "check {} on ({},{}): {} passed, {} failed",
                report.suite, report.r, report.s, report.passed, report.failed
            ));
            let integrity = (!report.all_passed()).then(|| format!("{} self-checks failed", report.failed));
            Output {
                text: lines.join("\n"),
                json: serde_json::to_value(&report).expect("reports serialize"),
                integrity,
            }
        }
    })
}

/// Runs one invocation, writing results to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let ctx = BoxContext::new(cli.r, cli.s)?;
    let mut session = Session {
        ctx,
        json: cli.json,
        q_at_one: cli.q_at_one,
        cache_dir: cli.cache_dir.clone(),
        max_entries: cli.max_entries,
        warnings: Vec::new(),
    };
    let result = dispatch(&mut session, &cli.command);
    for w in &session.warnings {
        writeln!(err, "{w}")?;
    }
    let output = result?;
    if session.json {
        let doc = with_header(&session, output.json);
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("JSON values serialize"))?;
    } else {
        writeln!(out, "{}", output.text)?;
    }
    match output.integrity {
        Some(msg) => Err(CliError::Integrity(msg)),
        None => Ok(0),
    }
}
