//! The `regnet` command-line tool.
//!
//! Exit codes: 0 success or property holds, 1 property fails, 2 usage or
//! parse error, 3 semantic error, 4 resource limit or engine discrepancy.

mod report;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};

pub use report::{render_text, Outcome, Report};

use crate::checker::{
    explicit_check, explicit_reachable, explicit_stable_states, resolve_formula, resolve_query,
    CheckError, Model, Query, StableReport, SymbolicChecker, VarOrderKind, Verdict,
    STABLE_ENUMERATION_CAP,
};
use crate::diag::{Code, Diagnostic};
use crate::dsl::{load_network, parse_formula, parse_query, pretty_query};
use crate::model::Network;
use crate::pn::{to_dot, to_json};
use crate::symbolic::Limits;

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SEMANTIC: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

/// Default bound on explicitly explored states.
pub const DEFAULT_MAX_STATES: usize = 2_000_000;

#[derive(Debug, Parser)]
#[command(name = "regnet", version, about = "Gene regulatory network model checker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineKind {
    Symbolic,
    Explicit,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    Decl,
    Reverse,
}

impl From<OrderArg> for VarOrderKind {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Decl => VarOrderKind::Decl,
            OrderArg::Reverse => VarOrderKind::Reverse,
        }
    }
}

#[derive(Debug, clap::Args)]
struct EngineOpts {
    /// Variable order of the decision diagrams
    #[arg(long, value_enum, default_value = "decl")]
    order: OrderArg,
    /// Abort when more decision diagram nodes than this are allocated
    #[arg(long, default_value_t = Limits::default().max_nodes,
          value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    max_nodes: usize,
    /// Abort after this many seconds
    #[arg(long, value_parser = parse_timeout)]
    timeout: Option<f64>,
}

impl EngineOpts {
    fn limits(&self) -> Limits {
        Limits {
            max_nodes: self.max_nodes,
            timeout: self.timeout.map(Duration::from_secs_f64),
        }
    }
}

fn parse_timeout(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("`{s}` is not a positive number of seconds")),
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a model, printing diagnostics
    Validate {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Compile a model to a Petri net
    Compile {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Output path (standard output if omitted)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a query: `check <formula>`, `stable [where <formula>]` or `count reachable`
    Check {
        file: PathBuf,
        #[arg(required_unless_present = "query_file", conflicts_with = "query_file")]
        query: Option<String>,
        /// Read the query from a file
        #[arg(long)]
        query_file: Option<PathBuf>,
        /// Print the witness or counterexample path
        #[arg(long)]
        witness: bool,
        #[arg(long, value_enum, default_value = "symbolic")]
        engine: EngineKind,
        #[command(flatten)]
        opts: EngineOpts,
        /// State bound for the explicit engine
        #[arg(long, default_value_t = DEFAULT_MAX_STATES,
              value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
        max_states: usize,
        #[arg(long)]
        json: bool,
    },
    /// List the stable states of a model
    Stable {
        file: PathBuf,
        /// Only report stable states satisfying this formula
        #[arg(long = "where")]
        filter: Option<String>,
        #[command(flatten)]
        opts: EngineOpts,
        #[arg(long)]
        json: bool,
    },
    /// Print model, net and state-space statistics
    Stats {
        file: PathBuf,
        #[command(flatten)]
        opts: EngineOpts,
        #[arg(long)]
        json: bool,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Entry point for the binary: runs with the process arguments, prints,
/// and returns the exit code.
pub fn main() -> i32 {
    let out = run(std::env::args_os());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}

/// Runs the tool on `args` (including the program name) without touching
/// the process's standard streams.
pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutput {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CliOutput {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let start = Instant::now();
    let mut ctx = Ctx::default();
    let (name, json) = match &cli.command {
        Command::Validate { json, .. } => ("validate", *json),
        Command::Compile { .. } => ("compile", false),
        Command::Check { json, .. } => ("check", *json),
        Command::Stable { json, .. } => ("stable", *json),
        Command::Stats { json, .. } => ("stats", *json),
    };
    ctx.report = Report::new(name);
    ctx.json = json;
    let code = match execute(&cli.command, &mut ctx) {
        Ok(code) => code,
        Err(Fail { code, message }) => {
            if !message.is_empty() {
                ctx.report.error = Some(message.clone());
                if !ctx.json {
                    ctx.stderr += &format!("error: {message}\n");
                }
            }
            code
        }
    };
    ctx.report.exit_code = code;
    ctx.report.wall_time_ms = start.elapsed().as_secs_f64() * 1000.0;
    if ctx.json {
        ctx.stdout = ctx.report.to_json();
    }
    CliOutput {
        code,
        stdout: ctx.stdout,
        stderr: ctx.stderr,
    }
}

#[derive(Default)]
struct Ctx {
    report: Report,
    json: bool,
    stdout: String,
    stderr: String,
}

impl Default for Report {
    fn default() -> Self {
        Report::new("")
    }
}

struct Fail {
    code: i32,
    message: String,
}

impl Fail {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Fail {
            code,
            message: message.into(),
        }
    }
}

impl From<CheckError> for Fail {
    fn from(e: CheckError) -> Self {
        Fail::new(EXIT_RESOURCE, e.to_string())
    }
}

impl From<crate::symbolic::EngineError> for Fail {
    fn from(e: crate::symbolic::EngineError) -> Self {
        Fail::new(EXIT_RESOURCE, e.to_string())
    }
}

impl Ctx {
    fn diagnostics(&mut self, origin: &str, diags: &[Diagnostic], to_stdout: bool) {
        for d in diags {
            let line = format!("{origin}:{d}\n");
            if self.json {
                continue;
            }
            if to_stdout {
                self.stdout += &line;
            } else {
                self.stderr += &line;
            }
        }
        self.report.diagnostics.extend_from_slice(diags);
    }

    fn finish(&mut self, outcome: Outcome, net: Option<&Network>) {
        self.report.result = Some(outcome);
        if !self.json {
            self.stdout += &render_text(&self.report, net);
        }
    }

    /// Reads and lowers a model; parse errors exit 2, semantic errors 3.
    fn load(&mut self, path: &Path, to_stdout: bool) -> Result<Network, Fail> {
        let text = fs::read_to_string(path)
            .map_err(|e| Fail::new(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))?;
        let origin = path.display().to_string();
        match load_network(&text) {
            Ok((net, diags)) => {
                self.diagnostics(&origin, &diags, to_stdout);
                self.report.set_network(&net);
                Ok(net)
            }
            Err(diags) => {
                self.diagnostics(&origin, &diags, to_stdout);
                Err(Fail::new(diag_exit(&diags), String::new()))
            }
        }
    }
}

fn diag_exit(diags: &[Diagnostic]) -> i32 {
    if diags.iter().any(|d| d.code == Code::E001) {
        EXIT_USAGE
    } else {
        EXIT_SEMANTIC
    }
}

fn execute(cmd: &Command, ctx: &mut Ctx) -> Result<i32, Fail> {
    match cmd {
        Command::Validate { file, .. } => cmd_validate(file, ctx),
        Command::Compile {
            file,
            format,
            output,
        } => cmd_compile(file, *format, output.as_deref(), ctx),
        Command::Check {
            file,
            query,
            query_file,
            witness,
            engine,
            opts,
            max_states,
            ..
        } => {
            let text = match (query, query_file) {
                (Some(q), _) => q.clone(),
                (None, Some(p)) => fs::read_to_string(p).map_err(|e| {
                    Fail::new(EXIT_USAGE, format!("cannot read {}: {e}", p.display()))
                })?,
                (None, None) => return Err(Fail::new(EXIT_USAGE, "no query given")),
            };
            cmd_check(file, &text, *witness, *engine, opts, *max_states, ctx)
        }
        Command::Stable {
            file, filter, opts, ..
        } => cmd_stable(file, filter.as_deref(), opts, ctx),
        Command::Stats { file, opts, .. } => cmd_stats(file, opts, ctx),
    }
}

fn cmd_validate(file: &Path, ctx: &mut Ctx) -> Result<i32, Fail> {
    let result = ctx.load(file, true);
    let errors = ctx.report.diagnostics.iter().filter(|d| d.is_error()).count();
    let warnings = ctx.report.diagnostics.len() - errors;
    let code = match result {
        Ok(_) => EXIT_HOLDS,
        Err(f) if !f.message.is_empty() => return Err(f),
        Err(f) => f.code,
    };
    ctx.finish(Outcome::Validate { errors, warnings }, None);
    Ok(code)
}

fn cmd_compile(file: &Path, format: Format, output: Option<&Path>, ctx: &mut Ctx) -> Result<i32, Fail> {
    let net = ctx.load(file, false)?;
    let model = Model::new(net);
    let pn = model.petri_net();
    let text = match format {
        Format::Dot => to_dot(pn),
        Format::Json => to_json(pn),
    };
    match output {
        Some(path) => fs::write(path, &text)
            .map_err(|e| Fail::new(EXIT_USAGE, format!("cannot write {}: {e}", path.display())))?,
        None => ctx.stdout += &text,
    }
    ctx.report.result = Some(Outcome::Compile {
        format: match format {
            Format::Dot => "dot".into(),
            Format::Json => "json".into(),
        },
        places: pn.places().len(),
        transitions: pn.transitions().len(),
    });
    Ok(EXIT_HOLDS)
}

fn resolve_query_text(text: &str, net: &Network, ctx: &mut Ctx) -> Result<Query, Fail> {
    let ast = match parse_query(text) {
        Ok(ast) => ast,
        Err(diags) => {
            ctx.diagnostics("query", &diags, false);
            return Err(Fail::new(EXIT_USAGE, String::new()));
        }
    };
    resolve_query(&ast, net).map_err(|diags| {
        ctx.diagnostics("query", &diags, false);
        Fail::new(EXIT_SEMANTIC, String::new())
    })
}

fn cmd_check(
    file: &Path,
    text: &str,
    witness: bool,
    engine: EngineKind,
    opts: &EngineOpts,
    max_states: usize,
    ctx: &mut Ctx,
) -> Result<i32, Fail> {
    let net = ctx.load(file, false)?;
    let query = resolve_query_text(text, &net, ctx)?;
    let display = pretty_query(&parse_query(text).expect("parsed above"));
    let model = Model::new(net);
    let net = model.network();
    let symbolic = matches!(engine, EngineKind::Symbolic | EngineKind::Both);
    let explicit = matches!(engine, EngineKind::Explicit | EngineKind::Both);
    let checker = if symbolic {
        Some(SymbolicChecker::new(&model, opts.order.into(), opts.limits()))
    } else {
        None
    };
    let result = run_query(&query, checker.as_ref(), explicit.then_some(max_states), net);
    if let Some(c) = &checker {
        ctx.report.engine = Some(c.stats());
    }
    let (outcome, code) = match result? {
        Answer::Verdict(v) => {
            let label = display.strip_prefix("check ").unwrap_or(&display).to_string();
            let code = if v.holds { EXIT_HOLDS } else { EXIT_FAILS };
            (Outcome::check(label, &v, witness), code)
        }
        Answer::Stable(r) => (Outcome::stable(&r), EXIT_HOLDS),
        Answer::Count(c) => (
            Outcome::Count {
                reachable_count: c.to_string(),
            },
            EXIT_HOLDS,
        ),
    };
    ctx.finish(outcome, Some(net));
    Ok(code)
}

enum Answer {
    Verdict(Verdict),
    Stable(StableReport),
    Count(num_bigint::BigUint),
}

impl Answer {
    fn summary(&self) -> String {
        match self {
            Answer::Verdict(v) => format!(
                "holds={} reachable={} satisfying={}",
                v.holds, v.reachable_count, v.satisfying_reachable_count
            ),
            Answer::Stable(r) => format!("stable={} listed={:?}", r.count, r.states),
            Answer::Count(c) => format!("reachable={c}"),
        }
    }

    fn agrees(&self, other: &Answer) -> bool {
        match (self, other) {
            (Answer::Verdict(a), Answer::Verdict(b)) => {
                a.holds == b.holds
                    && a.reachable_count == b.reachable_count
                    && a.satisfying_reachable_count == b.satisfying_reachable_count
            }
            (Answer::Stable(a), Answer::Stable(b)) => a == b,
            (Answer::Count(a), Answer::Count(b)) => a == b,
            _ => false,
        }
    }
}

/// Runs `query` on the symbolic checker, the explicit oracle (with the given
/// cap), or both; with both, a disagreement is a failure with exit code 4.
fn run_query(
    query: &Query,
    checker: Option<&SymbolicChecker<'_>>,
    explicit_cap: Option<usize>,
    net: &Network,
) -> Result<Answer, Fail> {
    let sym = match checker {
        Some(c) => Some(match query {
            Query::Check(f) => Answer::Verdict(c.check(f)?),
            Query::Stable(f) => Answer::Stable(c.stable_states(f.as_ref(), STABLE_ENUMERATION_CAP)?),
            Query::CountReachable => Answer::Count(c.count_reachable()?),
        }),
        None => None,
    };
    let exp = match explicit_cap {
        Some(cap) => Some(match query {
            Query::Check(f) => Answer::Verdict(explicit_check(net, f, cap)?),
            Query::Stable(f) => {
                let mut r = explicit_stable_states(net, f.as_ref(), cap)?;
                r.states.truncate(STABLE_ENUMERATION_CAP);
                Answer::Stable(r)
            }
            Query::CountReachable => {
                Answer::Count(explicit_reachable(net, cap)?.len().into())
            }
        }),
        None => None,
    };
    match (sym, exp) {
        (Some(s), Some(e)) => {
            if s.agrees(&e) {
                Ok(s)
            } else {
                Err(Fail::new(
                    EXIT_RESOURCE,
                    format!(
                        "engine discrepancy: symbolic {} vs explicit {}",
                        s.summary(),
                        e.summary()
                    ),
                ))
            }
        }
        (Some(a), None) | (None, Some(a)) => Ok(a),
        (None, None) => unreachable!("at least one engine runs"),
    }
}

fn cmd_stable(file: &Path, filter: Option<&str>, opts: &EngineOpts, ctx: &mut Ctx) -> Result<i32, Fail> {
    let net = ctx.load(file, false)?;
    let filter = match filter {
        None => None,
        Some(text) => {
            let ast = parse_formula(text).map_err(|diags| {
                ctx.diagnostics("where", &diags, false);
                Fail::new(EXIT_USAGE, String::new())
            })?;
            Some(resolve_formula(&ast, &net).map_err(|diags| {
                ctx.diagnostics("where", &diags, false);
                Fail::new(EXIT_SEMANTIC, String::new())
            })?)
        }
    };
    let model = Model::new(net);
    let checker = SymbolicChecker::new(&model, opts.order.into(), opts.limits());
    let result = checker.stable_states(filter.as_ref(), STABLE_ENUMERATION_CAP);
    ctx.report.engine = Some(checker.stats());
    let report = result?;
    ctx.finish(Outcome::stable(&report), Some(model.network()));
    Ok(EXIT_HOLDS)
}

fn cmd_stats(file: &Path, opts: &EngineOpts, ctx: &mut Ctx) -> Result<i32, Fail> {
    let net = ctx.load(file, false)?;
    let model = Model::new(net);
    let checker = SymbolicChecker::new(&model, opts.order.into(), opts.limits());
    let count = checker.count_reachable();
    let stats = checker.stats();
    ctx.report.engine = Some(stats);
    let count = count?;
    let net = model.network();
    let outcome = Outcome::Stats {
        genes: net.gene_count(),
        edges: net.edges().len(),
        rules: net.rules().len(),
        places: model.petri_net().places().len(),
        transitions: model.petri_net().transitions().len(),
        reachable_count: count.to_string(),
        peak_nodes: stats.peak_nodes,
        fixpoint_rounds: stats.fixpoint_rounds,
    };
    ctx.finish(outcome, Some(net));
    Ok(EXIT_HOLDS)
}
