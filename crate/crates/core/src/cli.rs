//! Command-line front end: `solve`, `gen` and `bench`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dimacs::{self, CnfInstance};
use crate::error::{Budget, Error, Result};
use crate::literal::LiteralOrder;
use crate::par::Parallelism;
use crate::solver::{solve, Method, SolveOptions, SolveReport, Strategy, StrategyKind, Verdict};
use crate::store::ZddStore;

pub const EXIT_SAT: i32 = 10;
pub const EXIT_UNSAT: i32 = 20;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

/// Environment variable supplying the default worker count.
pub const WORKERS_ENV: &str = "DDSAT_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "ddsat", version, about = "Decision-diagram SAT solving")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide a DIMACS CNF file.
    Solve(SolveArgs),
    /// Write a generated instance in DIMACS format.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Time solver configurations over pigeonhole instances.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Dp,
    BddDirect,
    #[value(alias = "bdd-via-zdd")]
    BddZdd,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Dp => Method::Dp,
            MethodArg::BddDirect => Method::BddDirect,
            MethodArg::BddZdd => Method::BddViaZdd,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Original,
    Node,
    Clause,
}

impl From<StrategyArg> for StrategyKind {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Original => StrategyKind::Original,
            StrategyArg::Node => StrategyKind::NodeBound,
            StrategyArg::Clause => StrategyKind::ClauseBound,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "dp")]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "node")]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 0)]
    pub bound: u64,
    /// worker threads [default: $DDSAT_WORKERS or 1]
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,
    #[arg(long)]
    pub max_nodes: Option<usize>,
    #[arg(long)]
    pub max_seconds: Option<f64>,
    /// line-oriented `key value` statistics
    #[arg(long)]
    pub machine: bool,
}

#[derive(Debug, Subcommand)]
pub enum GenKind {
    /// n+1 pigeons, n holes
    Pigeonhole {
        n: u32,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub min: u32,
    #[arg(long)]
    pub max: u32,
    /// per-instance timeout in seconds
    #[arg(long, default_value_t = 120.0)]
    pub timeout: f64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "dp")]
    pub methods: Vec<MethodArg>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "original,node,clause")]
    pub strategies: Vec<StrategyArg>,
    #[arg(long, value_delimiter = ',')]
    pub workers: Vec<u32>,
    #[arg(long, default_value_t = 0)]
    pub bound: u64,
    #[arg(long, default_value_t = DEFAULT_BENCH_MAX_NODES)]
    pub max_nodes: usize,
    /// keep running larger instances after a timeout in the same row
    #[arg(long)]
    pub no_skip: bool,
    #[arg(long)]
    pub machine: bool,
}

/// Default node budget per bench cell, sized to stay within a few GB.
pub const DEFAULT_BENCH_MAX_NODES: usize = 30_000_000;

fn default_workers() -> u32 {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&w| w >= 1)
        .unwrap_or(1)
}

fn seconds(s: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(s).map_err(|_| Error::Usage(format!("invalid duration {s}")))
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_budget() {
                let _ = writeln!(out, "c {e}");
                EXIT_BUDGET
            } else {
                EXIT_ERROR
            }
        }
    }
}

pub fn execute(cli: Cli, out: &mut impl Write) -> Result<i32> {
    match cli.command {
        Command::Solve(args) => cmd_solve(&args, out),
        Command::Gen {
            kind: GenKind::Pigeonhole { n, out: path },
        } => cmd_gen(n, path, out),
        Command::Bench(args) => cmd_bench(&args, out),
    }
}

pub fn load(path: &std::path::Path) -> Result<CnfInstance> {
    let text = std::fs::read_to_string(path)?;
    let parsed = dimacs::parse(&text)?;
    if parsed.tautologies > 0 {
        log::warn!("dropped {} tautological clauses", parsed.tautologies);
    }
    Ok(parsed.instance)
}

pub fn cmd_solve(args: &SolveArgs, out: &mut impl Write) -> Result<i32> {
    let cnf = load(&args.file)?;
    let workers = args.workers.unwrap_or_else(default_workers);
    let options = SolveOptions {
        method: args.method.into(),
        strategy: Strategy::new(args.strategy.into()).with_bound(args.bound),
        parallelism: Parallelism::with_workers(workers as usize),
        max_nodes: args.max_nodes,
        max_time: args.max_seconds.map(seconds).transpose()?,
    };
    let report = solve(&cnf, &options)?;
    let text = if args.machine {
        format_machine(&report, &options, cnf.nvars)
    } else {
        format_human(&report, &options, cnf.nvars)
    };
    out.write_all(text.as_bytes())?;
    Ok(match report.verdict {
        Verdict::Sat => EXIT_SAT,
        Verdict::Unsat => EXIT_UNSAT,
    })
}

fn verdict_lines(report: &SolveReport, nvars: u32, out: &mut String) {
    match report.verdict {
        Verdict::Unsat => out.push_str("s UNSATISFIABLE\n"),
        Verdict::Sat => {
            out.push_str("s SATISFIABLE\n");
            if let Some(model) = &report.model {
                out.push('v');
                for v in 1..=nvars {
                    let value = model.get(&v).copied().unwrap_or(false);
                    let _ = write!(out, " {}", if value { v as i64 } else { -(v as i64) });
                }
                out.push_str(" 0\n");
            } else {
                out.push_str("c no model from variable elimination; use --method bdd-zdd\n");
            }
        }
    }
}

fn describe(options: &SolveOptions) -> String {
    match options.method {
        Method::Dp => format!(
            "dp strategy {} bound {}",
            options.strategy.kind, options.strategy.bound
        ),
        m => m.name().to_string(),
    }
}

/// DIMACS-style output: statistics as `c` comments, then `s`/`v` lines.
pub fn format_human(report: &SolveReport, options: &SolveOptions, nvars: u32) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "c method {}", describe(options));
    let _ = writeln!(out, "c initial nodes {}", report.initial_nodes);
    let _ = writeln!(out, "c initial literals {}", report.initial_literals);
    let _ = writeln!(out, "c initial clauses {}", report.initial_clauses);
    let _ = writeln!(out, "c compression ratio {:.4}", report.compression_ratio());
    if !report.steps.is_empty() {
        let _ = writeln!(
            out,
            "c {:>6} {:>8} {:>8} {:>10} {:>10} {:>12} {:>12}",
            "var", "accepted", "rejected", "nodes", "nodes'", "clauses", "clauses'"
        );
        for s in &report.steps {
            let _ = writeln!(
                out,
                "c {:>6} {:>8} {:>8} {:>10} {:>10} {:>12} {:>12}",
                s.var,
                if s.accepted { "yes" } else { "no" },
                s.rejected,
                s.nodes_before,
                s.nodes_after,
                s.clauses_before,
                s.clauses_after
            );
        }
    }
    if let Some(n) = report.bdd_nodes {
        let _ = writeln!(out, "c bdd nodes {n}");
    }
    let _ = writeln!(out, "c elapsed {:.6}", report.elapsed.as_secs_f64());
    verdict_lines(report, nvars, &mut out);
    out
}

/// `key value` records followed by the `s`/`v` lines.
pub fn format_machine(report: &SolveReport, options: &SolveOptions, nvars: u32) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "method {}", options.method);
    if options.method == Method::Dp {
        let _ = writeln!(out, "strategy {}", options.strategy.kind);
        let _ = writeln!(out, "bound {}", options.strategy.bound);
    }
    let _ = writeln!(
        out,
        "verdict {}",
        match report.verdict {
            Verdict::Sat => "SAT",
            Verdict::Unsat => "UNSAT",
        }
    );
    let _ = writeln!(out, "initial_nodes {}", report.initial_nodes);
    let _ = writeln!(out, "initial_literals {}", report.initial_literals);
    let _ = writeln!(out, "initial_clauses {}", report.initial_clauses);
    let _ = writeln!(out, "compression_ratio {:.6}", report.compression_ratio());
    let _ = writeln!(out, "steps {}", report.steps.len());
    for s in &report.steps {
        let _ = writeln!(
            out,
            "step {} {} {} {} {} {} {}",
            s.var,
            u8::from(s.accepted),
            s.rejected,
            s.nodes_before,
            s.nodes_after,
            s.clauses_before,
            s.clauses_after
        );
    }
    if let Some(n) = report.bdd_nodes {
        let _ = writeln!(out, "bdd_nodes {n}");
    }
    let _ = writeln!(out, "elapsed_seconds {:.6}", report.elapsed.as_secs_f64());
    verdict_lines(report, nvars, &mut out);
    out
}

pub fn cmd_gen(n: u32, path: Option<PathBuf>, out: &mut impl Write) -> Result<i32> {
    let cnf = dimacs::gen_pigeonhole(n)?;
    let text = dimacs::write(&cnf);
    match path {
        Some(p) => {
            std::fs::write(&p, &text)?;
            writeln!(
                out,
                "c wrote {}: p cnf {} {}",
                p.display(),
                cnf.nvars,
                cnf.clauses.len()
            )?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(0)
}

/// Outcome of one bench cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Solved(SolveReport),
    /// budget exhausted, or skipped after a smaller instance ran out
    Unfinished(Option<Budget>),
    Failed(String),
}

impl Cell {
    /// Seconds, or `--` for unfinished runs.
    pub fn render(&self) -> String {
        match self {
            Cell::Solved(r) => format!("{:.2}", r.elapsed.as_secs_f64()),
            Cell::Unfinished(_) => "--".to_string(),
            Cell::Failed(_) => "err".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub method: Method,
    pub strategy: Option<StrategyKind>,
    pub workers: u32,
    pub cells: Vec<(u32, Cell)>,
}

impl BenchRow {
    pub fn label(&self) -> String {
        match self.strategy {
            Some(s) => format!("{}/{}", self.method, s),
            None => self.method.to_string(),
        }
    }

    /// Largest hole count solved in this row.
    pub fn max_solved(&self) -> Option<u32> {
        self.cells
            .iter()
            .filter(|(_, c)| matches!(c, Cell::Solved(_)))
            .map(|(n, _)| *n)
            .max()
    }
}

/// Runs one configuration over `ph(min) ..= ph(max)`.
pub fn bench_row(
    method: Method,
    strategy: Strategy,
    workers: u32,
    range: std::ops::RangeInclusive<u32>,
    timeout: Duration,
    max_nodes: usize,
    skip_after_timeout: bool,
) -> BenchRow {
    let options = SolveOptions {
        method,
        strategy,
        parallelism: Parallelism::with_workers(workers as usize),
        max_nodes: Some(max_nodes),
        max_time: Some(timeout),
    };
    let mut cells = Vec::new();
    let mut stopped = false;
    for n in range {
        let cell = if stopped {
            Cell::Unfinished(None)
        } else {
            match dimacs::gen_pigeonhole(n).and_then(|cnf| solve(&cnf, &options)) {
                Ok(r) => Cell::Solved(r),
                Err(Error::BudgetExceeded(b)) => {
                    stopped = skip_after_timeout;
                    Cell::Unfinished(Some(b))
                }
                Err(e) => Cell::Failed(e.to_string()),
            }
        };
        log::info!("{method} {:?} w{workers} ph{n}: {}", strategy.kind, cell.render());
        cells.push((n, cell));
    }
    BenchRow {
        method,
        strategy: (method == Method::Dp).then_some(strategy.kind),
        workers,
        cells,
    }
}

/// Initial ZDD nodes per literal of `ph(n)`.
pub fn pigeonhole_compression(n: u32) -> Result<(usize, u64, f64)> {
    let cnf = dimacs::gen_pigeonhole(n)?;
    let store = ZddStore::new(LiteralOrder::ascending(cnf.nvars));
    let root = store.build_from_clauses(&cnf.clauses)?;
    let nodes = store.node_count(root);
    let lits = store.literal_count(root)?;
    Ok((nodes, lits, nodes as f64 / lits as f64))
}

pub fn cmd_bench(args: &BenchArgs, out: &mut impl Write) -> Result<i32> {
    if args.min < 1 || args.min > args.max {
        return Err(Error::Usage(format!(
            "invalid range {}..={}",
            args.min, args.max
        )));
    }
    let timeout = seconds(args.timeout)?;
    let workers = if args.workers.is_empty() {
        vec![default_workers()]
    } else {
        args.workers.clone()
    };
    let mut configs = Vec::new();
    for &m in &args.methods {
        let method: Method = m.into();
        if method == Method::Dp {
            for &s in &args.strategies {
                configs.push((method, Strategy::new(s.into()).with_bound(args.bound)));
            }
        } else {
            configs.push((method, Strategy::new(StrategyKind::NodeBound)));
        }
    }
    let mut rows = Vec::new();
    for (method, strategy) in configs {
        for &w in &workers {
            rows.push(bench_row(
                method,
                strategy,
                w,
                args.min..=args.max,
                timeout,
                args.max_nodes,
                !args.no_skip,
            ));
        }
    }
    let text = if args.machine {
        bench_machine(&rows, args.min..=args.max)?
    } else {
        bench_table(&rows, args.min..=args.max)?
    };
    out.write_all(text.as_bytes())?;
    Ok(0)
}

/// Table with one row per configuration and one column per instance.
pub fn bench_table(rows: &[BenchRow], range: std::ops::RangeInclusive<u32>) -> Result<String> {
    let mut out = String::new();
    let _ = write!(out, "{:<18} {:>7}", "config", "workers");
    for n in range.clone() {
        let _ = write!(out, " {:>8}", format!("ph{n}"));
    }
    out.push('\n');
    for row in rows {
        let _ = write!(out, "{:<18} {:>7}", row.label(), row.workers);
        for (_, cell) in &row.cells {
            let _ = write!(out, " {:>8}", cell.render());
        }
        out.push('\n');
    }
    let _ = write!(out, "{:<18} {:>7}", "compression", "");
    for n in range {
        let (_, _, ratio) = pigeonhole_compression(n)?;
        let _ = write!(out, " {:>8.4}", ratio);
    }
    out.push('\n');
    Ok(out)
}

/// One `instance` record per hole count and one `cell` record per run.
pub fn bench_machine(rows: &[BenchRow], range: std::ops::RangeInclusive<u32>) -> Result<String> {
    let mut out = String::new();
    for n in range {
        let (nodes, lits, ratio) = pigeonhole_compression(n)?;
        let _ = writeln!(
            out,
            "instance ph{n} holes {n} nodes {nodes} literals {lits} compression_ratio {ratio:.6}"
        );
    }
    for row in rows {
        for (n, cell) in &row.cells {
            let _ = write!(out, "cell {} workers {} ph{n} ", row.label(), row.workers);
            match cell {
                Cell::Solved(r) => {
                    let peak = r.steps.iter().map(|s| s.nodes_after).max().unwrap_or(0);
                    let _ = writeln!(
                        out,
                        "status solved verdict {} seconds {:.6} steps {} peak_nodes {} bdd_nodes {}",
                        if r.verdict == Verdict::Sat { "SAT" } else { "UNSAT" },
                        r.elapsed.as_secs_f64(),
                        r.steps.len(),
                        peak,
                        r.bdd_nodes.map_or("-".to_string(), |b| b.to_string()),
                    );
                }
                Cell::Unfinished(b) => {
                    let why = match b {
                        Some(Budget::Time) => "timeout",
                        Some(Budget::Nodes) => "node-budget",
                        None => "skipped",
                    };
                    let _ = writeln!(out, "status {why}");
                }
                Cell::Failed(e) => {
                    let _ = writeln!(out, "status error message {e}");
                }
            }
        }
    }
    Ok(out)
}
