//! `wl` — run color refinements, pairwise distinguishing experiments,
//! hard-instance generators, counting oracles, and the verification suite.
//!
//! Reports go to stdout as JSON; logs and timings go to stderr. Exit codes:
//! 0 success, 1 suite failure, 2 input error, 3 iteration cap exceeded.

use std::fmt;
use std::fs;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use wl_core::algorithm::{Algorithm, AlgorithmSpec};
use wl_core::engine::{joint_distinguish, refine, EngineError, Verdict};
use wl_core::generators::{cfi_pair, csl_graph, random_graph, srg_pair};
use wl_core::graph::Graph;
use wl_core::io::{parse_graph_file, write_graph_line, GraphFormat};
use wl_core::oracles::{count_substructure, SubstructureKind};
use wl_core::suite::{run_suite, SuiteLevel};

#[derive(Parser)]
#[command(
    name = "wl",
    version,
    about = "Weisfeiler-Lehman color refinement toolkit"
)]
struct Cli {
    /// Worker threads for per-tuple staging (default: WL_JOBS or all cores).
    /// Verdicts do not depend on this.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Refine one graph to its stable coloring.
    Refine(RefineArgs),
    /// Compare two graphs under one algorithm and report the verdict.
    Distinguish(DistinguishArgs),
    /// Emit built-in graphs.
    Gen(GenArgs),
    /// Count substructure occurrences exhaustively.
    Count(CountArgs),
    /// Run the verification suite.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct RefineArgs {
    /// Graph file: one graph6 record or JSON record per line.
    file: String,
    /// Algorithm, e.g. `1wl`, `kfwl(2)`, `ktfwl(2,2)`,
    /// `ktfwl+(2,2,n2(h=1))`, `n2fwl(h=inf)`.
    #[arg(long)]
    alg: String,
    /// Iteration cap (default: 2 n^k + 2).
    #[arg(long)]
    cap: Option<usize>,
    /// Which graph of a multi-graph file to refine.
    #[arg(long, default_value_t = 0)]
    index: usize,
}

#[derive(Args)]
struct DistinguishArgs {
    /// Two graph files (first graph of each), unless --builtin is used.
    files: Vec<String>,
    /// Built-in pair: `srg`, `cfi(K)`, or `csl(N,S1,S2)`.
    #[arg(long)]
    builtin: Option<String>,
    #[arg(long)]
    alg: String,
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Args)]
struct GenArgs {
    /// What to generate: `srg`, `shrikhande`, `rook`, `cfi(K)`,
    /// `csl(N,S)`, or `random(N,P)`.
    what: String,
    /// Output format per line.
    #[arg(long, default_value = "graph6")]
    format: FormatArg,
    /// Seed for `random(N,P)`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CountArgs {
    file: String,
    /// Pattern name: cycle3..cycle6, tailed_triangle, chordal_cycle,
    /// clique4, path4, triangle_rectangle.
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 0)]
    index: usize,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, default_value = "desk")]
    level: String,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum FormatArg {
    Graph6,
    Json,
}

impl From<FormatArg> for GraphFormat {
    fn from(f: FormatArg) -> GraphFormat {
        match f {
            FormatArg::Graph6 => GraphFormat::Graph6,
            FormatArg::Json => GraphFormat::Json,
        }
    }
}

/// Failure plus the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl fmt::Display) -> Failure {
        Failure {
            code: 2,
            message: message.to_string(),
        }
    }

    fn cap(message: impl fmt::Display) -> Failure {
        Failure {
            code: 3,
            message: message.to_string(),
        }
    }

    fn suite(message: impl fmt::Display) -> Failure {
        Failure {
            code: 1,
            message: message.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_jobs(cli.jobs);
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("wl: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn configure_jobs(flag: Option<usize>) {
    let jobs = flag.or_else(|| std::env::var("WL_JOBS").ok().and_then(|v| v.parse().ok()));
    if let Some(n) = jobs {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Refine(args) => cmd_refine(args),
        Command::Distinguish(args) => cmd_distinguish(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Count(args) => cmd_count(args),
        Command::Suite(args) => cmd_suite(args),
    }
}

fn parse_alg(text: &str, cap: Option<usize>) -> Result<AlgorithmSpec, Failure> {
    let algorithm = Algorithm::from_str(text).map_err(Failure::input)?;
    Ok(AlgorithmSpec {
        algorithm,
        iteration_cap: cap,
    })
}

fn load_graphs(path: &str) -> Result<Vec<Graph>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{path}: {e}")))?;
    parse_graph_file(&text).map_err(|e| Failure::input(format!("{path}: {e}")))
}

fn pick<'a>(graphs: &'a [Graph], index: usize, path: &str) -> Result<&'a Graph, Failure> {
    graphs.get(index).ok_or_else(|| {
        Failure::input(format!(
            "{path}: graph index {index} out of range ({} graphs)",
            graphs.len()
        ))
    })
}

fn emit(report: &impl Serialize) {
    println!(
        "{}",
        serde_json::to_string_pretty(report).expect("report serializes")
    );
}

fn cmd_refine(args: RefineArgs) -> Result<(), Failure> {
    let spec = parse_alg(&args.alg, args.cap)?;
    let graphs = load_graphs(&args.file)?;
    let g = pick(&graphs, args.index, &args.file)?;
    let start = Instant::now();
    let result = refine(&spec, g).map_err(|e| match e {
        EngineError::CapExceeded { .. } => Failure::cap(e),
        other => Failure::input(other),
    })?;
    let report = json!({
        "command": "refine",
        "version": env!("CARGO_PKG_VERSION"),
        "invocation": {
            "file": args.file,
            "index": args.index,
            "algorithm": spec.algorithm.to_string(),
            "cap": spec.iteration_cap,
        },
        "report": result.report(),
        "distinct_colors": result.histogram.len(),
        "wall_ms": start.elapsed().as_millis(),
    });
    emit(&report);
    Ok(())
}

fn builtin_pair(text: &str) -> Result<(String, Graph, Graph), Failure> {
    if text == "srg" {
        let pair = srg_pair();
        return Ok(("srg".into(), pair.shrikhande, pair.rook));
    }
    if let Some(rest) = text.strip_prefix("cfi(").and_then(|r| r.strip_suffix(')')) {
        let k: usize = rest
            .trim()
            .parse()
            .map_err(|_| Failure::input(format!("bad cfi arity `{rest}`")))?;
        let pair = cfi_pair(k).map_err(Failure::input)?;
        return Ok((format!("cfi({k})"), pair.g_side, pair.h_side));
    }
    if let Some(rest) = text.strip_prefix("csl(").and_then(|r| r.strip_suffix(')')) {
        let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Failure::input("csl builtin needs csl(N,S1,S2)"));
        }
        let n: usize = parts[0].parse().map_err(|_| Failure::input("bad csl n"))?;
        let s1: usize = parts[1]
            .parse()
            .map_err(|_| Failure::input("bad csl skip"))?;
        let s2: usize = parts[2]
            .parse()
            .map_err(|_| Failure::input("bad csl skip"))?;
        let a = csl_graph(n, s1).map_err(Failure::input)?;
        let b = csl_graph(n, s2).map_err(Failure::input)?;
        return Ok((format!("csl({n},{s1},{s2})"), a, b));
    }
    Err(Failure::input(format!(
        "unknown builtin `{text}` (expected srg, cfi(K), csl(N,S1,S2))"
    )))
}

fn cmd_distinguish(args: DistinguishArgs) -> Result<(), Failure> {
    let spec = parse_alg(&args.alg, args.cap)?;
    let (label, a, b) = match (&args.builtin, args.files.as_slice()) {
        (Some(builtin), []) => builtin_pair(builtin)?,
        (None, [fa, fb]) => {
            let ga = load_graphs(fa)?;
            let gb = load_graphs(fb)?;
            let a = pick(&ga, 0, fa)?.clone();
            let b = pick(&gb, 0, fb)?.clone();
            (format!("{fa} vs {fb}"), a, b)
        }
        _ => {
            return Err(Failure::input(
                "pass exactly two files, or --builtin NAME with no files",
            ))
        }
    };
    let start = Instant::now();
    let verdict = joint_distinguish(&spec, &a, &b).map_err(Failure::input)?;
    let report = json!({
        "command": "distinguish",
        "version": env!("CARGO_PKG_VERSION"),
        "invocation": {
            "pair": label,
            "algorithm": spec.algorithm.to_string(),
            "cap": spec.iteration_cap,
        },
        "verdict": verdict,
        "wall_ms": start.elapsed().as_millis(),
    });
    emit(&report);
    if matches!(verdict, Verdict::Inconclusive { .. }) {
        return Err(Failure::cap("iteration cap exceeded before a verdict"));
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    let format: GraphFormat = args.format.into();
    let graphs: Vec<Graph> = match args.what.as_str() {
        "srg" => {
            let pair = srg_pair();
            vec![pair.shrikhande, pair.rook]
        }
        "shrikhande" => vec![srg_pair().shrikhande],
        "rook" => vec![srg_pair().rook],
        other => {
            if let Some(rest) = other.strip_prefix("cfi(").and_then(|r| r.strip_suffix(')')) {
                let k: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| Failure::input("bad cfi arity"))?;
                let pair = cfi_pair(k).map_err(Failure::input)?;
                for (side, labels) in [("g", &pair.g_labels), ("h", &pair.h_labels)] {
                    eprintln!("# cfi({k}) side {side} node order: {}", labels.join(" "));
                }
                vec![pair.g_side, pair.h_side]
            } else if let Some(rest) = other.strip_prefix("csl(").and_then(|r| r.strip_suffix(')'))
            {
                let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
                if parts.len() != 2 {
                    return Err(Failure::input("csl generator needs csl(N,S)"));
                }
                let n: usize = parts[0].parse().map_err(|_| Failure::input("bad csl n"))?;
                let s: usize = parts[1]
                    .parse()
                    .map_err(|_| Failure::input("bad csl skip"))?;
                vec![csl_graph(n, s).map_err(Failure::input)?]
            } else if let Some(rest) = other
                .strip_prefix("random(")
                .and_then(|r| r.strip_suffix(')'))
            {
                let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
                if parts.len() != 2 {
                    return Err(Failure::input("random generator needs random(N,P)"));
                }
                let n: usize = parts[0]
                    .parse()
                    .map_err(|_| Failure::input("bad random n"))?;
                let p: f64 = parts[1]
                    .parse()
                    .map_err(|_| Failure::input("bad random p"))?;
                vec![random_graph(n, p, args.seed).map_err(Failure::input)?]
            } else {
                return Err(Failure::input(format!("unknown generator `{other}`")));
            }
        }
    };
    for g in &graphs {
        println!("{}", write_graph_line(g, format));
    }
    Ok(())
}

fn cmd_count(args: CountArgs) -> Result<(), Failure> {
    let kind = SubstructureKind::from_name(&args.kind)
        .ok_or_else(|| Failure::input(format!("unknown substructure kind `{}`", args.kind)))?;
    let graphs = load_graphs(&args.file)?;
    let g = pick(&graphs, args.index, &args.file)?;
    let count = count_substructure(g, kind).map_err(Failure::input)?;
    let report = json!({
        "command": "count",
        "version": env!("CARGO_PKG_VERSION"),
        "invocation": { "file": args.file, "index": args.index },
        "kind": kind.name(),
        "total": count.total,
        "per_node": count.per_node,
    });
    emit(&report);
    Ok(())
}

fn cmd_suite(args: SuiteArgs) -> Result<(), Failure> {
    let level = SuiteLevel::from_str(&args.level).map_err(Failure::input)?;
    let (report, timings) = run_suite(level);
    // Verdicts to stdout, timings to stderr: two suite runs must produce
    // byte-identical stdout.
    emit(&report);
    for (name, ms) in &timings.batteries {
        eprintln!("wl: battery {name} finished in {ms} ms");
    }
    eprintln!("wl: suite total {} ms", timings.total_ms);
    if !report.passed {
        let failed: Vec<&str> = report
            .batteries
            .iter()
            .filter(|b| !b.passed)
            .map(|b| b.name)
            .collect();
        return Err(Failure::suite(format!(
            "failed batteries: {}",
            failed.join(", ")
        )));
    }
    Ok(())
}
