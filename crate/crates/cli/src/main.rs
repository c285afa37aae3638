mod bench;
mod record;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use momst::instance::{generate_text, parse_instance, Correlation, Family, InstanceSpec};
use momst::transition::explicit_graph;
use momst::{oracle, preprocess, Algorithm, MultiGraph, PipelineOptions, Pruning, SolveOptions, SortOrder};

use crate::bench::{instance_files, run_bench, worker_count, Source};

const EXIT_USAGE: u8 = 64;
const EXIT_FAILURE: u8 = 1;

#[derive(Parser)]
#[command(name = "momst", version, about = "Exact multiobjective minimum spanning trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a minimum complete set of efficient spanning trees.
    Solve(SolveArgs),
    /// Run several instances and algorithms, writing one CSV row per run.
    Bench(BenchArgs),
    /// Write a generated instance.
    Generate(GenerateArgs),
    /// Nondominated cost vectors by brute-force enumeration (small inputs).
    Oracle {
        instance: PathBuf,
    },
    /// Print instance sizes, preprocessing results or transition graph sizes.
    Inspect {
        instance: PathBuf,
        /// Build the transition graph explicitly and print its size.
        #[arg(long)]
        explicit: bool,
        /// With --explicit, count arcs after cut pruning.
        #[arg(long, requires = "explicit")]
        prune: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Igmda,
    Bn,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Igmda => Algorithm::IgMda,
            AlgoArg::Bn => Algorithm::Bn,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SortArg {
    Lex,
    Sum,
}

#[derive(Args, Clone)]
struct SolverFlags {
    /// Skip red/blue edge preprocessing.
    #[arg(long)]
    no_preprocess: bool,
    /// Expand the unpruned transition graph (IG-MDA only).
    #[arg(long)]
    no_prune: bool,
    /// Queue order for BN.
    #[arg(long, value_enum, default_value = "lex")]
    sort: SortArg,
    /// Wall-clock budget per solve, in seconds.
    #[arg(long, value_name = "SECS")]
    time_limit: Option<f64>,
    /// Budget for solver bookkeeping per solve, in megabytes.
    #[arg(long, value_name = "MB")]
    mem_limit: Option<u64>,
    /// Check solver invariants at every step.
    #[arg(long)]
    verify: bool,
}

impl SolverFlags {
    fn pipeline(&self, algorithm: Algorithm) -> Result<PipelineOptions, String> {
        let time_limit = match self.time_limit {
            Some(t) if !(t >= 0.0 && t.is_finite()) => return Err(format!("invalid time limit {t}")),
            t => t.map(Duration::from_secs_f64),
        };
        Ok(PipelineOptions {
            algorithm,
            preprocess: !self.no_preprocess,
            solve: SolveOptions {
                pruning: if self.no_prune { Pruning::None } else { Pruning::CutStar },
                sort: match self.sort {
                    SortArg::Lex => SortOrder::Lex,
                    SortArg::Sum => SortOrder::Sum,
                },
                time_limit,
                memory_limit: self.mem_limit.map(|mb| (mb as usize).saturating_mul(1 << 20)),
                verify: self.verify,
                ..SolveOptions::default()
            },
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "igmda")]
    algo: AlgoArg,
    #[command(flatten)]
    flags: SolverFlags,
    /// Write solutions here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance files, or directories whose `.momst` files are all used.
    paths: Vec<PathBuf>,
    /// Generator spec such as `family=complete n=10 d=3 correlation=anticorrelated seed=1`.
    #[arg(long = "spec", value_name = "SPEC")]
    specs: Vec<String>,
    /// File with one generator spec per line; `#` starts a comment.
    #[arg(long, value_name = "FILE")]
    spec_file: Option<PathBuf>,
    /// Algorithms to run, in row order.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "igmda,bn")]
    algos: Vec<AlgoArg>,
    #[command(flatten)]
    flags: SolverFlags,
    /// CSV output path; stdout if omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Complete,
    Grid,
    RandomSparse,
}

#[derive(Clone, Copy, ValueEnum)]
enum CorrelationArg {
    Uncorrelated,
    Correlated,
    Anticorrelated,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum, default_value = "complete")]
    family: FamilyArg,
    /// Node count (complete, random-sparse).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// Edges per node (random-sparse).
    #[arg(long, default_value_t = 5)]
    edge_factor: usize,
    /// Number of cost criteria.
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, value_enum, default_value = "uncorrelated")]
    correlation: CorrelationArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

impl GenerateArgs {
    fn spec(&self) -> Result<InstanceSpec, String> {
        let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| format!("--{flag} is required for this family"));
        let family = match self.family {
            FamilyArg::Complete => Family::Complete { n: need(self.n, "n")? },
            FamilyArg::Grid => Family::Grid { rows: need(self.rows, "rows")?, cols: need(self.cols, "cols")? },
            FamilyArg::RandomSparse => Family::RandomSparse { n: need(self.n, "n")?, edge_factor: self.edge_factor },
        };
        let correlation = match self.correlation {
            CorrelationArg::Uncorrelated => Correlation::Uncorrelated,
            CorrelationArg::Correlated => Correlation::Correlated,
            CorrelationArg::Anticorrelated => Correlation::Anticorrelated,
        };
        Ok(InstanceSpec { family, dim: self.d, correlation, seed: self.seed })
    }
}

enum Failure {
    Usage(String),
    Other(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

fn load(path: &Path) -> Result<MultiGraph, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Other(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn id_of(path: &Path) -> String {
    Source::File(path.to_path_buf()).id()
}

fn solve(args: &SolveArgs) -> Result<u8, Failure> {
    let graph = load(&args.instance)?;
    let options = args.flags.pipeline(args.algo.into()).map_err(Failure::Usage)?;
    let (record, outcome) =
        record::run(&id_of(&args.instance), &graph, &options).map_err(|e| Failure::Other(e.to_string()))?;
    let mut out = output(args.out.as_deref())?;
    for tree in &outcome.solution.trees {
        let costs: Vec<String> = tree.cost.as_slice().iter().map(u64::to_string).collect();
        let edges: Vec<String> = tree
            .edges
            .iter()
            .map(|&e| {
                let edge = graph.edge(e);
                format!("{}-{}", edge.u + 1, edge.v + 1)
            })
            .collect();
        writeln!(out, "{} : {}", costs.join(" "), edges.join(" "))?;
    }
    out.flush()?;
    eprintln!("{}", record.summary());
    Ok(record::exit_code(outcome.solution.status))
}

fn bench(args: &BenchArgs) -> Result<u8, Failure> {
    let mut sources = Vec::new();
    for p in &args.paths {
        if p.is_dir() {
            sources.extend(instance_files(p)?.into_iter().map(Source::File));
        } else {
            sources.push(Source::File(p.clone()));
        }
    }
    let mut spec_lines: Vec<String> = args.specs.clone();
    if let Some(f) = &args.spec_file {
        let text = std::fs::read_to_string(f).map_err(|e| Failure::Other(format!("{}: {e}", f.display())))?;
        spec_lines.extend(
            text.lines().map(|l| l.split('#').next().unwrap_or("").trim().to_string()).filter(|l| !l.is_empty()),
        );
    }
    for line in spec_lines {
        let spec = line.parse::<InstanceSpec>().map_err(|e| Failure::Usage(format!("spec `{line}`: {e}")))?;
        sources.push(Source::Spec(spec));
    }
    if sources.is_empty() {
        return Err(Failure::Usage("no instances given".into()));
    }
    let algorithms: Vec<Algorithm> = args.algos.iter().map(|&a| a.into()).collect();
    let options = args.flags.pipeline(Algorithm::IgMda).map_err(Failure::Usage)?;
    let out = output(args.out.as_deref())?;
    let workers = worker_count();
    let to_file = args.out.is_some();
    run_bench(&sources, &algorithms, &options, out, workers, |r| {
        if to_file {
            eprintln!("{} {} {}", r.instance, r.algorithm, r.status);
        }
    })?;
    Ok(0)
}

fn generate(args: &GenerateArgs) -> Result<u8, Failure> {
    let spec = args.spec().map_err(Failure::Usage)?;
    let text = generate_text(&spec).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut out = output(args.out.as_deref())?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(0)
}

fn run_oracle(path: &Path) -> Result<u8, Failure> {
    let graph = load(path)?;
    let front = oracle::nondominated_costs(&graph).map_err(|e| Failure::Other(e.to_string()))?;
    let items: Vec<String> = front.iter().map(ToString::to_string).collect();
    println!("{{{}}}", items.join(","));
    Ok(0)
}

fn inspect(path: &Path, explicit: bool, prune: bool) -> Result<u8, Failure> {
    let graph = load(path)?;
    if explicit {
        let pruning = if prune { Pruning::CutStar } else { Pruning::None };
        let (nodes, arcs) = explicit_graph(&graph, pruning).map_err(|e| Failure::Other(e.to_string()))?;
        println!("nodes={nodes} arcs={arcs}");
        return Ok(0);
    }
    println!("n={} m={} d={} root={}", graph.node_count(), graph.edge_count(), graph.dim(), graph.root() + 1);
    let r = preprocess::reduce(&graph).map_err(|e| Failure::Other(e.to_string()))?;
    println!(
        "red={} blue={} reduced_n={} reduced_m={} blue_offset={}",
        r.red_count,
        r.blue_count,
        r.reduced_graph.node_count(),
        r.reduced_graph.edge_count(),
        r.blue_offset
    );
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Bench(a) => bench(a),
        Command::Generate(a) => generate(a),
        Command::Oracle { instance } => run_oracle(instance),
        Command::Inspect { instance, explicit, prune } => inspect(instance, *explicit, *prune),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
