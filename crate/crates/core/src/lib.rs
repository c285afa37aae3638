//! Exact solvers for the multiobjective minimum spanning tree problem.
//!
//! A spanning tree is grown one edge at a time from a fixed root. Each node
//! set containing the root is a node of an implicit *transition graph*, and
//! every spanning tree corresponds to paths from `{root}` to the full node
//! set. Two label-setting algorithms search that graph:
//!
//! * [`igmda`]: one queued label per transition node, arc pruning by cut
//!   dominance, and per-arc lists of displaced candidates.
//! * [`bn`]: expansion restricted to one canonical path per tree, with a
//!   lazy queue holding many labels per node.
//!
//! [`preprocess`] removes and contracts edges before solving, [`oracle`]
//! enumerates every tree for small inputs, and [`instance`] reads, writes
//! and generates instance files.

pub mod bn;
pub mod cost;
mod dsu;
pub mod graph;
pub mod heap;
pub mod igmda;
pub mod instance;
pub mod oracle;
pub mod preprocess;
pub mod solve;
pub mod transition;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use web_time::Instant;

pub use cost::{CostVector, Frontier};
pub use graph::{Edge, EdgeId, MultiGraph};
pub use preprocess::Reduction;
pub use solve::{Solution, SolveOptions, SolveStats, SortOrder, Status, Tree};
pub use transition::{NodeMask, Pruning};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Algorithm {
    #[default]
    IgMda,
    Bn,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::IgMda => "igmda",
            Algorithm::Bn => "bn",
        }
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "igmda" => Ok(Algorithm::IgMda),
            "bn" => Ok(Algorithm::Bn),
            _ => Err(format!("unknown algorithm `{s}`")),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Preprocess(#[from] preprocess::PreprocessError),
    #[error(transparent)]
    Solve(#[from] solve::SolveError),
    #[error(transparent)]
    Cost(#[from] cost::CostError),
}

#[derive(Debug, Clone, Default)]
pub struct PipelineOptions {
    pub algorithm: Algorithm,
    pub preprocess: bool,
    pub solve: SolveOptions,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    /// Trees and costs refer to the input graph.
    pub solution: Solution,
    pub reduction: Reduction,
    pub preprocess_time: Duration,
}

/// Optionally reduces `graph`, solves the result, and lifts every tree back
/// to the input graph.
pub fn solve_instance(graph: &MultiGraph, options: &PipelineOptions) -> Result<Outcome, PipelineError> {
    solve_instance_with_progress(graph, options, None)
}

pub fn solve_instance_with_progress(
    graph: &MultiGraph,
    options: &PipelineOptions,
    progress: Option<solve::Progress<'_>>,
) -> Result<Outcome, PipelineError> {
    let start = Instant::now();
    let reduction = if options.preprocess { preprocess::reduce(graph)? } else { Reduction::identity(graph) };
    let preprocess_time = start.elapsed();

    let reduced = &reduction.reduced_graph;
    let mut solution = match (options.algorithm, progress) {
        (Algorithm::IgMda, None) => igmda::solve(reduced, &options.solve)?,
        (Algorithm::IgMda, Some(p)) => igmda::solve_with_progress(reduced, &options.solve, p)?,
        (Algorithm::Bn, None) => bn::solve(reduced, &options.solve)?,
        (Algorithm::Bn, Some(p)) => bn::solve_with_progress(reduced, &options.solve, p)?,
    };
    for tree in &mut solution.trees {
        tree.edges = reduction.lift(&tree.edges)?;
        tree.cost = reduction.lift_cost(&tree.cost)?;
    }
    if options.solve.verify {
        for tree in &solution.trees {
            solve::check_tree(graph, &tree.edges, &tree.cost)?;
        }
    }
    Ok(Outcome { solution, reduction, preprocess_time })
}
