use std::time::Duration;

use momst::{solve_instance, Algorithm, MultiGraph, Outcome, PipelineError, PipelineOptions, Status};

/// Column order of the benchmark CSV.
pub const COLUMNS: [&str; 17] = [
    "instance",
    "algorithm",
    "n",
    "m",
    "d",
    "status",
    "solutions",
    "iterations",
    "transition_nodes",
    "time_preprocess_s",
    "time_solve_s",
    "red_count",
    "blue_count",
    "max_frontier",
    "reduced_n",
    "reduced_m",
    "error",
];

/// One (instance, algorithm) run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub algorithm: String,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub d: Option<usize>,
    /// `solved`, `timeout`, `memout` or `error`.
    pub status: String,
    pub solutions: Option<usize>,
    pub iterations: Option<u64>,
    pub transition_nodes: Option<usize>,
    pub time_preprocess_s: Option<f64>,
    pub time_solve_s: Option<f64>,
    pub red_count: Option<usize>,
    pub blue_count: Option<usize>,
    pub max_frontier: Option<usize>,
    pub reduced_n: Option<usize>,
    pub reduced_m: Option<usize>,
    pub error: String,
}

fn cell<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

impl RunRecord {
    pub fn failed(instance: &str, algorithm: Algorithm, graph: Option<&MultiGraph>, error: String) -> Self {
        RunRecord {
            instance: instance.to_string(),
            algorithm: algorithm.to_string(),
            n: graph.map(MultiGraph::node_count),
            m: graph.map(MultiGraph::edge_count),
            d: graph.map(MultiGraph::dim),
            status: "error".into(),
            error,
            ..RunRecord::default()
        }
    }

    pub fn from_outcome(instance: &str, algorithm: Algorithm, graph: &MultiGraph, out: &Outcome) -> Self {
        let stats = &out.solution.stats;
        let r = &out.reduction;
        RunRecord {
            instance: instance.to_string(),
            algorithm: algorithm.to_string(),
            n: Some(graph.node_count()),
            m: Some(graph.edge_count()),
            d: Some(graph.dim()),
            status: out.solution.status.as_str().to_string(),
            solutions: Some(out.solution.trees.len()),
            iterations: Some(stats.iterations),
            transition_nodes: Some(stats.transition_nodes),
            time_preprocess_s: Some(secs(out.preprocess_time)),
            time_solve_s: Some(secs(stats.solve_time)),
            red_count: Some(r.red_count),
            blue_count: Some(r.blue_count),
            max_frontier: Some(stats.max_frontier),
            reduced_n: Some(r.reduced_graph.node_count()),
            reduced_m: Some(r.reduced_graph.edge_count()),
            error: String::new(),
        }
    }

    pub fn fields(&self) -> [String; 17] {
        [
            self.instance.clone(),
            self.algorithm.clone(),
            cell(&self.n),
            cell(&self.m),
            cell(&self.d),
            self.status.clone(),
            cell(&self.solutions),
            cell(&self.iterations),
            cell(&self.transition_nodes),
            self.time_preprocess_s.map(|t| format!("{t:.6}")).unwrap_or_default(),
            self.time_solve_s.map(|t| format!("{t:.6}")).unwrap_or_default(),
            cell(&self.red_count),
            cell(&self.blue_count),
            cell(&self.max_frontier),
            cell(&self.reduced_n),
            cell(&self.reduced_m),
            self.error.clone(),
        ]
    }

    /// `key=value` summary for the terminal.
    pub fn summary(&self) -> String {
        COLUMNS
            .iter()
            .zip(self.fields())
            .filter(|(_, v)| !v.is_empty())
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Solves `graph` and returns both the record and the outcome.
pub fn run(
    instance: &str,
    graph: &MultiGraph,
    options: &PipelineOptions,
) -> Result<(RunRecord, Outcome), PipelineError> {
    let out = solve_instance(graph, options)?;
    Ok((RunRecord::from_outcome(instance, options.algorithm, graph, &out), out))
}

pub fn exit_code(status: Status) -> u8 {
    match status {
        Status::Solved => 0,
        Status::Timeout => 2,
        Status::Memout => 3,
    }
}
