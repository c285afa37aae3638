//! Types shared by the two label-setting solvers.

use std::time::Duration;

use web_time::Instant;

use crate::cost::{CostError, CostVector};
use crate::graph::{EdgeId, MultiGraph};
use crate::transition::Pruning;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Solved,
    Timeout,
    Memout,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Solved => "solved",
            Status::Timeout => "timeout",
            Status::Memout => "memout",
        }
    }
}

/// Queue order for the BN solver. IG-MDA always uses `Lex`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SortOrder {
    #[default]
    Lex,
    /// Sum of components, ties broken lexicographically. Disables the
    /// first-component skip in dominance checks.
    Sum,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Arc pruning for IG-MDA. BN always expands the unpruned graph.
    pub pruning: Pruning,
    pub sort: SortOrder,
    pub time_limit: Option<Duration>,
    /// Budget for the solver's own bookkeeping, in bytes.
    pub memory_limit: Option<usize>,
    /// Re-check the solver invariants at every step and fail on the first
    /// violation.
    pub verify: bool,
    /// Limits are checked and progress is reported every this many iterations.
    pub check_interval: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            pruning: Pruning::CutStar,
            sort: SortOrder::Lex,
            time_limit: None,
            memory_limit: None,
            verify: false,
            check_interval: 4096,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Queue extractions.
    pub iterations: u64,
    pub transition_nodes: usize,
    pub arcs: u64,
    pub permanent_count: u64,
    /// Largest permanent set over all transition nodes.
    pub max_frontier: usize,
    /// Labels extracted at the full node set.
    pub full_set_extractions: u64,
    /// Largest number of labels queued at once.
    pub max_queue: usize,
    pub memory_bytes: usize,
    pub solve_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    pub cost: CostVector,
    /// Ascending edge ids.
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub status: Status,
    /// One tree per nondominated cost vector, lexicographically ascending.
    /// Partial when the solve was aborted.
    pub trees: Vec<Tree>,
    pub stats: SolveStats,
}

impl Solution {
    pub fn costs(&self) -> Vec<CostVector> {
        self.trees.iter().map(|t| t.cost).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub(crate) fn invariant(ok: bool, what: impl FnOnce() -> String) -> Result<(), SolveError> {
    if ok {
        Ok(())
    } else {
        Err(SolveError::Invariant(what()))
    }
}

/// Callback invoked every `check_interval` iterations.
pub type Progress<'a> = &'a mut dyn FnMut(&SolveStats);

pub(crate) struct Limits {
    start: Instant,
    time_limit: Option<Duration>,
    memory_limit: Option<usize>,
    interval: u64,
}

impl Limits {
    pub(crate) fn new(options: &SolveOptions) -> Self {
        Limits {
            start: Instant::now(),
            time_limit: options.time_limit,
            memory_limit: options.memory_limit,
            interval: options.check_interval.max(1),
        }
    }

    pub(crate) fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    #[inline]
    pub(crate) fn due(&self, iterations: u64) -> bool {
        iterations.is_multiple_of(self.interval)
    }

    pub(crate) fn exceeded(&self, memory_bytes: usize) -> Option<Status> {
        if self.memory_limit.is_some_and(|m| memory_bytes > m) {
            return Some(Status::Memout);
        }
        if self.time_limit.is_some_and(|t| self.start.elapsed() > t) {
            return Some(Status::Timeout);
        }
        None
    }
}

/// Checks that `edges` form a spanning tree of `graph` costing `cost`.
pub fn check_tree(graph: &MultiGraph, edges: &[EdgeId], cost: &CostVector) -> Result<(), SolveError> {
    let n = graph.node_count();
    invariant(edges.len() + 1 == n, || format!("tree has {} edges for {n} nodes", edges.len()))?;
    let mut sets = crate::dsu::DisjointSets::new(n);
    for &e in edges {
        let edge = graph.edge(e);
        invariant(sets.union(edge.u, edge.v), || format!("edge {e} closes a cycle"))?;
    }
    let total = graph.cost_of(edges)?;
    invariant(total == *cost, || format!("tree costs {total}, label says {cost}"))
}

/// Slot storage for labels. Freed slots are reused; permanent labels are
/// never freed, so predecessor links stay valid for the whole solve.
#[derive(Debug)]
pub(crate) struct Arena<T> {
    slots: Vec<T>,
    free: Vec<u32>,
}

impl<T> Arena<T> {
    pub(crate) fn new() -> Self {
        Arena { slots: Vec::new(), free: Vec::new() }
    }

    pub(crate) fn alloc(&mut self, value: T) -> u32 {
        match self.free.pop() {
            Some(id) => {
                self.slots[id as usize] = value;
                id
            }
            None => {
                self.slots.push(value);
                (self.slots.len() - 1) as u32
            }
        }
    }

    pub(crate) fn release(&mut self, id: u32) {
        self.free.push(id);
    }

    #[inline]
    pub(crate) fn get(&self, id: u32) -> &T {
        &self.slots[id as usize]
    }

    pub(crate) fn bytes(&self) -> usize {
        self.slots.capacity() * std::mem::size_of::<T>() + self.free.capacity() * 4
    }
}
