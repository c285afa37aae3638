//! Implicit Graph Multiobjective Dijkstra Algorithm.
//!
//! A one-to-one multiobjective label-setting search on the transition graph.
//! The queue holds at most one explored label per transition node, namely a
//! lexicographically smallest one. Every other explored label waits in the
//! NQP list of its last arc. Transition nodes and their (pruned) outgoing arcs
//! are created the first time they are needed.

use std::collections::{HashMap, VecDeque};

use crate::cost::{dominates_or_equal, lex_less, CostVector, Frontier};
use crate::graph::{EdgeId, MultiGraph};
use crate::heap::AddressableHeap;
use crate::solve::{
    check_tree, invariant, Arena, Limits, Progress, Solution, SolveError, SolveOptions, SolveStats, Status, Tree,
};
use crate::transition::{build_outgoing, node_index, NodeMask};

type LabelId = u32;
type StateId = u32;
type ArcId = u32;

#[derive(Debug, Clone, Copy)]
struct Label {
    cost: CostVector,
    state: StateId,
    /// Absent for the initial label at `{root}`.
    arc: Option<ArcId>,
    pred: Option<LabelId>,
}

#[derive(Debug)]
struct State {
    mask: NodeMask,
    index: u64,
    frontier: Frontier,
    permanent: Vec<LabelId>,
    /// Contiguous range in `arcs`, built on first expansion.
    outgoing: Option<(ArcId, ArcId)>,
    incoming: Vec<ArcId>,
    queued: Option<LabelId>,
}

#[derive(Debug)]
struct Arc {
    head: StateId,
    edge: EdgeId,
    cost: CostVector,
    /// Explored labels whose last arc is this one, lex-nondecreasing.
    nqp: VecDeque<LabelId>,
    /// Length of the head node's frontier the current NQP head was last
    /// found undominated against.
    screened: usize,
}

type QueueKey = (CostVector, u64);

pub(crate) struct IgMda<'g> {
    graph: &'g MultiGraph,
    options: &'g SolveOptions,
    full: NodeMask,
    labels: Arena<Label>,
    states: Vec<State>,
    state_of: HashMap<u64, StateId>,
    arcs: Vec<Arc>,
    queue: AddressableHeap<QueueKey>,
    stats: SolveStats,
    last_extracted: Option<CostVector>,
}

impl<'g> IgMda<'g> {
    pub(crate) fn new(graph: &'g MultiGraph, options: &'g SolveOptions) -> Result<Self, SolveError> {
        let mut s = IgMda {
            graph,
            options,
            full: graph.full_mask(),
            labels: Arena::new(),
            states: Vec::new(),
            state_of: HashMap::new(),
            arcs: Vec::new(),
            queue: AddressableHeap::new(),
            stats: SolveStats::default(),
            last_extracted: None,
        };
        let root = s.state(graph.root_mask());
        let init = s.labels.alloc(Label { cost: CostVector::zero(graph.dim())?, state: root, arc: None, pred: None });
        s.enqueue(root, init);
        Ok(s)
    }

    fn state(&mut self, mask: NodeMask) -> StateId {
        let index = node_index(mask, self.graph.root());
        if let Some(&id) = self.state_of.get(&index) {
            return id;
        }
        let id = self.states.len() as StateId;
        self.states.push(State {
            mask,
            index,
            frontier: Frontier::new(),
            permanent: Vec::new(),
            outgoing: None,
            incoming: Vec::new(),
            queued: None,
        });
        self.state_of.insert(index, id);
        id
    }

    fn key(&self, label: LabelId) -> QueueKey {
        let l = self.labels.get(label);
        (l.cost, self.states[l.state as usize].index)
    }

    fn enqueue(&mut self, state: StateId, label: LabelId) {
        let key = self.key(label);
        self.queue.push(state as usize, key);
        self.states[state as usize].queued = Some(label);
        self.stats.max_queue = self.stats.max_queue.max(self.queue.len());
    }

    /// `T*(state) ⪯D cost`, using the first-component skip.
    fn dominated_at(&self, state: StateId, cost: &CostVector) -> Result<bool, SolveError> {
        self.dominated_since(state, 0, cost)
    }

    /// Dominance by the frontier members at `start..`. Frontiers only grow,
    /// so a label already screened against a prefix needs only the rest.
    fn dominated_since(&self, state: StateId, start: usize, cost: &CostVector) -> Result<bool, SolveError> {
        let frontier = &self.states[state as usize].frontier;
        let fast = frontier.dominates_from(start, cost, true);
        if self.options.verify {
            let full = frontier.dominates(cost, false);
            invariant(fast == full, || format!("incremental first-component skip disagrees on {cost}"))?;
        }
        Ok(fast)
    }

    fn ensure_outgoing(&mut self, state: StateId) -> (ArcId, ArcId) {
        if let Some(range) = self.states[state as usize].outgoing {
            return range;
        }
        let mask = self.states[state as usize].mask;
        let start = self.arcs.len() as ArcId;
        for copy in build_outgoing(self.graph, mask, self.options.pruning) {
            let head = self.state(copy.head);
            let id = self.arcs.len() as ArcId;
            self.arcs.push(Arc { head, edge: copy.preimage, cost: copy.cost, nqp: VecDeque::new(), screened: 0 });
            self.states[head as usize].incoming.push(id);
        }
        let range = (start, self.arcs.len() as ArcId);
        self.stats.arcs += u64::from(range.1 - range.0);
        self.states[state as usize].outgoing = Some(range);
        range
    }

    /// Expands `p` along every outgoing arc of its node. Returns whether at
    /// least one expansion became an explored label.
    fn propagate(&mut self, p: LabelId) -> Result<bool, SolveError> {
        let Label { cost: p_cost, state: tail, .. } = *self.labels.get(p);
        let (start, end) = self.ensure_outgoing(tail);
        let mut success = false;
        for arc in start..end {
            let (head, arc_cost) = {
                let a = &self.arcs[arc as usize];
                (a.head, a.cost)
            };
            let cost = p_cost.try_add(&arc_cost)?;
            if self.dominated_at(head, &cost)? {
                continue;
            }
            success = true;
            let q = self.labels.alloc(Label { cost, state: head, arc: Some(arc), pred: Some(p) });
            match self.states[head as usize].queued {
                None => self.enqueue(head, q),
                Some(incumbent) => {
                    let old = *self.labels.get(incumbent);
                    if lex_less(&cost, &old.cost) {
                        let key = self.key(q);
                        self.queue.decrease_key(head as usize, key);
                        self.states[head as usize].queued = Some(q);
                        if dominates_or_equal(&cost, &old.cost) {
                            self.labels.release(incumbent);
                        } else {
                            let old_arc = old.arc.expect("queued label at a non-root node has an arc");
                            let a = &mut self.arcs[old_arc as usize];
                            a.nqp.push_front(incumbent);
                            a.screened = 0;
                        }
                    } else if dominates_or_equal(&old.cost, &cost) {
                        self.labels.release(q);
                    } else {
                        self.arcs[arc as usize].nqp.push_back(q);
                    }
                }
            }
        }
        Ok(success)
    }

    /// Lexicographically smallest NQP head among the incoming arcs of
    /// `state` that the node's permanent set does not dominate. Dominated
    /// heads are dropped for good.
    fn next_queue_path(&mut self, state: StateId) -> Result<Option<LabelId>, SolveError> {
        let mut best: Option<(CostVector, ArcId)> = None;
        let frontier_len = self.states[state as usize].frontier.len();
        for i in 0..self.states[state as usize].incoming.len() {
            let arc = self.states[state as usize].incoming[i];
            while let Some(&head) = self.arcs[arc as usize].nqp.front() {
                let cost = self.labels.get(head).cost;
                if self.dominated_since(state, self.arcs[arc as usize].screened, &cost)? {
                    let a = &mut self.arcs[arc as usize];
                    a.nqp.pop_front();
                    a.screened = 0;
                    self.labels.release(head);
                    continue;
                }
                self.arcs[arc as usize].screened = frontier_len;
                if best.is_none_or(|(b, _)| lex_less(&cost, &b)) {
                    best = Some((cost, arc));
                }
                break;
            }
        }
        Ok(best.map(|(_, arc)| {
            let a = &mut self.arcs[arc as usize];
            a.screened = 0;
            a.nqp.pop_front().expect("head was just inspected")
        }))
    }

    /// One iteration: extract, propagate, make permanent, refill the queue
    /// slot. Returns false once the queue is empty.
    fn step(&mut self) -> Result<bool, SolveError> {
        let Some((state, _)) = self.queue.pop() else {
            return Ok(false);
        };
        let state = state as StateId;
        let p = self.states[state as usize].queued.take().expect("queued state has a label");
        self.stats.iterations += 1;
        let cost = self.labels.get(p).cost;

        if self.options.verify {
            self.verify_extraction(state, &cost)?;
        }
        self.last_extracted = Some(cost);

        let at_target = self.states[state as usize].mask == self.full;
        if at_target {
            self.stats.full_set_extractions += 1;
        }
        let success = !at_target && self.propagate(p)?;
        if at_target || success {
            let s = &mut self.states[state as usize];
            s.frontier.push(cost);
            s.permanent.push(p);
            self.stats.permanent_count += 1;
            self.stats.max_frontier = self.stats.max_frontier.max(s.frontier.len());
        } else {
            self.labels.release(p);
        }

        if let Some(next) = self.next_queue_path(state)? {
            self.enqueue(state, next);
        }
        Ok(true)
    }

    fn verify_extraction(&self, state: StateId, cost: &CostVector) -> Result<(), SolveError> {
        if let Some(last) = self.last_extracted {
            invariant(last <= *cost, || format!("extraction order went from {last} back to {cost}"))?;
        }
        let s = &self.states[state as usize];
        invariant(!s.frontier.dominates(cost, false), || {
            format!("extracted {cost} is dominated at {:?}", s.mask)
        })?;
        invariant(self.queue.is_consistent(), || "queue index out of sync".into())?;
        let queued = self.states.iter().filter(|s| s.queued.is_some()).count();
        invariant(queued == self.queue.len(), || {
            format!("{queued} nodes claim a queue slot but the queue holds {}", self.queue.len())
        })?;
        // frontiers only grow by extracted labels, so checking each newcomer
        // against the current members keeps them pairwise nondominated
        if let Some(x) = s.frontier.iter().find(|x| dominates_or_equal(cost, x)) {
            return Err(SolveError::Invariant(format!("extracted {cost} dominates permanent {x} at {:?}", s.mask)));
        }
        Ok(())
    }

    fn memory_bytes(&self) -> usize {
        let nqp: usize = self.arcs.iter().map(|a| a.nqp.capacity() * 4).sum();
        let perm: usize = self
            .states
            .iter()
            .map(|s| s.permanent.capacity() * 4 + s.frontier.bytes() + s.incoming.capacity() * 4)
            .sum();
        self.labels.bytes()
            + self.states.capacity() * std::mem::size_of::<State>()
            + self.state_of.capacity() * 16
            + self.arcs.capacity() * std::mem::size_of::<Arc>()
            + nqp
            + perm
    }

    /// Preimage edges along the predecessor chain of `label`, ascending.
    fn reconstruct_tree(&self, label: LabelId) -> Vec<EdgeId> {
        let mut edges = Vec::new();
        let mut cur = Some(label);
        while let Some(id) = cur {
            let l = self.labels.get(id);
            if let Some(arc) = l.arc {
                edges.push(self.arcs[arc as usize].edge);
            }
            cur = l.pred;
        }
        edges.sort();
        edges
    }

    fn run(mut self, mut progress: Option<Progress<'_>>) -> Result<Solution, SolveError> {
        let limits = Limits::new(self.options);
        let mut status = Status::Solved;
        while self.step()? {
            if limits.due(self.stats.iterations) {
                self.stats.memory_bytes = self.memory_bytes();
                self.stats.transition_nodes = self.states.len();
                self.stats.solve_time = limits.elapsed();
                if let Some(cb) = progress.as_mut() {
                    cb(&self.stats);
                }
                if let Some(s) = limits.exceeded(self.stats.memory_bytes) {
                    status = s;
                    break;
                }
            }
        }
        self.finish(status, limits)
    }

    fn finish(mut self, status: Status, limits: Limits) -> Result<Solution, SolveError> {
        let target = self.state_of.get(&node_index(self.full, self.graph.root())).copied();
        let mut trees = Vec::new();
        if let Some(t) = target {
            for &label in &self.states[t as usize].permanent {
                let cost = self.labels.get(label).cost;
                let edges = self.reconstruct_tree(label);
                if self.options.verify || cfg!(debug_assertions) {
                    check_tree(self.graph, &edges, &cost)?;
                }
                trees.push(Tree { cost, edges });
            }
        }
        self.stats.transition_nodes = self.states.len();
        self.stats.memory_bytes = self.memory_bytes();
        self.stats.solve_time = limits.elapsed();
        Ok(Solution { status, trees, stats: self.stats })
    }
}

/// Minimum complete set of efficient spanning trees of `graph`.
pub fn solve(graph: &MultiGraph, options: &SolveOptions) -> Result<Solution, SolveError> {
    IgMda::new(graph, options)?.run(None)
}

/// [`solve`] with a callback every `options.check_interval` iterations.
pub fn solve_with_progress(
    graph: &MultiGraph,
    options: &SolveOptions,
    progress: Progress<'_>,
) -> Result<Solution, SolveError> {
    IgMda::new(graph, options)?.run(Some(progress))
}
