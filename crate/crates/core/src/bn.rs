//! Build Network algorithm with lazy queue management.
//!
//! Labels are expanded on the unpruned transition graph, but only along arcs
//! that keep the path *minimal*: every spanning tree has exactly one minimal
//! path, the one that adds nodes in breadth-first order with the children of
//! each node taken by ascending node id. The queue may hold many labels per
//! transition node; dominance against the node's permanent set is re-checked
//! when a label is extracted.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::cost::{dominates_or_equal, CostVector, Frontier};
use crate::graph::{EdgeId, MultiGraph};
use crate::solve::{
    check_tree, invariant, Arena, Limits, Progress, Solution, SolveError, SolveOptions, SolveStats, SortOrder, Status,
    Tree,
};
use crate::transition::{build_outgoing, node_index, ArcCopy, NodeMask, Pruning};

type LabelId = u32;
type StateId = u32;

/// Sentinel position for nodes not yet in the tree.
const NOT_JOINED: u8 = u8::MAX;

#[derive(Debug, Clone)]
struct BnLabel {
    cost: CostVector,
    state: StateId,
    /// `(interior, new)` endpoints of the last arc's preimage edge.
    last: Option<(u8, u8)>,
    edge: Option<EdgeId>,
    pred: Option<LabelId>,
    /// Nodes in the order they joined the tree, root first.
    order: Box<[u8]>,
}

#[derive(Debug)]
struct State {
    mask: NodeMask,
    index: u64,
    frontier: Frontier,
    permanent: Vec<LabelId>,
    outgoing: Option<Vec<ArcCopy>>,
}

/// Whether appending `arc` to a minimal path keeps it minimal.
///
/// `order` lists the path's nodes by joining time and `last` is the oriented
/// preimage `(u, w)` of the path's last arc. The arc `[u', w']` is accepted
/// if it hangs off the same interior node with a larger new node, or off an
/// interior node that joined strictly later than `u`.
pub fn extends_minimal(order: &[u8], last: Option<(usize, usize)>, arc: &ArcCopy) -> bool {
    let Some((u, w)) = last else {
        return true;
    };
    if arc.interior_node == u {
        return arc.new_node > w;
    }
    let pos = |x: usize| order.iter().position(|&y| y as usize == x);
    match (pos(arc.interior_node), pos(u)) {
        (Some(a), Some(b)) => a > b,
        _ => false,
    }
}

/// Indices of the arcs in `outgoing` that keep the path minimal.
pub fn minimal_extensions(order: &[u8], last: Option<(usize, usize)>, outgoing: &[ArcCopy]) -> Vec<usize> {
    outgoing.iter().enumerate().filter(|(_, a)| extends_minimal(order, last, a)).map(|(i, _)| i).collect()
}

/// Minimality of a whole path given as oriented preimage pairs `(u_i, w_i)`,
/// checked prefix by prefix.
pub fn is_minimal_path(root: usize, arcs: &[(usize, usize)]) -> bool {
    let mut order = vec![root];
    for k in 0..arcs.len() {
        let (u, w) = arcs[k];
        if !order.contains(&u) || order.contains(&w) {
            return false;
        }
        if k > 0 {
            let (pu, pw) = arcs[k - 1];
            let pos = |x: usize| order.iter().position(|&y| y == x).expect("joined");
            let same_parent = pu == u && pw < w;
            let later_parent = pos(u) > pos(pu);
            if !(same_parent || later_parent) {
                return false;
            }
        }
        order.push(w);
    }
    true
}

type QueueEntry = Reverse<((u64, CostVector), u64, u64, LabelId)>;

struct Bn<'g> {
    graph: &'g MultiGraph,
    options: &'g SolveOptions,
    exhaustive: bool,
    full: NodeMask,
    labels: Arena<BnLabel>,
    states: Vec<State>,
    state_of: HashMap<u64, StateId>,
    queue: BinaryHeap<QueueEntry>,
    seq: u64,
    stats: SolveStats,
    last_key: Option<(u64, CostVector)>,
    skip_first: bool,
    extracted_at_target: Vec<LabelId>,
}

impl<'g> Bn<'g> {
    fn new(graph: &'g MultiGraph, options: &'g SolveOptions, exhaustive: bool) -> Result<Self, SolveError> {
        let mut s = Bn {
            graph,
            options,
            exhaustive,
            full: graph.full_mask(),
            labels: Arena::new(),
            states: Vec::new(),
            state_of: HashMap::new(),
            queue: BinaryHeap::new(),
            seq: 0,
            stats: SolveStats::default(),
            last_key: None,
            skip_first: options.sort == SortOrder::Lex,
            extracted_at_target: Vec::new(),
        };
        let root = s.state(graph.root_mask());
        let init = s.labels.alloc(BnLabel {
            cost: CostVector::zero(graph.dim())?,
            state: root,
            last: None,
            edge: None,
            pred: None,
            order: Box::new([graph.root() as u8]),
        });
        s.enqueue(init);
        Ok(s)
    }

    fn state(&mut self, mask: NodeMask) -> StateId {
        let index = node_index(mask, self.graph.root());
        if let Some(&id) = self.state_of.get(&index) {
            return id;
        }
        let id = self.states.len() as StateId;
        self.states.push(State { mask, index, frontier: Frontier::new(), permanent: Vec::new(), outgoing: None });
        self.state_of.insert(index, id);
        id
    }

    fn sort_key(&self, cost: &CostVector) -> (u64, CostVector) {
        match self.options.sort {
            SortOrder::Lex => (0, *cost),
            SortOrder::Sum => (cost.component_sum(), *cost),
        }
    }

    fn enqueue(&mut self, label: LabelId) {
        let l = self.labels.get(label);
        let key = self.sort_key(&l.cost);
        let index = self.states[l.state as usize].index;
        self.seq += 1;
        self.queue.push(Reverse((key, index, self.seq, label)));
        self.stats.max_queue = self.stats.max_queue.max(self.queue.len());
    }

    fn dominated_at(&self, state: StateId, cost: &CostVector) -> Result<bool, SolveError> {
        let frontier = &self.states[state as usize].frontier;
        let fast = frontier.dominates(cost, self.skip_first);
        if self.skip_first && self.options.verify {
            let full = frontier.dominates(cost, false);
            invariant(fast == full, || format!("first-component skip disagrees on {cost}"))?;
        }
        Ok(fast)
    }

    fn ensure_outgoing(&mut self, state: StateId) {
        if self.states[state as usize].outgoing.is_some() {
            return;
        }
        let arcs = build_outgoing(self.graph, self.states[state as usize].mask, Pruning::None);
        for a in &arcs {
            self.state(a.head);
        }
        self.stats.arcs += arcs.len() as u64;
        self.states[state as usize].outgoing = Some(arcs);
    }

    fn make_permanent(&mut self, state: StateId, label: LabelId, cost: CostVector) {
        let s = &mut self.states[state as usize];
        if !self.exhaustive {
            match self.options.sort {
                SortOrder::Lex => s.frontier.push(cost),
                SortOrder::Sum => s.frontier.insert(cost),
            }
        }
        s.permanent.push(label);
        self.stats.permanent_count += 1;
        self.stats.max_frontier = self.stats.max_frontier.max(s.permanent.len());
    }

    fn step(&mut self) -> Result<bool, SolveError> {
        let Some(Reverse((key, _, _, p))) = self.queue.pop() else {
            return Ok(false);
        };
        self.stats.iterations += 1;
        if self.options.verify {
            if let Some(last) = self.last_key {
                invariant(last <= key, || format!("extraction order went from {:?} back to {:?}", last.1, key.1))?;
            }
        }
        self.last_key = Some(key);

        let (cost, state) = {
            let l = self.labels.get(p);
            (l.cost, l.state)
        };
        if !self.exhaustive && self.dominated_at(state, &cost)? {
            self.labels.release(p);
            return Ok(true);
        }
        if self.options.verify && !self.exhaustive {
            let f = &self.states[state as usize].frontier;
            if let Some(x) = f.iter().find(|x| dominates_or_equal(&cost, x)) {
                return Err(SolveError::Invariant(format!("extracted {cost} dominates permanent {x}")));
            }
        }
        if self.states[state as usize].mask == self.full {
            self.stats.full_set_extractions += 1;
            if self.exhaustive {
                self.extracted_at_target.push(p);
            }
            self.make_permanent(state, p, cost);
            return Ok(true);
        }

        self.ensure_outgoing(state);
        let (order, last) = {
            let l = self.labels.get(p);
            (l.order.clone(), l.last.map(|(u, w)| (u as usize, w as usize)))
        };
        let mut position = [NOT_JOINED; 64];
        for (i, &x) in order.iter().enumerate() {
            position[x as usize] = i as u8;
        }
        let outgoing = self.states[state as usize].outgoing.take().expect("built above");
        let mut success = false;
        for arc in &outgoing {
            let minimal = match last {
                None => true,
                Some((u, w)) if arc.interior_node == u => arc.new_node > w,
                Some((u, _)) => position[arc.interior_node] > position[u],
            };
            if !minimal {
                continue;
            }
            let q_cost = cost.try_add(&arc.cost)?;
            let head = self.state_of[&node_index(arc.head, self.graph.root())];
            if !self.exhaustive && self.dominated_at(head, &q_cost)? {
                continue;
            }
            let mut q_order = Vec::with_capacity(order.len() + 1);
            q_order.extend_from_slice(&order);
            q_order.push(arc.new_node as u8);
            let q = self.labels.alloc(BnLabel {
                cost: q_cost,
                state: head,
                last: Some((arc.interior_node as u8, arc.new_node as u8)),
                edge: Some(arc.preimage),
                pred: Some(p),
                order: q_order.into_boxed_slice(),
            });
            self.enqueue(q);
            success = true;
        }
        self.states[state as usize].outgoing = Some(outgoing);
        if success {
            self.make_permanent(state, p, cost);
        } else {
            self.labels.release(p);
        }
        Ok(true)
    }

    fn reconstruct_tree(&self, label: LabelId) -> Vec<EdgeId> {
        let mut edges = Vec::new();
        let mut cur = Some(label);
        while let Some(id) = cur {
            let l = self.labels.get(id);
            edges.extend(l.edge);
            cur = l.pred;
        }
        edges.sort();
        edges
    }

    fn memory_bytes(&self) -> usize {
        let perm: usize = self
            .states
            .iter()
            .map(|s| {
                s.permanent.capacity() * 4
                    + s.frontier.bytes()
                    + s.outgoing.as_ref().map_or(0, |o| o.capacity() * std::mem::size_of::<ArcCopy>())
            })
            .sum();
        // order vectors live on the heap next to each label
        let orders = self.labels.bytes() / std::mem::size_of::<BnLabel>() * self.graph.node_count();
        self.labels.bytes()
            + orders
            + self.queue.capacity() * std::mem::size_of::<QueueEntry>()
            + self.states.capacity() * std::mem::size_of::<State>()
            + self.state_of.capacity() * 16
            + perm
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

        let labels: Vec<LabelId> = if self.exhaustive {
            self.extracted_at_target.clone()
        } else {
            self.state_of
                .get(&node_index(self.full, self.graph.root()))
                .map(|&t| self.states[t as usize].permanent.clone())
                .unwrap_or_default()
        };
        let mut trees = Vec::with_capacity(labels.len());
        for label in labels {
            let cost = self.labels.get(label).cost;
            let edges = self.reconstruct_tree(label);
            if self.options.verify || cfg!(debug_assertions) {
                check_tree(self.graph, &edges, &cost)?;
            }
            trees.push(Tree { cost, edges });
        }
        if !self.exhaustive {
            // sum ordering extracts out of lex order
            trees.sort_by_key(|t| t.cost);
            if self.options.verify {
                for w in trees.windows(2) {
                    invariant(!dominates_or_equal(&w[0].cost, &w[1].cost), || {
                        format!("{} and {} both reported", w[0].cost, w[1].cost)
                    })?;
                }
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
    Bn::new(graph, options, false)?.run(None)
}

/// [`solve`] with a callback every `options.check_interval` iterations.
pub fn solve_with_progress(
    graph: &MultiGraph,
    options: &SolveOptions,
    progress: Progress<'_>,
) -> Result<Solution, SolveError> {
    Bn::new(graph, options, false)?.run(Some(progress))
}

/// Runs BN with every dominance check disabled. Each spanning tree is then
/// extracted at the full node set exactly once; all of them are returned in
/// extraction order.
pub fn enumerate_minimal_paths(graph: &MultiGraph, options: &SolveOptions) -> Result<Solution, SolveError> {
    Bn::new(graph, options, true)?.run(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{cv, edge, triangle};
    use crate::graph::Edge;

    fn arc(u: usize, w: usize) -> ArcCopy {
        ArcCopy {
            head: NodeMask::EMPTY,
            preimage: EdgeId(0),
            cost: cv(&[0]),
            interior_node: u,
            new_node: w,
        }
    }

    fn complete(n: usize) -> MultiGraph {
        let mut edges: Vec<Edge> = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push(edge(u, v, &[(u * 5 + v * 3) as u64 % 7, (u + 2 * v) as u64 % 5]));
            }
        }
        MultiGraph::new(n, 0, 2, edges).unwrap()
    }

    #[test]
    fn minimality_examples() {
        // nodes 1..4 relabelled to 0..3
        assert!(is_minimal_path(0, &[(0, 1), (0, 2), (0, 3)]));
        assert!(!is_minimal_path(0, &[(0, 1), (0, 3), (0, 2)]));
        assert!(extends_minimal(&[0, 1, 2], Some((0, 2)), &arc(0, 3)));
        assert!(!extends_minimal(&[0, 1, 3], Some((0, 3)), &arc(0, 2)));
    }

    #[test]
    fn initial_label_accepts_everything() {
        let g = complete(4);
        let out = build_outgoing(&g, g.root_mask(), Pruning::None);
        assert_eq!(minimal_extensions(&[0], None, &out), (0..out.len()).collect::<Vec<_>>());
    }

    #[test]
    fn later_parent_rule() {
        // after ((0,1),(0,2)): children of 1 and 2 allowed, of 0 only above 2
        let order = [0u8, 1, 2];
        let last = Some((0, 2));
        assert!(extends_minimal(&order, last, &arc(1, 3)));
        assert!(extends_minimal(&order, last, &arc(2, 3)));
        assert!(extends_minimal(&order, last, &arc(0, 3)));
        // after ((0,1),(0,2),(2,3)): going back to node 1 is not allowed
        let order = [0u8, 1, 2, 3];
        assert!(!extends_minimal(&order, Some((2, 3)), &arc(1, 4)));
        assert!(extends_minimal(&order, Some((2, 3)), &arc(3, 4)));
        assert!(!is_minimal_path(0, &[(0, 1), (0, 2), (2, 3), (1, 4)]));
        assert!(is_minimal_path(0, &[(0, 1), (0, 2), (1, 4), (2, 3)]));
    }

    #[test]
    fn exhaustive_mode_counts_cayley() {
        for n in 3..=6usize {
            let g = complete(n);
            let sol = enumerate_minimal_paths(&g, &SolveOptions::default()).unwrap();
            assert_eq!(sol.stats.full_set_extractions, n.pow(n as u32 - 2) as u64, "K{n}");
            let mut trees: Vec<_> = sol.trees.iter().map(|t| t.edges.clone()).collect();
            trees.sort();
            trees.dedup();
            assert_eq!(trees.len(), n.pow(n as u32 - 2));
        }
    }

    #[test]
    fn exhaustive_mode_matches_oracle_on_multigraph() {
        let g = MultiGraph::new(
            4,
            1,
            1,
            vec![edge(0, 1, &[1]), edge(1, 2, &[1]), edge(1, 2, &[2]), edge(2, 3, &[1]), edge(3, 0, &[1]), edge(0, 2, &[3])],
        )
        .unwrap();
        let sol = enumerate_minimal_paths(&g, &SolveOptions::default()).unwrap();
        let mut got: Vec<_> = sol.trees.iter().map(|t| t.edges.clone()).collect();
        got.sort();
        let mut expected = crate::oracle::enumerate_spanning_trees(&g).unwrap().trees;
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn triangle_matches_igmda() {
        let g = triangle();
        let opts = SolveOptions { verify: true, ..SolveOptions::default() };
        let sol = solve(&g, &opts).unwrap();
        assert_eq!(sol.trees, vec![Tree { cost: cv(&[3, 2]), edges: vec![EdgeId(1), EdgeId(2)] }]);
    }

    #[test]
    fn sum_order_gives_the_same_front() {
        let g = complete(6);
        let lex = solve(&g, &SolveOptions { verify: true, ..SolveOptions::default() }).unwrap();
        let sum =
            solve(&g, &SolveOptions { verify: true, sort: SortOrder::Sum, ..SolveOptions::default() }).unwrap();
        assert_eq!(lex.costs(), sum.costs());
    }

    #[test]
    fn queue_holds_several_labels_per_node() {
        let g = complete(5);
        let opts = SolveOptions::default();
        let mut s = Bn::new(&g, &opts, false).unwrap();
        let mut max_same = 0;
        while s.step().unwrap() {
            let mut counts = HashMap::new();
            for Reverse((_, idx, _, _)) in s.queue.iter() {
                *counts.entry(*idx).or_insert(0) += 1;
            }
            max_same = max_same.max(counts.values().copied().max().unwrap_or(0));
        }
        assert!(max_same > 1);
    }
}
