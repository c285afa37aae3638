//! The transition graph: one node per root-containing subset of the input
//! nodes, one arc per copy of a cut edge. Nodes and arcs are built on demand.

use std::fmt;

use crate::cost::{dominates_or_equal, CostVector};
use crate::graph::{EdgeId, MultiGraph};

/// A subset of the input graph's nodes, one bit per node.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeMask(u64);

impl NodeMask {
    pub const EMPTY: NodeMask = NodeMask(0);

    /// Mask of nodes `0..n`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            NodeMask(u64::MAX)
        } else {
            NodeMask((1u64 << n) - 1)
        }
    }

    pub fn singleton(node: usize) -> Self {
        NodeMask(1u64 << node)
    }

    pub fn from_bits(bits: u64) -> Self {
        NodeMask(bits)
    }

    pub fn from_nodes(nodes: impl IntoIterator<Item = usize>) -> Self {
        nodes.into_iter().fold(Self::EMPTY, |m, x| m.with(x))
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn contains(self, node: usize) -> bool {
        self.0 >> node & 1 == 1
    }

    #[inline]
    pub fn with(self, node: usize) -> Self {
        NodeMask(self.0 | 1u64 << node)
    }

    /// Number of nodes in the set, i.e. the layer of the transition node.
    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn nodes(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl fmt::Debug for NodeMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.nodes()).finish()
    }
}

/// Dense index of a root-containing mask: the root bit is dropped and the
/// remaining `n - 1` bits are read as an integer.
#[inline]
pub fn node_index(mask: NodeMask, root: usize) -> u64 {
    debug_assert!(mask.contains(root));
    let low = mask.0 & ((1u64 << root) - 1);
    let high = if root == 63 { 0 } else { (mask.0 >> (root + 1)) << root };
    low | high
}

/// Arc `(U, U ∪ {new_node})` induced by the cut edge `preimage`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcCopy {
    pub head: NodeMask,
    pub preimage: EdgeId,
    pub cost: CostVector,
    /// Endpoint of the preimage edge inside the tail set.
    pub interior_node: usize,
    pub new_node: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pruning {
    /// One arc per cut edge.
    None,
    /// One arc per member of a minimum complete set of the cut: dominated cut
    /// edges are dropped and cost-equal survivors collapse onto the lowest id.
    #[default]
    CutStar,
}

/// Outgoing arcs of `tail`, sorted by `(new_node, preimage)`.
pub fn build_outgoing(graph: &MultiGraph, tail: NodeMask, pruning: Pruning) -> Vec<ArcCopy> {
    let mut arcs: Vec<ArcCopy> = graph
        .edge_ids()
        .filter_map(|id| {
            let e = graph.edge(id);
            let (interior, outside) = match (tail.contains(e.u), tail.contains(e.v)) {
                (true, false) => (e.u, e.v),
                (false, true) => (e.v, e.u),
                _ => return None,
            };
            Some(ArcCopy {
                head: tail.with(outside),
                preimage: id,
                cost: e.cost,
                interior_node: interior,
                new_node: outside,
            })
        })
        .collect();

    if pruning == Pruning::CutStar {
        arcs.sort_by(|a, b| a.cost.cmp(&b.cost).then(a.preimage.cmp(&b.preimage)));
        let mut kept: Vec<ArcCopy> = Vec::with_capacity(arcs.len());
        for a in arcs {
            // kept entries are lex-no-greater, so only they can dominate `a`
            if !kept.iter().any(|k| dominates_or_equal(&k.cost, &a.cost)) {
                kept.push(a);
            }
        }
        arcs = kept;
    }
    arcs.sort_by_key(|a| (a.new_node, a.preimage));
    arcs
}

/// Largest input size accepted by [`explicit_graph`].
pub const EXPLICIT_MAX_NODES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransitionError {
    #[error("explicit transition graphs are limited to {EXPLICIT_MAX_NODES} nodes, got {0}")]
    TooLarge(usize),
}

/// Materializes every transition node reachable from `{root}` and returns
/// `(node count, arc count)`.
pub fn explicit_graph(graph: &MultiGraph, pruning: Pruning) -> Result<(usize, usize), TransitionError> {
    let n = graph.node_count();
    if n > EXPLICIT_MAX_NODES {
        return Err(TransitionError::TooLarge(n));
    }
    let root = graph.root();
    let full = graph.full_mask();
    let mut seen = vec![false; 1usize << (n - 1)];
    let mut layer = vec![graph.root_mask()];
    seen[0] = true;
    let (mut nodes, mut arcs) = (1usize, 0usize);
    while !layer.is_empty() {
        let mut next = Vec::new();
        for tail in layer {
            if tail == full {
                continue;
            }
            for arc in build_outgoing(graph, tail, pruning) {
                debug_assert_eq!(arc.head.len(), tail.len() + 1);
                arcs += 1;
                let idx = node_index(arc.head, root) as usize;
                if !seen[idx] {
                    seen[idx] = true;
                    nodes += 1;
                    next.push(arc.head);
                }
            }
        }
        layer = next;
    }
    Ok((nodes, arcs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{cv, edge, triangle};
    use crate::graph::Edge;

    fn complete(n: usize, cost: impl Fn(usize, usize) -> Vec<u64>) -> MultiGraph {
        let mut edges: Vec<Edge> = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push(edge(u, v, &cost(u, v)));
            }
        }
        let d = edges[0].cost.dim();
        MultiGraph::new(n, 0, d, edges).unwrap()
    }

    #[test]
    fn node_index_examples() {
        let m = |ns: &[usize]| NodeMask::from_nodes(ns.iter().copied());
        assert_eq!(node_index(m(&[0]), 0), 0);
        assert_eq!(node_index(m(&[0, 2]), 0), 2);
        assert_eq!(node_index(m(&[0, 1, 2]), 0), 3);
        // root in the middle: bits above it shift down by one
        assert_eq!(node_index(m(&[1]), 1), 0);
        assert_eq!(node_index(m(&[0, 1, 2]), 1), 0b11);
        assert_eq!(node_index(NodeMask::full(64), 63), (1u64 << 63) - 1);
        assert_eq!(node_index(NodeMask::full(64), 0), (1u64 << 63) - 1);
    }

    #[test]
    fn node_index_is_a_bijection() {
        for root in 0..5 {
            let mut seen = std::collections::HashSet::new();
            for bits in 0u64..32 {
                let mask = NodeMask::from_bits(bits);
                if mask.contains(root) {
                    let idx = node_index(mask, root);
                    assert!(idx < 16);
                    assert!(seen.insert(idx));
                }
            }
            assert_eq!(seen.len(), 16);
        }
    }

    #[test]
    fn unpruned_arcs_of_triangle() {
        let g = triangle();
        let from_root = build_outgoing(&g, g.root_mask(), Pruning::None);
        let summary: Vec<_> = from_root.iter().map(|a| (a.cost, a.head)).collect();
        assert_eq!(
            summary,
            vec![(cv(&[3, 3]), NodeMask::from_bits(0b011)), (cv(&[1, 1]), NodeMask::from_bits(0b101))]
        );

        let su = NodeMask::from_bits(0b011);
        let parallel = build_outgoing(&g, su, Pruning::None);
        assert_eq!(parallel.len(), 2);
        assert!(parallel.iter().all(|a| a.head == g.full_mask()));
        assert_eq!(parallel[0].cost, cv(&[1, 1]));
        assert_eq!(parallel[1].cost, cv(&[2, 1]));
        assert_eq!((parallel[0].interior_node, parallel[0].new_node), (0, 2));
        assert_eq!((parallel[1].interior_node, parallel[1].new_node), (1, 2));
    }

    #[test]
    fn pruned_arcs_of_triangle() {
        let g = triangle();
        let pruned = build_outgoing(&g, NodeMask::from_bits(0b011), Pruning::CutStar);
        assert_eq!(pruned.len(), 1);
        assert_eq!(pruned[0].cost, cv(&[1, 1]));
        assert_eq!(pruned[0].preimage, EdgeId(1));
    }

    #[test]
    fn cut_star_keeps_lowest_id_of_equal_costs() {
        let g = MultiGraph::new(3, 0, 2, vec![edge(0, 2, &[1, 1]), edge(0, 1, &[1, 1]), edge(1, 2, &[0, 5])]).unwrap();
        let arcs = build_outgoing(&g, g.root_mask(), Pruning::CutStar);
        assert_eq!(arcs.iter().map(|a| a.preimage).collect::<Vec<_>>(), vec![EdgeId(0)]);
    }

    #[test]
    fn explicit_counts_match_closed_forms() {
        for n in 3..=10usize {
            let g = complete(n, |u, v| vec![(u * 7 + v * 3) as u64 % 11, (u + v) as u64 % 5]);
            let (nodes, arcs) = explicit_graph(&g, Pruning::None).unwrap();
            assert_eq!(nodes, 1 << (n - 1), "n = {n}");
            assert_eq!(arcs, (1 << (n - 1)) * (n - 1) * n / 4, "n = {n}");
        }
    }

    #[test]
    fn explicit_k3_and_k5() {
        let k3 = complete(3, |_, _| vec![1]);
        assert_eq!(explicit_graph(&k3, Pruning::None).unwrap(), (4, 6));
        let k5 = complete(5, |u, v| vec![u as u64, v as u64]);
        assert_eq!(explicit_graph(&k5, Pruning::None).unwrap(), (16, 80));
    }

    /// Brute-force reference for the pruned arc set: pairwise filter over the
    /// cut, keeping the first of every cost class.
    fn pairwise_cut_star(g: &MultiGraph, tail: NodeMask) -> Vec<EdgeId> {
        let cut = g.cut(tail).unwrap();
        cut.iter()
            .copied()
            .filter(|&e| {
                let c = g.edge(e).cost;
                !cut.iter().any(|&f| {
                    let cf = g.edge(f).cost;
                    crate::cost::dominates(&cf, &c) || (cf == c && f < e)
                })
            })
            .collect()
    }

    fn pairwise_explicit(g: &MultiGraph) -> (usize, usize) {
        let mut seen = std::collections::HashSet::from([g.root_mask()]);
        let mut stack = vec![g.root_mask()];
        let mut arcs = 0;
        while let Some(t) = stack.pop() {
            if t == g.full_mask() {
                continue;
            }
            for e in pairwise_cut_star(g, t) {
                arcs += 1;
                let edge = g.edge(e);
                let head = t.with(edge.u).with(edge.v);
                if seen.insert(head) {
                    stack.push(head);
                }
            }
        }
        (seen.len(), arcs)
    }

    #[test]
    fn equal_cost_k4_pruned_counts() {
        let g = complete(4, |_, _| vec![2, 2]);
        let counts = explicit_graph(&g, Pruning::CutStar).unwrap();
        assert_eq!(counts, pairwise_explicit(&g));
        assert_eq!(counts, (4, 3));
        assert!(counts.1 < 24);
    }

    #[test]
    fn pruned_arcs_match_pairwise_filter() {
        let g = complete(6, |u, v| vec![((u * 31 + v * 17) % 7) as u64, ((u * 5 + v * 11) % 4) as u64]);
        for bits in 1u64..(1 << 6) - 1 {
            let tail = NodeMask::from_bits(bits | 1);
            if tail == g.full_mask() {
                continue;
            }
            let mut fast: Vec<EdgeId> =
                build_outgoing(&g, tail, Pruning::CutStar).iter().map(|a| a.preimage).collect();
            fast.sort();
            assert_eq!(fast, pairwise_cut_star(&g, tail));
        }
        assert_eq!(explicit_graph(&g, Pruning::CutStar).unwrap(), pairwise_explicit(&g));
    }

    #[test]
    fn arcs_point_one_layer_up() {
        let g = complete(6, |u, v| vec![(u * v) as u64 % 4]);
        for bits in 0u64..(1 << 5) {
            let tail = NodeMask::from_bits(bits << 1 | 1);
            for a in build_outgoing(&g, tail, Pruning::None) {
                assert_eq!(a.head.len(), tail.len() + 1);
                assert!(!tail.contains(a.new_node));
                assert_eq!(a.cost, g.edge(a.preimage).cost);
            }
        }
    }

    #[test]
    fn explicit_mode_refuses_large_graphs() {
        let edges = (1..21).map(|v| edge(0, v, &[1])).collect();
        let g = MultiGraph::new(21, 0, 1, edges).unwrap();
        assert_eq!(explicit_graph(&g, Pruning::None), Err(TransitionError::TooLarge(21)));
    }
}
