//! Brute-force ground truth for small instances: every spanning tree is
//! enumerated and the nondominated cost vectors are filtered pairwise.
//!
//! Nothing here shares code with the solvers beyond the graph model.

use crate::cost::CostVector;
use crate::dsu::DisjointSets;
use crate::graph::{EdgeId, MultiGraph};

/// Largest number of candidate edge subsets the enumeration accepts.
pub const MAX_SUBSETS: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{subsets} candidate edge subsets exceed the oracle limit of {MAX_SUBSETS}")]
    TooLarge { subsets: u128 },
    #[error("tree cost overflowed")]
    Overflow,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TreeSet {
    pub trees: Vec<Vec<EdgeId>>,
    pub costs: Vec<CostVector>,
}

impl TreeSet {
    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// All spanning trees of `graph`, each as an ascending list of edge ids.
pub fn enumerate_spanning_trees(graph: &MultiGraph) -> Result<TreeSet, OracleError> {
    let n = graph.node_count();
    let m = graph.edge_count();
    let subsets = binomial(m as u128, (n - 1) as u128);
    if subsets > MAX_SUBSETS {
        return Err(OracleError::TooLarge { subsets });
    }
    let mut out = TreeSet::default();
    let mut chosen = Vec::with_capacity(n - 1);
    extend(graph, 0, &mut chosen, DisjointSets::new(n), &mut out)?;
    Ok(out)
}

// Subsets are grown in ascending edge order. Once an edge closes a cycle,
// every superset through that branch is cyclic and skipped.
fn extend(
    graph: &MultiGraph,
    next: usize,
    chosen: &mut Vec<EdgeId>,
    sets: DisjointSets,
    out: &mut TreeSet,
) -> Result<(), OracleError> {
    let need = graph.node_count() - 1;
    if chosen.len() == need {
        let mut cost = CostVector::zero(graph.dim()).expect("valid dimension");
        for &e in chosen.iter() {
            cost = cost.checked_add(&graph.edge(e).cost).ok_or(OracleError::Overflow)?;
        }
        out.trees.push(chosen.clone());
        out.costs.push(cost);
        return Ok(());
    }
    let m = graph.edge_count();
    for i in next..m {
        if m - i < need - chosen.len() {
            break;
        }
        let e = graph.edge(EdgeId(i as u32));
        let mut branch = sets.clone();
        if branch.union(e.u, e.v) {
            chosen.push(EdgeId(i as u32));
            extend(graph, i + 1, chosen, branch, out)?;
            chosen.pop();
        }
    }
    Ok(())
}

fn weakly_below(x: &CostVector, y: &CostVector) -> bool {
    (0..x.dim()).all(|i| x[i] <= y[i])
}

/// The nondominated members of `costs`, deduplicated, ascending lexicographically.
pub fn pareto_filter(costs: &[CostVector]) -> Vec<CostVector> {
    let mut sorted = costs.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut kept: Vec<CostVector> = Vec::new();
    for c in sorted {
        // only lexicographically smaller vectors can dominate `c`
        if !kept.iter().any(|k| weakly_below(k, &c)) {
            kept.push(c);
        }
    }
    kept
}

/// Nondominated spanning-tree cost vectors of `graph`, ascending.
pub fn nondominated_costs(graph: &MultiGraph) -> Result<Vec<CostVector>, OracleError> {
    Ok(pareto_filter(&enumerate_spanning_trees(graph)?.costs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{cv, edge, triangle};
    use crate::graph::Edge;
    use proptest::prelude::*;

    fn complete(n: usize) -> MultiGraph {
        let mut edges: Vec<Edge> = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push(edge(u, v, &[(u + v) as u64]));
            }
        }
        MultiGraph::new(n, 0, 1, edges).unwrap()
    }

    #[test]
    fn cayley_counts() {
        for n in 3..=7usize {
            let expected = n.pow(n as u32 - 2);
            assert_eq!(enumerate_spanning_trees(&complete(n)).unwrap().len(), expected, "K{n}");
        }
    }

    #[test]
    fn path_has_one_tree() {
        let g = MultiGraph::new(4, 0, 1, vec![edge(0, 1, &[1]), edge(1, 2, &[2]), edge(2, 3, &[3])]).unwrap();
        let t = enumerate_spanning_trees(&g).unwrap();
        assert_eq!(t.trees, vec![vec![EdgeId(0), EdgeId(1), EdgeId(2)]]);
        assert_eq!(t.costs, vec![cv(&[6])]);
    }

    #[test]
    fn single_node_has_the_empty_tree() {
        let g = MultiGraph::new(1, 0, 2, vec![]).unwrap();
        let t = enumerate_spanning_trees(&g).unwrap();
        assert_eq!(t.trees, vec![Vec::<EdgeId>::new()]);
        assert_eq!(t.costs, vec![cv(&[0, 0])]);
    }

    #[test]
    fn triangle_trees() {
        let t = enumerate_spanning_trees(&triangle()).unwrap();
        let mut costs = t.costs.clone();
        costs.sort();
        assert_eq!(costs, vec![cv(&[3, 2]), cv(&[4, 4]), cv(&[5, 4])]);
        assert_eq!(pareto_filter(&t.costs), vec![cv(&[3, 2])]);
    }

    #[test]
    fn pareto_filter_examples() {
        assert_eq!(pareto_filter(&[cv(&[4, 4]), cv(&[3, 2]), cv(&[5, 4])]), vec![cv(&[3, 2])]);
        assert!(pareto_filter(&[]).is_empty());
        assert_eq!(pareto_filter(&[cv(&[1, 2]), cv(&[2, 1]), cv(&[1, 2])]), vec![cv(&[1, 2]), cv(&[2, 1])]);
    }

    #[test]
    fn guard_refuses_large_inputs() {
        let mut edges: Vec<Edge> = Vec::new();
        for u in 0..12usize {
            for v in u + 1..12 {
                edges.push(edge(u, v, &[1]));
            }
        }
        let g = MultiGraph::new(12, 0, 1, edges).unwrap();
        assert!(matches!(enumerate_spanning_trees(&g), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn parallel_edges_count_separately() {
        let g = MultiGraph::new(2, 0, 1, vec![edge(0, 1, &[1]), edge(0, 1, &[2])]).unwrap();
        assert_eq!(enumerate_spanning_trees(&g).unwrap().len(), 2);
    }

    proptest! {
        #[test]
        fn filter_output_is_antichain_subset_and_order_free(
            raw in proptest::collection::vec(proptest::collection::vec(0u64..5, 3), 0..20),
            rot in 0usize..20,
        ) {
            let costs: Vec<CostVector> = raw.iter().map(|v| cv(v)).collect();
            let front = pareto_filter(&costs);
            for a in &front {
                prop_assert!(costs.contains(a));
                prop_assert!(!costs.iter().any(|c| crate::cost::dominates(c, a)));
            }
            let mut shuffled = costs.clone();
            if !shuffled.is_empty() {
                let k = rot % shuffled.len();
                shuffled.rotate_left(k);
                shuffled.reverse();
            }
            prop_assert_eq!(pareto_filter(&shuffled), front);
        }
    }
}
