//! Red/blue edge elimination.
//!
//! A red edge lies in no tree of some minimum complete set and is deleted. A
//! blue edge can be forced into a tree for every nondominated cost vector and
//! is contracted. Both tests below are sufficient conditions, each decided by
//! one connectivity query over a cost-filtered edge set:
//!
//! * red: the endpoints of `e` are joined by a path of edges that each
//!   strictly dominate `e` (cycle rule);
//! * blue: the endpoints of `e` are separated once every edge that `e`
//!   dominates-or-equals is removed (cut rule).

use crate::cost::{dominates, dominates_or_equal, CostError, CostVector};
use crate::dsu::DisjointSets;
use crate::graph::{Edge, EdgeId, GraphError, MultiGraph};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PreprocessError {
    #[error("reduction produced an invalid graph: {0}")]
    Invariant(#[from] GraphError),
    #[error("edge {0} is not part of the reduced graph")]
    UnmappedEdge(EdgeId),
    #[error(transparent)]
    Cost(#[from] CostError),
}

/// A reduced instance plus what is needed to map its trees back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub reduced_graph: MultiGraph,
    /// Original node to reduced node.
    pub node_map: Vec<usize>,
    /// Original edges contracted into every output tree, ascending.
    pub blue_edges: Vec<EdgeId>,
    pub blue_offset: CostVector,
    /// Reduced edge id to original edge id.
    pub edge_map: Vec<EdgeId>,
    pub red_count: usize,
    pub blue_count: usize,
}

impl Reduction {
    /// The no-op reduction of `graph`.
    pub fn identity(graph: &MultiGraph) -> Self {
        Reduction {
            reduced_graph: graph.clone(),
            node_map: (0..graph.node_count()).collect(),
            blue_edges: Vec::new(),
            blue_offset: CostVector::zero(graph.dim()).expect("graph dimension is valid"),
            edge_map: graph.edge_ids().collect(),
            red_count: 0,
            blue_count: 0,
        }
    }

    /// Maps a spanning tree of the reduced graph to one of the original graph.
    pub fn lift(&self, reduced_tree: &[EdgeId]) -> Result<Vec<EdgeId>, PreprocessError> {
        let mut out = Vec::with_capacity(reduced_tree.len() + self.blue_edges.len());
        for &e in reduced_tree {
            out.push(*self.edge_map.get(e.index()).ok_or(PreprocessError::UnmappedEdge(e))?);
        }
        out.extend_from_slice(&self.blue_edges);
        out.sort();
        Ok(out)
    }

    /// Lifts a reduced-graph cost vector by adding the blue offset.
    pub fn lift_cost(&self, cost: &CostVector) -> Result<CostVector, CostError> {
        cost.try_add(&self.blue_offset)
    }
}

fn endpoints_joined(graph: &MultiGraph, e: EdgeId, keep: impl Fn(&Edge) -> bool) -> bool {
    let mut sets = DisjointSets::new(graph.node_count());
    for f in graph.edge_ids() {
        if f != e && keep(graph.edge(f)) {
            sets.union(graph.edge(f).u, graph.edge(f).v);
        }
    }
    let edge = graph.edge(e);
    sets.same(edge.u, edge.v)
}

/// Cycle rule: a path of strictly dominating edges joins the endpoints of `e`.
pub fn is_red(graph: &MultiGraph, e: EdgeId) -> bool {
    let c = graph.edge(e).cost;
    endpoints_joined(graph, e, |f| dominates(&f.cost, &c))
}

/// Cut rule: removing all edges that `e` dominates-or-equals separates the
/// endpoints of `e`.
pub fn is_blue(graph: &MultiGraph, e: EdgeId) -> bool {
    let c = graph.edge(e).cost;
    !endpoints_joined(graph, e, |f| !dominates_or_equal(&c, &f.cost))
}

struct Work {
    graph: MultiGraph,
    edge_map: Vec<EdgeId>,
    node_map: Vec<usize>,
}

impl Work {
    fn delete(&mut self, e: EdgeId) -> Result<(), GraphError> {
        let mut edges = self.graph.edges().to_vec();
        edges.remove(e.index());
        self.edge_map.remove(e.index());
        self.graph = MultiGraph::new(self.graph.node_count(), self.graph.root(), self.graph.dim(), edges)?;
        Ok(())
    }

    /// Merges the endpoints of `e`; edges that become self-loops disappear.
    fn contract(&mut self, e: EdgeId) -> Result<(), GraphError> {
        let Edge { u, v, .. } = *self.graph.edge(e);
        let (keep, gone) = (u.min(v), u.max(v));
        let relabel = |x: usize| {
            let x = if x == gone { keep } else { x };
            if x > gone {
                x - 1
            } else {
                x
            }
        };
        let mut edges = Vec::with_capacity(self.graph.edge_count());
        let mut edge_map = Vec::with_capacity(self.graph.edge_count());
        for (i, edge) in self.graph.edges().iter().enumerate() {
            let (a, b) = (relabel(edge.u), relabel(edge.v));
            if a != b {
                edges.push(Edge { u: a, v: b, cost: edge.cost });
                edge_map.push(self.edge_map[i]);
            }
        }
        for x in &mut self.node_map {
            *x = relabel(*x);
        }
        self.edge_map = edge_map;
        let n = self.graph.node_count() - 1;
        self.graph = MultiGraph::new(n, relabel(self.graph.root()), self.graph.dim(), edges)?;
        Ok(())
    }
}

/// Deletes red and contracts blue edges until neither kind remains.
///
/// Each edge is tested against the current graph, so every individual step is
/// applied to an instance equivalent to the original one.
pub fn reduce(graph: &MultiGraph) -> Result<Reduction, PreprocessError> {
    let mut work = Work {
        graph: graph.clone(),
        edge_map: graph.edge_ids().collect(),
        node_map: (0..graph.node_count()).collect(),
    };
    let mut blue_edges = Vec::new();
    let (mut red_count, mut blue_count) = (0, 0);

    loop {
        let mut changed = false;
        let mut last: Option<EdgeId> = None;
        loop {
            // edge_map stays sorted, so the next edge to test is found by position
            let pos = match last {
                None => 0,
                Some(orig) => work.edge_map.partition_point(|&x| x <= orig),
            };
            if pos >= work.graph.edge_count() {
                break;
            }
            let e = EdgeId(pos as u32);
            let orig = work.edge_map[pos];
            last = Some(orig);
            if is_red(&work.graph, e) {
                work.delete(e)?;
                red_count += 1;
                changed = true;
            } else if is_blue(&work.graph, e) {
                work.contract(e)?;
                blue_edges.push(orig);
                blue_count += 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    blue_edges.sort();
    let blue_offset = graph.cost_of(&blue_edges)?;
    Ok(Reduction {
        reduced_graph: work.graph,
        node_map: work.node_map,
        blue_edges,
        blue_offset,
        edge_map: work.edge_map,
        red_count,
        blue_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{cv, edge, triangle};
    use crate::oracle;

    #[test]
    fn triangle_colors() {
        let g = triangle();
        assert!(is_red(&g, EdgeId(0)));
        assert!(!is_blue(&g, EdgeId(0)));
        assert!(is_blue(&g, EdgeId(1)));
        assert!(!is_red(&g, EdgeId(1)));
        // the oracle agrees that [s,u] is in no efficient tree
        let trees = oracle::enumerate_spanning_trees(&g).unwrap();
        let front = oracle::pareto_filter(&trees.costs);
        for (t, c) in trees.trees.iter().zip(&trees.costs) {
            if front.contains(c) {
                assert!(!t.contains(&EdgeId(0)));
                assert!(t.contains(&EdgeId(1)));
            }
        }
    }

    #[test]
    fn bridges_are_blue_never_red() {
        let g = MultiGraph::new(2, 0, 1, vec![edge(0, 1, &[5])]).unwrap();
        assert!(!is_red(&g, EdgeId(0)));
        assert!(is_blue(&g, EdgeId(0)));
    }

    #[test]
    fn equal_cost_triangle() {
        let g = MultiGraph::new(3, 0, 2, vec![edge(0, 1, &[1, 1]), edge(0, 2, &[1, 1]), edge(1, 2, &[1, 1])]).unwrap();
        for e in g.edge_ids() {
            assert!(!is_red(&g, e));
            assert!(is_blue(&g, e));
        }
        // contracting one blue edge at a time keeps the offset at one tree's cost
        let r = reduce(&g).unwrap();
        assert_eq!(r.reduced_graph.node_count(), 1);
        assert_eq!(r.blue_offset, cv(&[2, 2]));
        assert_eq!(r.blue_count, 2);
        assert_eq!(oracle::nondominated_costs(&g).unwrap(), vec![cv(&[2, 2])]);
    }

    #[test]
    fn triangle_reduces_fully() {
        let g = triangle();
        let r = reduce(&g).unwrap();
        assert_eq!(r.reduced_graph.node_count(), 1);
        assert_eq!(r.reduced_graph.edge_count(), 0);
        assert_eq!(r.blue_edges, vec![EdgeId(1), EdgeId(2)]);
        assert_eq!(r.blue_offset, cv(&[3, 2]));
        assert_eq!((r.red_count, r.blue_count), (1, 2));
        assert_eq!(r.lift(&[]).unwrap(), vec![EdgeId(1), EdgeId(2)]);
        assert_eq!(oracle::nondominated_costs(&g).unwrap(), vec![cv(&[3, 2])]);
    }

    #[test]
    fn incomparable_costs_leave_graph_unchanged() {
        // 4-cycle with pairwise incomparable costs: no cycle of dominating
        // edges, and every cut crosses an incomparable edge
        let g = MultiGraph::new(
            4,
            0,
            2,
            vec![edge(0, 1, &[1, 4]), edge(1, 2, &[2, 3]), edge(2, 3, &[3, 2]), edge(3, 0, &[4, 1])],
        )
        .unwrap();
        let r = reduce(&g).unwrap();
        assert_eq!((r.red_count, r.blue_count), (0, 0));
        assert_eq!(r.reduced_graph, g);
        assert_eq!(r, Reduction::identity(&g));
        assert_eq!(r.lift(&[EdgeId(0), EdgeId(2), EdgeId(1)]).unwrap(), vec![EdgeId(0), EdgeId(1), EdgeId(2)]);
    }

    #[test]
    fn trees_contract_to_one_node() {
        let g = MultiGraph::new(4, 2, 2, vec![edge(0, 1, &[1, 2]), edge(1, 2, &[3, 0]), edge(1, 3, &[2, 2])]).unwrap();
        let r = reduce(&g).unwrap();
        assert_eq!(r.reduced_graph.node_count(), 1);
        assert_eq!(r.blue_offset, cv(&[6, 4]));
        assert_eq!(r.lift(&[]).unwrap(), g.edge_ids().collect::<Vec<_>>());
        assert!(r.node_map.iter().all(|&x| x == 0));
    }

    #[test]
    fn lift_rejects_unknown_edges() {
        let g = triangle();
        let r = Reduction::identity(&g);
        assert_eq!(r.lift(&[EdgeId(7)]), Err(PreprocessError::UnmappedEdge(EdgeId(7))));
    }

    #[test]
    fn reduce_is_idempotent_on_parallel_edges() {
        let g = MultiGraph::new(
            3,
            0,
            2,
            vec![edge(0, 1, &[2, 2]), edge(0, 1, &[1, 1]), edge(1, 2, &[1, 3]), edge(0, 2, &[3, 1]), edge(1, 2, &[1, 3])],
        )
        .unwrap();
        let r = reduce(&g).unwrap();
        assert!(r.red_count >= 1);
        let again = reduce(&r.reduced_graph).unwrap();
        assert_eq!((again.red_count, again.blue_count), (0, 0));
        let lifted: Vec<CostVector> = oracle::nondominated_costs(&r.reduced_graph)
            .unwrap()
            .iter()
            .map(|c| r.lift_cost(c).unwrap())
            .collect();
        assert_eq!(lifted, oracle::nondominated_costs(&g).unwrap());
    }
}
