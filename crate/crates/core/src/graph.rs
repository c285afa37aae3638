//! Undirected multigraph with vector edge costs.

use std::collections::VecDeque;
use std::fmt;

use crate::cost::{CostError, CostVector, MAX_DIM};
use crate::transition::NodeMask;

/// Node masks are 64 bits wide, so instances are capped at 64 nodes.
pub const MAX_NODES: usize = 64;

/// Index of an edge, stable for the lifetime of its graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub cost: CostVector,
}

impl Edge {
    /// The endpoint opposite `x`.
    #[inline]
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("graph needs at least one node")]
    Empty,
    #[error("{0} nodes exceeds the supported maximum of {MAX_NODES}")]
    TooManyNodes(usize),
    #[error("root {root} is not a node of a {n}-node graph")]
    RootOutOfRange { root: usize, n: usize },
    #[error("edge {edge} references node {node}, but the graph has {n} nodes")]
    NodeOutOfRange { edge: usize, node: usize, n: usize },
    #[error("edge {edge} is a self-loop")]
    SelfLoop { edge: usize },
    #[error("edge {edge} has {found} cost components, expected {expected}")]
    DimensionMismatch { edge: usize, expected: usize, found: usize },
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error("graph is not connected")]
    Disconnected,
    #[error("cut of an empty or full node set")]
    EmptyCut,
}

/// The input graph of a MO-MST instance. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    root: usize,
    dim: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<EdgeId>>,
}

impl MultiGraph {
    /// Validates and builds a connected multigraph. Parallel edges are kept.
    pub fn new(n: usize, root: usize, dim: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        if n > MAX_NODES {
            return Err(GraphError::TooManyNodes(n));
        }
        if root >= n {
            return Err(GraphError::RootOutOfRange { root, n });
        }
        if dim == 0 || dim > MAX_DIM {
            return Err(CostError::BadDimension(dim).into());
        }
        let mut adjacency = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            for node in [e.u, e.v] {
                if node >= n {
                    return Err(GraphError::NodeOutOfRange { edge: i, node, n });
                }
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop { edge: i });
            }
            if e.cost.dim() != dim {
                return Err(GraphError::DimensionMismatch { edge: i, expected: dim, found: e.cost.dim() });
            }
            adjacency[e.u].push(EdgeId(i as u32));
            adjacency[e.v].push(EdgeId(i as u32));
        }
        let g = MultiGraph { n, root, dim, edges, adjacency };
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([self.root]);
        seen[self.root] = true;
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &e in &self.adjacency[x] {
                let y = self.edges[e.index()].other(x);
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count == self.n
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn root(&self) -> usize {
        self.root
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.index()]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn incident(&self, node: usize) -> &[EdgeId] {
        &self.adjacency[node]
    }

    /// Mask of every node.
    pub fn full_mask(&self) -> NodeMask {
        NodeMask::full(self.n)
    }

    pub fn root_mask(&self) -> NodeMask {
        NodeMask::singleton(self.root)
    }

    /// Summed cost of a set of edges.
    pub fn cost_of<'a>(&self, edges: impl IntoIterator<Item = &'a EdgeId>) -> Result<CostVector, CostError> {
        let mut total = CostVector::zero(self.dim)?;
        for &e in edges {
            total = total.try_add(&self.edge(e).cost)?;
        }
        Ok(total)
    }

    /// Edges with exactly one endpoint in `set`, ascending by id.
    pub fn cut(&self, set: NodeMask) -> Result<Vec<EdgeId>, GraphError> {
        if set.is_empty() || set == self.full_mask() {
            return Err(GraphError::EmptyCut);
        }
        Ok(self
            .edge_ids()
            .filter(|&e| {
                let edge = self.edge(e);
                set.contains(edge.u) != set.contains(edge.v)
            })
            .collect())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn cv(v: &[u64]) -> CostVector {
        CostVector::from_slice(v).unwrap()
    }

    pub(crate) fn edge(u: usize, v: usize, c: &[u64]) -> Edge {
        Edge { u, v, cost: cv(c) }
    }

    /// s=0, u=1, w=2 with costs [s,u]=(3,3), [s,w]=(1,1), [u,w]=(2,1).
    pub(crate) fn triangle() -> MultiGraph {
        MultiGraph::new(3, 0, 2, vec![edge(0, 1, &[3, 3]), edge(0, 2, &[1, 1]), edge(1, 2, &[2, 1])]).unwrap()
    }

    #[test]
    fn cut_examples() {
        let g = triangle();
        let m = |nodes: &[usize]| NodeMask::from_nodes(nodes.iter().copied());
        assert_eq!(g.cut(m(&[0])).unwrap(), vec![EdgeId(0), EdgeId(1)]);
        assert_eq!(g.cut(m(&[0, 1])).unwrap(), vec![EdgeId(1), EdgeId(2)]);

        let path = MultiGraph::new(3, 0, 1, vec![edge(0, 1, &[1]), edge(1, 2, &[1])]).unwrap();
        assert_eq!(path.cut(m(&[0, 2])).unwrap(), vec![EdgeId(0), EdgeId(1)]);
    }

    #[test]
    fn cut_rejects_trivial_sets() {
        let g = triangle();
        assert_eq!(g.cut(NodeMask::EMPTY), Err(GraphError::EmptyCut));
        assert_eq!(g.cut(g.full_mask()), Err(GraphError::EmptyCut));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(MultiGraph::new(0, 0, 1, vec![]), Err(GraphError::Empty));
        assert_eq!(MultiGraph::new(65, 0, 1, vec![]), Err(GraphError::TooManyNodes(65)));
        assert_eq!(
            MultiGraph::new(2, 0, 1, vec![edge(0, 0, &[1])]),
            Err(GraphError::SelfLoop { edge: 0 })
        );
        assert_eq!(MultiGraph::new(3, 0, 1, vec![edge(0, 1, &[1])]), Err(GraphError::Disconnected));
        assert!(matches!(
            MultiGraph::new(2, 0, 2, vec![edge(0, 1, &[1])]),
            Err(GraphError::DimensionMismatch { .. })
        ));
        assert!(matches!(MultiGraph::new(2, 0, 1, vec![edge(0, 5, &[1])]), Err(GraphError::NodeOutOfRange { .. })));
    }

    #[test]
    fn parallel_edges_are_kept() {
        let g = MultiGraph::new(2, 0, 1, vec![edge(0, 1, &[1]), edge(1, 0, &[1])]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.incident(0).len(), 2);
    }

    #[test]
    fn cut_partitions_edges() {
        // every edge is either in the cut or fully on one side
        let g = triangle();
        for bits in 1u64..7 {
            let set = NodeMask::from_bits(bits);
            let cut = g.cut(set).unwrap();
            let inside = g
                .edge_ids()
                .filter(|&e| set.contains(g.edge(e).u) == set.contains(g.edge(e).v))
                .count();
            assert_eq!(cut.len() + inside, g.edge_count());
        }
    }
}
