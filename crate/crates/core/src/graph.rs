//! Range-based connectivity graph over positioned nodes.
//!
//! Two distinct nodes are adjacent iff their Euclidean distance is at most the
//! communication range. The graph is immutable once built; component labels
//! are computed eagerly so every query afterwards is read-only.
//!
//! Positions that live on the move grid routinely sit at exactly the range
//! apart (an offset of (0.2, 0.15) at range 0.25, say), which floating point
//! lands one ulp either side of. [`within_range`] therefore allows a
//! tolerance of `sqrt(epsilon)` so such ties count as edges, and so a graph
//! rebuilt from positions printed at nine significant digits agrees with the
//! original.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::geometry::{NodeId, Position};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("communication range must be positive and finite, got {0}")]
    InvalidRange(f64),
    #[error("unknown node id {0}")]
    UnknownNode(NodeId),
    #[error("graph has no nodes")]
    Empty,
}

/// Nodes and edges of a one-hop neighborhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    /// Ego first, then neighbors in ascending id order.
    pub nodes: Vec<NodeId>,
    /// Every graph edge with both endpoints in `nodes`, as `(min, max)` pairs.
    pub edges: Vec<(NodeId, NodeId)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeGraph<T> {
    nodes: Vec<(NodeId, Position<T>)>,
    range: T,
    edges: Vec<(NodeId, NodeId)>,
    index: BTreeMap<NodeId, usize>,
    /// Neighbor indices per node, sorted by neighbor id.
    adjacency: Vec<Vec<usize>>,
    component: Vec<usize>,
    component_sizes: Vec<usize>,
}

struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Slack added to the range in the edge test.
pub fn range_tolerance<T: Scalar>() -> T {
    T::epsilon().sqrt()
}

/// The edge predicate: `distance(a, b) <= range` up to [`range_tolerance`].
pub fn within_range<T: Scalar>(a: &Position<T>, b: &Position<T>, range: T) -> bool {
    a.distance(b) <= range + range_tolerance::<T>()
}

impl<T: Scalar> RangeGraph<T> {
    /// Builds the graph from node positions and a communication range.
    ///
    /// Edges are returned sorted by `(min id, max id)` regardless of the
    /// input order.
    pub fn build(nodes: Vec<(NodeId, Position<T>)>, range: T) -> Result<Self, GraphError> {
        if !range.is_finite() || range <= T::zero() {
            return Err(GraphError::InvalidRange(range.as_f64()));
        }
        let mut index = BTreeMap::new();
        for (i, (id, _)) in nodes.iter().enumerate() {
            if index.insert(*id, i).is_some() {
                return Err(GraphError::DuplicateNode(*id));
            }
        }

        let n = nodes.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut edges = Vec::new();
        let mut sets = DisjointSets::new(n);
        for i in 0..n {
            for j in (i + 1)..n {
                if within_range(&nodes[i].1, &nodes[j].1, range) {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                    let (a, b) = (nodes[i].0, nodes[j].0);
                    edges.push((a.min(b), a.max(b)));
                    sets.union(i, j);
                }
            }
        }
        edges.sort_unstable();
        for neighbors in &mut adjacency {
            neighbors.sort_unstable_by_key(|&k| nodes[k].0);
        }

        let mut label_of_root = BTreeMap::new();
        let mut component = Vec::with_capacity(n);
        let mut component_sizes = Vec::new();
        for i in 0..n {
            let root = sets.find(i);
            let label = *label_of_root.entry(root).or_insert_with(|| {
                component_sizes.push(0);
                component_sizes.len() - 1
            });
            component_sizes[label] += 1;
            component.push(label);
        }

        Ok(RangeGraph { nodes, range, edges, index, adjacency, component, component_sizes })
    }

    pub fn range(&self) -> T {
        self.range
    }

    pub fn nodes(&self) -> &[(NodeId, Position<T>)] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn position(&self, id: NodeId) -> Result<Position<T>, GraphError> {
        Ok(self.nodes[self.lookup(id)?].1)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    /// Neighbors of `v` in ascending id order.
    pub fn neighbors(&self, v: NodeId) -> Result<Vec<NodeId>, GraphError> {
        let i = self.lookup(v)?;
        Ok(self.adjacency[i].iter().map(|&k| self.nodes[k].0).collect())
    }

    /// Size of the largest connected component; 1 for an edgeless graph.
    pub fn largest_component_size(&self) -> Result<usize, GraphError> {
        self.component_sizes.iter().copied().max().ok_or(GraphError::Empty)
    }

    /// Whether `u` and `v` lie in the same connected component.
    pub fn path_exists(&self, u: NodeId, v: NodeId) -> Result<bool, GraphError> {
        let (a, b) = (self.lookup(u)?, self.lookup(v)?);
        Ok(self.component[a] == self.component[b])
    }

    /// The ego node, its neighbors, and all edges among them.
    pub fn one_hop_subgraph(&self, v: NodeId) -> Result<Subgraph, GraphError> {
        let mut nodes = vec![v];
        nodes.extend(self.neighbors(v)?);
        let edges = self.edges.iter().filter(|(a, b)| nodes.contains(a) && nodes.contains(b)).copied().collect();
        Ok(Subgraph { nodes, edges })
    }

    fn lookup(&self, id: NodeId) -> Result<usize, GraphError> {
        self.index.get(&id).copied().ok_or(GraphError::UnknownNode(id))
    }
}
