//! Edge-subset views over a [`Topology`].

use crate::topology::{EdgeId, NodeId, Topology};

/// A spanning subgraph: all topology nodes, a subset of its edges.
///
/// The full topology is `Subgraph::full(t)`; the instantaneous link-state
/// graph G' is the subset of currently present links.
#[derive(Clone, Debug)]
pub struct Subgraph<'t> {
    topo: &'t Topology,
    present: Vec<bool>,
    edge_count: usize,
}

impl<'t> Subgraph<'t> {
    pub fn full(topo: &'t Topology) -> Self {
        Subgraph {
            topo,
            present: vec![true; topo.edge_count()],
            edge_count: topo.edge_count(),
        }
    }

    pub fn empty(topo: &'t Topology) -> Self {
        Subgraph {
            topo,
            present: vec![false; topo.edge_count()],
            edge_count: 0,
        }
    }

    pub fn from_edges(topo: &'t Topology, edges: impl IntoIterator<Item = EdgeId>) -> Self {
        let mut g = Subgraph::empty(topo);
        for e in edges {
            g.insert(e);
        }
        g
    }

    pub fn topology(&self) -> &'t Topology {
        self.topo
    }

    pub fn node_count(&self) -> usize {
        self.topo.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.present[e.0]
    }

    pub fn insert(&mut self, e: EdgeId) {
        if !self.present[e.0] {
            self.present[e.0] = true;
            self.edge_count += 1;
        }
    }

    pub fn remove(&mut self, e: EdgeId) {
        if self.present[e.0] {
            self.present[e.0] = false;
            self.edge_count -= 1;
        }
    }

    /// Present edges in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(i, _)| EdgeId(i))
    }

    /// Present neighbours of `n`, sorted by neighbour index.
    pub fn neighbours(&self, n: NodeId) -> impl Iterator<Item = (NodeId, EdgeId)> + '_ {
        self.topo
            .neighbours(n)
            .iter()
            .copied()
            .filter(|&(_, e)| self.present[e.0])
    }

    pub fn degree(&self, n: NodeId) -> usize {
        self.neighbours(n).count()
    }

    /// Connected-component label per node; labels are dense from 0 in order
    /// of the lowest node in each component.
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for (v, _) in self.neighbours(NodeId(u)) {
                    if label[v.0] == usize::MAX {
                        label[v.0] = next;
                        stack.push(v.0);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Size of the largest connected component.
    pub fn largest_component(&self) -> usize {
        let label = self.components();
        let mut sizes = vec![0usize; label.iter().max().map_or(0, |m| m + 1)];
        for l in label {
            sizes[l] += 1;
        }
        sizes.into_iter().max().unwrap_or(0)
    }
}
