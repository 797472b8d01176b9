//! Graph algorithms over a topology or a link-state subgraph.
//!
//! All routines are pure and deterministic; ties are broken towards lower
//! node and edge indices.

mod centre;
mod cut;
mod flow;
mod paths;
mod steiner;

use std::collections::BTreeMap;

use crate::topology::{EdgeId, NodeId};

pub use centre::{select_centre_node, CentreChoice};
pub use cut::{min_user_cut_bound, min_user_cut_bound_in};
pub use flow::{disjoint_paths_to_centre, weighted_disjoint_paths_to_centre};
pub use paths::{bfs_distances, shortest_path};
pub use steiner::{greedy_tree_packing, has_connecting_tree, steiner_tree, SteinerTree};

/// Edge-disjoint paths from users to a centre node.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoutingSolution {
    pub centre: Option<NodeId>,
    /// Per served user, the path ordered from the user to the centre. A user
    /// equal to the centre maps to an empty path.
    pub paths: BTreeMap<NodeId, Vec<EdgeId>>,
    pub total_edges: usize,
    pub users_served: usize,
}

impl RoutingSolution {
    /// All edges used, ascending.
    pub fn edges(&self) -> Vec<EdgeId> {
        let mut v: Vec<EdgeId> = self.paths.values().flatten().copied().collect();
        v.sort();
        v
    }
}

pub(crate) fn dedup_nodes(nodes: &[NodeId]) -> Vec<NodeId> {
    let mut v = nodes.to_vec();
    v.sort();
    v.dedup();
    v
}
