use super::dedup_nodes;
use super::flow::FlowNetwork;
use crate::error::{Error, Result};
use crate::graph::Subgraph;
use crate::topology::{NodeId, Topology};

/// Smallest edge cut separating any one user from the remaining users.
///
/// Each GHZ state needs its own tree touching every user, so this bounds the
/// number of edge-disjoint trees, and hence states per slot.
pub fn min_user_cut_bound(t: &Topology, users: &[NodeId]) -> Result<usize> {
    min_user_cut_bound_in(&Subgraph::full(t), users)
}

/// As [`min_user_cut_bound`] over a subgraph.
pub fn min_user_cut_bound_in(g: &Subgraph<'_>, users: &[NodeId]) -> Result<usize> {
    let users = dedup_nodes(users);
    if users.len() < 2 {
        return Err(Error::domain("the user cut bound needs at least 2 users"));
    }
    let n = g.node_count();
    let topo = g.topology();
    let mut best = usize::MAX;
    for &u in &users {
        let mut net = FlowNetwork::new(n + 1);
        for e in g.edges() {
            let edge = topo.edge(e);
            net.add_undirected_unit(edge.a.0, edge.b.0);
        }
        for &w in &users {
            if w != u {
                net.add_arc(w.0, n, i32::MAX / 4, 0.0);
            }
        }
        best = best.min(net.max_flow(u.0, n) as usize);
    }
    Ok(best)
}
