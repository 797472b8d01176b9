use std::collections::VecDeque;

use crate::graph::Subgraph;
use crate::topology::{EdgeId, NodeId};

/// Hop distances from `src`; `usize::MAX` when unreachable.
pub fn bfs_distances(g: &Subgraph<'_>, src: NodeId) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.node_count()];
    let mut queue = VecDeque::new();
    dist[src.0] = 0;
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        for (v, _) in g.neighbours(u) {
            if dist[v.0] == usize::MAX {
                dist[v.0] = dist[u.0] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Minimum-hop path from `a` to `b` as an edge sequence.
///
/// Among all minimum-hop paths the one with the lexicographically smallest
/// node sequence is returned. `None` if `b` is unreachable.
pub fn shortest_path(g: &Subgraph<'_>, a: NodeId, b: NodeId) -> Option<Vec<EdgeId>> {
    let to_b = bfs_distances(g, b);
    walk_down(g, a, &to_b)
}

/// Follows strictly decreasing distances to the distance-0 node, taking the
/// lowest-index neighbour at every step.
pub(crate) fn walk_down(g: &Subgraph<'_>, from: NodeId, dist: &[usize]) -> Option<Vec<EdgeId>> {
    if dist[from.0] == usize::MAX {
        return None;
    }
    let mut path = Vec::with_capacity(dist[from.0]);
    let mut at = from;
    while dist[at.0] > 0 {
        let (next, e) = g
            .neighbours(at)
            .find(|(v, _)| dist[v.0] == dist[at.0] - 1)
            .expect("BFS layers are consistent");
        path.push(e);
        at = next;
    }
    Some(path)
}
