//! Unit-capacity flow networks built from undirected subgraphs.

use std::collections::{BTreeMap, VecDeque};

use super::{dedup_nodes, RoutingSolution};
use crate::graph::Subgraph;
use crate::topology::{EdgeId, NodeId};

const EPS: f64 = 1e-12;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: i32,
    cost: f64,
}

/// Residual network; arc `i ^ 1` is the reverse of arc `i`.
#[derive(Clone, Debug)]
pub(crate) struct FlowNetwork {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub(crate) fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            out: vec![Vec::new(); nodes],
        }
    }

    /// Adds `u -> v` with its zero-capacity reverse; returns the forward arc.
    pub(crate) fn add_arc(&mut self, u: usize, v: usize, cap: i32, cost: f64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to: v, cap, cost });
        self.arcs.push(Arc {
            to: u,
            cap: 0,
            cost: -cost,
        });
        self.out[u].push(id);
        self.out[v].push(id + 1);
        id
    }

    /// Adds an undirected unit edge as a pair of arcs that are each other's
    /// reverse, so capacity is shared between the two directions.
    pub(crate) fn add_undirected_unit(&mut self, u: usize, v: usize) {
        let id = self.arcs.len();
        self.arcs.push(Arc {
            to: v,
            cap: 1,
            cost: 0.0,
        });
        self.arcs.push(Arc {
            to: u,
            cap: 1,
            cost: 0.0,
        });
        self.out[u].push(id);
        self.out[v].push(id + 1);
    }

    fn residual(&self, arc: usize) -> i32 {
        self.arcs[arc].cap
    }

    fn push(&mut self, arc: usize, amount: i32) {
        self.arcs[arc].cap -= amount;
        self.arcs[arc ^ 1].cap += amount;
    }

    /// Cheapest residual path by Bellman-Ford (queue variant). Returns the
    /// arc used to reach each node.
    fn cheapest_path(&self, s: usize, t: usize) -> Option<Vec<usize>> {
        let n = self.out.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut via = vec![usize::MAX; n];
        let mut queued = vec![false; n];
        let mut queue = VecDeque::new();
        dist[s] = 0.0;
        queue.push_back(s);
        queued[s] = true;
        while let Some(u) = queue.pop_front() {
            queued[u] = false;
            for &a in &self.out[u] {
                if self.arcs[a].cap <= 0 {
                    continue;
                }
                let v = self.arcs[a].to;
                let nd = dist[u] + self.arcs[a].cost;
                if nd < dist[v] - EPS {
                    dist[v] = nd;
                    via[v] = a;
                    if !queued[v] {
                        queued[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        if dist[t].is_infinite() {
            return None;
        }
        let mut arcs = Vec::new();
        let mut at = t;
        while at != s {
            let a = via[at];
            arcs.push(a);
            at = self.arcs[a ^ 1].to;
        }
        arcs.reverse();
        Some(arcs)
    }

    /// Successive cheapest augmenting paths, one unit at a time. Yields a
    /// maximum flow of minimum cost.
    pub(crate) fn min_cost_max_flow(&mut self, s: usize, t: usize) -> i32 {
        let mut flow = 0;
        while let Some(path) = self.cheapest_path(s, t) {
            for a in path {
                self.push(a, 1);
            }
            flow += 1;
        }
        flow
    }

    /// Maximum flow by shortest augmenting paths (costs ignored).
    pub(crate) fn max_flow(&mut self, s: usize, t: usize) -> i32 {
        let n = self.out.len();
        let mut flow = 0;
        loop {
            let mut via = vec![usize::MAX; n];
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([s]);
            seen[s] = true;
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &a in &self.out[u] {
                    let v = self.arcs[a].to;
                    if self.residual(a) > 0 && !seen[v] {
                        seen[v] = true;
                        via[v] = a;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return flow;
            }
            let mut bottleneck = i32::MAX;
            let mut at = t;
            while at != s {
                bottleneck = bottleneck.min(self.residual(via[at]));
                at = self.arcs[via[at] ^ 1].to;
            }
            let mut at = t;
            while at != s {
                let a = via[at];
                self.push(a, bottleneck);
                at = self.arcs[a ^ 1].to;
            }
            flow += bottleneck;
        }
    }
}

/// Edge-disjoint paths from `centre` to as many `users` as possible, using as
/// few edges as possible among maximum solutions.
///
/// Solved as a unit-capacity min-cost max-flow from the centre to a virtual
/// sink fed by every user with capacity 1.
pub fn disjoint_paths_to_centre(
    g: &Subgraph<'_>,
    centre: NodeId,
    users: &[NodeId],
) -> RoutingSolution {
    weighted_disjoint_paths_to_centre(g, centre, users, |_| 1.0)
}

/// As [`disjoint_paths_to_centre`] with per-edge costs (non-negative).
pub fn weighted_disjoint_paths_to_centre(
    g: &Subgraph<'_>,
    centre: NodeId,
    users: &[NodeId],
    cost: impl Fn(EdgeId) -> f64,
) -> RoutingSolution {
    let topo = g.topology();
    let n = topo.node_count();
    let sink = n;
    let users = dedup_nodes(users);
    let mut net = FlowNetwork::new(n + 1);
    // forward arcs (u -> v, v -> u) per present edge
    let mut edge_arcs: Vec<(EdgeId, usize, usize)> = Vec::new();
    for e in g.edges() {
        let edge = topo.edge(e);
        let c = cost(e);
        let f = net.add_arc(edge.a.0, edge.b.0, 1, c);
        let r = net.add_arc(edge.b.0, edge.a.0, 1, c);
        edge_arcs.push((e, f, r));
    }
    let mut sink_arc = BTreeMap::new();
    for &u in &users {
        if u != centre {
            sink_arc.insert(u, net.add_arc(u.0, sink, 1, 0.0));
        }
    }
    net.min_cost_max_flow(centre.0, sink);

    // net flow per edge, directed; opposite units cancel
    let mut out: Vec<Vec<(NodeId, EdgeId)>> = vec![Vec::new(); n];
    for (e, f, r) in edge_arcs {
        let edge = topo.edge(e);
        let ab = 1 - net.residual(f);
        let ba = 1 - net.residual(r);
        match ab - ba {
            1 => out[edge.a.0].push((edge.b, e)),
            -1 => out[edge.b.0].push((edge.a, e)),
            _ => {}
        }
    }
    for list in &mut out {
        list.sort();
        list.reverse(); // pop() yields lowest first
    }
    let mut demand: BTreeMap<NodeId, bool> = sink_arc
        .iter()
        .map(|(&u, &a)| (u, net.residual(a) == 0))
        .collect();

    let mut paths: BTreeMap<NodeId, Vec<EdgeId>> = BTreeMap::new();
    if users.contains(&centre) {
        paths.insert(centre, Vec::new());
    }
    let served = demand.values().filter(|&&d| d).count();
    for _ in 0..served {
        let mut nodes = vec![centre];
        let mut edges = Vec::new();
        let mut at = centre;
        loop {
            if at != centre && demand.get(&at) == Some(&true) {
                demand.insert(at, false);
                break;
            }
            let (next, e) = out[at.0].pop().expect("flow conservation");
            edges.push(e);
            nodes.push(next);
            at = next;
        }
        let (_, edges) = erase_loops(&nodes, &edges);
        let mut rev = edges;
        rev.reverse();
        paths.insert(at, rev);
    }
    let total_edges = paths.values().map(Vec::len).sum();
    RoutingSolution {
        centre: Some(centre),
        users_served: paths.len(),
        total_edges,
        paths,
    }
}

/// Removes cycles from a walk given as nodes `n0..nk` and edges `e1..ek`.
fn erase_loops(nodes: &[NodeId], edges: &[EdgeId]) -> (Vec<NodeId>, Vec<EdgeId>) {
    let mut out_nodes: Vec<NodeId> = vec![nodes[0]];
    let mut out_edges: Vec<EdgeId> = Vec::new();
    for (i, &e) in edges.iter().enumerate() {
        let next = nodes[i + 1];
        if let Some(pos) = out_nodes.iter().position(|&n| n == next) {
            out_nodes.truncate(pos + 1);
            out_edges.truncate(pos);
        } else {
            out_nodes.push(next);
            out_edges.push(e);
        }
    }
    (out_nodes, out_edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_grid, load_topology, Topology};

    fn assert_valid(t: &Topology, sol: &RoutingSolution) {
        let mut used = std::collections::BTreeSet::new();
        let centre = sol.centre.unwrap();
        for (&u, path) in &sol.paths {
            let mut at = u;
            for &e in path {
                assert!(used.insert(e), "edge {e} reused");
                at = t.edge(e).other(at);
            }
            assert_eq!(at, centre);
        }
        assert_eq!(sol.total_edges, used.len());
    }

    #[test]
    fn star_leaves() {
        let t = load_topology("name = s\n0 1 0\n0 2 0\n0 3 0\n0 4 0\n").unwrap();
        let g = Subgraph::full(&t);
        let users = [NodeId(1), NodeId(2), NodeId(3), NodeId(4)];
        let sol = disjoint_paths_to_centre(&g, NodeId(0), &users);
        assert_eq!(sol.users_served, 4);
        assert_eq!(sol.total_edges, 4);
        assert_valid(&t, &sol);
    }

    #[test]
    fn partial_reachability() {
        // 0-1-2 and 3-4, centre 1, users {0, 2, 4}
        let t = load_topology("name = x\n0 1 0\n1 2 0\n3 4 0\n2 3 0\n").unwrap();
        let mut g = Subgraph::full(&t);
        g.remove(t.find_edge(NodeId(2), NodeId(3)).unwrap());
        let sol = disjoint_paths_to_centre(&g, NodeId(1), &[NodeId(0), NodeId(2), NodeId(4)]);
        assert_eq!(sol.users_served, 2);
        assert_valid(&t, &sol);
    }

    #[test]
    fn centre_as_user_gets_empty_path() {
        let t = build_grid(3, 1.0).unwrap();
        let g = Subgraph::full(&t);
        let sol = disjoint_paths_to_centre(&g, NodeId(4), &[NodeId(4), NodeId(0), NodeId(8)]);
        assert_eq!(sol.users_served, 3);
        assert_eq!(sol.paths[&NodeId(4)], Vec::<EdgeId>::new());
        assert_eq!(sol.total_edges, 4);
        assert_valid(&t, &sol);
    }

    #[test]
    fn path_through_another_user() {
        // line 0-1-2, centre 0, users {1, 2}: path to 2 passes user 1
        let t = load_topology("name = l\n0 1 0\n1 2 0\n0 2 5\n").unwrap();
        let mut g = Subgraph::full(&t);
        g.remove(t.find_edge(NodeId(0), NodeId(2)).unwrap());
        let sol = disjoint_paths_to_centre(&g, NodeId(0), &[NodeId(1), NodeId(2)]);
        // only one unit leaves the centre
        assert_eq!(sol.users_served, 1);
        assert_valid(&t, &sol);
    }

    #[test]
    fn max_flow_on_grid_corner() {
        let t = build_grid(4, 1.0).unwrap();
        let mut net = FlowNetwork::new(t.node_count());
        for e in t.edges() {
            net.add_undirected_unit(e.a.0, e.b.0);
        }
        assert_eq!(net.max_flow(0, 15), 2);
    }

    #[test]
    fn loop_erasure() {
        let n = |i| NodeId(i);
        let e = |i| EdgeId(i);
        let (nodes, edges) = erase_loops(
            &[n(0), n(1), n(2), n(3), n(1), n(4)],
            &[e(0), e(1), e(2), e(3), e(4)],
        );
        assert_eq!(nodes, vec![n(0), n(1), n(4)]);
        assert_eq!(edges, vec![e(0), e(4)]);
    }
}
