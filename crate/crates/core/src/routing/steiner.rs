//! Steiner trees on unit-weight graphs.
//!
//! [`steiner_tree`] is the distance-network heuristic of Kou, Markowsky and
//! Berman (metric closure over the key nodes, minimum spanning tree, path
//! expansion, leaf pruning) with Steiner-point insertion: non-terminal nodes
//! of degree three or more are tried as extra key nodes and kept when they
//! shorten the closure tree. With at most four terminals every subset of up
//! to `k - 2` such points is tried, which covers all branch points of an
//! optimal tree, so the result is optimal there. For larger terminal sets
//! single points are inserted greedily. The cost never exceeds that of plain
//! KMB, so the `2 (1 - 1/l)` guarantee is kept.

use super::dedup_nodes;
use super::paths::{bfs_distances, walk_down};
use crate::error::{Error, Result};
use crate::graph::Subgraph;
use crate::topology::{EdgeId, NodeId};

/// A tree spanning a terminal set. Every leaf is a terminal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinerTree {
    /// Tree edges, ascending.
    pub edges: Vec<EdgeId>,
    /// Terminals, ascending and distinct.
    pub terminals: Vec<NodeId>,
}

impl SteinerTree {
    pub fn cost(&self) -> usize {
        self.edges.len()
    }
}

/// True when all terminals lie in one connected component of `g`.
pub fn has_connecting_tree(g: &Subgraph<'_>, terminals: &[NodeId]) -> bool {
    let Some((first, rest)) = terminals.split_first() else {
        return true;
    };
    // flood from the first terminal, stop early once every terminal is seen
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut stack = vec![*first];
    seen[first.0] = true;
    let mut missing = rest.iter().filter(|t| *t != first).count();
    let mut is_terminal = vec![false; n];
    for t in rest {
        is_terminal[t.0] = true;
    }
    is_terminal[first.0] = false;
    if missing == 0 {
        return true;
    }
    while let Some(u) = stack.pop() {
        for (v, _) in g.neighbours(u) {
            if !seen[v.0] {
                seen[v.0] = true;
                if is_terminal[v.0] {
                    is_terminal[v.0] = false;
                    missing -= 1;
                    if missing == 0 {
                        return true;
                    }
                }
                stack.push(v);
            }
        }
    }
    false
}

struct Closure {
    /// BFS distance row per node, computed for terminals and candidates.
    rows: Vec<Option<Vec<usize>>>,
}

impl Closure {
    fn dist(&self, a: NodeId, b: NodeId) -> usize {
        self.rows[a.0].as_ref().expect("row computed")[b.0]
    }

    /// Prim over `keys` in the metric closure; the first `terminals` keys
    /// are terminals. Returns cost and tree edges as index pairs into `keys`.
    ///
    /// Equal-length links prefer an endpoint that is not an already
    /// connected terminal.
    fn mst(&self, keys: &[NodeId], terminals: usize) -> (usize, Vec<(usize, usize)>) {
        let k = keys.len();
        let mut in_tree = vec![false; k];
        let mut degree = vec![0usize; k];
        let penalty = |x: usize, degree: &[usize]| usize::from(x < terminals && degree[x] > 0);
        let mut best = vec![(usize::MAX, 0usize); k];
        in_tree[0] = true;
        for j in 1..k {
            best[j] = (self.dist(keys[0], keys[j]), 0);
        }
        let mut cost = 0;
        let mut links = Vec::with_capacity(k - 1);
        for _ in 1..k {
            let (j, (d, from)) = best
                .iter()
                .copied()
                .enumerate()
                .filter(|(j, _)| !in_tree[*j])
                .min_by_key(|&(j, (d, from))| (d, penalty(from, &degree), j))
                .expect("keys remain");
            in_tree[j] = true;
            cost += d;
            degree[j] += 1;
            degree[from] += 1;
            links.push((from, j));
            for m in 0..k {
                if !in_tree[m] {
                    let dm = self.dist(keys[j], keys[m]);
                    let (bd, bf) = best[m];
                    if dm < bd || (dm == bd && penalty(j, &degree) < penalty(bf, &degree)) {
                        best[m] = (dm, j);
                    }
                }
            }
        }
        (cost, links)
    }
}

/// Heuristic minimum Steiner tree connecting `terminals` in `g`.
///
/// `Ok(None)` when the terminals are not all in one component.
pub fn steiner_tree(g: &Subgraph<'_>, terminals: &[NodeId]) -> Result<Option<SteinerTree>> {
    let terms = dedup_nodes(terminals);
    if terms.len() < 2 {
        return Err(Error::domain(format!(
            "a Steiner tree needs at least 2 terminals, got {}",
            terms.len()
        )));
    }
    let label = g.components();
    let comp = label[terms[0].0];
    if terms.iter().any(|t| label[t.0] != comp) {
        return Ok(None);
    }

    let n = g.node_count();
    let mut is_terminal = vec![false; n];
    for t in &terms {
        is_terminal[t.0] = true;
    }
    let candidates: Vec<NodeId> = (0..n)
        .map(NodeId)
        .filter(|&v| label[v.0] == comp && !is_terminal[v.0] && g.degree(v) >= 3)
        .collect();
    let mut closure = Closure {
        rows: vec![None; n],
    };
    for &v in terms.iter().chain(&candidates) {
        closure.rows[v.0] = Some(bfs_distances(g, v));
    }

    let k = terms.len();
    // (closure cost, closure links at terminals beyond the first): among
    // equally short trees, those with terminals as leaves leave more
    // terminal memories for further trees in a packing
    let score_of = |extra: &[NodeId]| {
        let mut keys = terms.clone();
        keys.extend_from_slice(extra);
        let (cost, links) = closure.mst(&keys, k);
        let mut deg = vec![0usize; k];
        for (i, j) in links {
            for x in [i, j] {
                if x < k {
                    deg[x] += 1;
                }
            }
        }
        let excess: usize = deg.iter().map(|d| d.saturating_sub(1)).sum();
        (cost, excess)
    };
    let mut best_extra: Vec<NodeId> = Vec::new();
    let mut best_score = score_of(&[]);
    if k <= 4 {
        let max_extra = k - 2;
        for (i, &a) in candidates.iter().enumerate() {
            if max_extra >= 1 {
                let sc = score_of(&[a]);
                if sc < best_score {
                    best_score = sc;
                    best_extra = vec![a];
                }
            }
            if max_extra >= 2 {
                for &b in &candidates[i + 1..] {
                    let sc = score_of(&[a, b]);
                    if sc < best_score {
                        best_score = sc;
                        best_extra = vec![a, b];
                    }
                }
            }
        }
    } else {
        loop {
            let mut improved: Option<((usize, usize), NodeId)> = None;
            for &c in &candidates {
                if best_extra.contains(&c) {
                    continue;
                }
                let mut trial = best_extra.clone();
                trial.push(c);
                let sc = score_of(&trial);
                if sc < improved.map_or(best_score, |(b, _)| b) {
                    improved = Some((sc, c));
                }
            }
            match improved {
                Some((sc, c)) => {
                    best_score = sc;
                    best_extra.push(c);
                }
                None => break,
            }
        }
    }

    let mut keys = terms.clone();
    keys.extend_from_slice(&best_extra);
    let edges = expand(g, &closure, &keys, k, &is_terminal);
    debug_assert!(edges.len() <= best_score.0);
    Ok(Some(SteinerTree {
        edges,
        terminals: terms,
    }))
}

/// Closure MST over `keys`, expanded to graph paths, reduced to a tree and
/// pruned of non-terminal leaves.
fn expand(
    g: &Subgraph<'_>,
    closure: &Closure,
    keys: &[NodeId],
    terminals: usize,
    is_terminal: &[bool],
) -> Vec<EdgeId> {
    let (_, links) = closure.mst(keys, terminals);
    let mut union = Subgraph::empty(g.topology());
    for (i, j) in links {
        let row = closure.rows[keys[j].0].as_ref().expect("row computed");
        for e in walk_down(g, keys[i], row).expect("same component") {
            union.insert(e);
        }
    }
    prune(&spanning_tree(&union, keys[0]), is_terminal, g)
}

/// BFS spanning tree of the component of `root`.
fn spanning_tree(g: &Subgraph<'_>, root: NodeId) -> Vec<EdgeId> {
    let mut seen = vec![false; g.node_count()];
    let mut queue = std::collections::VecDeque::from([root]);
    seen[root.0] = true;
    let mut edges = Vec::new();
    while let Some(u) = queue.pop_front() {
        for (v, e) in g.neighbours(u) {
            if !seen[v.0] {
                seen[v.0] = true;
                edges.push(e);
                queue.push_back(v);
            }
        }
    }
    edges
}

/// Repeatedly strips non-terminal leaves.
fn prune(tree: &[EdgeId], is_terminal: &[bool], g: &Subgraph<'_>) -> Vec<EdgeId> {
    let topo = g.topology();
    let mut degree = vec![0usize; g.node_count()];
    for &e in tree {
        let edge = topo.edge(e);
        degree[edge.a.0] += 1;
        degree[edge.b.0] += 1;
    }
    let mut alive = vec![true; tree.len()];
    loop {
        let mut changed = false;
        for (i, &e) in tree.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            let edge = topo.edge(e);
            let leaf = [edge.a, edge.b]
                .into_iter()
                .find(|v| degree[v.0] == 1 && !is_terminal[v.0]);
            if leaf.is_some() {
                alive[i] = false;
                degree[edge.a.0] -= 1;
                degree[edge.b.0] -= 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut out: Vec<EdgeId> = tree
        .iter()
        .zip(alive)
        .filter(|(_, a)| *a)
        .map(|(e, _)| *e)
        .collect();
    out.sort();
    out
}

/// Extracts Steiner trees one at a time, removing each tree's edges, until
/// the terminals are no longer connected. Trees are pairwise edge-disjoint.
pub fn greedy_tree_packing(g: &Subgraph<'_>, terminals: &[NodeId]) -> Result<Vec<SteinerTree>> {
    let mut rest = g.clone();
    let mut trees = Vec::new();
    while let Some(tree) = steiner_tree(&rest, terminals)? {
        for &e in &tree.edges {
            rest.remove(e);
        }
        trees.push(tree);
    }
    Ok(trees)
}
