use super::flow::weighted_disjoint_paths_to_centre;
use super::{dedup_nodes, RoutingSolution};
use crate::error::{Error, Result};
use crate::graph::Subgraph;
use crate::topology::{NodeId, Topology};

/// Cost assigned to an edge that can never generate a link, so it is only
/// used when nothing else reaches a user.
const DEAD_EDGE_COST: f64 = 1e6;
/// Per-edge cost added to `-ln p_e`: keeps every cost positive and prefers
/// fewer hops among equally likely routes.
const HOP_COST: f64 = 1e-9;
const TIE: f64 = 1e-9;

/// The chosen centre with its routing solution on the full topology.
#[derive(Clone, Debug, PartialEq)]
pub struct CentreChoice {
    pub centre: NodeId,
    pub routing: RoutingSolution,
    /// `sum ln p_e` over the routing edges (`-inf` if any `p_e = 0`).
    pub log_rate: f64,
}

impl CentreChoice {
    /// Product of link probabilities over the routing solution.
    pub fn rate(&self) -> f64 {
        self.log_rate.exp()
    }
}

/// Picks the fusion node for centre-based protocols.
///
/// A node is feasible when it has one memory per user: degree at least
/// `|S|`, or `|S| - 1` if it is itself a user. For each feasible node the
/// edge-disjoint most-likely paths to all users are found on the full
/// topology (min-cost flow with cost `-ln p_e`), and the node maximizing the
/// product of `p_e` over those paths wins. Ties go to the lowest index.
pub fn select_centre_node(t: &Topology, users: &[NodeId]) -> Result<CentreChoice> {
    let users = dedup_nodes(users);
    if users.len() < 2 {
        return Err(Error::domain("centre selection needs at least 2 users"));
    }
    let g = Subgraph::full(t);
    let cost = |e| {
        let p = t.edge(e).p_e;
        if p > 0.0 {
            -p.ln() + HOP_COST
        } else {
            DEAD_EDGE_COST
        }
    };
    let needed = users.len();
    let mut best: Option<CentreChoice> = None;
    for c in t.nodes() {
        let is_user = users.binary_search(&c).is_ok();
        let required = if is_user { needed - 1 } else { needed };
        if t.degree(c) < required {
            continue;
        }
        let routing = weighted_disjoint_paths_to_centre(&g, c, &users, cost);
        if routing.users_served < needed {
            continue;
        }
        let log_rate: f64 = routing.edges().iter().map(|&e| t.edge(e).p_e.ln()).sum();
        let better = match &best {
            None => true,
            Some(b) => {
                if b.log_rate == f64::NEG_INFINITY {
                    log_rate > f64::NEG_INFINITY
                } else {
                    log_rate > b.log_rate + TIE
                }
            }
        };
        if better {
            best = Some(CentreChoice {
                centre: c,
                routing,
                log_rate,
            });
        }
    }
    best.ok_or_else(|| {
        Error::Infeasible(format!(
            "no centre node can serve {needed} users: requires degree >= {needed} \
             (or >= {} for a user node) with edge-disjoint routes to every user",
            needed - 1
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_grid, grid_corners, load_topology};

    #[test]
    fn path_graph_tie_goes_to_lowest() {
        let t = load_topology("name = abc\np_op = 0.5\nattenuation_db_per_km = 0\n0 1 1\n1 2 1\n")
            .unwrap();
        let c = select_centre_node(&t, &[NodeId(0), NodeId(2)]).unwrap();
        assert_eq!(c.centre, NodeId(0));
        assert!((c.rate() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn grid_corners_pick_middle() {
        let t = build_grid(3, 0.6).unwrap();
        // enumerate candidates: only the middle has degree 4; its four paths
        // have two edges each
        let c = select_centre_node(&t, &grid_corners(3)).unwrap();
        assert_eq!(c.centre, NodeId(4));
        assert_eq!(c.routing.total_edges, 8);
    }

    #[test]
    fn five_users_need_a_user_centre() {
        let t = build_grid(6, 0.75).unwrap();
        let users = [NodeId(0), NodeId(5), NodeId(30), NodeId(35), NodeId(2)];
        let err = select_centre_node(&t, &users).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)), "{err}");
        // with an interior user of degree 4 it becomes feasible
        let users = [NodeId(0), NodeId(5), NodeId(30), NodeId(35), NodeId(14)];
        assert_eq!(select_centre_node(&t, &users).unwrap().centre, NodeId(14));
    }

    #[test]
    fn scale_invariance_on_uniform_grid() {
        let a = build_grid(5, 0.9).unwrap();
        let b = build_grid(5, 0.9 * 0.3).unwrap();
        let users = [NodeId(1), NodeId(13), NodeId(22), NodeId(9)];
        assert_eq!(
            select_centre_node(&a, &users).unwrap().centre,
            select_centre_node(&b, &users).unwrap().centre
        );
    }
}
