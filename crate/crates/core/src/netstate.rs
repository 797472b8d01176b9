//! Per-timeslot link lifecycle.
//!
//! Each edge is `Absent`, `Present` with an age in slots, or `Blocked`.
//! A slot begins with [`NetworkState::advance_timeslot`]:
//!
//! 1. delivered Bell pairs age and, under [`PairRetention::CutOff`], are
//!    discarded once their age reaches `Q_c`, freeing the edge memories
//!    they held;
//! 2. present links age; a link reaching age `Q_c` is discarded;
//! 3. links consumed in the previous slot are released;
//! 4. every absent edge draws one Bernoulli(`p_e`) in canonical edge order.
//!
//! A link generated in slot `t` is therefore usable in slots
//! `t ..= t + Q_c - 1`. Generation is not attempted on an edge while its
//! link is present or its memory is held, which gives the steady-state
//! presence `p Q_c / (1 + p (Q_c - 1))`.

use std::fmt::{self, Write as _};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Subgraph;
use crate::topology::{EdgeId, NodeId, Topology};

/// Storage time of entanglement links, in timeslots.
///
/// Serialized as an integer, or the string `"inf"` when unbounded.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CutOffRepr", into = "CutOffRepr")]
pub enum CutOff {
    Slots(u32),
    Unbounded,
}

impl CutOff {
    pub fn slots(q_c: u32) -> Result<Self> {
        if q_c == 0 {
            return Err(Error::domain("Q_c must be at least 1"));
        }
        Ok(CutOff::Slots(q_c))
    }

    /// True when something of this age must be discarded.
    pub fn expired(self, age: u32) -> bool {
        match self {
            CutOff::Slots(q) => age >= q,
            CutOff::Unbounded => false,
        }
    }
}

impl fmt::Display for CutOff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutOff::Slots(q) => write!(f, "{q}"),
            CutOff::Unbounded => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for CutOff {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "unbounded" => Ok(CutOff::Unbounded),
            t => t
                .parse::<u32>()
                .map_err(|_| Error::domain(format!("bad Q_c `{t}`")))
                .and_then(CutOff::slots),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CutOffRepr {
    Slots(u32),
    Text(String),
}

impl TryFrom<CutOffRepr> for CutOff {
    type Error = Error;

    fn try_from(r: CutOffRepr) -> Result<Self> {
        match r {
            CutOffRepr::Slots(q) => CutOff::slots(q),
            CutOffRepr::Text(t) => t.parse(),
        }
    }
}

impl From<CutOff> for CutOffRepr {
    fn from(c: CutOff) -> Self {
        match c {
            CutOff::Slots(q) => CutOffRepr::Slots(q),
            CutOff::Unbounded => CutOffRepr::Text("inf".into()),
        }
    }
}

/// Whether delivered user-centre Bell pairs are subject to the cut-off.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairRetention {
    /// Pairs decohere like links: discarded once their age reaches `Q_c`.
    /// With `Q_c = 1` all pairs must be delivered in the same slot.
    #[default]
    CutOff,
    /// Pairs are kept in long-lived memories until fusion.
    Held,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BlockReason {
    /// Used by swapping or fusion in the current slot.
    Consumed,
    /// An endpoint memory holds a delivered Bell-pair qubit.
    MemoryHeld,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum LinkStatus {
    Absent,
    Present { age: u32 },
    Blocked(BlockReason),
}

impl fmt::Display for LinkStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkStatus::Absent => write!(f, "absent"),
            LinkStatus::Present { age } => write!(f, "present({age})"),
            LinkStatus::Blocked(BlockReason::Consumed) => write!(f, "blocked(consumed)"),
            LinkStatus::Blocked(BlockReason::MemoryHeld) => write!(f, "blocked(memory)"),
        }
    }
}

/// A Bell pair delivered between a user and the centre node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BellPairRecord {
    pub user: NodeId,
    pub centre: NodeId,
    /// Edge whose memory at the user holds the pair's qubit.
    pub user_edge: EdgeId,
    /// Edge whose memory at the centre holds the pair's qubit.
    pub centre_edge: EdgeId,
    /// Age of the oldest link the pair was built from, in slots.
    pub age: u32,
}

/// Mutable network state for one trial.
pub struct NetworkState<'t, R> {
    topo: &'t Topology,
    status: Vec<LinkStatus>,
    /// Number of Bell pairs holding each edge's memories.
    holds: Vec<u8>,
    pairs: Vec<BellPairRecord>,
    timeslot: u64,
    cutoff: CutOff,
    retention: PairRetention,
    rng: R,
}

impl<'t, R: Rng> NetworkState<'t, R> {
    /// Empty network at slot 0: no links, no pairs.
    pub fn new(topo: &'t Topology, cutoff: CutOff, retention: PairRetention, rng: R) -> Self {
        NetworkState {
            topo,
            status: vec![LinkStatus::Absent; topo.edge_count()],
            holds: vec![0; topo.edge_count()],
            pairs: Vec::new(),
            timeslot: 0,
            cutoff,
            retention,
            rng,
        }
    }

    pub fn topology(&self) -> &'t Topology {
        self.topo
    }

    pub fn timeslot(&self) -> u64 {
        self.timeslot
    }

    pub fn cutoff(&self) -> CutOff {
        self.cutoff
    }

    pub fn status(&self, e: EdgeId) -> LinkStatus {
        self.status[e.0]
    }

    pub fn statuses(&self) -> &[LinkStatus] {
        &self.status
    }

    pub fn bell_pairs(&self) -> &[BellPairRecord] {
        &self.pairs
    }

    pub fn holds_pair(&self, user: NodeId) -> bool {
        self.pairs.iter().any(|p| p.user == user)
    }

    pub fn rng(&mut self) -> &mut R {
        &mut self.rng
    }

    /// Starts the next timeslot. See the module docs for the step order.
    pub fn advance_timeslot(&mut self) {
        self.timeslot += 1;

        if self.retention == PairRetention::CutOff {
            let cutoff = self.cutoff;
            let mut expired = Vec::new();
            self.pairs.retain_mut(|p| {
                p.age = p.age.saturating_add(1);
                if cutoff.expired(p.age) {
                    expired.push((p.user_edge, p.centre_edge));
                    false
                } else {
                    true
                }
            });
            for (a, b) in expired {
                self.unhold(a);
                if b != a {
                    self.unhold(b);
                }
            }
        }

        for i in 0..self.status.len() {
            match self.status[i] {
                LinkStatus::Present { age } => {
                    let age = age.saturating_add(1);
                    self.status[i] = if self.cutoff.expired(age) {
                        LinkStatus::Absent
                    } else {
                        LinkStatus::Present { age }
                    };
                }
                LinkStatus::Blocked(BlockReason::Consumed) => self.status[i] = LinkStatus::Absent,
                _ => {}
            }
            if self.status[i] == LinkStatus::Absent {
                let p = self.topo.edges()[i].p_e;
                if self.rng.gen::<f64>() < p {
                    self.status[i] = LinkStatus::Present { age: 0 };
                }
            }
        }

        debug_assert!(self.status.iter().all(|s| match s {
            LinkStatus::Present { age } => !self.cutoff.expired(*age),
            _ => true,
        }));
        debug_assert!(self
            .status
            .iter()
            .zip(&self.holds)
            .all(|(s, &h)| (h > 0) == (*s == LinkStatus::Blocked(BlockReason::MemoryHeld))));
    }

    fn unhold(&mut self, e: EdgeId) {
        self.holds[e.0] -= 1;
        if self.holds[e.0] == 0 {
            self.status[e.0] = LinkStatus::Absent;
        }
    }

    fn hold(&mut self, e: EdgeId) {
        self.holds[e.0] += 1;
        self.status[e.0] = LinkStatus::Blocked(BlockReason::MemoryHeld);
    }

    /// The link-state subgraph G': exactly the present edges.
    pub fn link_subgraph(&self) -> Subgraph<'t> {
        Subgraph::from_edges(
            self.topo,
            self.status
                .iter()
                .enumerate()
                .filter(|(_, s)| matches!(s, LinkStatus::Present { .. }))
                .map(|(i, _)| EdgeId(i)),
        )
    }

    fn require_present(&self, edges: &[EdgeId]) -> Result<u32> {
        let mut oldest = 0;
        for &e in edges {
            match self.status[e.0] {
                LinkStatus::Present { age } => oldest = oldest.max(age),
                other => {
                    return Err(Error::ProtocolLogic(format!(
                        "edge {e} is {other}, expected a present link"
                    )))
                }
            }
        }
        Ok(oldest)
    }

    /// Swaps a path of links into a Bell pair between `user` and `centre`.
    ///
    /// Interior links are consumed; the two terminal edges stay blocked
    /// while their memories hold the pair. `path` is ordered from `user`
    /// to `centre`.
    pub fn consume_path(&mut self, path: &[EdgeId], user: NodeId, centre: NodeId) -> Result<()> {
        if path.is_empty() {
            return if user == centre {
                Ok(())
            } else {
                Err(Error::ProtocolLogic(format!(
                    "empty path between distinct nodes {user} and {centre}"
                )))
            };
        }
        let oldest = self.require_present(path)?;
        let mut at = user;
        for &e in path {
            let edge = self.topo.edge(e);
            if !edge.touches(at) {
                return Err(Error::ProtocolLogic(format!(
                    "path is not a walk: edge {e} does not touch node {at}"
                )));
            }
            at = edge.other(at);
        }
        if at != centre {
            return Err(Error::ProtocolLogic(format!(
                "path from {user} ends at {at}, not at centre {centre}"
            )));
        }
        let first = path[0];
        let last = *path.last().unwrap();
        if path.len() > 2 {
            for &e in &path[1..path.len() - 1] {
                self.status[e.0] = LinkStatus::Blocked(BlockReason::Consumed);
            }
        }
        self.hold(first);
        if last != first {
            self.hold(last);
        }
        self.pairs.push(BellPairRecord {
            user,
            centre,
            user_edge: first,
            centre_edge: last,
            age: oldest,
        });
        Ok(())
    }

    /// Consumes a tree of links into a GHZ state within the current slot.
    pub fn consume_tree(&mut self, tree: &[EdgeId]) -> Result<()> {
        self.require_present(tree)?;
        if !is_tree(self.topo, tree) {
            return Err(Error::ProtocolLogic(
                "edge set is not a connected acyclic tree".into(),
            ));
        }
        for &e in tree {
            self.status[e.0] = LinkStatus::Blocked(BlockReason::Consumed);
        }
        Ok(())
    }

    /// Fuses the delivered pairs: the registry empties and held memories
    /// are released.
    pub fn release_bell_pairs(&mut self) {
        for p in std::mem::take(&mut self.pairs) {
            self.unhold(p.user_edge);
            if p.centre_edge != p.user_edge {
                self.unhold(p.centre_edge);
            }
        }
    }

    /// Text dump, one `edge endpoints status` line per edge.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "slot {}", self.timeslot);
        for (i, (e, s)) in self.topo.edges().iter().zip(&self.status).enumerate() {
            let _ = writeln!(out, "e{i} {}-{} {s}", e.a, e.b);
        }
        for p in &self.pairs {
            let _ = writeln!(
                out,
                "pair {}~{} via {}/{} age {}",
                p.user, p.centre, p.user_edge, p.centre_edge, p.age
            );
        }
        out
    }

    #[cfg(test)]
    pub(crate) fn set_status(&mut self, e: EdgeId, s: LinkStatus) {
        self.status[e.0] = s;
    }
}

/// True if `edges` is nonempty, acyclic and connected.
pub fn is_tree(topo: &Topology, edges: &[EdgeId]) -> bool {
    if edges.is_empty() {
        return false;
    }
    let mut parent: Vec<usize> = (0..topo.node_count()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut touched = std::collections::BTreeSet::new();
    for &e in edges {
        let edge = topo.edge(e);
        touched.insert(edge.a.0);
        touched.insert(edge.b.0);
        let (ra, rb) = (find(&mut parent, edge.a.0), find(&mut parent, edge.b.0));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    touched.len() == edges.len() + 1
}
