use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{Error, Result};
use crate::netstate::{CutOff, PairRetention};
use crate::protocols::{Protocol, ProtocolConfig, DEFAULT_MAX_TIMESLOTS};
use crate::routing::dedup_nodes;
use crate::topology::{build_grid, grid_corners, load_topology_file, NodeId, Topology};

/// Where the network comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TopologySpec {
    /// `m x m` lattice with link probability `p`.
    Grid { m: usize, p: f64 },
    /// A topology file. `p_op` replaces the operational probability on
    /// every edge; `p` instead forces `p_e = p` regardless of length.
    File {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p_op: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<f64>,
        #[serde(default = "unit_scale")]
        length_scale: f64,
    },
    /// One of the bundled meshes, see [`catalog::BUILTIN`].
    Builtin {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p_op: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<f64>,
        #[serde(default = "unit_scale")]
        length_scale: f64,
    },
}

fn unit_scale() -> f64 {
    1.0
}

impl TopologySpec {
    pub fn build(&self) -> Result<Topology> {
        match self {
            TopologySpec::Grid { m, p } => build_grid(*m, *p),
            TopologySpec::File {
                path,
                p_op,
                p,
                length_scale,
            } => adjust(load_topology_file(path)?.topology, *p_op, *p, *length_scale),
            TopologySpec::Builtin {
                name,
                p_op,
                p,
                length_scale,
            } => adjust(catalog::builtin(name)?.topology, *p_op, *p, *length_scale),
        }
    }

    pub fn grid_width(&self) -> Option<usize> {
        match self {
            TopologySpec::Grid { m, .. } => Some(*m),
            _ => None,
        }
    }
}

fn adjust(t: Topology, p_op: Option<f64>, p: Option<f64>, scale: f64) -> Result<Topology> {
    let t = if scale != 1.0 {
        t.scale_lengths(scale)?
    } else {
        t
    };
    match (p_op, p) {
        (Some(_), Some(_)) => Err(Error::validation(None, "set at most one of `p_op` and `p`")),
        (Some(q), None) => t.with_uniform_p_op(q),
        (None, Some(q)) => t.with_uniform_p_e(q),
        (None, None) => Ok(t),
    }
}

/// How the users of each trial are chosen.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "UsersRepr", into = "UsersRepr")]
pub enum UserSpec {
    Explicit(Vec<NodeId>),
    /// The four corners of a grid.
    Corners,
    /// `k` nodes drawn uniformly without replacement, fresh every trial.
    Random(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum UsersRepr {
    List(Vec<usize>),
    Text(String),
}

impl TryFrom<UsersRepr> for UserSpec {
    type Error = Error;

    fn try_from(r: UsersRepr) -> Result<Self> {
        match r {
            UsersRepr::List(v) => Ok(UserSpec::Explicit(v.into_iter().map(NodeId).collect())),
            UsersRepr::Text(t) => t.parse(),
        }
    }
}

impl From<UserSpec> for UsersRepr {
    fn from(u: UserSpec) -> Self {
        match u {
            UserSpec::Explicit(v) => UsersRepr::List(v.into_iter().map(|n| n.0).collect()),
            other => UsersRepr::Text(other.to_string()),
        }
    }
}

impl FromStr for UserSpec {
    type Err = Error;

    /// `corners`, `random:k`, or a comma-separated node list.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "corners" {
            return Ok(UserSpec::Corners);
        }
        if let Some(k) = s.strip_prefix("random:") {
            return k
                .trim()
                .parse()
                .map(UserSpec::Random)
                .map_err(|_| Error::domain(format!("bad user count in `{s}`")));
        }
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse()
                    .map(NodeId)
                    .map_err(|_| Error::domain(format!("bad user spec `{s}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(UserSpec::Explicit)
    }
}

impl fmt::Display for UserSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UserSpec::Corners => write!(f, "corners"),
            UserSpec::Random(k) => write!(f, "random:{k}"),
            UserSpec::Explicit(v) => {
                let parts: Vec<String> = v.iter().map(|n| n.0.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

impl UserSpec {
    pub fn is_random(&self) -> bool {
        matches!(self, UserSpec::Random(_))
    }

    /// Number of users this spec yields.
    pub fn count(&self) -> usize {
        match self {
            UserSpec::Explicit(v) => dedup_nodes(v).len(),
            UserSpec::Corners => 4,
            UserSpec::Random(k) => *k,
        }
    }

    /// The fixed user set, or `None` for random users.
    pub fn fixed(&self, t: &Topology, spec: &TopologySpec) -> Result<Option<Vec<NodeId>>> {
        let users =
            match self {
                UserSpec::Random(k) => {
                    if *k < 2 || *k > t.node_count() {
                        return Err(Error::validation(
                            None,
                            format!("random:{k} needs 2 <= k <= {}", t.node_count()),
                        ));
                    }
                    return Ok(None);
                }
                UserSpec::Corners => grid_corners(spec.grid_width().ok_or_else(|| {
                    Error::validation(None, "`corners` users need a grid topology")
                })?),
                UserSpec::Explicit(v) => dedup_nodes(v),
            };
        if let Some(u) = users.iter().find(|u| u.0 >= t.node_count()) {
            return Err(Error::validation(
                None,
                format!("user {u} is not a node of `{}`", t.name()),
            ));
        }
        if users.len() < 2 {
            return Err(Error::validation(
                None,
                "at least 2 distinct users are required",
            ));
        }
        Ok(Some(users))
    }
}

/// Draws `k` distinct nodes, ascending.
pub fn random_users<R: Rng>(node_count: usize, k: usize, rng: &mut R) -> Vec<NodeId> {
    let mut v: Vec<NodeId> = sample(rng, node_count, k).into_iter().map(NodeId).collect();
    v.sort();
    v
}

fn default_q_c() -> CutOff {
    CutOff::Slots(1)
}

fn default_trials() -> u64 {
    1000
}

fn default_max_timeslots() -> u64 {
    DEFAULT_MAX_TIMESLOTS
}

/// One experiment: a topology, a protocol, a user placement and run
/// parameters. Scenario files are TOML with these fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub protocol: Protocol,
    pub users: UserSpec,
    #[serde(default = "default_q_c")]
    pub q_c: CutOff,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_max_timeslots")]
    pub max_timeslots: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub retention: PairRetention,
    pub topology: TopologySpec,
}

impl Scenario {
    /// A scenario with default run parameters.
    pub fn new(topology: TopologySpec, protocol: Protocol, users: UserSpec) -> Self {
        Scenario {
            protocol,
            users,
            q_c: default_q_c(),
            trials: default_trials(),
            max_timeslots: default_max_timeslots(),
            seed: 0,
            retention: PairRetention::default(),
            topology,
        }
    }

    pub fn grid(m: usize, p: f64, protocol: Protocol, users: UserSpec) -> Self {
        Scenario::new(TopologySpec::Grid { m, p }, protocol, users)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::validation(None, e.to_string().trim_end()))
    }

    /// Reads a scenario file. A relative topology path is taken relative to
    /// the scenario file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut s = Scenario::from_toml_str(&text)?;
        if let TopologySpec::File { path: topo, .. } = &mut s.topology {
            if topo.is_relative() {
                if let Some(dir) = path.parent() {
                    *topo = dir.join(&*topo);
                }
            }
        }
        Ok(s)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::domain(e.to_string()))
    }

    /// Checks run parameters, builds the topology and resolves fixed users.
    pub fn prepare(&self) -> Result<(Topology, Option<Vec<NodeId>>)> {
        if self.trials == 0 {
            return Err(Error::validation(None, "trials must be at least 1"));
        }
        if self.max_timeslots == 0 {
            return Err(Error::validation(None, "max_timeslots must be at least 1"));
        }
        let t = self.topology.build()?;
        let users = self.users.fixed(&t, &self.topology)?;
        Ok((t, users))
    }

    pub fn validate(&self) -> Result<()> {
        self.prepare().map(|_| ())
    }

    pub(crate) fn protocol_config(&self, users: Vec<NodeId>) -> ProtocolConfig {
        ProtocolConfig {
            max_timeslots: self.max_timeslots,
            q_c: self.q_c,
            users,
            retention: self.retention,
            sp_tree: self.protocol == Protocol::SpTree,
        }
    }
}
