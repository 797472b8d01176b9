//! Static network description.
//!
//! A [`Topology`] is an undirected simple graph whose edges carry a fibre
//! length and an entanglement-link generation probability
//!
//! ```text
//! p_e = p_op * 10^(-a * L / 10)
//! ```
//!
//! where `a` is the fibre attenuation in dB/km (0.2 by default) and the
//! exponential factor is the channel transmittance. At `L = 0` the edge
//! succeeds with the back-to-back probability `p_op`.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default fibre attenuation, dB per km.
pub const DEFAULT_ATTENUATION_DB_PER_KM: f64 = 0.2;

/// Dense node index, `0..node_count`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

/// Index of an edge in the topology's canonical edge order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::fmt::Display for EdgeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// An undirected edge. Endpoints are stored with `a < b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    pub length_km: f64,
    pub p_op: f64,
    /// Per-slot link generation probability, derived from length and `p_op`.
    pub p_e: f64,
}

impl Edge {
    /// The endpoint opposite `n`. `n` must be an endpoint.
    pub fn other(&self, n: NodeId) -> NodeId {
        if n == self.a {
            self.b
        } else {
            debug_assert_eq!(n, self.b);
            self.a
        }
    }

    pub fn touches(&self, n: NodeId) -> bool {
        self.a == n || self.b == n
    }
}

/// Probability that an entanglement link is generated over a fibre edge in
/// one timeslot, at the default attenuation of 0.2 dB/km.
pub fn edge_success_probability(length_km: f64, p_op: f64) -> Result<f64> {
    edge_success_probability_with(length_km, p_op, DEFAULT_ATTENUATION_DB_PER_KM)
}

/// As [`edge_success_probability`] with an explicit attenuation constant.
pub fn edge_success_probability_with(
    length_km: f64,
    p_op: f64,
    attenuation_db_per_km: f64,
) -> Result<f64> {
    if !(length_km >= 0.0) || !length_km.is_finite() {
        return Err(Error::domain(format!(
            "edge length must be a finite non-negative number, got {length_km}"
        )));
    }
    check_probability("p_op", p_op)?;
    if !(attenuation_db_per_km >= 0.0) {
        return Err(Error::domain(format!(
            "attenuation must be non-negative, got {attenuation_db_per_km}"
        )));
    }
    let transmittance = 10f64.powf(-attenuation_db_per_km * length_km / 10.0);
    Ok(p_op * transmittance)
}

pub(crate) fn check_probability(what: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must lie in [0, 1], got {p}")))
    }
}

/// Input record for an edge before probabilities are derived.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeSpec {
    pub u: usize,
    pub v: usize,
    pub length_km: f64,
    /// Overrides the topology-wide `p_op` when set.
    pub p_op: Option<f64>,
    /// Source line, for error messages.
    pub line: Option<usize>,
}

impl EdgeSpec {
    pub fn new(u: usize, v: usize, length_km: f64) -> Self {
        EdgeSpec {
            u,
            v,
            length_km,
            p_op: None,
            line: None,
        }
    }
}

/// Static network graph. Immutable once built.
#[derive(Clone, Debug)]
pub struct Topology {
    name: String,
    node_count: usize,
    edges: Vec<Edge>,
    /// Per node: `(neighbour, edge)` sorted by neighbour index.
    adjacency: Vec<Vec<(NodeId, EdgeId)>>,
    default_p_op: f64,
    attenuation_db_per_km: f64,
}

impl Topology {
    /// Builds and validates a topology: simple, connected, ids dense.
    ///
    /// Edges are sorted into canonical `(min, max)` order, which fixes
    /// [`EdgeId`] assignment and the order of random draws.
    pub fn new(
        name: impl Into<String>,
        node_count: usize,
        default_p_op: f64,
        attenuation_db_per_km: f64,
        specs: Vec<EdgeSpec>,
    ) -> Result<Self> {
        check_probability("p_op", default_p_op)?;
        if node_count < 2 {
            return Err(Error::validation(
                None,
                format!("a topology needs at least 2 nodes, got {node_count}"),
            ));
        }
        let mut keyed = Vec::with_capacity(specs.len());
        for s in specs {
            if s.u == s.v {
                return Err(Error::validation(
                    s.line,
                    format!("self-loop on node {}", s.u),
                ));
            }
            if s.u >= node_count || s.v >= node_count {
                return Err(Error::validation(
                    s.line,
                    format!(
                        "edge {}-{} references a node outside 0..{node_count}",
                        s.u, s.v
                    ),
                ));
            }
            let p_op = s.p_op.unwrap_or(default_p_op);
            let p_e = edge_success_probability_with(s.length_km, p_op, attenuation_db_per_km)
                .map_err(|e| Error::validation(s.line, e.to_string()))?;
            let (a, b) = if s.u < s.v { (s.u, s.v) } else { (s.v, s.u) };
            keyed.push((
                (a, b),
                s.line,
                Edge {
                    a: NodeId(a),
                    b: NodeId(b),
                    length_km: s.length_km,
                    p_op,
                    p_e,
                },
            ));
        }
        keyed.sort_by_key(|k| k.0);
        for w in keyed.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::validation(
                    w[1].1,
                    format!("duplicate edge {}-{}", w[1].0 .0, w[1].0 .1),
                ));
            }
        }
        let edges: Vec<Edge> = keyed.into_iter().map(|k| k.2).collect();
        let mut adjacency = vec![Vec::new(); node_count];
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.a.0].push((e.b, EdgeId(i)));
            adjacency[e.b.0].push((e.a, EdgeId(i)));
        }
        for list in &mut adjacency {
            list.sort();
        }
        let topo = Topology {
            name: name.into(),
            node_count,
            edges,
            adjacency,
            default_p_op,
            attenuation_db_per_km,
        };
        if !topo.is_connected() {
            return Err(Error::validation(None, "topology is not connected"));
        }
        Ok(topo)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count).map(NodeId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    /// Neighbours of `n` with the connecting edge, sorted by neighbour.
    pub fn neighbours(&self, n: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adjacency[n.0]
    }

    pub fn degree(&self, n: NodeId) -> usize {
        self.adjacency[n.0].len()
    }

    pub fn find_edge(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.adjacency[u.0]
            .binary_search_by_key(&v, |&(n, _)| n)
            .ok()
            .map(|i| self.adjacency[u.0][i].1)
    }

    pub fn default_p_op(&self) -> f64 {
        self.default_p_op
    }

    pub fn attenuation_db_per_km(&self) -> f64 {
        self.attenuation_db_per_km
    }

    /// Mean of `p_e` over all edges.
    pub fn mean_p_e(&self) -> f64 {
        self.edges.iter().map(|e| e.p_e).sum::<f64>() / self.edges.len() as f64
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adjacency[u] {
                if !seen[v.0] {
                    seen[v.0] = true;
                    count += 1;
                    stack.push(v.0);
                }
            }
        }
        count == self.node_count
    }

    fn specs(&self) -> Vec<EdgeSpec> {
        self.edges
            .iter()
            .map(|e| EdgeSpec {
                u: e.a.0,
                v: e.b.0,
                length_km: e.length_km,
                p_op: Some(e.p_op),
                line: None,
            })
            .collect()
    }

    /// Multiplies every edge length by `factor` and re-derives `p_e`.
    pub fn scale_lengths(&self, factor: f64) -> Result<Topology> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::domain(format!(
                "length scale factor must be positive, got {factor}"
            )));
        }
        let specs = self
            .specs()
            .into_iter()
            .map(|mut s| {
                s.length_km *= factor;
                s
            })
            .collect();
        Topology::new(
            self.name.clone(),
            self.node_count,
            self.default_p_op,
            self.attenuation_db_per_km,
            specs,
        )
    }

    /// Sets the same `p_op` on every edge (dropping per-edge overrides) and
    /// re-derives `p_e`. On a grid this is the uniform `p`.
    pub fn with_uniform_p_op(&self, p_op: f64) -> Result<Topology> {
        let specs = self
            .specs()
            .into_iter()
            .map(|mut s| {
                s.p_op = None;
                s
            })
            .collect();
        Topology::new(
            self.name.clone(),
            self.node_count,
            p_op,
            self.attenuation_db_per_km,
            specs,
        )
    }

    /// Same graph with `p_e = p` on every edge regardless of length.
    pub fn with_uniform_p_e(&self, p: f64) -> Result<Topology> {
        let specs = self
            .specs()
            .into_iter()
            .map(|mut s| {
                s.p_op = None;
                s
            })
            .collect();
        Topology::new(self.name.clone(), self.node_count, p, 0.0, specs)
    }

    pub fn catalog_stats(&self) -> CatalogStats {
        let edge_count = self.edges.len();
        let total: f64 = self.edges.iter().map(|e| e.length_km).sum();
        CatalogStats {
            node_count: self.node_count,
            edge_count,
            mean_edge_length_km: total / edge_count as f64,
            mean_nodal_degree: 2.0 * edge_count as f64 / self.node_count as f64,
        }
    }

    /// Serializes to the line-oriented topology format.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "name = {}", self.name);
        let _ = writeln!(out, "p_op = {}", self.default_p_op);
        if self.attenuation_db_per_km != DEFAULT_ATTENUATION_DB_PER_KM {
            let _ = writeln!(
                out,
                "attenuation_db_per_km = {}",
                self.attenuation_db_per_km
            );
        }
        let _ = writeln!(out, "nodes = {}", self.node_count);
        let _ = writeln!(out, "expected_nodes = {}", self.node_count);
        let _ = writeln!(out, "expected_edges = {}", self.edges.len());
        for e in &self.edges {
            if e.p_op == self.default_p_op {
                let _ = writeln!(out, "{} {} {}", e.a, e.b, e.length_km);
            } else {
                let _ = writeln!(out, "{} {} {} {}", e.a, e.b, e.length_km, e.p_op);
            }
        }
        out
    }
}

/// Summary statistics in the form used by optical-network catalogues.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub mean_edge_length_km: f64,
    pub mean_nodal_degree: f64,
}

/// An `M x M` lattice with uniform link probability `p`.
///
/// Node `row * M + col`. Edges have length 1 km and zero attenuation, so
/// every `p_e` equals `p` exactly.
pub fn build_grid(width: usize, p: f64) -> Result<Topology> {
    if width < 2 {
        return Err(Error::InvalidDimension(width));
    }
    check_probability("p", p)?;
    let mut specs = Vec::with_capacity(2 * width * (width - 1));
    for r in 0..width {
        for c in 0..width {
            let n = r * width + c;
            if c + 1 < width {
                specs.push(EdgeSpec::new(n, n + 1, 1.0));
            }
            if r + 1 < width {
                specs.push(EdgeSpec::new(n, n + width, 1.0));
            }
        }
    }
    Topology::new(format!("grid{width}x{width}"), width * width, p, 0.0, specs)
}

/// The four corner nodes of an `M x M` grid, ascending.
pub fn grid_corners(width: usize) -> Vec<NodeId> {
    let m = width;
    vec![
        NodeId(0),
        NodeId(m - 1),
        NodeId(m * (m - 1)),
        NodeId(m * m - 1),
    ]
}

/// A parsed topology document together with the expectations it declares.
#[derive(Clone, Debug)]
pub struct TopologyDocument {
    pub topology: Topology,
    pub expected_nodes: Option<usize>,
    pub expected_edges: Option<usize>,
    pub expected_mean_length_km: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonDocument {
    name: String,
    #[serde(default = "one")]
    p_op: f64,
    #[serde(default)]
    nodes: Option<usize>,
    #[serde(default)]
    expected_nodes: Option<usize>,
    #[serde(default)]
    expected_edges: Option<usize>,
    #[serde(default)]
    expected_mean_length_km: Option<f64>,
    #[serde(default)]
    attenuation_db_per_km: Option<f64>,
    edges: Vec<JsonEdge>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonEdge {
    u: usize,
    v: usize,
    length_km: f64,
    #[serde(default)]
    p_op: Option<f64>,
}

fn one() -> f64 {
    1.0
}

/// Parses a topology from the line-oriented format or its JSON equivalent.
pub fn load_topology(document: &str) -> Result<Topology> {
    parse_document(document).map(|d| d.topology)
}

/// Reads and parses a topology file.
pub fn load_topology_file(path: impl AsRef<Path>) -> Result<TopologyDocument> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_document(&text)
}

/// Parses a document and checks it against its declared expectations.
///
/// Node and edge counts must match exactly; the mean edge length within 1%.
pub fn parse_document(document: &str) -> Result<TopologyDocument> {
    let doc = if document.trim_start().starts_with('{') {
        parse_json(document)?
    } else {
        parse_text(document)?
    };
    let stats = doc.topology.catalog_stats();
    if let Some(n) = doc.expected_nodes {
        if n != stats.node_count {
            return Err(Error::validation(
                None,
                format!("expected {n} nodes, found {}", stats.node_count),
            ));
        }
    }
    if let Some(m) = doc.expected_edges {
        if m != stats.edge_count {
            return Err(Error::validation(
                None,
                format!("expected {m} edges, found {}", stats.edge_count),
            ));
        }
    }
    if let Some(l) = doc.expected_mean_length_km {
        if (stats.mean_edge_length_km - l).abs() > 0.01 * l {
            return Err(Error::validation(
                None,
                format!(
                    "expected mean edge length {l} km, found {:.3}",
                    stats.mean_edge_length_km
                ),
            ));
        }
    }
    Ok(doc)
}

fn parse_json(document: &str) -> Result<TopologyDocument> {
    let raw: JsonDocument = serde_json::from_str(document).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    let specs: Vec<EdgeSpec> = raw
        .edges
        .iter()
        .map(|e| EdgeSpec {
            u: e.u,
            v: e.v,
            length_km: e.length_km,
            p_op: e.p_op,
            line: None,
        })
        .collect();
    let node_count = raw
        .nodes
        .unwrap_or_else(|| specs.iter().map(|s| s.u.max(s.v) + 1).max().unwrap_or(0));
    let topology = Topology::new(
        raw.name,
        node_count,
        raw.p_op,
        raw.attenuation_db_per_km
            .unwrap_or(DEFAULT_ATTENUATION_DB_PER_KM),
        specs,
    )?;
    Ok(TopologyDocument {
        topology,
        expected_nodes: raw.expected_nodes,
        expected_edges: raw.expected_edges,
        expected_mean_length_km: raw.expected_mean_length_km,
    })
}

fn parse_text(document: &str) -> Result<TopologyDocument> {
    let mut name: Option<String> = None;
    let mut p_op = 1.0;
    let mut nodes: Option<usize> = None;
    let mut expected_nodes = None;
    let mut expected_edges = None;
    let mut expected_mean_length_km = None;
    let mut attenuation = DEFAULT_ATTENUATION_DB_PER_KM;
    let mut specs = Vec::new();

    for (i, raw_line) in document.lines().enumerate() {
        let line_no = i + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let perr = |msg: String| Error::Parse { line: line_no, msg };
        if let Some((key, value)) = line.split_once('=') {
            if !specs.is_empty() {
                return Err(perr("header field after edge records".into()));
            }
            let key = key.trim();
            let value = value.trim();
            let num = |v: &str| -> Result<f64> {
                v.parse::<f64>()
                    .map_err(|_| perr(format!("`{key}`: not a number: `{v}`")))
            };
            let int = |v: &str| -> Result<usize> {
                v.parse::<usize>()
                    .map_err(|_| perr(format!("`{key}`: not a non-negative integer: `{v}`")))
            };
            match key {
                "name" => name = Some(value.to_string()),
                "p_op" => p_op = num(value)?,
                "nodes" => nodes = Some(int(value)?),
                "expected_nodes" => expected_nodes = Some(int(value)?),
                "expected_edges" => expected_edges = Some(int(value)?),
                "expected_mean_length_km" => expected_mean_length_km = Some(num(value)?),
                "attenuation_db_per_km" => attenuation = num(value)?,
                other => return Err(perr(format!("unknown header field `{other}`"))),
            }
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 3 && tokens.len() != 4 {
            return Err(perr(format!(
                "expected `u v length_km [p_op]`, got {} fields",
                tokens.len()
            )));
        }
        let node = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| perr(format!("bad node id `{t}`")))
        };
        let real = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| perr(format!("bad number `{t}`")))
        };
        let u = node(tokens[0])?;
        let v = node(tokens[1])?;
        let length_km = real(tokens[2])?;
        let over = tokens.get(3).map(|t| real(t)).transpose()?;
        specs.push(EdgeSpec {
            u,
            v,
            length_km,
            p_op: over,
            line: Some(line_no),
        });
    }

    let name = name.ok_or_else(|| Error::Parse {
        line: 1,
        msg: "missing `name` header".into(),
    })?;
    if specs.is_empty() {
        return Err(Error::validation(None, "document has no edges"));
    }
    let node_count =
        nodes.unwrap_or_else(|| specs.iter().map(|s| s.u.max(s.v) + 1).max().unwrap_or(0));
    let topology = Topology::new(name, node_count, p_op, attenuation, specs)?;
    Ok(TopologyDocument {
        topology,
        expected_nodes,
        expected_edges,
        expected_mean_length_km,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_counts() {
        let g = build_grid(6, 0.75).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (36, 60));
        let g = build_grid(2, 1.0).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (4, 4));
        assert!(g.edges().iter().all(|e| e.p_e == 1.0));
        assert!(matches!(
            build_grid(1, 0.5),
            Err(Error::InvalidDimension(1))
        ));
    }

    #[test]
    fn grid_counts_by_enumeration() {
        for m in 2..=20 {
            let g = build_grid(m, 0.5).unwrap();
            // count lattice neighbours directly
            let mut count = 0;
            for r in 0..m {
                for c in 0..m {
                    if c + 1 < m {
                        count += 1;
                        assert!(g
                            .find_edge(NodeId(r * m + c), NodeId(r * m + c + 1))
                            .is_some());
                    }
                    if r + 1 < m {
                        count += 1;
                        assert!(g
                            .find_edge(NodeId(r * m + c), NodeId(r * m + c + m))
                            .is_some());
                    }
                }
            }
            assert_eq!(g.node_count(), m * m);
            assert_eq!(g.edge_count(), count);
        }
        let s = build_grid(10, 0.5).unwrap().catalog_stats();
        assert_eq!(s.edge_count, 180);
        assert_abs_diff_eq!(s.mean_nodal_degree, 3.6, epsilon = 1e-12);
    }

    #[test]
    fn link_probability_model() {
        assert_eq!(edge_success_probability(0.0, 0.75).unwrap(), 0.75);
        assert_abs_diff_eq!(
            edge_success_probability(50.0, 1.0).unwrap(),
            0.1,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            edge_success_probability(10.0, 0.4).unwrap(),
            0.4 * 10f64.powf(-0.2),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            edge_success_probability(10.0, 0.4).unwrap(),
            0.25238,
            epsilon = 1e-5
        );
        assert!(edge_success_probability(-1.0, 0.5).is_err());
        assert!(edge_success_probability(1.0, 1.5).is_err());
    }

    #[test]
    fn minimal_document() {
        let t = load_topology("name = pair\np_op = 1\n0 1 0\n").unwrap();
        assert_eq!(t.edge_count(), 1);
        assert_eq!(t.edges()[0].p_e, 1.0);
    }

    #[test]
    fn rejects_self_loop_and_duplicates() {
        let err = load_topology("name = x\n0 1 1\n1 1 2\n").unwrap_err();
        assert!(
            matches!(err, Error::Validation { line: Some(3), .. }),
            "{err}"
        );
        let err = load_topology("name = x\n0 1 1\n1 0 2\n").unwrap_err();
        assert!(
            matches!(err, Error::Validation { line: Some(3), .. }),
            "{err}"
        );
    }

    #[test]
    fn rejects_disconnected_and_malformed() {
        assert!(matches!(
            load_topology("name = x\n0 1 1\n2 3 1\n"),
            Err(Error::Validation { .. })
        ));
        assert!(matches!(
            load_topology("name = x\n0 1 1,5\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            load_topology("name = x\n0 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            load_topology("name = x\nbogus = 3\n0 1 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn expected_counts_enforced() {
        let err = parse_document("name = x\nexpected_edges = 2\n0 1 1\n").unwrap_err();
        assert!(err.to_string().contains("expected 2 edges"));
    }

    #[test]
    fn json_equivalent() {
        let t = load_topology(
            r#"{"name": "tri", "p_op": 0.5, "edges": [
                {"u": 0, "v": 1, "length_km": 0},
                {"u": 1, "v": 2, "length_km": 50, "p_op": 1.0},
                {"u": 0, "v": 2, "length_km": 0}]}"#,
        )
        .unwrap();
        assert_eq!(t.node_count(), 3);
        let e = t.find_edge(NodeId(1), NodeId(2)).unwrap();
        assert_abs_diff_eq!(t.edge(e).p_e, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn scaling() {
        let t = load_topology("name = x\np_op = 1\n0 1 50\n").unwrap();
        let s = t.scale_lengths(0.2).unwrap();
        assert_abs_diff_eq!(s.edges()[0].length_km, 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.edges()[0].p_e, 0.63096, epsilon = 1e-5);
        let same = t.scale_lengths(1.0).unwrap();
        assert_eq!(same.edges()[0].p_e, t.edges()[0].p_e);
        let t = load_topology("name = x\n0 1 609\n").unwrap();
        assert_abs_diff_eq!(
            t.scale_lengths(0.01).unwrap().edges()[0].length_km,
            6.09,
            epsilon = 1e-9
        );
        assert!(t.scale_lengths(0.0).is_err());
        assert!(t.scale_lengths(-2.0).is_err());
    }

    #[test]
    fn stats() {
        let s = build_grid(6, 0.75).unwrap().catalog_stats();
        assert_eq!((s.node_count, s.edge_count), (36, 60));
        assert_abs_diff_eq!(s.mean_edge_length_km, 1.0);
        assert_abs_diff_eq!(s.mean_nodal_degree, 10.0 / 3.0, epsilon = 1e-12);
        let s = load_topology("name = x\n0 1 7.5\n")
            .unwrap()
            .catalog_stats();
        assert_eq!(
            s,
            CatalogStats {
                node_count: 2,
                edge_count: 1,
                mean_edge_length_km: 7.5,
                mean_nodal_degree: 1.0
            }
        );
    }
}
