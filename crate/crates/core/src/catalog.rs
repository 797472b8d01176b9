//! Bundled mesh topologies.
//!
//! Six optical backbones with the node and edge counts of the standard
//! catalogue. Edge lengths are stored unscaled; experiments in the guide
//! apply a `0.01` length scale ([`LENGTH_SCALE`]).

use crate::error::{Error, Result};
use crate::topology::{parse_document, TopologyDocument};

/// Length scale applied to bundled meshes in experiments.
pub const LENGTH_SCALE: f64 = 0.01;

/// `(key, file contents)` for every bundled topology.
pub const BUILTIN: &[(&str, &str)] = &[
    ("arpa", include_str!("../data/topologies/arpa.topo")),
    ("eon", include_str!("../data/topologies/eon.topo")),
    ("eurocore", include_str!("../data/topologies/eurocore.topo")),
    ("nsfnet", include_str!("../data/topologies/nsfnet.topo")),
    ("uknet", include_str!("../data/topologies/uknet.topo")),
    ("usnet", include_str!("../data/topologies/usnet.topo")),
];

/// Parses a bundled topology by key (case-insensitive).
pub fn builtin(key: &str) -> Result<TopologyDocument> {
    let lower = key.to_ascii_lowercase();
    let (_, text) = BUILTIN
        .iter()
        .find(|(k, _)| *k == lower)
        .ok_or_else(|| Error::domain(format!("no bundled topology named `{key}`")))?;
    parse_document(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_parse() {
        for (k, _) in BUILTIN {
            let doc = builtin(k).unwrap();
            assert_eq!(doc.expected_nodes, Some(doc.topology.node_count()));
        }
        assert!(builtin("NSFNET").is_ok());
        assert!(builtin("atlantis").is_err());
    }
}
