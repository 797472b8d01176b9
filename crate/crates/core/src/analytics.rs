//! Closed-form and semi-analytical rate estimates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netstate::{CutOff, NetworkState, PairRetention};
use crate::rng::trial_rng;
use crate::routing::{dedup_nodes, min_user_cut_bound};
use crate::topology::{check_probability, EdgeId, NodeId, Topology};

/// Rate of single-path distribution with `Q_c = 1`: all route links must be
/// present in one slot, so the rate is the product of their probabilities.
pub fn sp_analytic_er(t: &Topology, route: &[EdgeId]) -> Result<f64> {
    if route.is_empty() {
        return Err(Error::domain("route has no edges"));
    }
    if let Some(e) = route.iter().find(|e| e.0 >= t.edge_count()) {
        return Err(Error::domain(format!(
            "route edge {e} is not in `{}`",
            t.name()
        )));
    }
    Ok(route.iter().map(|&e| t.edge(e).p_e).product())
}

/// Long-run probability that a link is present at a given slot.
///
/// A link is regenerated with probability `p` per slot and kept for `Q_c`
/// slots, giving `p Q_c / (1 + p (Q_c - 1))`.
pub fn expected_link_presence(p: f64, q_c: CutOff) -> Result<f64> {
    check_probability("p", p)?;
    Ok(match q_c {
        CutOff::Slots(q) => {
            let q = f64::from(q);
            p * q / (1.0 + p * (q - 1.0))
        }
        CutOff::Unbounded if p > 0.0 => 1.0,
        CutOff::Unbounded => 0.0,
    })
}

/// Probability that `s` users placed uniformly at random on `v` nodes all
/// fall inside a fixed set of `c` nodes: `C(v - s, c - s) / C(v, c)`.
pub fn users_in_component_probability(v: usize, s: usize, c: usize) -> Result<f64> {
    if s < 1 || s > v {
        return Err(Error::domain(format!(
            "need 1 <= |S| <= |V|, got |S| = {s}, |V| = {v}"
        )));
    }
    if c > v {
        return Err(Error::domain(format!(
            "component size {c} exceeds |V| = {v}"
        )));
    }
    if c < s {
        return Ok(0.0);
    }
    // equal to C(c, s) / C(v, s)
    Ok((0..s).map(|i| (c - i) as f64 / (v - i) as f64).product())
}

/// Distribution of the size of the largest connected component of the link
/// graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentDistribution {
    /// `probabilities[i]` is `P(C = i + 1)`.
    pub probabilities: Vec<f64>,
    pub sample_count: u64,
}

impl ComponentDistribution {
    /// Builds a distribution from counts indexed by size minus one.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::domain(
                "component distribution needs at least one sample",
            ));
        }
        Ok(ComponentDistribution {
            probabilities: counts.iter().map(|&k| k as f64 / total as f64).collect(),
            sample_count: total,
        })
    }

    /// All mass at one size.
    pub fn point_mass(node_count: usize, size: usize) -> Result<Self> {
        if size == 0 || size > node_count {
            return Err(Error::domain(format!(
                "size {size} outside 1..={node_count}"
            )));
        }
        let mut counts = vec![0; node_count];
        counts[size - 1] = 1;
        Self::from_counts(&counts)
    }

    pub fn node_count(&self) -> usize {
        self.probabilities.len()
    }

    /// `P(C = c)`, zero outside the support.
    pub fn p(&self, c: usize) -> f64 {
        if c == 0 {
            0.0
        } else {
            self.probabilities.get(c - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum()
    }
}

/// Slots simulated before a sample is taken when `Q_c > 1`.
pub fn warmup_slots(q_c: CutOff) -> u64 {
    match q_c {
        CutOff::Slots(q) => 10 * u64::from(q),
        CutOff::Unbounded => 10_000,
    }
}

/// Samples link graphs of `t` with every link generated with probability
/// `p`, and tallies the largest component size.
///
/// For `Q_c > 1` each sample runs the link lifecycle without consumption
/// for [`warmup_slots`] slots. Sample `i` uses stream `(seed, 0, i)`.
pub fn estimate_component_distribution(
    t: &Topology,
    p: f64,
    q_c: CutOff,
    samples: u64,
    seed: u64,
) -> Result<ComponentDistribution> {
    estimate_component_distribution_in(&t.with_uniform_p_e(p)?, q_c, samples, seed)
}

/// As [`estimate_component_distribution`] with the topology's own `p_e`.
pub fn estimate_component_distribution_in(
    t: &Topology,
    q_c: CutOff,
    samples: u64,
    seed: u64,
) -> Result<ComponentDistribution> {
    if samples == 0 {
        return Err(Error::domain("samples must be at least 1"));
    }
    let warmup = match q_c {
        CutOff::Slots(1) => 1,
        q => warmup_slots(q),
    };
    let n = t.node_count();
    let counts = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut state = NetworkState::new(t, q_c, PairRetention::CutOff, trial_rng(seed, 0, i));
            for _ in 0..warmup {
                state.advance_timeslot();
            }
            state.link_subgraph().largest_component()
        })
        .fold(
            || vec![0u64; n],
            |mut acc, c| {
                acc[c - 1] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    ComponentDistribution::from_counts(&counts)
}

/// Semi-analytical MP-C rate for `s` randomly placed users:
/// `sum_c P(users in a component of size c) P(C = c)`.
pub fn analytic_er_estimate(t: &Topology, s: usize, dist: &ComponentDistribution) -> Result<f64> {
    if s < 2 {
        return Err(Error::domain("at least 2 users are required"));
    }
    let v = t.node_count();
    if dist.node_count() != v {
        return Err(Error::domain(format!(
            "distribution covers {} nodes, topology has {v}",
            dist.node_count()
        )));
    }
    let mut er = 0.0;
    for c in 1..=v {
        er += users_in_component_probability(v, s, c)? * dist.p(c);
    }
    Ok(er.clamp(0.0, 1.0))
}

/// Upper bound on the rate of any protocol: at most one GHZ state per
/// disjoint tree, and a tree needs a link across the smallest user cut.
pub fn er_upper_bound(t: &Topology, users: &[NodeId], p: f64, q_c: CutOff) -> Result<f64> {
    let users = dedup_nodes(users);
    Ok(min_user_cut_bound(t, &users)? as f64 * expected_link_presence(p, q_c)?)
}
