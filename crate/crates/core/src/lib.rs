//! Monte Carlo simulation and rate estimation for distributing GHZ states
//! over quantum networks with multipath routing.

pub mod analytics;
pub mod catalog;
pub mod error;
pub mod graph;
pub mod harness;
pub mod netstate;
pub mod protocols;
pub mod rng;
pub mod routing;
pub mod topology;

pub use error::{Error, Result};

// Guide chapters run as doctests so the book cannot drift from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/topologies.md")]
    mod topologies {}
    #[doc = include_str!("../../../book/src/links.md")]
    mod links {}
    #[doc = include_str!("../../../book/src/routing.md")]
    mod routing {}
    #[doc = include_str!("../../../book/src/protocols.md")]
    mod protocols {}
    #[doc = include_str!("../../../book/src/estimates.md")]
    mod estimates {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
