//! Distributed zero-knowledge Sumcheck over a simulated synchronous network,
//! with its graph applications and round-compressed variants.

pub mod algebra;
pub mod error;
pub mod netsim;
pub mod seeds;
pub mod sumcheck;
pub mod zk;
pub mod coloring;
pub mod subgraph;
pub mod roundopt;
pub mod analysis;
pub mod cli;
