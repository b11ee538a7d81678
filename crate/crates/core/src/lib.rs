//! Controlled probes for abstraction transfer in sequence models: grammar
//! translation suites from weighted PCFGs, target-grammar mutations,
//! Boolean operation suites, and the metrics that score model outputs
//! against them.

pub mod cli;
pub mod dataset;
pub mod flt;
pub mod grammar;
pub mod logic;
pub mod metrics;
pub mod mutations;
pub mod seed;
