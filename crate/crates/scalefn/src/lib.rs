//! Command line, job files and parallel Monte Carlo for `scalefn-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod format;
pub mod montecarlo;
