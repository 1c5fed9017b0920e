//! Harness library behind the `bernmark` CLI: experiment configuration,
//! verification rows, sweeps and report writers, exposed for in-process use
//! by the acceptance suite.

pub mod config;
pub mod experiment;
pub mod report;
