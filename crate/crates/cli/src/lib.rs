//! Config-driven runner around `fnell-torus`: subsolution certification,
//! continuity solves, the operator self-test and the ABP diagnostic.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abp;
pub mod certify;
pub mod config;
pub mod problem;
pub mod run;
pub mod selftest;

pub use config::{parse_config, parse_config_file, ConfigErrors, RunConfig};
pub use problem::{build_problem, RunError};
