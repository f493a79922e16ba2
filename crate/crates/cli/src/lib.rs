//! Configuration, dispatch and reporting for the `gibbs` binary.

// Validation is written `!(x > 0.0)` on purpose so that NaN fails it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;
pub mod run;

pub use config::{parse_config, parse_config_at, render_config, Command, ConfigError, RunConfig};
pub use report::{comparable, write_atomic, RunReport};
pub use run::{execute, Outcome};
