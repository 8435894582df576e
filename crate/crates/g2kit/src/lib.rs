//! File formats, configuration and the parallel ensemble driver behind the
//! `g2kit` command-line tool.
//!
//! The numerics live in [`g2kit_core`]; this crate reads run configurations,
//! dispatches them to one of the four routes, and writes plot-ready curves.

#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compare;
pub mod config;
pub mod error;
pub mod io;
pub mod run;

pub use compare::{compare_curves, Comparison};
pub use config::{Format, Method, Overrides, RunConfig};
pub use error::CliError;
pub use run::{compute_curve, thread_count};
