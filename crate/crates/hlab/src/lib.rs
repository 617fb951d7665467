//! File formats, the kernel-table cache, configuration files and the
//! experiment drivers behind the `hlab` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod config;
pub mod error;
pub mod experiments;
pub mod io;
pub mod report;

pub use error::{HlabError, Result};

/// Version string embedded in every report.
pub const VERSION: &str = concat!("hlab ", env!("CARGO_PKG_VERSION"));
