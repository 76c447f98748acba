//! Command-line and file-format companion to `minimaxlab-core`.
//!
//! [`io`] reads and writes instance files, [`report`] builds the documents
//! the CLI emits and re-verifies them, [`cli`] is the front end.

pub mod cli;
pub mod io;
pub mod pool;
pub mod report;

pub use minimaxlab_core as core;
