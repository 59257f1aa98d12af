//! Command-line front end and report plumbing over `copies-core`.

pub mod cli;
pub mod jsonfmt;
pub mod manifest;
pub mod oracle_spec;
pub mod parallel;

pub use cli::run;
