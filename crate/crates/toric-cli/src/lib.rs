//! Report types emitted by the fan-analysis command line.

pub mod reports;
