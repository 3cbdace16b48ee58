//! Command-line experiments for `psi_z(x)` built on `psilab-core`: flag
//! parsing, CSV and JSON reports, and the acceptance suite.

pub mod cli;
pub mod commands;
pub mod criteria;
pub mod parse;
pub mod report;
