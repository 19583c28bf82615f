//! Command-line front end for `abelkit-core`: equations given as
//! expressions, plot data as CSV/JSON, and the acceptance suite.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod error;
pub mod expr;
pub mod output;
