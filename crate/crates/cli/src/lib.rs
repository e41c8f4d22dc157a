//! Scenario runner behind the `verify` binary: config parsing, scenario pipelines and reports.

pub mod config;
pub mod report;
pub mod scenarios;

use std::fmt;

/// Configuration or I/O problem; always exit code 2.
#[derive(Debug)]
pub struct Failure(String);

impl Failure {
    pub fn new(msg: impl Into<String>) -> Self {
        Failure(msg.into())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<bootstrap_core::Error> for Failure {
    fn from(e: bootstrap_core::Error) -> Self {
        Failure(e.to_string())
    }
}
