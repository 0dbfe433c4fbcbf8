//! Scenario files, mode execution and report output.

pub mod emit;
pub mod run;
pub mod scenario;
