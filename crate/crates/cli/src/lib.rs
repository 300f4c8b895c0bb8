//! Experiment drivers behind the `bandmoment` binary.

pub mod config;
pub mod run;
pub mod verify;
