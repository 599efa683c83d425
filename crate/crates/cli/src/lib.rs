//! Command line pipeline around `kmsteiner-core`: job configuration,
//! artifacts on disk, and the report tables.

pub mod artifacts;
pub mod config;
pub mod fixtures;
pub mod groups;
pub mod stages;

pub use config::JobConfig;
pub use stages::{Job, Outcome};
