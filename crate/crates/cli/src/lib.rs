//! Command-line front end: scenario files, figure presets, sweeps and
//! oracle cross-checks, all emitted as CSV.

pub mod config;
pub mod error;
pub mod presets;
pub mod run;
pub mod scenario;
