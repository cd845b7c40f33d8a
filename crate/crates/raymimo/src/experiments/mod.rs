//! Config-driven experiment harness: preset sweeps, validation, CSV output.

pub mod config;
pub mod registry;
pub mod runner;

pub use config::{validate_config, Finding, RawConfig, Severity};
pub use registry::{figure_defaults, registered_experiments};
pub use runner::{run_experiment, Manifest};
