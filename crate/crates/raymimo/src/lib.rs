//! Ray-based massive MIMO channel synthesis and asymptotics.
//!
//! The library synthesizes multipath channels as superpositions of plane-wave
//! rays over uniform linear and planar arrays, estimates channel-hardening,
//! favorable-propagation and interference metrics by Monte Carlo, and
//! cross-validates them against semi-analytic predictors built from
//! characteristic functions of the ray angle distributions.
//!
//! Modules:
//! - [`specialfn`]: Bessel functions, the Dirichlet-kernel cross magnitude and
//!   adaptive quadrature.
//! - [`angular`]: angular distribution models (PDFs, samplers, characteristic
//!   functions).
//! - [`array`]: array geometries, steering vectors, ray-channel synthesis.
//! - [`metrics`]: Monte Carlo estimators of the system metrics.
//! - [`asymptotics`]: interference-kernel series, endfire expansions, slope
//!   fits.
//! - [`scheduler`]: separation-protected user admission and its interference
//!   bounds.
//! - [`experiments`]: config-driven CLI experiment harness with CSV output.

pub mod angular;
pub mod array;
pub mod asymptotics;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod rng;
pub mod scheduler;
pub mod specialfn;
pub mod util;

pub use error::{Error, Result};
pub use rng::RngStream;
