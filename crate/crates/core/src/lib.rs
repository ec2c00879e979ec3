//! Monte Carlo link-budget simulator for cooperative wireless links.
//!
//! Three ways of helping a blocked source reach its destination are compared:
//! a half-duplex decode-and-forward relay, a passive reflective surface made of
//! `M` unit cells, and a hybrid network that uses both. For every channel draw
//! the simulator computes the transmit power needed to hit a target rate, the
//! total consumed power and the resulting energy efficiency, with the surface
//! configured from either instantaneous or statistical channel knowledge.
//!
//! Module map:
//!
//! * [`geometry`]: node layout, unit-cell lattice, path-loss variances
//! * [`channel`]: spatial correlation, its PSD root, correlated Rayleigh draws
//! * [`rbd`]: surface phase designs and effective channel gains
//! * [`linkbudget`]: overhead fractions, rates, required/total power, EE
//! * [`montecarlo`]: paired per-realization evaluation and parameter sweeps
//! * [`oracle`]: analytical and brute-force cross-checks
//! * [`config`] / [`report`]: TOML experiment files and CSV output

// `!(x > 0.0)` is used on purpose so NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod config;
pub mod error;
pub mod geometry;
pub mod linkbudget;
pub mod montecarlo;
pub mod oracle;
pub mod rbd;
pub mod report;

pub use error::{Error, Result};

/// Complex baseband sample type used throughout.
pub type C64 = num_complex::Complex64;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Converts a power in Watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts * 1000.0).log10()
}

/// Converts a power in dBm to Watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) / 1000.0
}
