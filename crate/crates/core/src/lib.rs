//! Sparse Bayesian channel estimation for pilot-assisted OFDM.
//!
//! The estimators model the channel frequency response at the pilots as a
//! sparse combination of delay-grid Fourier phasors and infer the weights
//! with variational message passing under two- and three-layer hierarchical
//! priors (Gaussian scale mixtures with Gamma mixing). Baselines, a channel
//! simulator and a seeded Monte Carlo harness are included.

pub mod channel;
pub mod cli;
pub mod dictionary;
pub mod error;
pub mod estimators;
pub mod harness;
mod linalg;
pub mod model;
mod quad;
pub mod selftest;
pub mod specfun;

pub use error::{Error, Result};
