//! Simulation and exact verification toolkit for initial enlargements of
//! filtrations.

// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod cli;
pub mod enlarged;
pub mod error;
pub mod experiments;
pub mod finite;
pub mod gaussian;
pub mod integrand;
pub mod martingale;
pub mod paths;
pub mod quadrature;
pub mod rng;
pub mod stats;
pub mod timegrid;

pub use error::{Error, Result};
