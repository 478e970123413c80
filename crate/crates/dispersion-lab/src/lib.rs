//! A desk-scale laboratory for second-order analysis of discrete memoryless
//! channels with feedback.
//!
//! The crate computes capacity and dispersion parameters of a channel,
//! implements timid/bold feedback input controllers, runs Monte Carlo
//! simulations of the controlled information-density random walk and of its
//! diffusion limits, evaluates the associated rate bounds, and constructs
//! very-noisy channel families to check their small-parameter scaling.
//!
//! Start with [`channel::Dmc`] and [`analyze::analyze`]; each other module
//! builds on the resulting [`analyze::ChannelAnalysis`]. The `examples/`
//! directory has one runnable walkthrough per capability.

// `!(x > 0.0)` is the NaN-rejecting validation idiom, frozen reference
// constants keep every digit on purpose, and indexed loops over parallel
// arrays are clearer than zipped iterators in the numeric kernels.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision,
    clippy::needless_range_loop
)]

pub mod analyze;
pub mod bounds;
pub mod capacity;
pub mod channel;
pub mod cli;
pub mod controllers;
pub mod diffusion;
pub mod error;
pub mod io;
pub mod polytope;
pub mod quad;
pub mod simplex;
pub mod special;
pub mod vnc;
pub mod walk;

pub use analyze::{analyze, ChannelAnalysis, DispersionClass, Tolerances};
pub use channel::{Dmc, InputDistribution};
pub use error::{Error, Result};
