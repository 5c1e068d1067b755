//! Co-design toolkit for a jumping monoped.
//!
//! The pipeline has three stages:
//!
//! 1. [`stage1`] sweeps gear-ratio bins and keeps the lightest single-stage
//!    planetary actuator per bin ([`gearbox`] constraints, [`mass_models`]).
//! 2. [`codesign`] decodes a 7-D point (link lengths, gear ratios, virtual
//!    spring gains) into a robot, scores a single jump in the planar
//!    simulator in [`dynamics`], and searches with [`cmaes`].
//! 3. [`export`] writes a parametric design manifest for the optimum.
//!
//! [`cli`] wires the stages to files.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cmaes;
pub mod codesign;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod gearbox;
pub mod mass_models;
pub mod stage1;

pub use error::{Error, Result};
