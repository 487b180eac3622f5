//! Monte Carlo simulation of V2X broadcast (BSM) delivery over stochastic
//! road geometries.
//!
//! The pipeline for one snapshot is
//! [`geometry`] (scene + vehicle point process) → [`channel`] (RMa path
//! loss, LOS, shadowing) → [`mac`] (slotted broadcast CSMA/CA and SINR
//! reception) → [`metrics`] (raw / blockage / discounted PDR). The
//! [`engine`] module runs seeded campaigns of snapshots in parallel and
//! reduces them deterministically.

// `!(x >= 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod engine;
mod error;
pub mod geometry;
pub mod mac;
pub mod metrics;
pub mod seed;

pub use error::{Error, Result};
