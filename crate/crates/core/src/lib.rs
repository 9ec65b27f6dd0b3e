//! Seedable simulation of k-entangled multipath routing in quantum networks.
//!
//! The pipeline is topology generation ([`net`]), entanglement sampling,
//! path scheduling ([`routing`]), scoring ([`metrics`]) and an analytic
//! Bell-pair noise model ([`fidelity`]). [`harness`] drives seeded sweeps.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fidelity;
pub mod harness;
pub mod metrics;
pub mod net;
pub mod rng;
pub mod routing;

pub use error::{Error, Result};
