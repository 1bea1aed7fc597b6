//! A numerical laboratory for Riesz projection norms on weighted Hardy
//! spaces.
//!
//! The crate computes finite-dimensional realizations of three families of
//! quantities attached to a weight w on the unit circle:
//!
//! * finite-section estimates of the Riesz projection norm on L^2(w),
//!   through the angle between the analytic and anti-analytic subspaces
//!   ([`projection`]);
//! * analytic certificates h with |w - h| <= w sin(phi), which convert into
//!   upper bounds sec(phi) for the same norm ([`helson_szego`]);
//! * power norms, tail-projection gaps and basis constants for fast
//!   monotone multiplier operators on H^2(w) ([`multiplier`]), assembled
//!   into similarity-floor experiments against the closed form sec(pi/2p)
//!   ([`similarity`]).
//!
//! The two routes to the projection norm (spectral and certificate) are
//! independent and cross-check each other; [`cli`] exposes all experiments
//! with CSV output.

pub mod cli;
pub mod error;
pub mod gram;
pub mod helson_szego;
pub mod kernels;
pub mod multiplier;
pub mod projection;
pub mod similarity;
pub mod weights;

pub use error::{Error, Result};
