//! Outage probability of a LEO-satellite IoT uplink relayed by amplify-and-forward
//! satellites, under capture-model and successive-interference-cancellation
//! decoding.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod numerics;
pub mod scalar;

pub use error::{ConfigError, Error, NumericError, Result};
pub use scalar::{Cplx, Real};
pub mod channel;
pub mod geometry;
pub mod system;
pub mod montecarlo;
pub mod analytic;
pub mod cli;

pub type Scalar = f64;
pub type Geometry = geometry::GeometryParams<f64>;
pub type Fading = channel::ShadowedRicianParams<f64>;
pub type Csi = channel::CsiMismatch<f64>;
pub type QuadSpec = numerics::QuadratureSpec<f64>;
pub type EulerSpec = numerics::EulerInversionSpec<f64>;
