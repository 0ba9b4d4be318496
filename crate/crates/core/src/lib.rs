//! Coverage probability of NOMA-assisted UAV cellular networks.
//!
//! Two independent routes compute the same quantities:
//!
//! * [`analytic`] evaluates the stochastic-geometry closed forms: Laplace
//!   transforms of Poisson-field interference, derivatives of those
//!   transforms for Nakagami-m desired links, and the numerical integrals
//!   over the serving-distance distributions.
//! * [`montecarlo`] simulates the same network with seeded, parallel,
//!   bit-reproducible trials.
//!
//! Both strategies are covered: *user-centric*, where a typical user joins
//! its nearest UAV and is paired with an already-connected fixed user, and
//! *UAV-centric*, where a UAV serves a near/far pair inside half the
//! distance to its nearest neighbour.

pub mod analytic;
pub mod channel;
pub mod error;
pub mod montecarlo;
pub mod quad;
pub mod scenario;
pub mod spatial;
pub mod specfun;

pub use error::{Error, Result};
