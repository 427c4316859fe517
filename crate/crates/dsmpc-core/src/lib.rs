//! Algorithmic core for distributed stochastic output-feedback MPC.
//!
//! The crate is `no_std` (with `alloc`) and carries no IO: it covers the
//! coupled-system model, small-scale conic kernels (PSD projection, an ADMM
//! SDP solver, Lyapunov/Riccati solves), structured gain synthesis,
//! covariance propagation with probabilistic reachable sets and constraint
//! tightening, and the finite-horizon MPC problem with a central active-set
//! solver and a consensus-ADMM solver.
//!
//! File formats, the CLI, and the closed-loop Monte-Carlo harness live in the
//! companion `dsmpc` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod conic;
pub mod error;
pub mod model;
pub mod mpc;
pub mod synthesis;
pub mod uncertainty;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
