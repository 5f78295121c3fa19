//! Simulator and verification harness for finite-time blowup of radially
//! symmetric compressible flows with an optional self-consistent radial
//! force.
//!
//! The crate integrates the radial system on `[0, R]` with a no-slip wall,
//! tracks the weighted moment `H(t) = int_0^R r^n V dr`, and checks the
//! chain of inequalities that turns a positive initial moment into a finite
//! upper bound on the classical lifespan:
//!
//! * [`model`] — parameters, grid, states, initial profiles, hypotheses;
//! * [`field`] — enclosed-mass integral and the radial force field;
//! * [`solver`] — first-order finite-volume integrator with blowup proxies;
//! * [`characteristics`] — independent shell-ODE oracle for pressureless
//!   runs;
//! * [`diagnostics`] — moment functional, blowup bound, Riccati floor, and
//!   the proof-chain audits;
//! * [`cli`] — configuration-driven runner emitting CSV/JSON artifacts.

pub mod characteristics;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod model;
pub mod solver;

pub use error::{Error, Result};
