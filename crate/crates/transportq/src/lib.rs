//! Hybrid quantum-inspired optimization pipeline for small transportation
//! problems: traveling salesman, vehicle routing, and facility location.
//!
//! The crate is organized as a chain of stages:
//!
//! 1. [`instances`] / [`encode`]: problem instances become penalized binary
//!    programs, then normalized QUBO matrices ([`qubo`]) and Ising
//!    Hamiltonians ([`ising`]).
//! 2. [`statevector`] / [`circuit`]: dense statevector simulation of
//!    digitized annealing circuits built from the Ising form.
//! 3. [`compress`]: variational compression of an annealing prefix into a
//!    shallow ansatz (fidelity-maximized against a finer-resolution target).
//! 4. [`optimize`] / [`cvar`]: CVaR-based derivative-free optimization of
//!    QAOA-style tails appended to the compressed prefix.
//! 5. [`metrics`] / [`sweep`]: sampling-based feasibility and cost metrics
//!    over an (m, p) grid, written as CSV/JSON.
//!
//! Conventions pinned across the crate:
//!
//! * Bit/spin map: `b = (1 - z) / 2`, so spin `z = +1` encodes bit `0`.
//! * Variable index 0 is the least significant bit of a basis-state index.
//! * Rotations follow `RZ(t) = exp(-i t Z / 2)`; `exp(-i t Z x Z)` is
//!   realized as `RZZ(2 t)`.
//! * Trotter steps apply the cost sub-layer before the driver sub-layer.

pub mod bits;
pub mod circuit;
pub mod compress;
pub mod cvar;
pub mod decode;
pub mod dense;
pub mod depth;
pub mod encode;
mod error;
pub mod instances;
pub mod ising;
pub mod metrics;
pub mod optimize;
pub mod oracle;
pub mod program;
pub mod qubo;
pub mod sample;
pub mod schedule;
pub mod statevector;
pub mod sweep;

pub use error::{Error, Result};
