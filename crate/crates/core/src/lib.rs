//! Perfect secret sharing schemes, the partial information
//! lattice, and shared-information measures evaluated on it.
//!
//! The crate is organised bottom-up:
//!
//! - [`prob`]: finite joint distributions and Shannon quantities in bits.
//! - [`lattice`]: antichains, the lattice order and Möbius inversion.
//! - [`secret`]: access structures, scheme construction and verification.
//! - [`measures`]: `I_min`, `I_MMI`, the reference secret-sharing measure and
//!   the secret-sharing-property checkers.
//! - [`broja`]: the bivariate shared information `SI~` obtained by maximizing
//!   a conditional entropy over a marginal polytope.

pub mod broja;
pub mod error;
pub mod lattice;
pub mod measures;
pub mod prob;
pub mod secret;

pub use crate::error::{Error, Result};

/// Absolute tolerance for exact information identities.
pub const TOL: f64 = 1e-9;
