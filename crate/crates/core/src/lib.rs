//! Exact-arithmetic constructions and checks for monotonically controlled
//! integrals.
//!
//! The crate builds the explicit functions of that theory — base-q Cantor
//! systems and their Cantor functions, C¹ bump and ramp sums over the removed
//! gaps, step-function families, and control functions — as exactly evaluable
//! objects over arbitrary-precision rationals, and provides a verification
//! engine for the finitely checkable inequalities they satisfy: controlled
//! derivative ratio checks, monotonicity premises, derivative sampling,
//! Perron major/minor validity, oscillation sums, and divergence probes.
//!
//! Everything is rational arithmetic in canonical form; where a value is the
//! sum of an infinite series (the Cantor function at depth, the base-5
//! staircase on its Cantor set) the crate returns certified enclosures with
//! explicit tail bounds instead of approximations.

pub mod cantor;
pub mod constructions;
pub mod error;
pub mod exact;
pub mod poly;
pub mod verify;

pub use error::{Error, Result};
pub use exact::{baseq_expand, DigitExpansion, Enclosure, Rational};
