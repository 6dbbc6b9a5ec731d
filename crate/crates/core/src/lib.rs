//! Possible-worlds models of narrative.
//!
//! A story file declares a finite typed universe and a timeline of fabulas.
//! From there the crate enumerates the worlds consistent with each fabula,
//! simulates conveyance from a narrator's world to a reader's, represents the
//! reader's uncertainty with weak filters, and computes coherence metrics over
//! the resulting world sets.

pub mod conveyance;
pub mod error;
pub mod logic;
pub mod metrics;
pub mod models;
pub mod plausibility;
pub mod scalar;
pub mod story;

pub use error::{Error, Result};
pub use logic::{Atom, Formula, Limits, Literal, Universe, World};
pub use models::WorldSet;
pub use scalar::{Rational, Scalar};
pub use story::{Fabula, Timeline};

/// Floating-point type used for entropies in reports.
pub type Bits = f64;
