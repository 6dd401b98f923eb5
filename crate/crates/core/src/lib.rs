//! Digit frequencies of greedy expansions in multinacci bases.
//!
//! Fair-coin sequences are pushed through the normalization `0 1^n -> 1 0^n`
//! and compared with greedy expansions of Lebesgue-typical points.

pub mod cli;
pub mod dimension;
pub mod error;
pub mod ergodic;
pub mod field;
pub mod normalize;
pub mod probability;
pub mod rational;
pub mod word;

pub use error::{Error, Result};
pub use field::{BetaParams, FieldElement};
pub use word::{BitWord, TwoSidedWord};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
