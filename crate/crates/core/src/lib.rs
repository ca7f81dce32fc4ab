//! Exact and smoothed tools for two extremal problems on k-subsets of `[n]`:
//! the largest family without `ℓ` pairwise-disjoint members, and the largest
//! s-wise t-intersecting family.
//!
//! - [`exactmath`]: arbitrary-precision binomials.
//! - [`formulas`]: closed-form extremal values, sweeps and bounds.
//! - [`families`]: bitmask families, constructions, predicates, shifting.
//! - [`oracle`]: exact branch-and-bound maxima for small instances.
//! - [`smoothing`]: Gaussian-smoothed family counts and their constrained
//!   maximization over monotone simplex weights.

pub mod error;
pub mod exactmath;
pub mod families;
pub mod formulas;
pub mod oracle;
pub mod smoothing;

pub use error::{Error, Result};
pub use exactmath::{binom, BigCount};
pub use families::{KSet, SetFamily};
pub use formulas::{IntersectParams, MatchingParams};
