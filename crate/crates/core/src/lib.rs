//! Numerical laboratory for fractal dimensions of closed sets in ℝⁿ and
//! weighted (q,p,β)-Hardy–Sobolev inequalities on their complements.
//!
//! The crate is organised bottom-up:
//!
//! * [`setmodel`] builds closed sets with distance oracles,
//! * [`field`] rasterizes distances and integrates singular weights `δ_E^γ`,
//! * [`dimension`] estimates Assouad and Minkowski dimensions,
//! * [`conditions`] checks Aikawa, P(s), comparability and A₁ conditions,
//! * [`whitney`] decomposes `ℝⁿ \ E` into Whitney cubes,
//! * [`hardy`] evaluates and maximizes the Hardy–Sobolev quotient,
//! * [`verdict`] turns dimension estimates into predictions,
//! * [`oracle`] holds brute-force references used to cross-check the above.

pub mod conditions;
pub mod dimension;
pub mod error;
pub mod field;
pub mod gallery;
pub mod geom;
pub mod hardy;
pub mod oracle;
pub mod regress;
pub mod report;
pub mod setmodel;
pub mod verdict;
pub mod whitney;

pub use error::{Error, Result};

/// Version tag written into every JSON report.
pub const SCHEMA_VERSION: u32 = 1;
