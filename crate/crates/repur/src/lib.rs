//! Rényi entropy powers of sampled 1-D quantum densities, the
//! one-parameter family of entropy-power uncertainty products they satisfy,
//! and reconstruction tooling (information scans, entropy-power cumulants,
//! shifted-gamma expansions, tail fits) built on top of them.

pub mod cumulants;
pub mod error;
pub mod grid;
pub mod infoscan;
pub mod renyi;
pub mod repur;
pub mod states;
pub mod tails;
pub mod transform;

pub use error::{Error, Result};
