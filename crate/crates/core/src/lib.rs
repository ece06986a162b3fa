//! Transformation-based thermal cloaking toolkit.
//!
//! Builds anisotropic cloak media by pushing a homogeneous medium forward
//! under a radial blow-up map, solves the resulting heat-conduction problems
//! in the time domain and the frequency domain, and measures how visible the
//! cloaked object is from outside the cloak. The crate is organized so that
//! every experiment is deterministic: identical inputs reproduce identical
//! CSV and JSON outputs byte for byte.

pub mod error;
pub mod grid2d;
pub mod harness;
pub mod heat;
pub mod helmholtz;
pub mod medium;
pub mod radial;
pub mod solver;
pub mod sparse;
pub mod special;
pub mod spectral;
pub mod transform;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
