//! Contact numbers of totally separable unit ball packings.
//!
//! The crate builds packings (integer-lattice quasi-cubes, random guillotine
//! instances), certifies total separability with explicit hyperplanes, searches
//! lattice animals exhaustively for the maximum contact number `c_Z(n, d)`,
//! evaluates the closed-form upper bounds, audits planar contact graphs and
//! verifies the numeric constants used by the density arguments.

pub mod bounds;
pub mod census;
pub mod constants;
pub mod error;
pub mod geometry;
pub mod lattice;
pub mod mc;
pub mod oracle;
pub mod separability;

pub use error::{Error, Result};
pub use geometry::{ContactGraph, Mode, PackingConfig};
pub use lattice::LatticeShape;
pub use separability::{Hyperplane, SeparationCertificate};
