//! Projective invariants of flag configurations, potentials of framed local systems, and the
//! cluster-coordinate machinery needed to evaluate McShane-type identities for positive
//! PGL3 structures on the once-punctured torus.
//!
//! * [`numerics`]: exact and floating scalars, small matrices, real spectra.
//! * [`flags`]: flags, triple ratios, edge functions, positivity, eigenflags, Veronese flags.
//! * [`potential`]: lozenge coefficients, characters, transport, potential ratios, gap function.
//! * [`cluster`]: flip and twist charts, their potentials, and twist limits.
//! * [`torus`]: simple closed curves, holonomy, per-curve invariants and gap terms.
//! * [`verify`]: identity sums, gap metric, spectrum statistics, collar sweep, Fuchsian detector.

pub mod cluster;
pub mod error;
pub mod exec;
pub mod flags;
pub mod numerics;
pub mod potential;
pub mod torus;
pub mod verify;

pub use error::{Error, Result};

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
