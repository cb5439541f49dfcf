//! Verification workflows: partial sums of the McShane-type identities, the gap metric, length
//! spectra, the collar inequality and the Fuchsian detector.

mod collar;
mod fuchsian;
mod identity;
mod metric;
mod spectrum;

use serde::{Deserialize, Serialize};

use crate::exec::Exec;
use crate::numerics::Precision;

pub use collar::{collar_lhs, collar_sweep, CollarPair, CollarReport};
pub use fuchsian::{fuchsian_detector, FuchsianReport};
pub use identity::{
    assemble, bits_for, classical_comparison, curve_rows, mcshane_sum, seed_fingerprint, ClassicalComparison,
    ConvergencePoint, GapReport, GapRow, SumMode,
};
pub use metric::{gap_metric, softplus, GapMetricReport};
pub use spectrum::{ls_slope, min_distinct_gap, spectrum, CountPoint, SpectrumReport, DISTINCT_TOL};

/// Scheduling and eigenvalue precision for per-curve work.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub exec: Exec,
    pub precision: Precision,
}
