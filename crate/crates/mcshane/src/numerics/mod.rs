//! Exact and floating scalars, small dense linear algebra and real spectra.

mod eigen;
mod ext;
mod matrix;
mod scalar;
mod sum;

pub use eigen::{
    eigen_real_sorted, log_spectrum_exact3, log_spectrum_ext3, Eigen, Precision, CONDITION_LIMIT, DEFAULT_TOL,
};
pub use ext::{Ext, DEFAULT_BITS};
pub use matrix::{cross3, det, dot, norm2, Matrix};
pub use scalar::{
    ln_abs_rational, parse_rational, rational, rational_from_f64, rational_height_bits, rational_to_f64,
    rational_to_string, Rational, Real, Scalar, GENERIC_TOL,
};
pub use sum::CompensatedSum;
