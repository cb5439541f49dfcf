//! Once-punctured torus: oriented simple closed curves, holonomy reconstruction from a chart,
//! per-curve invariants and gap terms.

mod chart;
mod curves;
mod holonomy;
mod invariants;

pub use chart::{adapted_chart, chart_path};
pub use curves::{enumerate_curves, slope_to_word, CurveSlope, CurveWord, Letter, Orientation};
pub use holonomy::{reconstruct_holonomy, HolonomyRep, PointLine};
pub use invariants::{
    curve_invariants, dual_gap_term, gap_term, halfpants_gap_term, halfpants_gap_term_prime, logistic_gap,
    pants_gap_term, CurveEngine, CurveInvariants, PantsCoordinates,
};
