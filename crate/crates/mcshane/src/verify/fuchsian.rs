use serde::Serialize;

use crate::cluster::{ChartMove, TwistState};
use crate::numerics::{Rational, Scalar};

/// Outcome of the triple-ratio rigidity test.
#[derive(Clone, Debug, Serialize)]
pub struct FuchsianReport {
    pub fuchsian: bool,
    pub flip_depth: usize,
    pub charts_checked: usize,
    /// Largest `|T − 1|` over both triangles of every chart.
    pub max_deviation: f64,
}

fn neighbours(st: &TwistState<Rational>) -> Vec<TwistState<Rational>> {
    let mut out = Vec::with_capacity(6);
    let mut rotated = st.clone();
    for _ in 0..3 {
        out.push(rotated.apply(ChartMove::Twist));
        out.push(rotated.apply(ChartMove::InverseTwist));
        rotated = rotated.rotate();
    }
    out
}

/// Whether every triangle triple ratio of every chart within `flip_depth` flips of `st` is within
/// `tol` of 1.
pub fn fuchsian_detector(st: &TwistState<Rational>, flip_depth: usize, tol: f64) -> FuchsianReport {
    let mut frontier = vec![st.clone()];
    let mut charts_checked = 0;
    let mut max_deviation: f64 = 0.0;
    for depth in 0..=flip_depth {
        for chart in &frontier {
            let (t1, t2) = chart.triangle_triple_ratios();
            charts_checked += 1;
            max_deviation = max_deviation.max((t1.to_f64() - 1.0).abs()).max((t2.to_f64() - 1.0).abs());
        }
        if depth < flip_depth {
            frontier = frontier.iter().flat_map(neighbours).collect();
        }
    }
    FuchsianReport { fuchsian: max_deviation <= tol, flip_depth, charts_checked, max_deviation }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational;

    #[test]
    fn all_ones_is_fuchsian_at_every_depth() {
        for depth in 0..4 {
            let r = fuchsian_detector(&TwistState::ones(), depth, 1e-12);
            assert!(r.fuchsian);
            assert_eq!(r.max_deviation, 0.0);
        }
    }

    #[test]
    fn lambda_length_seeds_are_fuchsian() {
        let st = TwistState::fuchsian(&rational(2, 1), &rational(3, 5), &rational(7, 4)).unwrap();
        assert!(fuchsian_detector(&st, 3, 1e-12).fuchsian);
    }

    #[test]
    fn perturbed_seed_is_detected() {
        let mut c = TwistState::<Rational>::ones().coords();
        c[2] = rational(2, 1);
        let st = TwistState::from_array(c).unwrap();
        let r = fuchsian_detector(&st, 1, 1e-9);
        assert!(!r.fuchsian);
        assert!(r.max_deviation > 0.1);
    }
}
