use crate::cluster::{ChartMove, TwistState};
use crate::numerics::Scalar;

use super::curves::CurveSlope;

/// Chart moves carrying the base chart to one whose first generator `γ'` is the oriented curve `s`.
///
/// Nearest-integer continued fraction of `p/q`: in the current generator basis the target class
/// has coordinates `(P, Q)`; `Tᵏ` sends them to `(P − kQ, Q)` and the rotation to `(−P − Q, P)`.
pub fn chart_path(s: &CurveSlope) -> Vec<ChartMove> {
    let (mut p, mut q) = (s.p(), s.q());
    let mut sign = s.orientation().sign();
    let mut moves = Vec::new();
    loop {
        if q < 0 {
            p = -p;
            q = -q;
            sign = -sign;
        }
        if q == 0 {
            break;
        }
        let k = (2 * p + q).div_euclid(2 * q);
        let r = p - k * q;
        let mv = if k > 0 { ChartMove::Twist } else { ChartMove::InverseTwist };
        moves.extend(std::iter::repeat_n(mv, k.unsigned_abs() as usize));
        moves.push(ChartMove::Rotate);
        (p, q) = (-r - q, r);
    }
    if sign * p < 0 {
        moves.push(ChartMove::Reverse);
    }
    moves
}

/// The chart adapted to `s`: its first generator is freely homotopic to `s`.
pub fn adapted_chart<S: Scalar>(st: &TwistState<S>, s: &CurveSlope) -> TwistState<S> {
    st.apply_all(&chart_path(s))
}
