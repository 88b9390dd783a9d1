use super::{MechanismConfig, MechanismTrace, Prediction, VoteCounts};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::{Point, Space};
use crate::welfare::LocationProfile;

/// Majority between the prediction `P` and its antipode `Q` on the circle.
///
/// `n_P` counts agents on the arc `(P - 1/4, P + 1/4]`, `n_Q` the rest. The
/// arcs are evaluated after rotating `P` to `1/4`, so membership is the test
/// `0 < r <= 1/2` on the rotated coordinate. Returns `P` iff `n_P <= n_Q + λn`.
pub fn robust_majority_circle<S: Scalar>(
    profile: &LocationProfile<S>,
    prediction: &Prediction<S>,
    cfg: &MechanismConfig<S>,
) -> Result<MechanismTrace<S>> {
    let space = Space::<S>::Circle;
    let p = match space.canonicalize(prediction.point()) {
        Ok(Point::Circle(p)) => p,
        _ => return Err(Error::domain("prediction", prediction.point(), "a point of the circle")),
    };
    let half = S::half();
    let shift = half * half - p;
    let mut n_p = 0;
    for x in &profile.points {
        let Point::Circle(x) = space.canonicalize(x)? else {
            unreachable!("canonicalize keeps the kind")
        };
        let r = x + shift;
        let r = r - r.floor();
        n_p += usize::from(r > S::zero() && r <= half);
    }
    let n = profile.len();
    let n_q = n - n_p;
    let bonus = cfg.bonus(n);
    let q = p + half;
    let q = q - q.floor();
    let chosen = if S::count(n_p) <= S::count(n_q) + bonus { p } else { q };
    Ok(MechanismTrace {
        chosen: Point::Circle(chosen),
        counts: VoteCounts::Circle { n_p, n_q, antipode: q },
        prediction_bonus: bonus,
        warnings: Vec::new(),
    })
}
