use super::{DualRule, MechanismConfig, MechanismTrace, Prediction, VoteCounts};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::{Point, Space};
use crate::welfare::{LocationProfile, Preference};

/// Majority on transformed locations for agents with dual preferences.
///
/// Each agent is mapped to `x* = x` (type 0) or `x* = 1 - x` (type 1), which
/// turns every agent into one that wants the facility far from `x*`. The rule
/// is stated for prediction 1; prediction 0 is handled by mirroring `x ↦ 1 - x`
/// and mirroring the answer back.
///
/// With [`DualRule::AsWritten`], `n_1` counts `x* <= (1 - λ)/2` and the
/// prediction wins iff `n_1 > n_2`. With [`DualRule::PredictionFavoring`], the
/// cut is `(1 + λ)/2` and the prediction wins iff `n_1 >= n_2`.
pub fn transformed_robust_majority<S: Scalar>(
    profile: &LocationProfile<S>,
    prediction: &Prediction<S>,
    cfg: &MechanismConfig<S>,
) -> Result<MechanismTrace<S>> {
    let types = profile
        .types
        .as_ref()
        .ok_or_else(|| Error::Contract("the dual mechanism needs agent types".into()))?;
    let (zero, one) = (S::zero(), S::one());
    let mirrored = match prediction.point() {
        Point::Segment(p) if *p == one => false,
        Point::Segment(p) if *p == zero => true,
        other => return Err(Error::domain("prediction", other, "{0, 1}")),
    };
    let space = Space::<S>::Segment;
    let transformed = profile
        .points
        .iter()
        .zip(types)
        .map(|(x, t)| {
            let Point::Segment(x) = space.canonicalize(x)? else {
                unreachable!("canonicalize keeps the kind")
            };
            let x = if mirrored { one - x } else { x };
            Ok(match t {
                Preference::Averse => x,
                Preference::Attracted => one - x,
            })
        })
        .collect::<Result<Vec<S>>>()?;
    let lambda = cfg.lambda();
    let threshold = match cfg.dual_rule {
        DualRule::AsWritten => (one - lambda) * S::half(),
        DualRule::PredictionFavoring => (one + lambda) * S::half(),
    };
    let n_1 = transformed.iter().filter(|&&x| x <= threshold).count();
    let n_2 = transformed.len() - n_1;
    let keep = match cfg.dual_rule {
        DualRule::AsWritten => n_1 > n_2,
        DualRule::PredictionFavoring => n_1 >= n_2,
    };
    let normalized = if keep { one } else { zero };
    let chosen = if mirrored { one - normalized } else { normalized };
    Ok(MechanismTrace {
        chosen: Point::Segment(chosen),
        counts: VoteCounts::Dual {
            n_1,
            n_2,
            transformed,
            threshold,
        },
        prediction_bonus: cfg.bonus(profile.len()),
        warnings: Vec::new(),
    })
}
