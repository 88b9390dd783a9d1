use super::{CoordinateTally, MechanismConfig, MechanismTrace, Prediction, VoteCounts};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::{Point, Space};
use crate::welfare::LocationProfile;

fn corner_bits<S: Scalar>(p: &Point<S>) -> Result<Vec<u8>> {
    let coords: Vec<S> = match p {
        Point::Segment(x) => vec![*x],
        Point::Square(xy) => xy.to_vec(),
        _ => return Err(Error::domain("prediction", p, "a corner of the segment or square")),
    };
    coords
        .into_iter()
        .map(|c| {
            if c == S::zero() {
                Ok(0)
            } else if c == S::one() {
                Ok(1)
            } else {
                Err(Error::domain("prediction", p, "a corner of the segment or square"))
            }
        })
        .collect()
}

/// Coordinatewise majority with `λ·n` bonus votes for the predicted bit.
///
/// Agents at `<= 1/2` on a coordinate vote for 1, the others for 0. The
/// predicted bit wins whenever its total is at least the other bit's total.
/// The dimension (1 or 2) follows the prediction.
pub fn robust_coordinatewise_voting<S: Scalar>(
    profile: &LocationProfile<S>,
    prediction: &Prediction<S>,
    cfg: &MechanismConfig<S>,
) -> Result<MechanismTrace<S>> {
    let predicted = corner_bits(prediction.point())?;
    let space: Space<S> = if predicted.len() == 1 { Space::Segment } else { Space::Square };
    let n = profile.len();
    let bonus = cfg.bonus(n);
    let half = S::half();
    let mut for_one = vec![0usize; predicted.len()];
    for p in &profile.points {
        match space.canonicalize(p)? {
            Point::Segment(x) => for_one[0] += usize::from(x <= half),
            Point::Square(xy) => {
                for (k, c) in xy.iter().enumerate() {
                    for_one[k] += usize::from(*c <= half);
                }
            }
            _ => unreachable!("canonicalize keeps the kind"),
        }
    }
    let tallies: Vec<CoordinateTally> = predicted
        .iter()
        .zip(&for_one)
        .map(|(&bit, &ones)| {
            let zeros = n - ones;
            let (own, other) = if bit == 1 { (ones, zeros) } else { (zeros, ones) };
            let output = if S::count(own) + bonus >= S::count(other) { bit } else { 1 - bit };
            CoordinateTally {
                for_one: ones,
                for_zero: zeros,
                predicted: bit,
                output,
            }
        })
        .collect();
    let coord = |t: &CoordinateTally| if t.output == 1 { S::one() } else { S::zero() };
    let chosen = match tallies.as_slice() {
        [t] => Point::Segment(coord(t)),
        [t, u] => Point::Square([coord(t), coord(u)]),
        _ => unreachable!("one or two coordinates"),
    };
    Ok(MechanismTrace {
        chosen,
        counts: VoteCounts::Coordinatewise(tallies),
        prediction_bonus: bonus,
        warnings: Vec::new(),
    })
}
