use super::{MechanismConfig, MechanismTrace, Prediction, VoteCounts, Warning};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::{Point, SpaceKind, TreeGraph, TreePoint};
use crate::welfare::LocationProfile;

/// Majority between the two ends of a long path through the prediction.
///
/// `a` is the vertex farthest from the prediction, `b` the vertex farthest
/// from `a` (the prediction itself when it ties). Agents are split at the
/// midpoint of `a`–`b`; the mechanism returns `a` iff `n_a + λn <= n_b`.
pub fn robust_majority_tree<S: Scalar>(
    tree: &TreeGraph<S>,
    profile: &LocationProfile<S>,
    prediction: &Prediction<S>,
    cfg: &MechanismConfig<S>,
) -> Result<MechanismTrace<S>> {
    let p = match prediction.point() {
        Point::Tree(p @ TreePoint::Vertex(v)) if *v < tree.vertex_count() => *p,
        other => {
            return Err(Error::InadmissiblePrediction {
                point: other.to_string(),
                space: SpaceKind::Tree,
                reason: "expected a vertex",
            })
        }
    };
    let agents = profile
        .points
        .iter()
        .map(|x| match x {
            Point::Tree(q) => tree.canonicalize(q),
            other => Err(Error::OutOfSpace {
                point: other.to_string(),
                space: SpaceKind::Tree,
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    let peripheral = match prediction.peripheral() {
        Some(flag) => flag,
        None => tree.is_peripheral(&p, S::tie_tolerance())?,
    };
    let warnings = if peripheral {
        Vec::new()
    } else {
        vec![Warning::NonPeripheralPrediction]
    };

    let n = agents.len();
    let bonus = cfg.bonus(n);
    let (a, _) = tree.farthest_in(&tree.distance_table(&p), None);
    let from_a = tree.distance_table(&a);
    let (b, _) = tree.farthest_in(&from_a, Some(&p));
    if a == b {
        return Ok(MechanismTrace {
            chosen: Point::Tree(a),
            counts: VoteCounts::Tree {
                n_a: 0,
                n_b: n,
                a,
                b,
                midpoint: None,
            },
            prediction_bonus: bonus,
            warnings,
        });
    }
    let midpoint = tree.path_point(&a, &b, S::half())?;
    let split = tree.split_with_tables(&agents, &a, &midpoint, &from_a)?;
    let chosen = if S::count(split.n_a) + bonus <= S::count(split.n_b) { a } else { b };
    Ok(MechanismTrace {
        chosen: Point::Tree(chosen),
        counts: VoteCounts::Tree {
            n_a: split.n_a,
            n_b: split.n_b,
            a,
            b,
            midpoint: Some(midpoint),
        },
        prediction_bonus: bonus,
        warnings,
    })
}
