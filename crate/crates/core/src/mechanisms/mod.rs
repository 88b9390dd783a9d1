//! Prediction-augmented mechanisms and the threshold family on the segment.
//!
//! Every mechanism returns a [`MechanismTrace`]: the chosen location plus the
//! vote counts that determined it.

mod circle;
mod dual;
mod hypercube;
mod threshold;
mod tree;

use std::fmt;

pub use circle::robust_majority_circle;
pub use dual::transformed_robust_majority;
pub use hypercube::robust_coordinatewise_voting;
pub use threshold::threshold_mechanism;
pub use tree::robust_majority_tree;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::{Point, Space, TreePoint};
use crate::welfare::{self, LocationProfile, WelfareModel};

/// How the dual-preference mechanism places its cut on transformed locations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DualRule {
    /// Cut at `(1 - λ)/2`; the prediction wins only with a strict majority below the cut.
    #[default]
    AsWritten,
    /// Cut at `(1 + λ)/2`; the prediction wins ties.
    PredictionFavoring,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanismConfig<S> {
    lambda: S,
    pub dual_rule: DualRule,
}

impl<S: Scalar> MechanismConfig<S> {
    pub fn new(lambda: S) -> Result<Self> {
        if !(lambda >= S::zero() && lambda <= S::one()) {
            return Err(Error::domain("lambda", lambda, "[0, 1]"));
        }
        Ok(MechanismConfig {
            lambda,
            dual_rule: DualRule::default(),
        })
    }

    pub fn with_dual_rule(mut self, rule: DualRule) -> Self {
        self.dual_rule = rule;
        self
    }

    pub fn lambda(&self) -> S {
        self.lambda
    }

    /// The `λ·n` extra votes granted to the prediction.
    pub fn bonus(&self, n: usize) -> S {
        self.lambda * S::count(n)
    }
}

/// A predicted optimal location, checked against the space's admissible set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction<S> {
    point: Point<S>,
    peripheral: Option<bool>,
}

fn is_bit<S: Scalar>(x: S) -> bool {
    x == S::zero() || x == S::one()
}

impl<S: Scalar> Prediction<S> {
    /// Segment and square predictions must be corners; tree predictions must be vertices.
    pub fn new(space: &Space<S>, point: &Point<S>) -> Result<Self> {
        let point = space.canonicalize(point)?;
        let reject = |reason| Error::InadmissiblePrediction {
            point: point.to_string(),
            space: space.kind(),
            reason,
        };
        let peripheral = match (space, &point) {
            (Space::Segment, Point::Segment(x)) if !is_bit(*x) => return Err(reject("expected 0 or 1")),
            (Space::Square, Point::Square([x, y])) if !(is_bit(*x) && is_bit(*y)) => {
                return Err(reject("expected a corner"))
            }
            (Space::Tree(tree), Point::Tree(p)) => {
                if p.vertex().is_none() {
                    return Err(reject("expected a vertex"));
                }
                Some(tree.is_peripheral(p, S::tie_tolerance())?)
            }
            _ => None,
        };
        Ok(Prediction { point, peripheral })
    }

    pub fn point(&self) -> &Point<S> {
        &self.point
    }

    /// Whether a tree prediction is an endpoint of a diameter; `None` off trees.
    pub fn peripheral(&self) -> Option<bool> {
        self.peripheral
    }
}

/// Votes behind one output coordinate of the hypercube mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoordinateTally {
    /// Agents at coordinate `<= 1/2`.
    pub for_one: usize,
    /// Agents at coordinate `> 1/2`.
    pub for_zero: usize,
    pub predicted: u8,
    pub output: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub enum VoteCounts<S> {
    Coordinatewise(Vec<CoordinateTally>),
    Circle {
        n_p: usize,
        n_q: usize,
        antipode: S,
    },
    Tree {
        n_a: usize,
        n_b: usize,
        a: TreePoint<S>,
        b: TreePoint<S>,
        /// Absent when the tree has a single vertex and no split exists.
        midpoint: Option<TreePoint<S>>,
    },
    Dual {
        /// Agents at or below the cut, after normalising the prediction to 1.
        n_1: usize,
        n_2: usize,
        /// Transformed locations in normalised coordinates.
        transformed: Vec<S>,
        threshold: S,
    },
}

impl<S> VoteCounts<S> {
    /// Per-tally agent totals; each equals `n`.
    pub fn totals(&self) -> Vec<usize> {
        match self {
            VoteCounts::Coordinatewise(t) => t.iter().map(|c| c.for_one + c.for_zero).collect(),
            VoteCounts::Circle { n_p, n_q, .. } => vec![n_p + n_q],
            VoteCounts::Tree { n_a, n_b, .. } => vec![n_a + n_b],
            VoteCounts::Dual { n_1, n_2, .. } => vec![n_1 + n_2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Warning {
    /// The tree prediction is not an endpoint of a diameter, so the robustness guarantee does not apply.
    NonPeripheralPrediction,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::NonPeripheralPrediction => f.write_str("prediction is not a peripheral vertex"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MechanismTrace<S> {
    pub chosen: Point<S>,
    pub counts: VoteCounts<S>,
    pub prediction_bonus: S,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MechanismKind {
    CoordinatewiseVoting,
    CircleMajority,
    TreeMajority,
    TransformedMajority,
}

impl MechanismKind {
    pub fn name(self) -> &'static str {
        match self {
            MechanismKind::CoordinatewiseVoting => "coordinatewise-voting",
            MechanismKind::CircleMajority => "circle-majority",
            MechanismKind::TreeMajority => "tree-majority",
            MechanismKind::TransformedMajority => "transformed-majority",
        }
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated space, profile, prediction and welfare model.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<S> {
    pub space: Space<S>,
    pub profile: LocationProfile<S>,
    pub prediction: Prediction<S>,
    pub model: WelfareModel,
}

impl<S: Scalar> Instance<S> {
    pub fn new(space: Space<S>, profile: LocationProfile<S>, prediction: Point<S>, model: WelfareModel) -> Result<Self> {
        welfare::validate(&space, &profile, model)?;
        let prediction = Prediction::new(&space, &prediction)?;
        Ok(Instance {
            space,
            profile,
            prediction,
            model,
        })
    }

    pub fn mechanism(&self) -> MechanismKind {
        match (&self.space, self.model) {
            (_, WelfareModel::Dual) => MechanismKind::TransformedMajority,
            (Space::Segment | Space::Square, _) => MechanismKind::CoordinatewiseVoting,
            (Space::Circle, _) => MechanismKind::CircleMajority,
            (Space::Tree(_), _) => MechanismKind::TreeMajority,
        }
    }

    /// Runs the mechanism for this space and model.
    pub fn run(&self, cfg: &MechanismConfig<S>) -> Result<MechanismTrace<S>> {
        self.run_on(&self.profile, cfg)
    }

    /// Runs the mechanism on a different report profile, keeping space and prediction.
    pub fn run_on(&self, profile: &LocationProfile<S>, cfg: &MechanismConfig<S>) -> Result<MechanismTrace<S>> {
        match self.mechanism() {
            MechanismKind::TransformedMajority => transformed_robust_majority(profile, &self.prediction, cfg),
            MechanismKind::CoordinatewiseVoting => robust_coordinatewise_voting(profile, &self.prediction, cfg),
            MechanismKind::CircleMajority => robust_majority_circle(profile, &self.prediction, cfg),
            MechanismKind::TreeMajority => {
                let tree = self.space.tree().expect("tree mechanism runs on trees");
                robust_majority_tree(tree, profile, &self.prediction, cfg)
            }
        }
    }
}
