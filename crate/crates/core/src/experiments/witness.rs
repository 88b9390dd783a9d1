use std::fmt;

use crate::error::{Error, Result};
use crate::mechanisms::Instance;
use crate::scalar::Scalar;
use crate::spaces::{Point, Space, SpaceKind, TreeGraph, TreePoint};
use crate::welfare::{LocationProfile, WelfareModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WitnessTarget {
    /// Correct prediction, ratio close to `(3 - λ)/(1 + λ)`.
    Consistency,
    /// Wrong prediction, ratio close to or equal to `(3 + λ)/(1 - λ)`.
    Robustness,
}

impl fmt::Display for WitnessTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessTarget::Consistency => "consistency",
            WitnessTarget::Robustness => "robustness",
        })
    }
}

/// A hard instance with its exact closed-form ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<S> {
    pub target: WitnessTarget,
    pub instance: Instance<S>,
    /// `OPT / F` computed from the construction, independently of the welfare code.
    pub expected_ratio: S,
    /// Whether `expected_ratio` equals the bound exactly rather than approaching it.
    pub tight: bool,
    pub description: String,
}

/// Offset that puts agents just past a midpoint.
fn epsilon<S: Scalar>() -> S {
    S::lit(2f64.powi(-20))
}

fn to_count<S: Scalar>(x: S) -> usize {
    x.to_usize().expect("count is a small non-negative integer")
}

fn floor_count<S: Scalar>(x: S) -> usize {
    to_count(x.floor())
}

fn ceil_count<S: Scalar>(x: S) -> usize {
    to_count(-((-x).floor()))
}

fn infeasible(what: &str, n: usize, lambda: impl fmt::Display) -> Error {
    Error::Infeasible(format!("{what} family has no integral instance for n = {n}, lambda = {lambda}"))
}

/// Builds the `target` family for `kind` at trust level `lambda` with `n` agents.
///
/// Segment: the robustness family (agents at 1/2 and at 1, prediction 1)
/// attains the bound whenever `n(1 + λ)/2` is an integer; the consistency
/// family (agents at 0 and just past 1/2, prediction 1) approaches it as `n`
/// grows. Circle and tree have robustness families only, the square none.
pub fn witness<S: Scalar>(kind: SpaceKind, target: WitnessTarget, lambda: S, n: usize) -> Result<Witness<S>> {
    if !(lambda >= S::zero() && lambda <= S::one()) {
        return Err(Error::domain("lambda", lambda, "[0, 1]"));
    }
    if n < 2 {
        return Err(infeasible("every", n, lambda));
    }
    match (kind, target) {
        (SpaceKind::Segment, WitnessTarget::Robustness) => segment_robustness(lambda, n),
        (SpaceKind::Segment, WitnessTarget::Consistency) => segment_consistency(lambda, n),
        (SpaceKind::Circle, WitnessTarget::Robustness) => circle_robustness(lambda, n),
        (SpaceKind::Tree, WitnessTarget::Robustness) => tree_robustness(lambda, n),
        _ => Err(Error::Unsupported(format!("no {target} witness family is known for the {kind}"))),
    }
}

/// Both families for `kind`, each with its own construction outcome.
pub fn witness_suite<S: Scalar>(kind: SpaceKind, lambda: S, n: usize) -> Vec<(WitnessTarget, Result<Witness<S>>)> {
    [WitnessTarget::Robustness, WitnessTarget::Consistency]
        .into_iter()
        .map(|target| (target, witness(kind, target, lambda, n)))
        .collect()
}

/// Largest count the prediction side may hold while the prediction still wins.
fn favoured_count<S: Scalar>(lambda: S, n: usize) -> usize {
    floor_count(S::count(n) * (S::one() + lambda) * S::half())
}

fn segment_robustness<S: Scalar>(lambda: S, n: usize) -> Result<Witness<S>> {
    let far = favoured_count(lambda, n);
    let near = n - far;
    if near == 0 {
        return Err(infeasible("segment robustness", n, lambda));
    }
    let mut points = vec![Point::Segment(S::half()); near];
    points.extend(vec![Point::Segment(S::one()); far]);
    let instance = Instance::new(
        Space::Segment,
        LocationProfile::new(points),
        Point::Segment(S::one()),
        WelfareModel::Obnoxious,
    )?;
    let two = S::count(2);
    let expected = S::one() + two * S::count(far) / S::count(near);
    Ok(Witness {
        target: WitnessTarget::Robustness,
        instance,
        expected_ratio: expected,
        tight: S::count(far) == S::count(n) * (S::one() + lambda) * S::half(),
        description: format!("{near} agents at 1/2, {far} at 1, prediction 1"),
    })
}

fn segment_consistency<S: Scalar>(lambda: S, n: usize) -> Result<Witness<S>> {
    let below = ceil_count(S::count(n) * (S::one() - lambda) * S::half());
    if below < 2 {
        return Err(infeasible("segment consistency", n, lambda));
    }
    let a = below - 1;
    let b = n - a;
    let eps = epsilon::<S>();
    if !(S::count(a) > S::count(2) * eps * S::count(b)) {
        return Err(infeasible("segment consistency", n, lambda));
    }
    let mut points = vec![Point::Segment(S::zero()); a];
    points.extend(vec![Point::Segment(S::half() + eps); b]);
    let instance = Instance::new(
        Space::Segment,
        LocationProfile::new(points),
        Point::Segment(S::one()),
        WelfareModel::Obnoxious,
    )?;
    let (a_s, b_s) = (S::count(a), S::count(b));
    let expected = (a_s + b_s * (S::half() - eps)) / (b_s * (S::half() + eps));
    Ok(Witness {
        target: WitnessTarget::Consistency,
        instance,
        expected_ratio: expected,
        tight: false,
        description: format!("{a} agents at 0, {b} at 1/2 + 2^-20, prediction 1"),
    })
}

fn circle_robustness<S: Scalar>(lambda: S, n: usize) -> Result<Witness<S>> {
    let n_p = favoured_count(lambda, n);
    let n_q = n - n_p;
    if n_q == 0 {
        return Err(infeasible("circle robustness", n, lambda));
    }
    let quarter = S::half() * S::half();
    let mut points = vec![Point::Circle(S::zero()); n_q];
    points.extend(vec![Point::Circle(quarter); n_p]);
    let instance = Instance::new(
        Space::Circle,
        LocationProfile::new(points),
        Point::Circle(quarter),
        WelfareModel::Obnoxious,
    )?;
    // OPT is at 3/4 (antipode of the prediction) or 1/2 (antipode of the other cluster).
    let (p, q) = (S::count(n_p), S::count(n_q));
    let two = S::count(2);
    let expected = (S::one() + two * p / q).max_of(two + p / q);
    Ok(Witness {
        target: WitnessTarget::Robustness,
        instance,
        expected_ratio: expected,
        tight: S::count(n_p) == S::count(n) * (S::one() + lambda) * S::half(),
        description: format!("{n_q} agents at 0, {n_p} at the prediction 1/4"),
    })
}

fn tree_robustness<S: Scalar>(lambda: S, n: usize) -> Result<Witness<S>> {
    let limit = ceil_count(S::count(n) * (S::one() + lambda) * S::half());
    if limit < 2 || limit > n {
        return Err(infeasible("tree robustness", n, lambda));
    }
    let at_prediction = limit - 1;
    let past_mid = n - at_prediction;
    let eps = epsilon::<S>();
    if !(S::count(at_prediction) > S::count(2) * eps * S::count(past_mid)) {
        return Err(infeasible("tree robustness", n, lambda));
    }
    let tree = TreeGraph::path(&[S::one()])?;
    let mut points = vec![Point::Tree(TreePoint::Vertex(0)); at_prediction];
    points.extend(vec![
        Point::Tree(TreePoint::Edge {
            edge: 0,
            offset: S::half() + eps,
        });
        past_mid
    ]);
    let instance = Instance::new(
        Space::Tree(tree),
        LocationProfile::new(points),
        Point::Tree(TreePoint::Vertex(0)),
        WelfareModel::Obnoxious,
    )?;
    let (m, k) = (S::count(past_mid), S::count(at_prediction));
    let expected = (m * (S::half() - eps) + k) / (m * (S::half() + eps));
    Ok(Witness {
        target: WitnessTarget::Robustness,
        instance,
        expected_ratio: expected,
        tight: false,
        description: format!("{at_prediction} agents at the prediction v0, {past_mid} just past the midpoint of v0-v1"),
    })
}
