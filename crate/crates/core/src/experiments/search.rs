use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use super::generate::{coordinate, peripheral_vertices, random_instance, random_point, random_tree_point};
use super::{consistency_bound, evaluate_instance, item_rng, robustness_bound, ApproximationRatio, GeneratorConfig, Setting};
use crate::error::{Error, Result};
use crate::mechanisms::{DualRule, Instance, MechanismConfig};
use crate::spaces::{Point, Space, TreePoint};
use crate::welfare::{candidates, LocationProfile};

/// Which instances the search may report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EtaMode {
    /// Any prediction.
    Free,
    /// Only instances whose prediction is optimal (evaluated `η = 0`).
    Zero,
}

impl EtaMode {
    pub fn name(self) -> &'static str {
        match self {
            EtaMode::Free => "free",
            EtaMode::Zero => "zero",
        }
    }
}

impl fmt::Display for EtaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EtaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(EtaMode::Free),
            "zero" => Ok(EtaMode::Zero),
            _ => Err(Error::Unsupported(format!("unknown eta mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub worst: Instance<f64>,
    pub worst_ratio: ApproximationRatio<f64>,
    pub evaluations: usize,
}

/// Evaluations without improvement before the search restarts from a fresh instance.
const PATIENCE: usize = 250;

/// Fresh instances tried per restart before giving up on finding one with `η = 0`.
const RESTART_ATTEMPTS: usize = 10_000;

fn ratio_of(instance: &Instance<f64>, cfg: &MechanismConfig<f64>, mode: EtaMode) -> Result<Option<f64>> {
    let report = evaluate_instance(instance, cfg)?;
    let admissible = match mode {
        EtaMode::Free => true,
        EtaMode::Zero => report.eta <= 1e-12 && instance.prediction.peripheral() != Some(false),
    };
    Ok(admissible.then(|| report.ratio.as_f64()))
}

/// Same profile with the prediction replaced, when admissible.
fn with_prediction(instance: &Instance<f64>, prediction: Point<f64>) -> Option<Instance<f64>> {
    Instance::new(instance.space.clone(), instance.profile.clone(), prediction, instance.model).ok()
}

/// Admissible predictions that could be optimal: the finite output set, or the circle's candidates.
fn prediction_options(instance: &Instance<f64>) -> Vec<Point<f64>> {
    match &instance.space {
        Space::Segment => vec![Point::Segment(0.0), Point::Segment(1.0)],
        Space::Square => [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]
            .into_iter()
            .map(Point::Square)
            .collect(),
        Space::Circle => candidates(&instance.space, &instance.profile, instance.model).unwrap_or_default(),
        Space::Tree(tree) => peripheral_vertices(tree)
            .into_iter()
            .map(|v| Point::Tree(TreePoint::Vertex(v)))
            .collect(),
    }
}

/// Re-targets the prediction onto an optimal admissible point, if one exists.
fn make_consistent(instance: Instance<f64>, cfg: &MechanismConfig<f64>) -> Result<Option<(Instance<f64>, f64)>> {
    if let Some(r) = ratio_of(&instance, cfg, EtaMode::Zero)? {
        return Ok(Some((instance, r)));
    }
    for p in prediction_options(&instance) {
        if let Some(candidate) = with_prediction(&instance, p) {
            if let Some(r) = ratio_of(&candidate, cfg, EtaMode::Zero)? {
                return Ok(Some((candidate, r)));
            }
        }
    }
    Ok(None)
}

fn restart<R: Rng>(
    rng: &mut R,
    setting: Setting,
    cfg: &MechanismConfig<f64>,
    mode: EtaMode,
    gen: &GeneratorConfig,
) -> Result<(Instance<f64>, f64)> {
    for _ in 0..RESTART_ATTEMPTS {
        let instance = random_instance(setting, rng, gen);
        match mode {
            EtaMode::Free => {
                let r = ratio_of(&instance, cfg, mode)?.expect("free mode admits every instance");
                return Ok((instance, r));
            }
            EtaMode::Zero => {
                if let Some(found) = make_consistent(instance, cfg)? {
                    return Ok(found);
                }
            }
        }
    }
    Err(Error::Infeasible(format!("no {setting} instance with an optimal admissible prediction was drawn")))
}

fn wrap_or_clamp(space: &Space<f64>, x: f64) -> f64 {
    match space {
        Space::Circle => x.rem_euclid(1.0),
        _ => x.clamp(0.0, 1.0),
    }
}

fn jitter_point<R: Rng>(rng: &mut R, space: &Space<f64>, p: &Point<f64>, scale: f64) -> Point<f64> {
    let delta = rng.gen_range(-scale..=scale);
    let shift = |x: f64| wrap_or_clamp(space, x + delta);
    match (space, *p) {
        (_, Point::Segment(x)) => Point::Segment(shift(x)),
        (_, Point::Circle(x)) => Point::Circle(shift(x)),
        (_, Point::Square([x, y])) => {
            if rng.gen_bool(0.5) {
                Point::Square([shift(x), y])
            } else {
                Point::Square([x, shift(y)])
            }
        }
        (Space::Tree(tree), Point::Tree(TreePoint::Edge { edge, offset })) => {
            let length = tree.edges()[edge].length;
            let offset = (offset + length * delta).clamp(0.0, length);
            let point = match offset {
                o if o <= 0.0 => TreePoint::Vertex(tree.edges()[edge].u),
                o if o >= length => TreePoint::Vertex(tree.edges()[edge].v),
                _ => TreePoint::Edge { edge, offset },
            };
            Point::Tree(point)
        }
        (Space::Tree(tree), Point::Tree(TreePoint::Vertex(v))) => {
            let incident: Vec<usize> = (0..tree.edges().len())
                .filter(|&e| tree.edges()[e].u == v || tree.edges()[e].v == v)
                .collect();
            let Some(&edge) = incident.choose(rng) else { return *p };
            let e = tree.edges()[edge];
            let step = (e.length * rng.gen_range(0.0..=scale)).min(e.length);
            let offset = if e.u == v { step } else { e.length - step };
            if offset > 0.0 && offset < e.length {
                Point::Tree(TreePoint::Edge { edge, offset })
            } else {
                *p
            }
        }
        _ => *p,
    }
}

fn snap_point<R: Rng>(rng: &mut R, space: &Space<f64>, p: &Point<f64>) -> Point<f64> {
    const SNAPS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
    let (a, b) = (*SNAPS.choose(rng).expect("non-empty"), *SNAPS.choose(rng).expect("non-empty"));
    match (space, *p) {
        (_, Point::Segment(_)) => Point::Segment(a),
        (_, Point::Circle(_)) => Point::Circle(a % 1.0),
        (_, Point::Square([x, y])) => match rng.gen_range(0..3u8) {
            0 => Point::Square([a, y]),
            1 => Point::Square([x, a]),
            _ => Point::Square([a, b]),
        },
        (Space::Tree(tree), Point::Tree(TreePoint::Edge { edge, .. })) => {
            let e = tree.edges()[edge];
            let fraction = a;
            let point = match fraction {
                f if f <= 0.0 => TreePoint::Vertex(e.u),
                f if f >= 1.0 => TreePoint::Vertex(e.v),
                f => TreePoint::Edge {
                    edge,
                    offset: e.length * f,
                },
            };
            Point::Tree(point)
        }
        (Space::Tree(tree), _) => Point::Tree(random_tree_point(rng, tree)),
        _ => *p,
    }
}

/// A random local move; `None` when the move does not apply to this instance.
fn perturb<R: Rng>(rng: &mut R, instance: &Instance<f64>, max_agents: usize) -> Option<Instance<f64>> {
    let space = &instance.space;
    let mut points = instance.profile.points.clone();
    let mut types = instance.profile.types.clone();
    let mut prediction = *instance.prediction.point();
    let n = points.len();
    let i = rng.gen_range(0..n.max(1));
    match rng.gen_range(0..10u8) {
        0..=2 => {
            let scale = *[0.3, 0.05, 0.005].choose(rng).expect("non-empty");
            points[i] = jitter_point(rng, space, &points[i], scale);
        }
        3 => points[i] = snap_point(rng, space, &points[i]),
        4 => points[i] = random_point(rng, space),
        5 if n > 1 => points[i] = points[rng.gen_range(0..n)],
        6 if n < max_agents => {
            points.push(points[i]);
            if let Some(t) = types.as_mut() {
                let copied = t[i];
                t.push(copied);
            }
        }
        7 if n > 1 => {
            points.remove(i);
            if let Some(t) = types.as_mut() {
                t.remove(i);
            }
        }
        8 => {
            let options = prediction_options(instance);
            prediction = *options.choose(rng)?;
            if let Space::Circle = space {
                if rng.gen_bool(0.5) {
                    prediction = Point::Circle(coordinate(rng) % 1.0);
                }
            }
        }
        9 => {
            let t = types.as_mut()?;
            t[i] = t[i].flipped();
        }
        _ => return None,
    }
    let profile = match types {
        Some(t) => LocationProfile::with_types(points, t).ok()?,
        None => LocationProfile::new(points),
    };
    Instance::new(space.clone(), profile, prediction, instance.model).ok()
}

/// Random restarts plus local perturbation, maximising the evaluated ratio.
///
/// `budget` counts mechanism evaluations. In [`EtaMode::Zero`] a move is kept
/// only if the perturbed instance, possibly after re-targeting its prediction
/// onto an optimal admissible point, evaluates to `η = 0`; tree predictions
/// must also stay peripheral. Deterministic given `seed`.
pub fn adversarial_search(
    setting: Setting,
    cfg: &MechanismConfig<f64>,
    eta_mode: EtaMode,
    budget: usize,
    seed: u64,
    gen: &GeneratorConfig,
) -> Result<SearchOutcome> {
    if budget == 0 {
        return Err(Error::domain("budget", budget, "budget >= 1"));
    }
    let mut rng = item_rng(seed, 0);
    let (mut current, mut current_ratio) = restart(&mut rng, setting, cfg, eta_mode, gen)?;
    let mut worst = (current.clone(), current_ratio);
    let mut evaluations = 1;
    let mut stale = 0;
    while evaluations < budget {
        if stale >= PATIENCE {
            (current, current_ratio) = restart(&mut rng, setting, cfg, eta_mode, gen)?;
            stale = 0;
        } else if let Some(candidate) = perturb(&mut rng, &current, gen.max_agents) {
            let evaluated = match eta_mode {
                EtaMode::Free => ratio_of(&candidate, cfg, eta_mode)?.map(|r| (candidate, r)),
                EtaMode::Zero => make_consistent(candidate, cfg)?,
            };
            match evaluated {
                Some((candidate, r)) if r >= current_ratio => {
                    stale = if r > current_ratio { 0 } else { stale + 1 };
                    current = candidate;
                    current_ratio = r;
                }
                _ => stale += 1,
            }
        } else {
            stale += 1;
            continue;
        }
        evaluations += 1;
        if current_ratio > worst.1 {
            worst = (current.clone(), current_ratio);
        }
    }
    let worst_ratio = if worst.1.is_finite() {
        ApproximationRatio::Finite(worst.1)
    } else {
        ApproximationRatio::Infinite
    };
    Ok(SearchOutcome {
        worst: worst.0,
        worst_ratio,
        evaluations,
    })
}

/// Empirical consistency and robustness at one trust level, beside the guarantees.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffRow {
    pub lambda: f64,
    pub consistency: SearchOutcome,
    pub robustness: SearchOutcome,
    pub bound_consistency: f64,
    pub bound_robustness: ApproximationRatio<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffCurve {
    pub setting: Setting,
    pub rows: Vec<TradeoffRow>,
}

/// Runs both searches at every trust level in `lambdas`.
///
/// Each (λ, mode) pair is an independent work item seeded from `item_rng(seed, index)`,
/// so the result does not depend on scheduling.
pub fn sweep(
    setting: Setting,
    lambdas: &[f64],
    budget: usize,
    seed: u64,
    dual_rule: DualRule,
    gen: &GeneratorConfig,
) -> Result<TradeoffCurve> {
    let configs = lambdas
        .iter()
        .map(|&l| MechanismConfig::new(l).map(|c| c.with_dual_rule(dual_rule)))
        .collect::<Result<Vec<_>>>()?;
    let items: Vec<(usize, EtaMode)> = (0..lambdas.len())
        .flat_map(|i| [(i, EtaMode::Zero), (i, EtaMode::Free)])
        .collect();
    let outcomes = items
        .par_iter()
        .enumerate()
        .map(|(index, &(i, mode))| {
            let item_seed = item_rng(seed, index as u64).gen::<u64>();
            adversarial_search(setting, &configs[i], mode, budget, item_seed, gen)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut outcomes = outcomes.into_iter();
    let rows = lambdas
        .iter()
        .map(|&lambda| {
            let consistency = outcomes.next().expect("two outcomes per lambda");
            let robustness = outcomes.next().expect("two outcomes per lambda");
            TradeoffRow {
                lambda,
                consistency,
                robustness,
                bound_consistency: consistency_bound(lambda),
                bound_robustness: robustness_bound(lambda),
            }
        })
        .collect();
    Ok(TradeoffCurve { setting, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn search(setting: Setting, lambda: f64, mode: EtaMode, budget: usize, seed: u64) -> SearchOutcome {
        let cfg = MechanismConfig::new(lambda).unwrap();
        adversarial_search(setting, &cfg, mode, budget, seed, &GeneratorConfig::default()).unwrap()
    }

    #[test]
    fn segment_search_reaches_the_witness_family() {
        let out = search(Setting::Segment, 0.0, EtaMode::Free, 10_000, 1);
        let r = out.worst_ratio.as_f64();
        assert!((2.9..=3.0 + 1e-9).contains(&r), "{r}");
        assert_eq!(out.evaluations, 10_000);
    }

    #[test]
    fn circle_search_respects_the_bound() {
        let out = search(Setting::Circle, 0.5, EtaMode::Free, 10_000, 2);
        assert!(out.worst_ratio.as_f64() <= 7.0 + 1e-9);
    }

    #[test]
    fn zero_mode_reports_consistent_instances() {
        for setting in Setting::ALL {
            let out = search(setting, 0.25, EtaMode::Zero, 500, 3);
            let report = evaluate_instance(&out.worst, &MechanismConfig::new(0.25).unwrap()).unwrap();
            assert!(report.eta <= 1e-12, "{setting}");
            assert!(out.worst_ratio.as_f64() >= 1.0);
        }
    }

    #[test]
    fn single_evaluation_budget() {
        let out = search(Setting::Tree, 0.0, EtaMode::Free, 1, 4);
        assert_eq!(out.evaluations, 1);
        assert!(out.worst_ratio.as_f64() >= 1.0);
    }

    #[test]
    fn search_is_deterministic() {
        assert_eq!(
            search(Setting::Square, 0.4, EtaMode::Free, 800, 5),
            search(Setting::Square, 0.4, EtaMode::Free, 800, 5)
        );
    }

    #[test]
    fn sweep_is_reproducible_and_bounded() {
        let gen = GeneratorConfig::default();
        let lambdas = [0.0, 0.5];
        let a = sweep(Setting::Segment, &lambdas, 300, 9, DualRule::AsWritten, &gen).unwrap();
        let b = sweep(Setting::Segment, &lambdas, 300, 9, DualRule::AsWritten, &gen).unwrap();
        assert_eq!(a, b);
        for row in &a.rows {
            assert!(row.consistency.worst_ratio.as_f64() <= row.bound_consistency + 1e-9);
            assert!(row.robustness.worst_ratio.as_f64() <= row.bound_robustness.as_f64() + 1e-9);
        }
    }

    #[test]
    fn zero_budget_is_rejected() {
        let cfg = MechanismConfig::new(0.0).unwrap();
        let gen = GeneratorConfig::default();
        assert!(adversarial_search(Setting::Segment, &cfg, EtaMode::Free, 0, 0, &gen).is_err());
    }
}
