//! Deviation search for strategyproofness, group strategyproofness and its γ-relaxation.
//!
//! The checks are falsifiers: they search a finite set of misreports and
//! report the first profitable deviation found. Absence of a violation is
//! evidence, not proof.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mechanisms::{Instance, MechanismConfig};
use crate::scalar::Scalar;
use crate::spaces::{Point, Space, TreePoint};
use crate::welfare::{LocationProfile, Preference, WelfareModel};

/// Utility of an agent at `location` when the facility is at `chosen`.
pub fn agent_utility<S: Scalar>(
    space: &Space<S>,
    location: &Point<S>,
    preference: Option<Preference>,
    chosen: &Point<S>,
    model: WelfareModel,
) -> Result<S> {
    let d = space.distance(location, chosen)?;
    Ok(match (model, preference) {
        (WelfareModel::Dual, Some(Preference::Attracted)) => S::one() - d,
        _ => d,
    })
}

/// Reports an agent may switch to.
#[derive(Debug, Clone, PartialEq)]
pub enum MisreportSet<S> {
    /// `resolution` evenly spaced values per axis including both ends; on
    /// trees, every vertex plus `resolution - 2` interior points per edge.
    Grid { resolution: usize, type_flips: bool },
    Explicit { locations: Vec<Point<S>>, type_flips: bool },
}

impl<S: Scalar> MisreportSet<S> {
    pub fn grid(resolution: usize) -> Self {
        MisreportSet::Grid {
            resolution,
            type_flips: false,
        }
    }

    fn type_flips(&self) -> bool {
        match self {
            MisreportSet::Grid { type_flips, .. } | MisreportSet::Explicit { type_flips, .. } => *type_flips,
        }
    }

    /// The candidate locations, in a fixed order.
    pub fn locations(&self, space: &Space<S>) -> Result<Vec<Point<S>>> {
        let resolution = match self {
            MisreportSet::Explicit { locations, .. } => {
                return locations.iter().map(|p| space.canonicalize(p)).collect();
            }
            MisreportSet::Grid { resolution, .. } => *resolution,
        };
        if resolution < 2 {
            return Err(Error::domain("grid resolution", resolution, "at least 2"));
        }
        let last = S::count(resolution - 1);
        let axis: Vec<S> = (0..resolution).map(|i| S::count(i) / last).collect();
        Ok(match space {
            Space::Segment => axis.iter().map(|&x| Point::Segment(x)).collect(),
            Space::Square => axis
                .iter()
                .flat_map(|&x| axis.iter().map(move |&y| Point::Square([x, y])))
                .collect(),
            Space::Circle => axis[..resolution - 1].iter().map(|&x| Point::Circle(x)).collect(),
            Space::Tree(tree) => {
                let mut out: Vec<Point<S>> = (0..tree.vertex_count())
                    .map(|v| Point::Tree(TreePoint::Vertex(v)))
                    .collect();
                for (edge, e) in tree.edges().iter().enumerate() {
                    for &t in &axis[1..resolution - 1] {
                        out.push(Point::Tree(TreePoint::Edge {
                            edge,
                            offset: e.length * t,
                        }));
                    }
                }
                out
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Misreport<S> {
    pub agent: usize,
    pub location: Point<S>,
    pub preference: Option<Preference>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport<S> {
    pub violated: bool,
    /// The violating coalition or, without a violation, the deviation with the largest gain factor.
    pub coalition: Vec<usize>,
    pub misreports: Vec<Misreport<S>>,
    pub utilities_before: Vec<S>,
    pub utilities_after: Vec<S>,
    /// Smallest `after / before` over the coalition members.
    pub gain_factor: f64,
    pub deviations_checked: usize,
}

/// Limits for coalition enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoalitionSearch<S> {
    pub max_size: usize,
    /// Violation requires `u_after > γ · u_before` for every member; `γ = 1` is plain group strategyproofness.
    pub gamma: S,
    /// Joint misreports tried per coalition; larger products are subsampled.
    pub budget: usize,
    pub seed: u64,
}

#[derive(Clone)]
struct Deviation<S> {
    coalition: Vec<usize>,
    misreports: Vec<Misreport<S>>,
    before: Vec<S>,
    after: Vec<S>,
    factor: f64,
}

#[derive(Clone)]
struct ItemOutcome<S> {
    violation: Option<Deviation<S>>,
    closest: Option<Deviation<S>>,
    checked: usize,
}

fn gain_factor<S: Scalar>(before: S, after: S) -> f64 {
    if before > S::zero() {
        after.as_f64() / before.as_f64()
    } else if after > S::zero() {
        f64::INFINITY
    } else {
        1.0
    }
}

struct Checker<'a, S> {
    instance: &'a Instance<S>,
    cfg: &'a MechanismConfig<S>,
    reports: Vec<Vec<(Point<S>, Option<Preference>)>>,
    before: Vec<S>,
}

impl<'a, S: Scalar> Checker<'a, S> {
    fn new(instance: &'a Instance<S>, cfg: &'a MechanismConfig<S>, set: &MisreportSet<S>) -> Result<Self> {
        let locations = set.locations(&instance.space)?;
        let profile = &instance.profile;
        let flips = set.type_flips() && instance.model == WelfareModel::Dual;
        let reports = (0..profile.len())
            .map(|i| {
                let own = profile.type_of(i);
                let types: Vec<Option<Preference>> = match own {
                    Some(t) if flips => vec![Some(t), Some(t.flipped())],
                    _ => vec![own],
                };
                locations
                    .iter()
                    .flat_map(|l| types.iter().map(move |t| (*l, *t)))
                    .collect()
            })
            .collect();
        let chosen = instance.run(cfg)?.chosen;
        let before = (0..profile.len())
            .map(|i| self_utility(instance, i, &chosen))
            .collect::<Result<Vec<_>>>()?;
        Ok(Checker {
            instance,
            cfg,
            reports,
            before,
        })
    }

    /// Evaluates one joint deviation; `choice[j]` indexes the reports of `coalition[j]`.
    fn evaluate(&self, scratch: &mut LocationProfile<S>, coalition: &[usize], choice: &[usize]) -> Result<Deviation<S>> {
        for (&i, &c) in coalition.iter().zip(choice) {
            let (location, preference) = self.reports[i][c];
            scratch.points[i] = location;
            if let (Some(types), Some(p)) = (scratch.types.as_mut(), preference) {
                types[i] = p;
            }
        }
        let chosen = self.instance.run_on(scratch, self.cfg)?.chosen;
        let original = &self.instance.profile;
        for &i in coalition {
            scratch.points[i] = original.points[i];
            if let (Some(types), Some(own)) = (scratch.types.as_mut(), original.type_of(i)) {
                types[i] = own;
            }
        }
        let mut after = Vec::with_capacity(coalition.len());
        for &i in coalition {
            after.push(self_utility(self.instance, i, &chosen)?);
        }
        let before: Vec<S> = coalition.iter().map(|&i| self.before[i]).collect();
        let factor = before
            .iter()
            .zip(&after)
            .map(|(&b, &a)| gain_factor(b, a))
            .fold(f64::INFINITY, f64::min);
        let misreports = coalition
            .iter()
            .zip(choice)
            .map(|(&agent, &c)| {
                let (location, preference) = self.reports[agent][c];
                Misreport {
                    agent,
                    location,
                    preference,
                }
            })
            .collect();
        Ok(Deviation {
            coalition: coalition.to_vec(),
            misreports,
            before,
            after,
            factor,
        })
    }

    /// Tries the given joint choices for one coalition, stopping at the first violation.
    fn search(
        &self,
        coalition: &[usize],
        choices: impl Iterator<Item = Vec<usize>>,
        violates: impl Fn(&Deviation<S>) -> bool,
    ) -> Result<ItemOutcome<S>> {
        let mut scratch = self.instance.profile.clone();
        let mut outcome = ItemOutcome {
            violation: None,
            closest: None,
            checked: 0,
        };
        for choice in choices {
            let deviation = self.evaluate(&mut scratch, coalition, &choice)?;
            outcome.checked += 1;
            if violates(&deviation) {
                outcome.violation = Some(deviation);
                break;
            }
            if outcome.closest.as_ref().is_none_or(|c| deviation.factor > c.factor) {
                outcome.closest = Some(deviation);
            }
        }
        Ok(outcome)
    }
}

fn self_utility<S: Scalar>(instance: &Instance<S>, agent: usize, chosen: &Point<S>) -> Result<S> {
    let profile = &instance.profile;
    agent_utility(
        &instance.space,
        &profile.points[agent],
        profile.type_of(agent),
        chosen,
        instance.model,
    )
}

fn merge<S: Scalar>(outcomes: Vec<Result<ItemOutcome<S>>>) -> Result<DeviationReport<S>> {
    let mut checked = 0;
    let mut closest: Option<Deviation<S>> = None;
    for outcome in outcomes {
        let outcome = outcome?;
        checked += outcome.checked;
        if let Some(v) = outcome.violation {
            return Ok(report(true, Some(v), checked));
        }
        if let Some(c) = outcome.closest {
            if closest.as_ref().is_none_or(|b| c.factor > b.factor) {
                closest = Some(c);
            }
        }
    }
    Ok(report(false, closest, checked))
}

fn report<S: Scalar>(violated: bool, deviation: Option<Deviation<S>>, checked: usize) -> DeviationReport<S> {
    match deviation {
        Some(d) => DeviationReport {
            violated,
            coalition: d.coalition,
            misreports: d.misreports,
            utilities_before: d.before,
            utilities_after: d.after,
            gain_factor: d.factor,
            deviations_checked: checked,
        },
        None => DeviationReport {
            violated,
            coalition: Vec::new(),
            misreports: Vec::new(),
            utilities_before: Vec::new(),
            utilities_after: Vec::new(),
            gain_factor: 0.0,
            deviations_checked: checked,
        },
    }
}

/// Searches for an agent that strictly gains by a unilateral misreport.
pub fn check_unilateral<S: Scalar>(
    instance: &Instance<S>,
    cfg: &MechanismConfig<S>,
    misreports: &MisreportSet<S>,
) -> Result<DeviationReport<S>> {
    let checker = Checker::new(instance, cfg, misreports)?;
    let tol = S::gain_tolerance();
    let outcomes: Vec<_> = (0..instance.profile.len())
        .into_par_iter()
        .map(|i| {
            let choices = (0..checker.reports[i].len()).map(|c| vec![c]);
            checker.search(&[i], choices, |d| d.after[0] > d.before[0] + tol)
        })
        .collect();
    merge(outcomes)
}

/// Searches for a coalition whose members all gain more than a factor `γ` by misreporting jointly.
///
/// Coalitions are visited by size, then lexicographically. Each coalition's
/// joint reports are enumerated exhaustively when there are at most
/// `budget` of them and sampled with a per-coalition seeded stream otherwise.
pub fn check_coalition<S: Scalar>(
    instance: &Instance<S>,
    cfg: &MechanismConfig<S>,
    misreports: &MisreportSet<S>,
    search: &CoalitionSearch<S>,
) -> Result<DeviationReport<S>> {
    let n = instance.profile.len();
    if search.max_size == 0 || search.max_size > n {
        return Err(Error::domain("coalition size", search.max_size, "[1, n]"));
    }
    if !(search.gamma >= S::one()) {
        return Err(Error::domain("gamma", search.gamma, "gamma >= 1"));
    }
    if search.budget == 0 {
        return Err(Error::domain("budget", 0, "at least 1"));
    }
    let checker = Checker::new(instance, cfg, misreports)?;
    let coalitions: Vec<Vec<usize>> = (1..=search.max_size)
        .flat_map(|size| (0..n).combinations(size))
        .collect();
    let tol = S::gain_tolerance();
    let gamma = search.gamma;
    let violates = |d: &Deviation<S>| d.before.iter().zip(&d.after).all(|(&b, &a)| a > gamma * b + tol);
    let outcomes: Vec<_> = coalitions
        .par_iter()
        .enumerate()
        .map(|(index, coalition)| {
            let sizes: Vec<usize> = coalition.iter().map(|&i| checker.reports[i].len()).collect();
            let total = sizes
                .iter()
                .try_fold(1usize, |acc, &s| acc.checked_mul(s))
                .unwrap_or(usize::MAX);
            if total <= search.budget {
                let choices = sizes.iter().map(|&s| 0..s).multi_cartesian_product();
                checker.search(coalition, choices, violates)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
                rng.set_stream(index as u64);
                let choices = (0..search.budget).map(move |_| sizes.iter().map(|&s| rng.gen_range(0..s)).collect());
                checker.search(coalition, choices, violates)
            }
        })
        .collect();
    merge(outcomes)
}
