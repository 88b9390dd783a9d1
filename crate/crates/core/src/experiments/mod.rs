//! Instance evaluation, witness families, random corpora, adversarial search,
//! tradeoff sweeps and the threshold-mechanism lower bound.

mod fuzz;
mod generate;
mod lower_bound;
mod search;
mod witness;

use std::fmt;

pub use fuzz::{fuzz_bounds, FuzzConfig, FuzzRow};
pub use generate::{corpus, item_rng, random_instance, GeneratorConfig, Setting};
pub use lower_bound::{c1_ratio, lb_verify, LowerBoundReport};
pub use search::{adversarial_search, sweep, EtaMode, SearchOutcome, TradeoffCurve, TradeoffRow};
pub use witness::{witness, witness_suite, Witness, WitnessTarget};

use crate::error::Result;
use crate::mechanisms::{Instance, MechanismConfig, MechanismTrace};
use crate::scalar::Scalar;
use crate::spaces::Point;
use crate::welfare::{candidates, WelfareEvaluator};

/// `OPT / F`, infinite when the mechanism's welfare is zero but the optimum's is not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ApproximationRatio<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> ApproximationRatio<S> {
    pub fn of(opt: S, welfare: S) -> Self {
        if welfare > S::zero() {
            ApproximationRatio::Finite(opt / welfare)
        } else if opt > S::zero() {
            ApproximationRatio::Infinite
        } else {
            ApproximationRatio::Finite(S::one())
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            ApproximationRatio::Finite(r) => r.as_f64(),
            ApproximationRatio::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<S> {
        match self {
            ApproximationRatio::Finite(r) => Some(*r),
            ApproximationRatio::Infinite => None,
        }
    }
}

impl<S: fmt::Display> fmt::Display for ApproximationRatio<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApproximationRatio::Finite(r) => write!(f, "{r}"),
            ApproximationRatio::Infinite => f.write_str("inf"),
        }
    }
}

/// Worst-case ratio guaranteed regardless of the prediction: `(3 + λ)/(1 - λ)`.
pub fn robustness_bound<S: Scalar>(lambda: S) -> ApproximationRatio<S> {
    let three = S::count(3);
    if lambda < S::one() {
        ApproximationRatio::Finite((three + lambda) / (S::one() - lambda))
    } else {
        ApproximationRatio::Infinite
    }
}

/// Worst-case ratio guaranteed when the prediction is optimal: `(3 - λ)/(1 + λ)`.
pub fn consistency_bound<S: Scalar>(lambda: S) -> S {
    let three = S::count(3);
    (three - lambda) / (S::one() + lambda)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport<S> {
    pub trace: MechanismTrace<S>,
    pub chosen: Point<S>,
    /// Welfare of the chosen location.
    pub welfare: S,
    pub y_star: Point<S>,
    pub opt: S,
    pub ratio: ApproximationRatio<S>,
    /// Distance from the prediction to the nearest optimal location; zero when the prediction is optimal.
    pub eta: S,
    pub lambda: S,
}

/// Runs the instance's mechanism and compares it with the exact optimum.
pub fn evaluate_instance<S: Scalar>(instance: &Instance<S>, cfg: &MechanismConfig<S>) -> Result<EvaluationReport<S>> {
    let trace = instance.run(cfg)?;
    let evaluator = WelfareEvaluator::new(&instance.space, &instance.profile, instance.model)?;
    let welfare = evaluator.welfare(&trace.chosen)?;
    let mut scored = Vec::new();
    for c in candidates(&instance.space, &instance.profile, instance.model)? {
        let w = evaluator.welfare(&c)?;
        scored.push((c, w));
    }
    let (y_star, opt) = scored
        .iter()
        .fold(None::<(Point<S>, S)>, |best, &(c, w)| match best {
            Some((_, b)) if !(w > b) => best,
            _ => Some((c, w)),
        })
        .expect("candidate sets are never empty");
    let tol = S::gain_tolerance() * opt.max_of(S::one());
    let prediction = *instance.prediction.point();
    let eta = if evaluator.welfare(&prediction)? >= opt - tol {
        S::zero()
    } else {
        let mut nearest: Option<S> = None;
        for (c, w) in &scored {
            if *w >= opt - tol {
                let d = instance.space.distance(&prediction, c)?;
                nearest = Some(nearest.map_or(d, |n| n.min_of(d)));
            }
        }
        nearest.expect("the optimum is among the candidates")
    };
    Ok(EvaluationReport {
        chosen: trace.chosen,
        trace,
        welfare,
        y_star,
        opt,
        ratio: ApproximationRatio::of(opt, welfare),
        eta,
        lambda: cfg.lambda(),
    })
}
