//! JSON and CSV renderings of library reports.

use serde::Serialize;
use serde_json::{json, Value};

use ofl_core::experiments::{ApproximationRatio, EtaMode, FuzzRow, LowerBoundReport, SearchOutcome, TradeoffCurve};
use ofl_core::mechanisms::{DualRule, VoteCounts};
use ofl_core::{DeviationReport, EvaluationReport, MechanismConfig, Point, Result};

use crate::instance_file::{InstanceFile, LocationSpec};

/// Finite values as JSON numbers; infinities as the strings `"inf"` and `"-inf"`.
pub fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn ratio(r: &ApproximationRatio<f64>) -> Value {
    number(r.as_f64())
}

fn point(p: &Point) -> Value {
    serde_json::to_value(LocationSpec::from(p)).expect("locations always serialize")
}

fn tree_point(p: &ofl_core::TreePoint) -> Value {
    point(&Point::Tree(*p))
}

fn counts(c: &VoteCounts<f64>) -> Value {
    match c {
        VoteCounts::Coordinatewise(tallies) => json!({
            "kind": "coordinatewise",
            "coordinates": tallies.iter().map(|t| json!({
                "for_one": t.for_one,
                "for_zero": t.for_zero,
                "predicted": t.predicted,
                "output": t.output,
            })).collect::<Vec<_>>(),
        }),
        VoteCounts::Circle { n_p, n_q, antipode } => json!({
            "kind": "circle",
            "n_p": n_p,
            "n_q": n_q,
            "antipode": antipode,
        }),
        VoteCounts::Tree { n_a, n_b, a, b, midpoint } => json!({
            "kind": "tree",
            "n_a": n_a,
            "n_b": n_b,
            "a": tree_point(a),
            "b": tree_point(b),
            "midpoint": midpoint.as_ref().map(tree_point),
        }),
        VoteCounts::Dual {
            n_1,
            n_2,
            transformed,
            threshold,
        } => json!({
            "kind": "dual",
            "n_1": n_1,
            "n_2": n_2,
            "threshold": threshold,
            "transformed": transformed,
        }),
    }
}

pub fn evaluation(mechanism: &str, r: &EvaluationReport) -> Value {
    json!({
        "mechanism": mechanism,
        "lambda": r.lambda,
        "prediction_bonus": r.trace.prediction_bonus,
        "chosen": point(&r.chosen),
        "welfare": r.welfare,
        "y_star": point(&r.y_star),
        "opt": r.opt,
        "ratio": ratio(&r.ratio),
        "eta": r.eta,
        "counts": counts(&r.trace.counts),
        "warnings": r.trace.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
    })
}

pub fn optimum(y_star: &Point, opt: f64) -> Value {
    json!({ "y_star": point(y_star), "opt": opt })
}

pub fn deviation(r: &DeviationReport) -> Value {
    json!({
        "violated": r.violated,
        "coalition": r.coalition,
        "misreports": r.misreports.iter().map(|m| {
            let mut v = json!({ "agent": m.agent, "location": point(&m.location) });
            if let Some(t) = m.preference {
                v["type"] = json!(t.bit());
            }
            v
        }).collect::<Vec<_>>(),
        "utilities_before": r.utilities_before,
        "utilities_after": r.utilities_after,
        "gain_factor": number(r.gain_factor),
        "deviations_checked": r.deviations_checked,
    })
}

pub fn lower_bound(r: &LowerBoundReport<f64>) -> Value {
    json!({
        "n": r.n,
        "c": r.c,
        "epsilon": r.epsilon,
        "k0": r.k0,
        "chosen": point(&r.chosen),
        "ratio": r.ratio,
        "closed_form": r.closed_form,
        "limit": r.limit,
        "epsilon_limit": r.epsilon_limit,
        "c1_ratio": r.c1_ratio,
    })
}

pub fn fuzz_row(setting: &str, r: &FuzzRow) -> Value {
    json!({
        "setting": setting,
        "lambda": r.lambda,
        "instances": r.instances,
        "consistent_instances": r.consistent_instances,
        "max_ratio": number(r.max_ratio),
        "max_consistent_ratio": number(r.max_consistent_ratio),
        "robustness_violations": r.robustness_violations,
        "consistency_violations": r.consistency_violations,
        "first_violation": r.first_violation,
        "passed": r.passed(),
    })
}

/// One line of the sweep CSV; infinite values print as `inf`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub lambda: f64,
    pub eta_mode: &'static str,
    pub empirical_ratio: f64,
    pub bound: f64,
    pub instance_digest: String,
}

impl SweepRecord {
    /// Whether the empirical ratio exceeds a finite bound by more than `slack`.
    pub fn exceeds(&self, slack: f64) -> bool {
        self.bound.is_finite() && !(self.empirical_ratio <= self.bound + slack)
    }
}

fn record(cfg: &MechanismConfig, mode: EtaMode, outcome: &SearchOutcome, bound: f64) -> SweepRecord {
    SweepRecord {
        lambda: cfg.lambda(),
        eta_mode: mode.name(),
        empirical_ratio: outcome.worst_ratio.as_f64(),
        bound,
        instance_digest: InstanceFile::from_instance(&outcome.worst, cfg).digest(),
    }
}

/// Two records per trust level: the `η = 0` search, then the unconstrained one.
pub fn sweep_records(curve: &TradeoffCurve, dual_rule: DualRule) -> Result<Vec<SweepRecord>> {
    let mut out = Vec::with_capacity(2 * curve.rows.len());
    for row in &curve.rows {
        let cfg = MechanismConfig::new(row.lambda)?.with_dual_rule(dual_rule);
        out.push(record(&cfg, EtaMode::Zero, &row.consistency, row.bound_consistency));
        out.push(record(&cfg, EtaMode::Free, &row.robustness, row.bound_robustness.as_f64()));
    }
    Ok(out)
}
