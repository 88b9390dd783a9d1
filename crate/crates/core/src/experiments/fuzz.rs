use rayon::prelude::*;

use super::{consistency_bound, corpus, evaluate_instance, robustness_bound, GeneratorConfig, Setting};
use crate::error::Result;
use crate::mechanisms::{DualRule, MechanismConfig};

/// Slack allowed above a bound before a fuzzed ratio counts as a violation.
const BOUND_SLACK: f64 = 1e-9;

/// Largest `η` still treated as a correct prediction.
const ETA_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzConfig {
    pub count: usize,
    pub seed: u64,
    pub lambdas: Vec<f64>,
    pub generator: GeneratorConfig,
    pub dual_rule: DualRule,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            count: 10_000,
            seed: 0,
            lambdas: vec![0.0, 0.2, 0.4, 0.6, 0.8],
            generator: GeneratorConfig::default(),
            dual_rule: DualRule::AsWritten,
        }
    }
}

/// Bound checks over one corpus at one trust level.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzRow {
    pub lambda: f64,
    pub instances: usize,
    /// Instances whose prediction evaluated to `η = 0`.
    pub consistent_instances: usize,
    pub max_ratio: f64,
    /// Largest ratio among the consistent instances; 1 when there are none.
    pub max_consistent_ratio: f64,
    pub robustness_violations: usize,
    pub consistency_violations: usize,
    /// Corpus index of the first instance breaking either bound.
    pub first_violation: Option<usize>,
}

impl FuzzRow {
    pub fn passed(&self) -> bool {
        self.robustness_violations == 0 && self.consistency_violations == 0
    }
}

struct Outcome {
    ratio: f64,
    consistent: bool,
    robust_ok: bool,
    consistent_ok: bool,
}

/// Evaluates one shared corpus at every trust level against both bounds.
///
/// Consistency is checked only where the evaluated `η` is zero. Tree
/// predictions are peripheral by construction of the corpus.
pub fn fuzz_bounds(setting: Setting, cfg: &FuzzConfig) -> Result<Vec<FuzzRow>> {
    let instances = corpus(setting, cfg.count, cfg.seed, &cfg.generator);
    let configs = cfg
        .lambdas
        .iter()
        .map(|&l| MechanismConfig::new(l).map(|c| c.with_dual_rule(cfg.dual_rule)))
        .collect::<Result<Vec<_>>>()?;
    let items: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|l| (0..instances.len()).map(move |i| (l, i)))
        .collect();
    let outcomes = items
        .par_iter()
        .map(|&(l, i)| {
            let lambda = cfg.lambdas[l];
            let report = evaluate_instance(&instances[i], &configs[l])?;
            let ratio = report.ratio.as_f64();
            let consistent = report.eta <= ETA_ZERO && instances[i].prediction.peripheral() != Some(false);
            Ok(Outcome {
                ratio,
                consistent,
                robust_ok: ratio <= robustness_bound(lambda).as_f64() + BOUND_SLACK,
                consistent_ok: !consistent || ratio <= consistency_bound(lambda) + BOUND_SLACK,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(cfg
        .lambdas
        .iter()
        .zip(outcomes.chunks(instances.len().max(1)))
        .map(|(&lambda, chunk)| {
            let mut row = FuzzRow {
                lambda,
                instances: instances.len(),
                consistent_instances: 0,
                max_ratio: 1.0,
                max_consistent_ratio: 1.0,
                robustness_violations: 0,
                consistency_violations: 0,
                first_violation: None,
            };
            for (i, o) in chunk.iter().enumerate() {
                row.max_ratio = row.max_ratio.max(o.ratio);
                if o.consistent {
                    row.consistent_instances += 1;
                    row.max_consistent_ratio = row.max_consistent_ratio.max(o.ratio);
                }
                row.robustness_violations += usize::from(!o.robust_ok);
                row.consistency_violations += usize::from(!o.consistent_ok);
                if !(o.robust_ok && o.consistent_ok) && row.first_violation.is_none() {
                    row.first_violation = Some(i);
                }
            }
            row
        })
        .collect())
}
