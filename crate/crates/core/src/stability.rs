//! Joint estimation of predictive accuracy and stability by repeated
//! two-fold splitting, and agreement-based drift monitoring.
//!
//! For each of `m` iterations the data is split in half, the learner is
//! trained on each half, each concept is scored on the other half, and the
//! agreement of the two concepts is estimated from `n` draws of D_A.
//! Every iteration derives its own seeds from the master seed, so the
//! report is identical whether iterations run in parallel or in order.

use serde::{Deserialize, Serialize};

use crate::agreement::{count_agreements, worst_case_std};
use crate::dataset::{evaluate_accuracy, split_half, Dataset};
use crate::distribution::AttributeDistribution;
use crate::error::{Error, Result};
use crate::learners::{learner_failure, Learner};
use crate::seed::{Execution, SeedSpec};

pub const DEFAULT_M: usize = 20;
pub const DEFAULT_N: u64 = 10_000;

/// What to do when the learner fails on one half of a split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FailurePolicy {
    /// Abort the whole estimate.
    #[default]
    Abort,
    /// Drop the iteration and record the failure in the report.
    SkipIteration,
}

#[derive(Debug, Clone, Copy)]
pub struct StabilityOptions {
    pub m: usize,
    pub n: u64,
    pub exec: Execution,
    pub on_failure: FailurePolicy,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions {
            m: DEFAULT_M,
            n: DEFAULT_N,
            exec: Execution::Parallel,
            on_failure: FailurePolicy::Abort,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Accuracy of the first-half concept on the second half.
    pub acc1: f64,
    /// Accuracy of the second-half concept on the first half.
    pub acc2: f64,
    /// Agreement of the two concepts over `n` draws of D_A.
    pub stab: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationFailure {
    pub iteration: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub accuracy_estimate: f64,
    pub stability_estimate: f64,
    /// Number of iterations that contributed to the estimates.
    pub m: usize,
    pub n: u64,
    pub iterations: Vec<IterationRecord>,
    pub std_bound_stability: f64,
    pub std_bound_agreement: f64,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failed_iterations: Vec<IterationFailure>,
}

impl StabilityReport {
    fn from_records(
        records: Vec<IterationRecord>,
        failed: Vec<IterationFailure>,
        n: u64,
        seed: SeedSpec,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Learner {
                learner: "stability".into(),
                message: "every iteration failed".into(),
            });
        }
        let m = records.len();
        Ok(StabilityReport {
            accuracy_estimate: mean_accuracy(&records),
            stability_estimate: mean_stability(&records),
            m,
            n,
            std_bound_stability: stability_worst_case_std(m as u64),
            std_bound_agreement: worst_case_std(n),
            master_seed: seed.master_seed,
            iterations: records,
            failed_iterations: failed,
        })
    }

    /// One `iteration,acc1,acc2,stab` line per iteration, with header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,acc1,acc2,stab\n");
        for (i, r) in self.iterations.iter().enumerate() {
            out.push_str(&format!("{},{},{},{}\n", i + 1, r.acc1, r.acc2, r.stab));
        }
        out
    }
}

/// Mean of all fold accuracies, summed in iteration order.
pub fn mean_accuracy(records: &[IterationRecord]) -> f64 {
    records.iter().map(|r| r.acc1 + r.acc2).sum::<f64>() / (2 * records.len()) as f64
}

/// Mean of per-iteration agreements, summed in iteration order.
pub fn mean_stability(records: &[IterationRecord]) -> f64 {
    records.iter().map(|r| r.stab).sum::<f64>() / records.len() as f64
}

/// Worst-case standard deviation of the stability estimate after `m` iterations.
pub fn stability_worst_case_std(m: u64) -> f64 {
    0.5 / (m as f64).sqrt()
}

fn run_iteration(
    learner: &dyn Learner,
    data: &Dataset,
    dist: &AttributeDistribution,
    n: u64,
    seed: SeedSpec,
    i: u64,
) -> Result<IterationRecord> {
    let (first, second) = split_half(data, seed.derive("split", i))?;
    let f1 = learner
        .train(&first, seed.derive("train-first", i))
        .map_err(|e| learner_failure(learner, e))?;
    let f2 = learner
        .retrain(&f1, &second, seed.derive("train-second", i))
        .map_err(|e| learner_failure(learner, e))?;
    for f in [&f1, &f2] {
        f.validate(data.schema(), data.classes())
            .map_err(|e| learner_failure(learner, e))?;
    }
    let acc1 = evaluate_accuracy(&f1, &second)?.value();
    let acc2 = evaluate_accuracy(&f2, &first)?.value();
    let agreeing = count_agreements(&f1, &f2, dist, n, seed.derive("agreement", i), Execution::Sequential);
    Ok(IterationRecord {
        acc1,
        acc2,
        stab: agreeing as f64 / n as f64,
    })
}

pub fn estimate_stability_accuracy(
    learner: &dyn Learner,
    data: &Dataset,
    dist: &AttributeDistribution,
    options: StabilityOptions,
    seed: SeedSpec,
) -> Result<StabilityReport> {
    if options.m == 0 || options.n == 0 {
        return Err(Error::parameter("m and n must both be at least 1"));
    }
    if data.len() < 2 {
        return Err(Error::input("stability estimation needs at least 2 examples"));
    }
    if *dist.schema() != **data.schema() {
        return Err(Error::input(
            "agreement distribution and dataset use different schemas",
        ));
    }
    let outcomes = options.exec.map_indices(options.m, |i| {
        run_iteration(learner, data, dist, options.n, seed, i as u64)
    });
    let mut records = Vec::with_capacity(options.m);
    let mut failed = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(r) => records.push(r),
            Err(e @ Error::Learner { .. }) if options.on_failure == FailurePolicy::SkipIteration => {
                failed.push(IterationFailure {
                    iteration: i + 1,
                    message: e.to_string(),
                })
            }
            Err(e) => return Err(e),
        }
    }
    StabilityReport::from_records(records, failed, options.n, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftAlarm {
    /// Consecutive batch indices `(k, k + 1)`.
    pub batch_pair_index: (usize, usize),
    pub agreement: f64,
    pub threshold: f64,
    pub fired: bool,
}

/// Train on each batch in turn and flag consecutive pairs whose induced
/// concepts agree less than `threshold`.
pub fn monitor_drift(
    learner: &dyn Learner,
    batches: &[Dataset],
    dist: &AttributeDistribution,
    n: u64,
    threshold: f64,
    seed: SeedSpec,
    exec: Execution,
) -> Result<Vec<DriftAlarm>> {
    if batches.len() < 2 {
        return Err(Error::input("drift monitoring needs at least 2 batches"));
    }
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::parameter(format!("threshold must lie in [0, 1], got {threshold}")));
    }
    if n == 0 {
        return Err(Error::parameter("n must be at least 1"));
    }
    let schema = dist.schema();
    let mut concepts = Vec::with_capacity(batches.len());
    for (k, batch) in batches.iter().enumerate() {
        if **batch.schema() != *schema {
            return Err(Error::input(format!("batch {k} does not match the agreement schema")));
        }
        let train_seed = seed.derive("drift-train", k as u64);
        let trained = match concepts.last() {
            None => learner.train(batch, train_seed),
            Some(prev) => learner.retrain(prev, batch, train_seed),
        };
        let concept = trained.map_err(|e| Error::Learner {
            learner: learner.name(),
            message: format!("batch {k}: {e}"),
        })?;
        concepts.push(concept);
    }
    let agreements = exec.map_indices(batches.len() - 1, |k| {
        count_agreements(
            &concepts[k],
            &concepts[k + 1],
            dist,
            n,
            seed.derive("drift-agreement", k as u64),
            Execution::Sequential,
        )
    });
    Ok(agreements
        .into_iter()
        .enumerate()
        .map(|(k, hits)| {
            let agreement = hits as f64 / n as f64;
            DriftAlarm {
                batch_pair_index: (k, k + 1),
                agreement,
                threshold,
                fired: agreement < threshold,
            }
        })
        .collect())
}
