//! Synthetic generators: the correlated-attribute scenario, drifting batch
//! sequences and random formulas.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::concept::Concept;
use crate::dataset::{Dataset, LabeledExample};
use crate::distribution::{sample_dataset, LabeledDistribution};
use crate::error::{Error, Result};
use crate::formula::BooleanFormula;
use crate::schema::{Attribute, AttributeSchema, AttributeVector, ClassLabel};
use crate::seed::SeedSpec;

pub const DEFAULT_CORRELATED_S: usize = 6;
pub const DEFAULT_NOISE_RATE: f64 = 0.02;

/// Boolean attributes `a1..as` where the class is `a1` and `a2` is a noisy
/// copy of `a1`.
///
/// Columns are laid out as `a2, a1, a3, ..., as`. The tree learner breaks
/// exact gain-ratio ties toward the lower column, so on samples where the
/// copy never disagrees with `a1` the copy is chosen, and the induced
/// concept depends on whether a disagreeing row happened to be drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedScenario {
    pub s: usize,
    /// Probability that `a2` differs from `a1`.
    pub noise_rate: f64,
}

impl CorrelatedScenario {
    /// Column holding the noisy copy.
    pub const COPY_COLUMN: usize = 0;
    /// Column holding the class attribute.
    pub const CLASS_COLUMN: usize = 1;

    pub fn new(s: usize, noise_rate: f64) -> Result<Self> {
        let sc = CorrelatedScenario { s, noise_rate };
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s < 2 {
            return Err(Error::parameter(format!("scenario needs s >= 2, got {}", self.s)));
        }
        if !(0.0..0.5).contains(&self.noise_rate) {
            return Err(Error::parameter(format!(
                "noise rate must lie in [0, 0.5), got {}",
                self.noise_rate
            )));
        }
        Ok(())
    }

    pub fn schema(&self) -> Arc<AttributeSchema> {
        let names = std::iter::once(2).chain(std::iter::once(1)).chain(3..=self.s);
        let attributes = names.map(|i| Attribute::boolean(format!("a{i}"))).collect();
        Arc::new(AttributeSchema::new(attributes).expect("distinct boolean attributes"))
    }

    /// The concept "class = a1".
    pub fn target_concept(&self) -> Concept {
        Concept::attribute_lookup(Self::CLASS_COLUMN, &[ClassLabel(0), ClassLabel(1)])
    }

    pub(crate) fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> LabeledExample {
        let a1 = u32::from(rng.gen_bool(0.5));
        let a2 = if rng.gen_bool(self.noise_rate) { 1 - a1 } else { a1 };
        let mut values = Vec::with_capacity(self.s);
        values.push(a2);
        values.push(a1);
        values.extend((2..self.s).map(|_| u32::from(rng.gen_bool(0.5))));
        LabeledExample::new(AttributeVector::new(values), ClassLabel(a1 as usize))
    }
}

pub fn make_correlated_scenario(s: usize, noise_rate: f64) -> Result<LabeledDistribution> {
    Ok(LabeledDistribution::Correlated(CorrelatedScenario::new(s, noise_rate)?))
}

#[derive(Debug, Clone)]
pub struct DriftSequence {
    pub pre_drift: LabeledDistribution,
    pub post_drift: LabeledDistribution,
    /// First batch drawn from `post_drift`.
    pub drift_at: usize,
    pub batch_count: usize,
    pub batch_size: usize,
}

impl DriftSequence {
    pub fn validate(&self) -> Result<()> {
        if !(1 <= self.drift_at && self.drift_at < self.batch_count) {
            return Err(Error::parameter(format!(
                "drift_at must satisfy 1 <= drift_at < batch_count, got {} of {}",
                self.drift_at, self.batch_count
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::parameter("batch size must be at least 1"));
        }
        if self.pre_drift.schema() != self.post_drift.schema()
            || self.pre_drift.classes() != self.post_drift.classes()
        {
            return Err(Error::input("pre- and post-drift distributions use different spaces"));
        }
        self.pre_drift.validate()?;
        self.post_drift.validate()
    }
}

pub fn make_drift_sequence(seq: &DriftSequence, seed: SeedSpec) -> Result<Vec<Dataset>> {
    seq.validate()?;
    (0..seq.batch_count)
        .map(|k| {
            let dist = if k < seq.drift_at { &seq.pre_drift } else { &seq.post_drift };
            sample_dataset(dist, seq.batch_size, seed.derive("batch", k as u64))
        })
        .collect()
}

/// A random formula over `s` variables with depth at most `max_depth`.
///
/// Each node is a leaf with probability 1/4 (always at the depth limit),
/// otherwise `not`, `and` or `or` with equal probability. Leaves are a
/// variable with probability 3/4, else a constant.
pub fn make_random_formula(s: usize, max_depth: usize, seed: SeedSpec) -> Result<BooleanFormula> {
    if s == 0 {
        return Err(Error::parameter("formula needs at least one variable"));
    }
    if max_depth == 0 {
        return Err(Error::parameter("max_depth must be at least 1"));
    }
    let mut rng = seed.rng();
    Ok(grow_formula(&mut rng, s, max_depth))
}

fn grow_formula<R: Rng + ?Sized>(rng: &mut R, s: usize, budget: usize) -> BooleanFormula {
    if budget == 1 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.75) {
            BooleanFormula::var(rng.gen_range(0..s))
        } else {
            BooleanFormula::Const(rng.gen_bool(0.5))
        };
    }
    match rng.gen_range(0..3) {
        0 => BooleanFormula::not(grow_formula(rng, s, budget - 1)),
        op => {
            let arity = rng.gen_range(2..=3);
            let operands = (0..arity).map(|_| grow_formula(rng, s, budget - 1)).collect();
            if op == 1 {
                BooleanFormula::And(operands)
            } else {
                BooleanFormula::Or(operands)
            }
        }
    }
}
