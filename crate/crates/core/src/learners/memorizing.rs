//! A meta-learner that keeps its previous concept unless the new one is
//! clearly better on the current data.

use serde::{Deserialize, Serialize};

use super::{learner_failure, Learner};
use crate::concept::Concept;
use crate::dataset::{evaluate_accuracy, Dataset};
use crate::error::{Error, Result};
use crate::seed::SeedSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemorizingState {
    pub previous: Option<Concept>,
    /// Accuracy margin the new concept must exceed to replace the old one.
    pub epsilon: f64,
}

impl MemorizingState {
    pub fn new(epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(MemorizingState {
            previous: None,
            epsilon,
        })
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon >= 0.0 {
        Ok(())
    } else {
        Err(Error::parameter(format!(
            "epsilon must be a finite value >= 0, got {epsilon}"
        )))
    }
}

/// Train `base` on `data`; keep the memorized concept when the new one's
/// accuracy on `data` exceeds it by no more than `state.epsilon`.
pub fn train_memorizing(
    base: &dyn Learner,
    state: &MemorizingState,
    data: &Dataset,
    seed: SeedSpec,
) -> Result<(Concept, MemorizingState)> {
    check_epsilon(state.epsilon)?;
    let fresh = base.train(data, seed).map_err(|e| learner_failure(base, e))?;
    let output = match &state.previous {
        None => fresh,
        Some(previous) => {
            let new_acc = evaluate_accuracy(&fresh, data)?;
            let old_acc = evaluate_accuracy(previous, data)?;
            let margin = (new_acc.hits as f64 - old_acc.hits as f64) / data.len() as f64;
            if margin <= state.epsilon {
                previous.clone()
            } else {
                fresh
            }
        }
    };
    let next = MemorizingState {
        previous: Some(output.clone()),
        epsilon: state.epsilon,
    };
    Ok((output, next))
}

pub struct MemorizingLearner {
    pub base: Box<dyn Learner>,
    pub epsilon: f64,
}

impl MemorizingLearner {
    pub fn new(base: Box<dyn Learner>, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(MemorizingLearner { base, epsilon })
    }
}

impl Learner for MemorizingLearner {
    fn name(&self) -> String {
        format!("memorizing:{}", self.base.name())
    }

    fn train(&self, data: &Dataset, seed: SeedSpec) -> Result<Concept> {
        let state = MemorizingState::new(self.epsilon)?;
        Ok(train_memorizing(self.base.as_ref(), &state, data, seed)?.0)
    }

    fn retrain(&self, previous: &Concept, data: &Dataset, seed: SeedSpec) -> Result<Concept> {
        let state = MemorizingState {
            previous: Some(previous.clone()),
            epsilon: self.epsilon,
        };
        Ok(train_memorizing(self.base.as_ref(), &state, data, seed)?.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::LabeledExample;
    use crate::learners::{FixedLearner, TreeLearner};
    use crate::schema::{AttributeSchema, AttributeVector, ClassLabel, ClassSet};
    use std::sync::Arc;

    fn data(rows: &[(u32, usize)]) -> Dataset {
        Dataset::new(
            Arc::new(AttributeSchema::boolean(1).unwrap()),
            Arc::new(ClassSet::binary()),
            rows.iter()
                .map(|&(v, l)| LabeledExample::new(AttributeVector::new(vec![v]), ClassLabel(l)))
                .collect(),
        )
        .unwrap()
    }

    fn c(l: usize) -> Concept {
        Concept::constant(ClassLabel(l))
    }

    #[test]
    fn first_batch_outputs_the_fresh_concept() {
        let base = FixedLearner::new(c(1));
        let state = MemorizingState::new(0.0).unwrap();
        let (out, next) = train_memorizing(&base, &state, &data(&[(0, 0), (1, 1)]), SeedSpec::new(0)).unwrap();
        assert_eq!(out, c(1));
        assert_eq!(next.previous, Some(c(1)));
    }

    #[test]
    fn equal_accuracy_keeps_previous_at_zero_epsilon() {
        // both constants are right on half the rows
        let base = FixedLearner::new(c(1));
        let state = MemorizingState {
            previous: Some(c(0)),
            epsilon: 0.0,
        };
        let (out, _) = train_memorizing(&base, &state, &data(&[(0, 0), (1, 1)]), SeedSpec::new(0)).unwrap();
        assert_eq!(out, c(0));
    }

    #[test]
    fn clearly_better_concept_replaces_previous() {
        // 20 rows: class 1 on 11, class 0 on 9 -> constant 1 beats constant 0 by 0.10
        let mut rows = vec![(0, 1); 11];
        rows.extend(vec![(0, 0); 9]);
        let base = FixedLearner::new(c(1));
        let state = MemorizingState {
            previous: Some(c(0)),
            epsilon: 0.05,
        };
        let (out, _) = train_memorizing(&base, &state, &data(&rows), SeedSpec::new(0)).unwrap();
        assert_eq!(out, c(1));
    }

    #[test]
    fn large_epsilon_freezes_the_first_concept() {
        let base = TreeLearner::default();
        let mut state = MemorizingState::new(1e9).unwrap();
        let batches = [
            data(&[(0, 0), (1, 1), (1, 1)]),
            data(&[(0, 1), (1, 0)]),
            data(&[(0, 1), (1, 1)]),
            data(&[(0, 0), (0, 0)]),
        ];
        let mut outputs = Vec::new();
        for b in &batches {
            let (out, next) = train_memorizing(&base, &state, b, SeedSpec::new(0)).unwrap();
            outputs.push(out);
            state = next;
        }
        assert!(outputs.iter().all(|o| *o == outputs[0]));
    }

    #[test]
    fn epsilon_must_be_finite_and_nonnegative() {
        assert!(MemorizingState::new(-0.1).is_err());
        assert!(MemorizingState::new(f64::INFINITY).is_err());
        assert!(MemorizingLearner::new(Box::new(TreeLearner::default()), f64::NAN).is_err());
    }
}
