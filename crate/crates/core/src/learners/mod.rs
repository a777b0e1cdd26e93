//! Reference learners.
//!
//! A [`Learner`] maps a dataset to a [`Concept`]. All learners here are
//! deterministic given the dataset contents, their order and the seed.

mod knn;
mod memorizing;
mod tree;

pub use knn::{train_knn, KnnLearner};
pub use memorizing::{train_memorizing, MemorizingLearner, MemorizingState};
pub use tree::{gain_ratio, train_tree, TreeLearner, TreeParams};

use crate::concept::{argmax_lowest, Concept};
use crate::dataset::{evaluate_accuracy, Dataset};
use crate::error::{Error, Result};
use crate::seed::SeedSpec;

pub trait Learner: Send + Sync {
    fn name(&self) -> String;

    fn train(&self, data: &Dataset, seed: SeedSpec) -> Result<Concept>;

    /// Train on `data` when this learner produced `previous` on an earlier
    /// batch. Stateless learners ignore `previous`.
    fn retrain(&self, previous: &Concept, data: &Dataset, seed: SeedSpec) -> Result<Concept> {
        let _ = previous;
        self.train(data, seed)
    }
}

impl<L: Learner + ?Sized> Learner for Box<L> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn train(&self, data: &Dataset, seed: SeedSpec) -> Result<Concept> {
        (**self).train(data, seed)
    }

    fn retrain(&self, previous: &Concept, data: &Dataset, seed: SeedSpec) -> Result<Concept> {
        (**self).retrain(previous, data, seed)
    }
}

/// Wrap any error a learner raised so callers can tell learner failures apart.
pub(crate) fn learner_failure(learner: &dyn Learner, err: Error) -> Error {
    match err {
        Error::Learner { .. } => err,
        other => Error::Learner {
            learner: learner.name(),
            message: other.to_string(),
        },
    }
}

/// Constant concept predicting the most frequent class (lowest index on ties).
pub fn train_majority(data: &Dataset) -> Result<Concept> {
    if data.is_empty() {
        return Err(Error::input("majority learner needs a nonempty dataset"));
    }
    Ok(Concept::constant(argmax_lowest(&data.class_counts())))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MajorityLearner;

impl Learner for MajorityLearner {
    fn name(&self) -> String {
        "majority".into()
    }

    fn train(&self, data: &Dataset, _seed: SeedSpec) -> Result<Concept> {
        train_majority(data)
    }
}

/// Ignores its data and always outputs the same concept.
#[derive(Debug, Clone)]
pub struct FixedLearner {
    pub concept: Concept,
}

impl FixedLearner {
    pub fn new(concept: Concept) -> Self {
        FixedLearner { concept }
    }
}

impl Learner for FixedLearner {
    fn name(&self) -> String {
        format!("fixed-{}", self.concept.kind())
    }

    fn train(&self, data: &Dataset, _seed: SeedSpec) -> Result<Concept> {
        self.concept.validate(data.schema(), data.classes())?;
        Ok(self.concept.clone())
    }
}

/// Picks whichever candidate has the highest training accuracy
/// (earliest candidate on ties).
#[derive(Debug, Clone)]
pub struct AccuracyChooser {
    pub candidates: Vec<Concept>,
}

impl AccuracyChooser {
    pub fn new(candidates: Vec<Concept>) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::parameter("chooser needs at least one candidate concept"));
        }
        Ok(AccuracyChooser { candidates })
    }
}

impl Learner for AccuracyChooser {
    fn name(&self) -> String {
        "chooser".into()
    }

    fn train(&self, data: &Dataset, _seed: SeedSpec) -> Result<Concept> {
        let mut best: Option<(u64, &Concept)> = None;
        for c in &self.candidates {
            let hits = evaluate_accuracy(c, data)?.hits;
            if best.is_none_or(|(b, _)| hits > b) {
                best = Some((hits, c));
            }
        }
        Ok(best.expect("candidates nonempty").1.clone())
    }
}
