use super::Learner;
use crate::concept::{Concept, InstanceSet};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::seed::SeedSpec;

/// Store the dataset; classify by majority vote of the `k` nearest stored
/// vectors under Hamming distance.
///
/// Distance ties go to the earlier stored example, vote ties to the lower
/// class index.
pub fn train_knn(data: &Dataset, k: usize) -> Result<Concept> {
    if data.is_empty() {
        return Err(Error::input("k-NN learner needs a nonempty dataset"));
    }
    if k == 0 || k > data.len() {
        return Err(Error::parameter(format!(
            "k must lie in [1, {}], got {k}",
            data.len()
        )));
    }
    Ok(Concept::Instances(InstanceSet {
        k,
        instances: data.examples().to_vec(),
    }))
}

#[derive(Debug, Clone, Copy)]
pub struct KnnLearner {
    pub k: usize,
}

impl KnnLearner {
    pub fn new(k: usize) -> Self {
        KnnLearner { k }
    }
}

impl Learner for KnnLearner {
    fn name(&self) -> String {
        format!("knn(k={})", self.k)
    }

    fn train(&self, data: &Dataset, _seed: SeedSpec) -> Result<Concept> {
        train_knn(data, self.k)
    }
}
