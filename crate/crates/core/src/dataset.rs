//! Labeled datasets and the splitting/scoring primitives built on them.

use std::sync::Arc;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::concept::Concept;
use crate::error::{Error, Result};
use crate::schema::{AttributeSchema, AttributeVector, ClassLabel, ClassSet};
use crate::seed::SeedSpec;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabeledExample {
    pub vector: AttributeVector,
    pub label: ClassLabel,
}

impl LabeledExample {
    pub fn new(vector: AttributeVector, label: ClassLabel) -> Self {
        LabeledExample { vector, label }
    }
}

/// An exact count ratio `hits / total`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proportion {
    pub hits: u64,
    pub total: u64,
}

impl Proportion {
    pub fn new(hits: u64, total: u64) -> Self {
        debug_assert!(hits <= total);
        Proportion { hits, total }
    }

    pub fn value(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.hits as f64 / self.total as f64
        }
    }

    pub fn complement(&self) -> Proportion {
        Proportion::new(self.total - self.hits, self.total)
    }
}

/// A finite sequence of labeled examples over a shared schema and class set.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Arc<AttributeSchema>,
    classes: Arc<ClassSet>,
    examples: Vec<LabeledExample>,
    provenance: Option<SeedSpec>,
}

impl Dataset {
    pub fn new(
        schema: Arc<AttributeSchema>,
        classes: Arc<ClassSet>,
        examples: Vec<LabeledExample>,
    ) -> Result<Self> {
        for (i, e) in examples.iter().enumerate() {
            if !schema.conforms(&e.vector) {
                return Err(Error::input(format!(
                    "example {i}: vector {} does not conform to the schema",
                    e.vector
                )));
            }
            if !classes.contains(e.label) {
                return Err(Error::input(format!(
                    "example {i}: label {} outside the class set",
                    e.label
                )));
            }
        }
        Ok(Dataset {
            schema,
            classes,
            examples,
            provenance: None,
        })
    }

    pub(crate) fn from_parts_unchecked(
        schema: Arc<AttributeSchema>,
        classes: Arc<ClassSet>,
        examples: Vec<LabeledExample>,
        provenance: Option<SeedSpec>,
    ) -> Self {
        Dataset {
            schema,
            classes,
            examples,
            provenance,
        }
    }

    pub fn with_provenance(mut self, seed: SeedSpec) -> Self {
        self.provenance = Some(seed);
        self
    }

    pub fn schema(&self) -> &Arc<AttributeSchema> {
        &self.schema
    }

    pub fn classes(&self) -> &Arc<ClassSet> {
        &self.classes
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn provenance(&self) -> Option<SeedSpec> {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Same schema and classes, selected examples (repeats allowed).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            schema: Arc::clone(&self.schema),
            classes: Arc::clone(&self.classes),
            examples: indices.iter().map(|&i| self.examples[i].clone()).collect(),
            provenance: None,
        }
    }

    /// Count of each class label, indexed by class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        for e in &self.examples {
            counts[e.label.0] += 1;
        }
        counts
    }

    pub fn same_space(&self, other: &Dataset) -> bool {
        self.schema == other.schema && self.classes == other.classes
    }
}

/// Random partition into two halves whose sizes differ by at most one.
///
/// The first half gets `len / 2` examples, the second the remainder.
pub fn split_half(data: &Dataset, seed: SeedSpec) -> Result<(Dataset, Dataset)> {
    let (a, b) = split_half_indices(data.len(), seed)?;
    Ok((data.subset(&a), data.subset(&b)))
}

pub fn split_half_indices(len: usize, seed: SeedSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    if len < 2 {
        return Err(Error::input(format!(
            "cannot split a dataset of size {len} into two halves"
        )));
    }
    let mut idx: Vec<usize> = (0..len).collect();
    idx.shuffle(&mut seed.rng());
    let second = idx.split_off(len / 2);
    Ok((idx, second))
}

/// Fraction of `data` that `concept` labels correctly.
pub fn evaluate_accuracy(concept: &Concept, data: &Dataset) -> Result<Proportion> {
    if data.is_empty() {
        return Err(Error::input("accuracy of an empty dataset is undefined"));
    }
    concept.validate(data.schema(), data.classes())?;
    let hits = data
        .examples()
        .iter()
        .filter(|e| concept.classify(&e.vector) == e.label)
        .count();
    Ok(Proportion::new(hits as u64, data.len() as u64))
}
