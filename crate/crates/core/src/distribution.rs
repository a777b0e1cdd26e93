//! Samplers for attribute vectors (D_A) and labeled examples (D_{A×C}).

use std::collections::HashSet;
use std::sync::Arc;

use rand::Rng;

use crate::bias::MixtureParams;
use crate::concept::Concept;
use crate::dataset::{Dataset, LabeledExample};
use crate::error::{Error, Result};
use crate::scenarios::CorrelatedScenario;
use crate::schema::{enumerate_space, AttributeSchema, AttributeVector, ClassLabel, ClassSet};
use crate::seed::SeedSpec;

/// Default cap on the number of vectors an exhaustive computation may visit.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 1 << 24;

/// A distribution over attribute vectors.
#[derive(Debug, Clone)]
pub enum AttributeDistribution {
    /// Every vector of the full space equally likely.
    Uniform { schema: Arc<AttributeSchema> },
    /// Resample stored vectors with equal probability.
    Empirical {
        schema: Arc<AttributeSchema>,
        vectors: Vec<AttributeVector>,
    },
    /// Explicit integer weights; probabilities are `weight / total`.
    Table {
        schema: Arc<AttributeSchema>,
        entries: Vec<(AttributeVector, u64)>,
        cumulative: Vec<u64>,
    },
    /// The attribute marginal of a labeled distribution (labels dropped).
    Marginal(Box<LabeledDistribution>),
}

impl AttributeDistribution {
    pub fn uniform(schema: Arc<AttributeSchema>) -> Self {
        AttributeDistribution::Uniform { schema }
    }

    pub fn empirical(data: &Dataset) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::input("empirical distribution needs a nonempty dataset"));
        }
        Ok(AttributeDistribution::Empirical {
            schema: Arc::clone(data.schema()),
            vectors: data.examples().iter().map(|e| e.vector.clone()).collect(),
        })
    }

    pub fn table(schema: Arc<AttributeSchema>, entries: Vec<(AttributeVector, u64)>) -> Result<Self> {
        let mut cumulative = Vec::with_capacity(entries.len());
        let mut total: u64 = 0;
        for (v, w) in &entries {
            schema.check(v)?;
            total = total
                .checked_add(*w)
                .ok_or_else(|| Error::parameter("table weights overflow"))?;
            cumulative.push(total);
        }
        if total == 0 {
            return Err(Error::parameter("table distribution needs positive total weight"));
        }
        Ok(AttributeDistribution::Table {
            schema,
            entries,
            cumulative,
        })
    }

    pub fn marginal(dist: LabeledDistribution) -> Self {
        AttributeDistribution::Marginal(Box::new(dist))
    }

    pub fn schema(&self) -> Arc<AttributeSchema> {
        match self {
            AttributeDistribution::Uniform { schema }
            | AttributeDistribution::Empirical { schema, .. }
            | AttributeDistribution::Table { schema, .. } => Arc::clone(schema),
            AttributeDistribution::Marginal(d) => d.schema(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> AttributeVector {
        match self {
            AttributeDistribution::Uniform { schema } => AttributeVector::new(
                schema
                    .attributes()
                    .iter()
                    .map(|a| rng.gen_range(0..a.cardinality() as u32))
                    .collect(),
            ),
            AttributeDistribution::Empirical { vectors, .. } => {
                vectors[rng.gen_range(0..vectors.len())].clone()
            }
            AttributeDistribution::Table {
                entries,
                cumulative,
                ..
            } => {
                let total = *cumulative.last().expect("validated nonempty");
                let u = rng.gen_range(0..total);
                let i = cumulative.partition_point(|&c| c <= u);
                entries[i].0.clone()
            }
            AttributeDistribution::Marginal(d) => d.sample_one(rng).vector,
        }
    }

    /// Every vector with nonzero weight and its integer weight, plus the total.
    ///
    /// Fails with a capacity error when more than `limit` vectors would be
    /// visited, and with an input error for non-enumerable kinds.
    pub fn weighted_support(&self, limit: u128) -> Result<(Vec<(AttributeVector, u64)>, u64)> {
        match self {
            AttributeDistribution::Uniform { schema } => {
                let size = schema.space_size();
                match size {
                    Some(size) if size <= limit => {
                        let support: Vec<_> = enumerate_space(&schema.cardinalities())
                            .map(|v| (v, 1))
                            .collect();
                        let total = support.len() as u64;
                        Ok((support, total))
                    }
                    _ => Err(Error::Capacity(format!(
                        "attribute space has {} vectors, exhaustive limit is {limit}; use Monte Carlo estimation instead",
                        size.map_or_else(|| "more than 2^128".to_string(), |s| s.to_string())
                    ))),
                }
            }
            AttributeDistribution::Empirical { vectors, .. } => {
                check_limit(vectors.len(), limit)?;
                Ok((vectors.iter().map(|v| (v.clone(), 1)).collect(), vectors.len() as u64))
            }
            AttributeDistribution::Table {
                entries,
                cumulative,
                ..
            } => {
                check_limit(entries.len(), limit)?;
                Ok((
                    entries.iter().filter(|(_, w)| *w > 0).cloned().collect(),
                    *cumulative.last().expect("validated nonempty"),
                ))
            }
            AttributeDistribution::Marginal(_) => Err(Error::input(
                "the marginal of a labeled distribution is not enumerable; use Monte Carlo estimation",
            )),
        }
    }

    /// Whether every vector of the full space has nonzero probability.
    pub fn is_strictly_positive(&self, limit: u128) -> Result<bool> {
        if let AttributeDistribution::Uniform { .. } = self {
            return Ok(true);
        }
        let schema = self.schema();
        let (support, _) = self.weighted_support(limit)?;
        let distinct: HashSet<&AttributeVector> = support.iter().map(|(v, _)| v).collect();
        Ok(schema.space_size() == Some(distinct.len() as u128))
    }
}

fn check_limit(len: usize, limit: u128) -> Result<()> {
    if len as u128 > limit {
        Err(Error::Capacity(format!(
            "distribution support has {len} entries, exhaustive limit is {limit}"
        )))
    } else {
        Ok(())
    }
}

/// A distribution over labeled examples.
#[derive(Debug, Clone)]
pub enum LabeledDistribution {
    /// Vectors from `attributes`, labeled by `target`, each label replaced by a
    /// uniformly chosen different class with probability `flip_rate`.
    ConceptNoise {
        target: Concept,
        attributes: AttributeDistribution,
        flip_rate: f64,
        classes: Arc<ClassSet>,
    },
    /// The two-concept mixture used for bias measurement.
    Mixture(MixtureParams),
    /// Resample the examples of a dataset with replacement.
    Empirical(Dataset),
    /// Two nearly redundant attributes, one of which determines the class.
    Correlated(CorrelatedScenario),
}

impl LabeledDistribution {
    pub fn concept_noise(
        target: Concept,
        attributes: AttributeDistribution,
        flip_rate: f64,
        classes: Arc<ClassSet>,
    ) -> Result<Self> {
        let d = LabeledDistribution::ConceptNoise {
            target,
            attributes,
            flip_rate,
            classes,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn schema(&self) -> Arc<AttributeSchema> {
        match self {
            LabeledDistribution::ConceptNoise { attributes, .. } => attributes.schema(),
            LabeledDistribution::Mixture(params) => params.base.schema(),
            LabeledDistribution::Empirical(d) => Arc::clone(d.schema()),
            LabeledDistribution::Correlated(s) => s.schema(),
        }
    }

    pub fn classes(&self) -> Arc<ClassSet> {
        match self {
            LabeledDistribution::ConceptNoise { classes, .. } => Arc::clone(classes),
            LabeledDistribution::Mixture(params) => Arc::clone(&params.classes),
            LabeledDistribution::Empirical(d) => Arc::clone(d.classes()),
            LabeledDistribution::Correlated(_) => Arc::new(ClassSet::binary()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LabeledDistribution::ConceptNoise {
                target,
                attributes,
                flip_rate,
                classes,
            } => {
                if !(0.0..=1.0).contains(flip_rate) {
                    return Err(Error::parameter(format!(
                        "flip rate must lie in [0, 1], got {flip_rate}"
                    )));
                }
                target.validate(&attributes.schema(), classes)
            }
            LabeledDistribution::Mixture(params) => params.validate(),
            LabeledDistribution::Empirical(d) => {
                if d.is_empty() {
                    Err(Error::input("cannot resample an empty dataset"))
                } else {
                    Ok(())
                }
            }
            LabeledDistribution::Correlated(s) => s.validate(),
        }
    }

    pub(crate) fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> LabeledExample {
        match self {
            LabeledDistribution::ConceptNoise {
                target,
                attributes,
                flip_rate,
                classes,
            } => {
                let vector = attributes.sample(rng);
                let mut label = target.classify(&vector);
                if rng.gen_bool(*flip_rate) {
                    // uniform over the other classes
                    let shift = rng.gen_range(1..classes.len());
                    label = ClassLabel((label.0 + shift) % classes.len());
                }
                LabeledExample::new(vector, label)
            }
            LabeledDistribution::Mixture(params) => params.sample_one(rng),
            LabeledDistribution::Empirical(d) => {
                d.examples()[rng.gen_range(0..d.len())].clone()
            }
            LabeledDistribution::Correlated(s) => s.sample_one(rng),
        }
    }
}

/// `size` iid draws from `dist`, reproducible from `seed`.
pub fn sample_dataset(dist: &LabeledDistribution, size: usize, seed: SeedSpec) -> Result<Dataset> {
    if size == 0 {
        return Err(Error::parameter("sample size must be at least 1"));
    }
    dist.validate()?;
    let mut rng = seed.rng();
    let examples = (0..size).map(|_| dist.sample_one(&mut rng)).collect();
    Ok(Dataset::from_parts_unchecked(dist.schema(), dist.classes(), examples, Some(seed)))
}
