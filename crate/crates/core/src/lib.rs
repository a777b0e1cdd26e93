//! Stability and preferential-bias measurement for classification learners.
//!
//! Concepts are compared by *agreement*, the probability under an attribute
//! distribution that two concepts classify a random vector the same way.
//! A learner's *stability* is the expected agreement between concepts it
//! induces from two independent samples; [`estimate_stability_accuracy`]
//! estimates it together with accuracy by repeated half-splits. The
//! [`bias`] module measures how strongly a learner prefers one concept to
//! another on mixture-labeled training sets.
//!
//! ```
//! use std::sync::Arc;
//! use stabilimeter::{
//!     estimate_agreement, AttributeDistribution, AttributeSchema, Concept, Execution, SeedSpec,
//! };
//!
//! let schema = Arc::new(AttributeSchema::boolean(2).unwrap());
//! let uniform = AttributeDistribution::uniform(schema);
//! let f1 = Concept::from_text("(and (var 0) (var 1))").unwrap();
//! let f2 = Concept::from_text("(var 0)").unwrap();
//! let est = estimate_agreement(&f1, &f2, &uniform, 10_000, SeedSpec::new(7), Execution::Parallel)
//!     .unwrap();
//! assert!((est.value - 0.75).abs() < 0.02);
//! assert_eq!(est.worst_case_std, 0.005);
//! ```

pub mod agreement;
pub mod bias;
pub mod concept;
pub mod dataset;
pub mod distribution;
pub mod error;
pub mod formula;
pub mod io;
pub mod learners;
pub mod scenarios;
pub mod schema;
pub mod seed;
pub mod stability;

pub use agreement::{
    estimate_agreement, exact_agreement, exact_agreement_with_limit, materially_equivalent,
    worst_case_std, AgreementEstimate,
};
pub use bias::{
    delta, measure_bias_strength, measure_preference, sample_mixture, BiasStrengthResult,
    BiasSweepSettings, CurvePoint, MixtureParams, Orientation, PreferenceResult,
    PreferenceSettings,
};
pub use concept::{Concept, InstanceSet, TreeNode};
pub use dataset::{evaluate_accuracy, split_half, Dataset, LabeledExample, Proportion};
pub use distribution::{sample_dataset, AttributeDistribution, LabeledDistribution};
pub use error::{Error, Result};
pub use formula::BooleanFormula;
pub use learners::{
    train_knn, train_majority, train_memorizing, train_tree, AccuracyChooser, FixedLearner,
    KnnLearner, Learner, MajorityLearner, MemorizingLearner, MemorizingState, TreeLearner,
    TreeParams,
};
pub use scenarios::{
    make_correlated_scenario, make_drift_sequence, make_random_formula, CorrelatedScenario,
    DriftSequence,
};
pub use schema::{Attribute, AttributeSchema, AttributeVector, ClassLabel, ClassSet};
pub use seed::{Execution, SeedSpec};
pub use stability::{
    estimate_stability_accuracy, monitor_drift, stability_worst_case_std, DriftAlarm,
    FailurePolicy, IterationRecord, StabilityOptions, StabilityReport,
};
