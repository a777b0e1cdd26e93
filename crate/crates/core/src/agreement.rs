//! Semantic agreement between two concepts.
//!
//! Agreement is the probability, under an attribute distribution D_A, that
//! two concepts put a random vector in the same class. It is estimated by
//! Monte Carlo sampling or, for small enumerable spaces, computed exactly.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::concept::Concept;
use crate::distribution::{AttributeDistribution, DEFAULT_ENUMERATION_LIMIT};
use crate::error::{Error, Result};
use crate::seed::{Execution, SeedSpec};

/// Samples drawn per independently seeded chunk.
pub(crate) const CHUNK_SIZE: u64 = 4096;

/// Worst-case standard deviation of a mean of `n` Bernoulli draws, `0.5 / sqrt(n)`.
pub fn worst_case_std(n: u64) -> f64 {
    0.5 / (n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementEstimate {
    pub value: f64,
    pub agreeing: u64,
    pub sample_count: u64,
    pub worst_case_std: f64,
}

impl AgreementEstimate {
    fn from_counts(agreeing: u64, sample_count: u64) -> Self {
        AgreementEstimate {
            value: agreeing as f64 / sample_count as f64,
            agreeing,
            sample_count,
            worst_case_std: worst_case_std(sample_count),
        }
    }
}

/// Number of `n` draws from `dist` on which the concepts agree.
///
/// Draws are grouped into fixed chunks, each with its own derived stream,
/// so the count does not depend on `exec`.
pub(crate) fn count_agreements(
    f1: &Concept,
    f2: &Concept,
    dist: &AttributeDistribution,
    n: u64,
    seed: SeedSpec,
    exec: Execution,
) -> u64 {
    let chunks = n.div_ceil(CHUNK_SIZE);
    exec.map_indices(chunks as usize, |c| {
        let c = c as u64;
        let len = CHUNK_SIZE.min(n - c * CHUNK_SIZE);
        let mut rng = seed.derive("agreement-chunk", c).rng();
        let mut hits = 0u64;
        for _ in 0..len {
            let a = dist.sample(&mut rng);
            if f1.classify(&a) == f2.classify(&a) {
                hits += 1;
            }
        }
        hits
    })
    .into_iter()
    .sum()
}

fn check_pair(f1: &Concept, f2: &Concept, dist: &AttributeDistribution) -> Result<()> {
    let schema = dist.schema();
    f1.validate_schema(&schema)?;
    f2.validate_schema(&schema)
}

/// Fraction of `n` vectors drawn from `dist` on which `f1` and `f2` agree.
pub fn estimate_agreement(
    f1: &Concept,
    f2: &Concept,
    dist: &AttributeDistribution,
    n: u64,
    seed: SeedSpec,
    exec: Execution,
) -> Result<AgreementEstimate> {
    if n == 0 {
        return Err(Error::parameter("agreement needs at least one sample"));
    }
    check_pair(f1, f2, dist)?;
    Ok(AgreementEstimate::from_counts(
        count_agreements(f1, f2, dist, n, seed, exec),
        n,
    ))
}

/// Exact agreement by enumerating the support of `dist`, with the default
/// enumeration limit.
pub fn exact_agreement(f1: &Concept, f2: &Concept, dist: &AttributeDistribution) -> Result<Ratio<u64>> {
    exact_agreement_with_limit(f1, f2, dist, DEFAULT_ENUMERATION_LIMIT)
}

pub fn exact_agreement_with_limit(
    f1: &Concept,
    f2: &Concept,
    dist: &AttributeDistribution,
    limit: u128,
) -> Result<Ratio<u64>> {
    check_pair(f1, f2, dist)?;
    let (support, total) = dist.weighted_support(limit)?;
    let agreeing: u64 = support
        .iter()
        .filter(|(v, _)| f1.classify(v) == f2.classify(v))
        .map(|(_, w)| *w)
        .sum();
    Ok(Ratio::new(agreeing, total))
}

/// Whether the concepts have identical truth tables, decided through exact
/// agreement under a strictly positive distribution.
pub fn materially_equivalent(f1: &Concept, f2: &Concept, dist: &AttributeDistribution) -> Result<bool> {
    if !dist.is_strictly_positive(DEFAULT_ENUMERATION_LIMIT)? {
        return Err(Error::input(
            "material equivalence needs a distribution that is positive on every vector",
        ));
    }
    Ok(exact_agreement(f1, f2, dist)? == Ratio::from_integer(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::BooleanFormula as F;
    use crate::schema::AttributeSchema;
    use std::sync::Arc;

    fn uniform(s: usize) -> AttributeDistribution {
        AttributeDistribution::uniform(Arc::new(AttributeSchema::boolean(s).unwrap()))
    }

    fn f(text: &str) -> Concept {
        Concept::formula(text.parse().unwrap())
    }

    #[test]
    fn self_agreement_is_one() {
        let c = f("(or (var 0) (and (var 1) (not (var 2))))");
        let est = estimate_agreement(&c, &c, &uniform(3), 777, SeedSpec::new(1), Execution::Parallel).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(exact_agreement(&c, &c, &uniform(3)).unwrap(), Ratio::from_integer(1));
    }

    #[test]
    fn worst_case_std_anchor() {
        assert_eq!(worst_case_std(10_000), 0.005);
        assert_eq!(worst_case_std(100), 0.05);
        assert_eq!(worst_case_std(1), 0.5);
    }

    #[test]
    fn conjunction_vs_projection() {
        let a = f("(and (var 0) (var 1))");
        let b = f("(var 0)");
        // exact oracle: disagreement only at (1,0) -> 3/4
        assert_eq!(exact_agreement(&a, &b, &uniform(2)).unwrap(), Ratio::new(3, 4));
        let est = estimate_agreement(&a, &b, &uniform(2), 10_000, SeedSpec::new(8), Execution::Parallel).unwrap();
        assert!((est.value - 0.75).abs() <= 0.02, "{}", est.value);
        assert_eq!(est.worst_case_std, 0.005);
    }

    #[test]
    fn de_morgan_and_negation() {
        let u = uniform(2);
        let lhs = f("(not (or (var 0) (var 1)))");
        let rhs = f("(and (not (var 0)) (not (var 1)))");
        assert_eq!(exact_agreement(&lhs, &rhs, &u).unwrap(), Ratio::from_integer(1));
        assert!(materially_equivalent(&lhs, &rhs, &u).unwrap());
        assert_eq!(exact_agreement(&lhs, &lhs.complement(), &u).unwrap(), Ratio::from_integer(0));
        assert!(!materially_equivalent(&f("(var 0)"), &f("(var 1)"), &u).unwrap());
        assert!(materially_equivalent(&lhs, &lhs, &u).unwrap());
    }

    #[test]
    fn estimate_is_symmetric_and_execution_independent() {
        let a = f("(or (var 0) (var 2))");
        let b = f("(and (var 1) (var 2))");
        let u = uniform(3);
        let seed = SeedSpec::new(99);
        let ab = estimate_agreement(&a, &b, &u, 20_001, seed, Execution::Parallel).unwrap();
        let ba = estimate_agreement(&b, &a, &u, 20_001, seed, Execution::Sequential).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn errors() {
        let u = uniform(2);
        let wide = f("(var 5)");
        assert!(estimate_agreement(&wide, &wide, &u, 10, SeedSpec::new(0), Execution::Sequential).is_err());
        assert!(estimate_agreement(&f("(var 0)"), &f("(var 0)"), &u, 0, SeedSpec::new(0), Execution::Sequential).is_err());
        let big = uniform(30);
        let x = f("(var 0)");
        assert!(matches!(exact_agreement(&x, &x, &big), Err(Error::Capacity(_))));
        assert!(exact_agreement_with_limit(&x, &x, &uniform(10), 1 << 9).is_err());
    }

    #[test]
    fn exact_agreement_under_a_table() {
        use crate::schema::AttributeVector;
        let schema = Arc::new(AttributeSchema::boolean(1).unwrap());
        let t = AttributeDistribution::table(
            schema,
            vec![(AttributeVector::new(vec![0]), 1), (AttributeVector::new(vec![1]), 3)],
        )
        .unwrap();
        // x vs constant-true agree only on x=1 (weight 3 of 4)
        let x = f("(var 0)");
        let t1 = Concept::formula(F::Const(true));
        assert_eq!(exact_agreement(&x, &t1, &t).unwrap(), Ratio::new(3, 4));
        assert!(!materially_equivalent(&x, &t1, &t).unwrap());
    }
}
