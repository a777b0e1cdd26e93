use std::sync::Arc;

use num_rational::Ratio;
use proptest::prelude::*;
use stabilimeter::bias::{sample_mixture, MixtureParams};
use stabilimeter::schema::enumerate_space;
use stabilimeter::stability::{mean_accuracy, mean_stability, StabilityOptions};
use stabilimeter::{
    estimate_agreement, estimate_stability_accuracy, exact_agreement, make_correlated_scenario, make_random_formula,
    materially_equivalent, sample_dataset, AttributeDistribution, AttributeSchema, ClassSet, Concept, Execution,
    Learner, MemorizingLearner, SeedSpec, TreeLearner,
};

fn uniform(s: usize) -> AttributeDistribution {
    AttributeDistribution::uniform(Arc::new(AttributeSchema::boolean(s).unwrap()))
}

/// Agreement by direct truth-table count.
fn table_agreement(a: &Concept, b: &Concept, s: usize) -> Ratio<u64> {
    let total = 1u64 << s;
    let same = enumerate_space(&vec![2; s]).filter(|v| a.classify(v) == b.classify(v)).count() as u64;
    Ratio::new(same, total)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_agreement_matches_truth_tables(s in 1usize..=7, depth in 1usize..=5, seed in any::<u64>()) {
        let a = Concept::formula(make_random_formula(s, depth, SeedSpec::new(seed).derive("a", 0)).unwrap());
        let b = Concept::formula(make_random_formula(s, depth, SeedSpec::new(seed).derive("b", 0)).unwrap());
        let u = uniform(s);
        let exact = exact_agreement(&a, &b, &u).unwrap();
        prop_assert_eq!(exact, table_agreement(&a, &b, s));
        prop_assert_eq!(materially_equivalent(&a, &b, &u).unwrap(), exact == Ratio::from_integer(1));
        prop_assert_eq!(exact_agreement(&a, &a.complement(), &u).unwrap(), Ratio::from_integer(0));
    }

    #[test]
    fn estimates_sit_near_exact_values(s in 1usize..=6, seed in any::<u64>()) {
        let a = Concept::formula(make_random_formula(s, 4, SeedSpec::new(seed).derive("a", 1)).unwrap());
        let b = Concept::formula(make_random_formula(s, 4, SeedSpec::new(seed).derive("b", 1)).unwrap());
        let u = uniform(s);
        let exact = exact_agreement(&a, &b, &u).unwrap();
        let exact = *exact.numer() as f64 / *exact.denom() as f64;
        let est = estimate_agreement(&a, &b, &u, 4000, SeedSpec::new(seed), Execution::Parallel).unwrap();
        prop_assert!((est.value - exact).abs() <= 5.0 * est.worst_case_std);
        prop_assert_eq!(est.value, est.agreeing as f64 / 4000.0);
    }
}

#[test]
fn agreement_spread_respects_the_worst_case_bound() {
    let (a, b) = (Concept::from_text("(var 0)").unwrap(), Concept::from_text("(var 1)").unwrap());
    let u = uniform(2);
    let values: Vec<f64> = (0..400u64)
        .map(|s| estimate_agreement(&a, &b, &u, 400, SeedSpec::new(s), Execution::Sequential).unwrap().value)
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    assert!(var.sqrt() <= 0.025 * 1.15, "{}", var.sqrt());
}

#[test]
fn mixture_keeps_the_attribute_marginal() {
    let schema = Arc::new(AttributeSchema::boolean(3).unwrap());
    let base = AttributeDistribution::uniform(Arc::clone(&schema));
    let f1 = Concept::from_text("(var 0)").unwrap();
    let f2 = Concept::from_text("(and (var 1) (var 2))").unwrap();
    let classes = Arc::new(ClassSet::binary());
    let n = 16_000;
    for p in [0.0, 0.3, 0.7, 1.0] {
        let params = MixtureParams::new(base.clone(), p, f1.clone(), f2.clone(), Arc::clone(&classes)).unwrap();
        let d = sample_mixture(&params, n, SeedSpec::new(11)).unwrap();
        let mut counts = [0usize; 8];
        for e in d.examples() {
            counts[(e.vector[0] * 4 + e.vector[1] * 2 + e.vector[2]) as usize] += 1;
        }
        // chi-square against uniform, 7 degrees of freedom; 0.999 quantile is 24.3
        let expected = n as f64 / 8.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < 24.3, "p = {p}: chi2 {chi2}");
        for e in d.examples() {
            let (l1, l2) = (f1.classify(&e.vector), f2.classify(&e.vector));
            if l1 == l2 {
                assert_eq!(e.label, l1);
            }
        }
    }
}

fn options(m: usize, exec: Execution) -> StabilityOptions {
    StabilityOptions { m, n: 10_000, exec, ..StabilityOptions::default() }
}

#[test]
fn stability_reports_are_exact_and_schedule_independent() {
    let dist = make_correlated_scenario(6, 0.05).unwrap();
    let data = sample_dataset(&dist, 60, SeedSpec::new(3)).unwrap();
    let u = AttributeDistribution::uniform(Arc::clone(data.schema()));
    let tree = TreeLearner::default();
    let par = estimate_stability_accuracy(&tree, &data, &u, options(25, Execution::Parallel), SeedSpec::new(4)).unwrap();
    let seq = estimate_stability_accuracy(&tree, &data, &u, options(25, Execution::Sequential), SeedSpec::new(4)).unwrap();
    assert_eq!(par, seq);
    assert_eq!(par.stability_estimate, mean_stability(&par.iterations));
    assert_eq!(par.accuracy_estimate, mean_accuracy(&par.iterations));
    assert_eq!(par.std_bound_stability, 0.1);
    assert_eq!(par.std_bound_agreement, 0.005);
}

fn correlated_stability(learner: &dyn Learner, marginal: bool, seed: u64) -> f64 {
    let dist = make_correlated_scenario(6, 0.02).unwrap();
    let data = sample_dataset(&dist, 30, SeedSpec::new(seed).derive("data", 0)).unwrap();
    let agree = if marginal {
        AttributeDistribution::marginal(dist)
    } else {
        AttributeDistribution::uniform(Arc::clone(data.schema()))
    };
    estimate_stability_accuracy(learner, &data, &agree, options(50, Execution::Parallel), SeedSpec::new(seed))
        .unwrap()
        .stability_estimate
}

#[test]
fn marginal_distribution_hides_correlated_instability() {
    let tree = TreeLearner::default();
    let seeds = 100..112u64;
    let under_uniform: f64 = seeds.clone().map(|s| correlated_stability(&tree, false, s)).sum::<f64>() / 12.0;
    let under_marginal: f64 = seeds.map(|s| correlated_stability(&tree, true, s)).sum::<f64>() / 12.0;
    assert!(under_marginal > 0.99, "{under_marginal}");
    assert!(under_uniform < under_marginal - 0.05, "{under_uniform} vs {under_marginal}");
}

#[test]
fn memorizing_never_lowers_stability_iteration_by_iteration() {
    let dist = make_correlated_scenario(6, 0.02).unwrap();
    let tree = TreeLearner::default();
    for eps in [0.0, 0.01, 0.2] {
        let memo = MemorizingLearner::new(Box::new(TreeLearner::default()), eps).unwrap();
        for seed in 0..6u64 {
            let data = sample_dataset(&dist, 30, SeedSpec::new(seed).derive("data", 1)).unwrap();
            let u = AttributeDistribution::uniform(Arc::clone(data.schema()));
            let run = |l: &dyn Learner| {
                estimate_stability_accuracy(l, &data, &u, options(30, Execution::Parallel), SeedSpec::new(seed)).unwrap()
            };
            let (b, m) = (run(&tree), run(&memo));
            for (rb, rm) in b.iterations.iter().zip(&m.iterations) {
                assert!(rm.stab >= rb.stab, "eps {eps} seed {seed}");
                assert_eq!(rm.acc1, rb.acc1);
            }
        }
    }
}
