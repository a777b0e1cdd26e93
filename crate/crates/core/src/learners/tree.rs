//! Top-down decision tree induction with gain-ratio attribute selection.
//!
//! Splits are multiway (one child per attribute level). The only pruning
//! is the `min_gain_ratio` threshold, which acts as the bias-strength knob:
//! raising it blocks weaker splits and pushes the learner toward smaller
//! trees.

use serde::{Deserialize, Serialize};

use super::Learner;
use crate::concept::{argmax_lowest, Concept, TreeNode};
use crate::dataset::{Dataset, LabeledExample};
use crate::error::{Error, Result};
use crate::seed::SeedSpec;

/// Gain ratios closer than this are treated as tied.
const TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub min_gain_ratio: f64,
    /// `None` grows until another stopping rule fires.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            min_gain_ratio: 0.0,
            max_depth: None,
            min_leaf: 1,
        }
    }
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_gain_ratio >= 0.0 && self.min_gain_ratio.is_finite()) {
            return Err(Error::parameter(format!(
                "min_gain_ratio must be a finite value >= 0, got {}",
                self.min_gain_ratio
            )));
        }
        if self.max_depth == Some(0) {
            return Err(Error::parameter("max_depth must be at least 1"));
        }
        if self.min_leaf == 0 {
            return Err(Error::parameter("min_leaf must be at least 1"));
        }
        Ok(())
    }
}

fn entropy(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Gain ratio of one attribute over a subset of examples.
fn gain_ratio_of(
    examples: &[&LabeledExample],
    attribute: usize,
    cardinality: usize,
    n_classes: usize,
) -> f64 {
    let total = examples.len();
    let mut class_counts = vec![0usize; n_classes];
    let mut joint = vec![0usize; cardinality * n_classes];
    let mut level_counts = vec![0usize; cardinality];
    for e in examples {
        let level = e.vector[attribute] as usize;
        class_counts[e.label.0] += 1;
        level_counts[level] += 1;
        joint[level * n_classes + e.label.0] += 1;
    }
    if level_counts.iter().filter(|&&c| c > 0).count() < 2 {
        return 0.0;
    }
    let split_info = entropy(&level_counts, total);
    if split_info <= 0.0 {
        return 0.0;
    }
    let conditional: f64 = level_counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(level, &c)| {
            (c as f64 / total as f64) * entropy(&joint[level * n_classes..(level + 1) * n_classes], c)
        })
        .sum();
    let gain = (entropy(&class_counts, total) - conditional).max(0.0);
    gain / split_info
}

/// Information gain of `attribute` divided by its split information,
/// base-2 logarithms throughout. Zero when the attribute takes fewer than
/// two observed levels.
pub fn gain_ratio(data: &Dataset, attribute: usize) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::input("gain ratio of an empty dataset is undefined"));
    }
    if attribute >= data.schema().len() {
        return Err(Error::input(format!(
            "attribute index {attribute} out of range for {} attributes",
            data.schema().len()
        )));
    }
    let refs: Vec<&LabeledExample> = data.examples().iter().collect();
    Ok(gain_ratio_of(
        &refs,
        attribute,
        data.schema().cardinality(attribute),
        data.classes().len(),
    ))
}

struct Builder<'a> {
    params: TreeParams,
    cardinalities: Vec<usize>,
    n_classes: usize,
    examples: &'a [LabeledExample],
}

impl Builder<'_> {
    fn majority(&self, indices: &[usize]) -> (Vec<usize>, crate::schema::ClassLabel) {
        let mut counts = vec![0usize; self.n_classes];
        for &i in indices {
            counts[self.examples[i].label.0] += 1;
        }
        let label = argmax_lowest(&counts);
        (counts, label)
    }

    fn grow(&self, indices: &[usize], depth: usize, used: &mut [bool]) -> TreeNode {
        let (counts, majority) = self.majority(indices);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_reached = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_reached || indices.len() < self.params.min_leaf {
            return TreeNode::Leaf { leaf: majority };
        }

        let node: Vec<&LabeledExample> = indices.iter().map(|&i| &self.examples[i]).collect();
        let mut best: Option<(usize, f64)> = None;
        for (attr, &card) in self.cardinalities.iter().enumerate() {
            if used[attr] {
                continue;
            }
            let first = node[0].vector[attr];
            if node.iter().all(|e| e.vector[attr] == first) {
                continue;
            }
            let gr = gain_ratio_of(&node, attr, card, self.n_classes);
            if best.is_none_or(|(_, b)| gr > b + TIE_EPSILON) {
                best = Some((attr, gr));
            }
        }
        let Some((attribute, gr)) = best else {
            return TreeNode::Leaf { leaf: majority };
        };
        if gr < self.params.min_gain_ratio {
            return TreeNode::Leaf { leaf: majority };
        }

        let card = self.cardinalities[attribute];
        let mut partitions = vec![Vec::new(); card];
        for &i in indices {
            partitions[self.examples[i].vector[attribute] as usize].push(i);
        }
        used[attribute] = true;
        let children = partitions
            .iter()
            .map(|part| {
                if part.is_empty() {
                    TreeNode::Leaf { leaf: majority }
                } else {
                    self.grow(part, depth + 1, used)
                }
            })
            .collect();
        used[attribute] = false;
        TreeNode::Split {
            attribute,
            children,
        }
    }
}

pub fn train_tree(data: &Dataset, params: TreeParams) -> Result<Concept> {
    params.validate()?;
    if data.is_empty() {
        return Err(Error::input("tree learner needs a nonempty dataset"));
    }
    let builder = Builder {
        params,
        cardinalities: data.schema().cardinalities(),
        n_classes: data.classes().len(),
        examples: data.examples(),
    };
    let indices: Vec<usize> = (0..data.len()).collect();
    let mut used = vec![false; builder.cardinalities.len()];
    match builder.grow(&indices, 0, &mut used) {
        TreeNode::Leaf { leaf } => Ok(Concept::constant(leaf)),
        split => Ok(Concept::Tree(split)),
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TreeLearner {
    pub params: TreeParams,
}

impl TreeLearner {
    pub fn new(params: TreeParams) -> Self {
        TreeLearner { params }
    }
}

impl Learner for TreeLearner {
    fn name(&self) -> String {
        format!("tree(min_gain_ratio={})", self.params.min_gain_ratio)
    }

    fn train(&self, data: &Dataset, _seed: SeedSpec) -> Result<Concept> {
        train_tree(data, self.params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::evaluate_accuracy;
    use crate::schema::{enumerate_space, AttributeSchema, AttributeVector, ClassLabel, ClassSet};
    use proptest::prelude::*;
    use std::sync::Arc;

    fn table(rows: &[(&[u32], usize)]) -> Dataset {
        let s = rows[0].0.len();
        Dataset::new(
            Arc::new(AttributeSchema::boolean(s).unwrap()),
            Arc::new(ClassSet::binary()),
            rows.iter()
                .map(|(v, l)| LabeledExample::new(AttributeVector::new(v.to_vec()), ClassLabel(*l)))
                .collect(),
        )
        .unwrap()
    }

    /// Entropy oracle written independently of the implementation: explicit
    /// probabilities over the joint table.
    fn oracle_gain_ratio(rows: &[(&[u32], usize)], attr: usize) -> f64 {
        let n = rows.len() as f64;
        let h = |ps: &[f64]| -> f64 { ps.iter().filter(|p| **p > 0.0).map(|p| -p * p.log2()).sum() };
        let p_class: Vec<f64> = (0..2)
            .map(|c| rows.iter().filter(|r| r.1 == c).count() as f64 / n)
            .collect();
        let mut cond = 0.0;
        let mut p_level = Vec::new();
        for level in 0..2u32 {
            let sub: Vec<_> = rows.iter().filter(|r| r.0[attr] == level).collect();
            let pl = sub.len() as f64 / n;
            p_level.push(pl);
            if sub.is_empty() {
                continue;
            }
            let pc: Vec<f64> = (0..2)
                .map(|c| sub.iter().filter(|r| r.1 == c).count() as f64 / sub.len() as f64)
                .collect();
            cond += pl * h(&pc);
        }
        let split = h(&p_level);
        if split == 0.0 {
            0.0
        } else {
            (h(&p_class) - cond) / split
        }
    }

    #[test]
    fn identical_attribute_has_ratio_one() {
        let rows: &[(&[u32], usize)] = &[(&[0, 1], 0), (&[1, 0], 1), (&[1, 1], 1), (&[0, 0], 0), (&[1, 0], 1)];
        let d = table(rows);
        assert!((gain_ratio(&d, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!((oracle_gain_ratio(rows, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn independent_attribute_has_ratio_zero() {
        // exhaustive balanced table labeled by x1: x2 carries no information
        let rows: Vec<(Vec<u32>, usize)> = enumerate_space(&[2, 2])
            .map(|v| {
                let l = v[0] as usize;
                (v.into_inner(), l)
            })
            .collect();
        let rows: Vec<(&[u32], usize)> = rows.iter().map(|(v, l)| (v.as_slice(), *l)).collect();
        let d = table(&rows);
        assert_eq!(gain_ratio(&d, 1).unwrap(), 0.0);
    }

    #[test]
    fn noisy_copy_ranks_below_perfect_predictor() {
        // x1 = class, x2 = x1 with two of eight rows flipped
        let rows: &[(&[u32], usize)] = &[
            (&[0, 0], 0),
            (&[0, 0], 0),
            (&[0, 1], 0),
            (&[0, 0], 0),
            (&[1, 1], 1),
            (&[1, 1], 1),
            (&[1, 0], 1),
            (&[1, 1], 1),
        ];
        let d = table(rows);
        let g1 = gain_ratio(&d, 0).unwrap();
        let g2 = gain_ratio(&d, 1).unwrap();
        assert!((g1 - oracle_gain_ratio(rows, 0)).abs() < 1e-12);
        assert!((g2 - oracle_gain_ratio(rows, 1)).abs() < 1e-12);
        // frozen oracle value: 1 - H(1/4) = 0.18872187554086717
        assert!((g2 - 0.188_721_875_540_867_17).abs() < 1e-12);
        assert!(g1 > g2);
    }

    #[test]
    fn gain_ratio_errors() {
        let d = table(&[(&[0, 1], 0)]);
        assert!(gain_ratio(&d, 2).is_err());
        assert_eq!(gain_ratio(&d, 0).unwrap(), 0.0);
    }

    #[test]
    fn single_split_on_label_attribute() {
        let rows: Vec<(Vec<u32>, usize)> = enumerate_space(&[2, 2])
            .map(|v| {
                let l = v[0] as usize;
                (v.into_inner(), l)
            })
            .collect();
        let rows: Vec<(&[u32], usize)> = rows.iter().map(|(v, l)| (v.as_slice(), *l)).collect();
        let d = table(&rows);
        let tree = train_tree(&d, TreeParams::default()).unwrap();
        assert_eq!(tree, Concept::attribute_lookup(0, &[ClassLabel(0), ClassLabel(1)]));
        assert_eq!(evaluate_accuracy(&tree, &d).unwrap().value(), 1.0);
    }

    #[test]
    fn huge_threshold_gives_majority_constant() {
        let d = table(&[(&[0, 1], 0), (&[1, 0], 1), (&[1, 1], 1)]);
        let params = TreeParams {
            min_gain_ratio: 2.0,
            ..TreeParams::default()
        };
        assert_eq!(train_tree(&d, params).unwrap(), Concept::constant(ClassLabel(1)));
    }

    #[test]
    fn xor_is_learned_despite_zero_root_gain() {
        let rows: &[(&[u32], usize)] = &[(&[0, 0], 0), (&[0, 1], 1), (&[1, 0], 1), (&[1, 1], 0)];
        let d = table(rows);
        let tree = train_tree(&d, TreeParams::default()).unwrap();
        assert_eq!(evaluate_accuracy(&tree, &d).unwrap().value(), 1.0);
    }

    #[test]
    fn depth_limit() {
        let rows: &[(&[u32], usize)] = &[(&[0, 0], 0), (&[0, 1], 1), (&[1, 0], 1), (&[1, 1], 0)];
        let params = TreeParams {
            max_depth: Some(1),
            ..TreeParams::default()
        };
        let Concept::Tree(t) = train_tree(&table(rows), params).unwrap() else {
            panic!("expected a split")
        };
        assert_eq!(t.depth(), 1);
        assert!(TreeParams { max_depth: Some(0), ..TreeParams::default() }.validate().is_err());
        assert!(TreeParams { min_gain_ratio: f64::NAN, ..TreeParams::default() }.validate().is_err());
    }

    #[test]
    fn correlated_tie_flips_with_the_sample() {
        // Sample A: copy column (index 0) agrees everywhere with the class column
        // (index 1) -> exact tie -> lowest index wins.
        let a: &[(&[u32], usize)] = &[(&[0, 0, 1], 0), (&[1, 1, 0], 1), (&[1, 1, 1], 1), (&[0, 0, 0], 0)];
        // Sample B: one discordant row -> the class column strictly wins.
        let b: &[(&[u32], usize)] = &[(&[0, 0, 1], 0), (&[1, 1, 0], 1), (&[0, 1, 1], 1), (&[0, 0, 0], 0)];
        let ta = train_tree(&table(a), TreeParams::default()).unwrap();
        let tb = train_tree(&table(b), TreeParams::default()).unwrap();
        let Concept::Tree(ra) = &ta else { panic!() };
        let Concept::Tree(rb) = &tb else { panic!() };
        assert_eq!(ra.root_attribute(), Some(0));
        assert_eq!(rb.root_attribute(), Some(1));
        for v in enumerate_space(&[2, 2, 2]) {
            assert_eq!(ta.classify(&v) == tb.classify(&v), v[0] == v[1]);
        }
    }

    fn consistent_dataset() -> impl Strategy<Value = Dataset> {
        (1usize..5, prop::collection::vec(any::<bool>(), 16), 1usize..40, any::<u64>()).prop_map(
            |(s, truth, n, seed)| {
                use rand::Rng;
                let mut rng = SeedSpec::new(seed).rng();
                let rows: Vec<LabeledExample> = (0..n)
                    .map(|_| {
                        let v: Vec<u32> = (0..s).map(|_| rng.gen_range(0..2)).collect();
                        let idx = v.iter().fold(0usize, |acc, &b| acc * 2 + b as usize);
                        LabeledExample::new(AttributeVector::new(v), ClassLabel(usize::from(truth[idx])))
                    })
                    .collect();
                Dataset::new(
                    Arc::new(AttributeSchema::boolean(s).unwrap()),
                    Arc::new(ClassSet::binary()),
                    rows,
                )
                .unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn unpruned_tree_fits_consistent_data(d in consistent_dataset()) {
            let tree = train_tree(&d, TreeParams::default()).unwrap();
            prop_assert_eq!(evaluate_accuracy(&tree, &d).unwrap().value(), 1.0);
            prop_assert!(tree.validate(d.schema(), d.classes()).is_ok());
        }

        #[test]
        fn column_permutation_keeps_training_accuracy(d in consistent_dataset()) {
            let s = d.schema().len();
            let perm: Vec<usize> = (0..s).rev().collect();
            let permuted: Vec<LabeledExample> = d
                .examples()
                .iter()
                .map(|e| LabeledExample::new(
                    AttributeVector::new(perm.iter().map(|&i| e.vector[i]).collect()),
                    e.label,
                ))
                .collect();
            let pd = Dataset::new(Arc::clone(d.schema()), Arc::clone(d.classes()), permuted).unwrap();
            let unpruned = TreeParams::default();
            let a = evaluate_accuracy(&train_tree(&d, unpruned).unwrap(), &d).unwrap();
            let b = evaluate_accuracy(&train_tree(&pd, unpruned).unwrap(), &pd).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
