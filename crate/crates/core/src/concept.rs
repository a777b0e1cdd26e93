//! Concepts: total, deterministic maps from attribute vectors to classes.
//!
//! Every learner in the crate produces a [`Concept`]. The JSON form is
//! shape-based:
//!
//! * `{"leaf": 1}` for a constant concept,
//! * `{"attribute": 0, "children": [...]}` for a decision tree, one child per level,
//! * `{"k": 3, "instances": [{"vector": [..], "label": c}, ..]}` for k-nearest-neighbour,
//! * `{"formula": "(and (var 0) (var 1))"}` for a propositional formula,
//! * `{"complement": <concept>}` for the label-flipped version of a binary concept.

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledExample;
use crate::error::{Error, Result};
use crate::formula::BooleanFormula;
use crate::schema::{AttributeSchema, AttributeVector, ClassLabel, ClassSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Leaf {
        leaf: ClassLabel,
    },
    Split {
        attribute: usize,
        children: Vec<TreeNode>,
    },
}

impl TreeNode {
    fn classify(&self, v: &AttributeVector) -> ClassLabel {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { leaf } => return *leaf,
                TreeNode::Split {
                    attribute,
                    children,
                } => node = &children[v[*attribute] as usize],
            }
        }
    }

    fn validate(&self, schema: &AttributeSchema, classes: Option<&ClassSet>) -> Result<()> {
        match self {
            TreeNode::Leaf { leaf } => check_label(*leaf, classes),
            TreeNode::Split {
                attribute,
                children,
            } => {
                if *attribute >= schema.len() {
                    return Err(Error::input(format!(
                        "tree splits on attribute {attribute}, schema has {}",
                        schema.len()
                    )));
                }
                if children.len() != schema.cardinality(*attribute) {
                    return Err(Error::input(format!(
                        "split on attribute {attribute} has {} children, attribute has {} levels",
                        children.len(),
                        schema.cardinality(*attribute)
                    )));
                }
                children.iter().try_for_each(|c| c.validate(schema, classes))
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { children, .. } => {
                1 + children.iter().map(TreeNode::depth).max().unwrap_or(0)
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { children, .. } => children.iter().map(TreeNode::leaf_count).sum(),
        }
    }

    /// Attribute tested at the root, if the tree is not a single leaf.
    pub fn root_attribute(&self) -> Option<usize> {
        match self {
            TreeNode::Leaf { .. } => None,
            TreeNode::Split { attribute, .. } => Some(*attribute),
        }
    }
}

/// Stored instances classified by Hamming-distance k-nearest-neighbour vote.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSet {
    pub k: usize,
    pub instances: Vec<LabeledExample>,
}

impl InstanceSet {
    fn classify(&self, v: &AttributeVector) -> ClassLabel {
        let mut scored: Vec<(usize, usize)> = self
            .instances
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let d = e.vector.iter().zip(v.iter()).filter(|(a, b)| a != b).count();
                (d, i)
            })
            .collect();
        let k = self.k.min(scored.len());
        // (distance, index) keys are unique, so the k smallest are well defined
        if k < scored.len() {
            scored.select_nth_unstable(k - 1);
        }
        let nearest = &scored[..k];
        let n_votes = nearest
            .iter()
            .map(|&(_, i)| self.instances[i].label.0 + 1)
            .max()
            .unwrap_or(1);
        let mut votes = vec![0usize; n_votes];
        for &(_, i) in nearest {
            votes[self.instances[i].label.0] += 1;
        }
        argmax_lowest(&votes)
    }
}

/// Index of the largest count, lowest index on ties.
pub(crate) fn argmax_lowest(counts: &[usize]) -> ClassLabel {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    ClassLabel(best)
}

fn check_label(label: ClassLabel, classes: Option<&ClassSet>) -> Result<()> {
    match classes {
        Some(classes) if !classes.contains(label) => Err(Error::input(format!(
            "concept emits class {label}, class set has {} classes",
            classes.len()
        ))),
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Concept {
    Constant { leaf: ClassLabel },
    Tree(TreeNode),
    Instances(InstanceSet),
    Formula { formula: BooleanFormula },
    Complement { complement: Box<Concept> },
}

impl Concept {
    pub fn constant(label: ClassLabel) -> Self {
        Concept::Constant { leaf: label }
    }

    pub fn formula(formula: BooleanFormula) -> Self {
        Concept::Formula { formula }
    }

    /// A tree that splits once on `attribute` and maps level `i` to `labels[i]`.
    pub fn attribute_lookup(attribute: usize, labels: &[ClassLabel]) -> Self {
        Concept::Tree(TreeNode::Split {
            attribute,
            children: labels.iter().map(|&leaf| TreeNode::Leaf { leaf }).collect(),
        })
    }

    /// The concept that swaps the two labels of a binary class set.
    pub fn complement(&self) -> Self {
        match self {
            Concept::Complement { complement } => (**complement).clone(),
            other => Concept::Complement {
                complement: Box::new(other.clone()),
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Concept::Constant { .. } => "constant",
            Concept::Tree(_) => "tree",
            Concept::Instances(_) => "instance-set",
            Concept::Formula { .. } => "formula",
            Concept::Complement { .. } => "complement",
        }
    }

    pub fn classify(&self, v: &AttributeVector) -> ClassLabel {
        match self {
            Concept::Constant { leaf } => *leaf,
            Concept::Tree(t) => t.classify(v),
            Concept::Instances(s) => s.classify(v),
            Concept::Formula { formula } => ClassLabel(usize::from(formula.eval_levels(v))),
            Concept::Complement { complement } => ClassLabel(1 - complement.classify(v).0.min(1)),
        }
    }

    /// Check that the concept is total over `schema` and only emits labels in `classes`.
    pub fn validate(&self, schema: &AttributeSchema, classes: &ClassSet) -> Result<()> {
        self.check(schema, Some(classes))
    }

    /// Check totality over `schema` only.
    pub fn validate_schema(&self, schema: &AttributeSchema) -> Result<()> {
        self.check(schema, None)
    }

    fn check(&self, schema: &AttributeSchema, classes: Option<&ClassSet>) -> Result<()> {
        match self {
            Concept::Constant { leaf } => check_label(*leaf, classes),
            Concept::Tree(t) => t.validate(schema, classes),
            Concept::Instances(s) => {
                if s.k == 0 || s.instances.is_empty() {
                    return Err(Error::input("instance-based concept needs k >= 1 and stored instances"));
                }
                for e in &s.instances {
                    schema.check(&e.vector)?;
                    check_label(e.label, classes)?;
                }
                Ok(())
            }
            Concept::Formula { formula } => {
                if !schema.is_boolean() || classes.is_some_and(|c| c.len() != 2) {
                    return Err(Error::input(
                        "formula concepts need boolean attributes and two classes",
                    ));
                }
                match formula.max_var() {
                    Some(i) if i >= schema.len() => Err(Error::input(format!(
                        "formula uses variable {i}, schema has {} attributes",
                        schema.len()
                    ))),
                    _ => Ok(()),
                }
            }
            Concept::Complement { complement } => {
                if classes.is_some_and(|c| c.len() != 2) {
                    return Err(Error::input("complement is only defined for two classes"));
                }
                complement.check(schema, classes)
            }
        }
    }

    /// Largest attribute index the concept reads, if any.
    pub fn max_attribute(&self) -> Option<usize> {
        fn tree_max(t: &TreeNode) -> Option<usize> {
            match t {
                TreeNode::Leaf { .. } => None,
                TreeNode::Split {
                    attribute,
                    children,
                } => children.iter().filter_map(tree_max).chain([*attribute]).max(),
            }
        }
        match self {
            Concept::Constant { .. } => None,
            Concept::Tree(t) => tree_max(t),
            Concept::Instances(s) => s.instances.first().and_then(|e| e.vector.len().checked_sub(1)),
            Concept::Formula { formula } => formula.max_var(),
            Concept::Complement { complement } => complement.max_attribute(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parse a concept document: JSON, or a bare formula s-expression.
    pub fn from_text(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('(') || trimmed.starts_with("true") || trimmed.starts_with("false") {
            return Ok(Concept::formula(text.trim().parse()?));
        }
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
    }
}
