//! Attribute spaces and class sets.
//!
//! The attribute space A is a finite product of finite categorical
//! domains. Boolean attributes are the special case with levels `0`/`1`.

use std::collections::HashSet;
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub levels: Vec<String>,
}

impl Attribute {
    pub fn new(name: impl Into<String>, levels: Vec<String>) -> Self {
        Attribute {
            name: name.into(),
            levels,
        }
    }

    pub fn boolean(name: impl Into<String>) -> Self {
        Attribute::new(name, vec!["0".into(), "1".into()])
    }

    pub fn cardinality(&self) -> usize {
        self.levels.len()
    }

    pub fn level_index(&self, level: &str) -> Option<usize> {
        self.levels.iter().position(|l| l == level)
    }
}

/// Ordered list of named categorical attributes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Attribute>", into = "Vec<Attribute>")]
pub struct AttributeSchema {
    attributes: Vec<Attribute>,
}

impl AttributeSchema {
    pub fn new(attributes: Vec<Attribute>) -> Result<Self> {
        if attributes.is_empty() {
            return Err(Error::input("schema must have at least one attribute"));
        }
        let mut names = HashSet::new();
        for a in &attributes {
            if !names.insert(a.name.as_str()) {
                return Err(Error::input(format!("duplicate attribute name `{}`", a.name)));
            }
            if a.cardinality() < 2 {
                return Err(Error::input(format!(
                    "attribute `{}` needs at least 2 levels, has {}",
                    a.name,
                    a.cardinality()
                )));
            }
            let mut levels = HashSet::new();
            if let Some(dup) = a.levels.iter().find(|l| !levels.insert(l.as_str())) {
                return Err(Error::input(format!(
                    "attribute `{}` repeats level `{dup}`",
                    a.name
                )));
            }
        }
        Ok(AttributeSchema { attributes })
    }

    /// `s` boolean attributes named `x1..xs`.
    pub fn boolean(s: usize) -> Result<Self> {
        Self::new((1..=s).map(|i| Attribute::boolean(format!("x{i}"))).collect())
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn cardinality(&self, attribute: usize) -> usize {
        self.attributes[attribute].cardinality()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.attributes.iter().map(Attribute::cardinality).collect()
    }

    pub fn is_boolean(&self) -> bool {
        self.attributes.iter().all(|a| a.cardinality() == 2)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    /// |A|, or `None` when the product overflows 128 bits.
    pub fn space_size(&self) -> Option<u128> {
        self.attributes
            .iter()
            .try_fold(1u128, |acc, a| acc.checked_mul(a.cardinality() as u128))
    }

    pub fn conforms(&self, v: &AttributeVector) -> bool {
        v.len() == self.len()
            && v.iter()
                .zip(&self.attributes)
                .all(|(&x, a)| (x as usize) < a.cardinality())
    }

    pub fn check(&self, v: &AttributeVector) -> Result<()> {
        if self.conforms(v) {
            Ok(())
        } else {
            Err(Error::input(format!("vector {v} does not conform to the schema")))
        }
    }
}

impl TryFrom<Vec<Attribute>> for AttributeSchema {
    type Error = Error;

    fn try_from(value: Vec<Attribute>) -> Result<Self> {
        AttributeSchema::new(value)
    }
}

impl From<AttributeSchema> for Vec<Attribute> {
    fn from(value: AttributeSchema) -> Self {
        value.attributes
    }
}

/// Level indices, one per schema attribute.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AttributeVector(Vec<u32>);

impl AttributeVector {
    pub fn new(values: Vec<u32>) -> Self {
        AttributeVector(values)
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        AttributeVector(bits.iter().map(|&b| u32::from(b)).collect())
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }
}

impl Deref for AttributeVector {
    type Target = [u32];

    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for AttributeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassLabel(pub usize);

impl ClassLabel {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// The finite, ordered class set C.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct ClassSet {
    names: Vec<String>,
}

impl ClassSet {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.len() < 2 {
            return Err(Error::input("class set needs at least 2 classes"));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::input(format!("duplicate class `{dup}`")));
        }
        Ok(ClassSet { names })
    }

    /// Classes `0` and `1`.
    pub fn binary() -> Self {
        ClassSet {
            names: vec!["0".into(), "1".into()],
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, label: ClassLabel) -> &str {
        &self.names[label.0]
    }

    pub fn label_of(&self, name: &str) -> Option<ClassLabel> {
        self.names.iter().position(|n| n == name).map(ClassLabel)
    }

    pub fn contains(&self, label: ClassLabel) -> bool {
        label.0 < self.names.len()
    }

    pub fn labels(&self) -> impl Iterator<Item = ClassLabel> {
        (0..self.names.len()).map(ClassLabel)
    }
}

impl TryFrom<Vec<String>> for ClassSet {
    type Error = Error;

    fn try_from(value: Vec<String>) -> Result<Self> {
        ClassSet::new(value)
    }
}

impl From<ClassSet> for Vec<String> {
    fn from(value: ClassSet) -> Self {
        value.names
    }
}

/// Iterate every vector of the space in lexicographic (mixed-radix) order.
pub fn enumerate_space(cardinalities: &[usize]) -> impl Iterator<Item = AttributeVector> + '_ {
    let mut current: Option<Vec<u32>> = Some(vec![0; cardinalities.len()]);
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let next = current.as_mut().unwrap();
        // increment the last position first
        let mut pos = cardinalities.len();
        loop {
            if pos == 0 {
                current = None;
                break;
            }
            pos -= 1;
            next[pos] += 1;
            if (next[pos] as usize) < cardinalities[pos] {
                break;
            }
            next[pos] = 0;
        }
        Some(AttributeVector(out))
    })
}
