//! CSV datasets and sidecar schema files.
//!
//! A dataset file has a header of attribute names followed by `class`, and
//! one row of level names per example. A sidecar schema lists one
//! attribute per line as `name:level1,level2,...`; an optional line
//! `class:c1,c2,...` fixes the class set. Blank lines and lines starting
//! with `#` are ignored.
//!
//! Without a sidecar the schema is inferred from the data: levels are the
//! sorted distinct values, and any column whose values lie in `{0, 1}` is
//! treated as boolean.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::dataset::{Dataset, LabeledExample};
use crate::error::{Error, Result};
use crate::schema::{Attribute, AttributeSchema, AttributeVector, ClassLabel, ClassSet};

pub const CLASS_COLUMN: &str = "class";

/// Contents of a sidecar schema file.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaSpec {
    pub schema: AttributeSchema,
    pub classes: Option<ClassSet>,
}

impl SchemaSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut attributes = Vec::new();
        let mut classes = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = i + 1;
            let (name, levels) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, "expected `name:level1,level2,...`"))?;
            let name = name.trim();
            if name.is_empty() {
                return Err(Error::parse(lineno, "empty attribute name"));
            }
            let levels: Vec<String> = levels.split(',').map(|l| l.trim().to_string()).collect();
            if levels.iter().any(String::is_empty) {
                return Err(Error::parse(lineno, "empty level name"));
            }
            if name == CLASS_COLUMN {
                if classes.is_some() {
                    return Err(Error::parse(lineno, "class set declared twice"));
                }
                classes = Some(ClassSet::new(levels).map_err(|e| reparse(lineno, e))?);
            } else {
                attributes.push(Attribute::new(name, levels));
            }
        }
        let schema = AttributeSchema::new(attributes).map_err(|e| reparse(0, e))?;
        Ok(SchemaSpec { schema, classes })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for a in self.schema.attributes() {
            let _ = writeln!(out, "{}:{}", a.name, a.levels.join(","));
        }
        if let Some(c) = &self.classes {
            let _ = writeln!(out, "{CLASS_COLUMN}:{}", c.names().join(","));
        }
        out
    }

    pub fn of(data: &Dataset) -> Self {
        SchemaSpec {
            schema: (**data.schema()).clone(),
            classes: Some((**data.classes()).clone()),
        }
    }
}

fn reparse(line: usize, e: Error) -> Error {
    match e {
        Error::Input(m) => Error::parse(line, m),
        other => other,
    }
}

pub fn read_schema(path: &Path) -> Result<SchemaSpec> {
    SchemaSpec::parse(&std::fs::read_to_string(path)?)
}

pub fn write_schema(data: &Dataset, path: &Path) -> Result<()> {
    std::fs::write(path, SchemaSpec::of(data).to_text())?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::parse(line, format!("{other:?}")),
    }
}

fn infer_levels(values: BTreeSet<&str>) -> Option<Vec<String>> {
    if values.iter().all(|v| *v == "0" || *v == "1") {
        return Some(vec!["0".into(), "1".into()]);
    }
    (values.len() >= 2).then(|| values.into_iter().map(String::from).collect())
}

/// Parse a CSV dataset, using `spec` for the schema when given.
pub fn read_csv<R: Read>(reader: R, spec: Option<&SchemaSpec>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(r) => r.map_err(csv_error)?,
        None => return Err(Error::parse(1, "empty file, expected a header")),
    };
    let header: Vec<String> = header.iter().map(String::from).collect();
    if header.last().map(String::as_str) != Some(CLASS_COLUMN) {
        return Err(Error::parse(1, format!("last header column must be `{CLASS_COLUMN}`")));
    }
    let names = &header[..header.len() - 1];
    if names.is_empty() {
        return Err(Error::parse(1, "no attribute columns"));
    }

    let mut rows: Vec<(usize, csv::StringRecord)> = Vec::new();
    for r in records {
        let r = r.map_err(csv_error)?;
        let line = r.position().map_or(0, |p| p.line() as usize);
        if r.len() == 1 && r.get(0) == Some("") {
            continue;
        }
        if r.len() != header.len() {
            return Err(Error::parse(
                line,
                format!("expected {} fields, found {}", header.len(), r.len()),
            ));
        }
        rows.push((line, r));
    }

    let schema = match spec {
        Some(s) => {
            let declared: Vec<&str> = s.schema.attributes().iter().map(|a| a.name.as_str()).collect();
            if declared != names.iter().map(String::as_str).collect::<Vec<_>>() {
                return Err(Error::parse(1, "header does not match the declared schema"));
            }
            s.schema.clone()
        }
        None => {
            let mut attributes = Vec::with_capacity(names.len());
            for (j, name) in names.iter().enumerate() {
                let observed: BTreeSet<&str> = rows.iter().map(|(_, r)| &r[j]).collect();
                let levels = infer_levels(observed).ok_or_else(|| {
                    Error::parse(1, format!("column `{name}` has a single level; supply a schema file"))
                })?;
                attributes.push(Attribute::new(name.clone(), levels));
            }
            AttributeSchema::new(attributes).map_err(|e| reparse(1, e))?
        }
    };
    let classes = match spec.and_then(|s| s.classes.clone()) {
        Some(c) => c,
        None => {
            let observed: BTreeSet<&str> = rows.iter().map(|(_, r)| &r[names.len()]).collect();
            let levels = infer_levels(observed)
                .ok_or_else(|| Error::parse(1, "fewer than 2 classes observed; supply a schema file"))?;
            ClassSet::new(levels).map_err(|e| reparse(1, e))?
        }
    };

    let mut examples = Vec::with_capacity(rows.len());
    for (line, r) in &rows {
        let mut values = Vec::with_capacity(names.len());
        for (j, a) in schema.attributes().iter().enumerate() {
            let idx = a.level_index(&r[j]).ok_or_else(|| {
                Error::parse(*line, format!("unknown level `{}` for attribute `{}`", &r[j], a.name))
            })?;
            values.push(idx as u32);
        }
        let class = &r[names.len()];
        let label = classes
            .label_of(class)
            .ok_or_else(|| Error::parse(*line, format!("unknown class `{class}`")))?;
        examples.push(LabeledExample::new(AttributeVector::new(values), label));
    }
    if examples.is_empty() {
        return Err(Error::input("dataset has no rows"));
    }
    Dataset::new(Arc::new(schema), Arc::new(classes), examples)
}

pub fn read_dataset(path: &Path, schema: Option<&Path>) -> Result<Dataset> {
    let spec = schema.map(read_schema).transpose()?;
    read_csv(File::open(path)?, spec.as_ref())
}

pub fn write_csv<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let schema = data.schema();
    let mut header: Vec<&str> = schema.attributes().iter().map(|a| a.name.as_str()).collect();
    header.push(CLASS_COLUMN);
    w.write_record(&header).map_err(csv_error)?;
    for e in data.examples() {
        let mut row: Vec<&str> = schema
            .attributes()
            .iter()
            .zip(e.vector.iter())
            .map(|(a, &v)| a.levels[v as usize].as_str())
            .collect();
        row.push(data.classes().name(e.label));
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dataset(data: &Dataset, path: &Path) -> Result<()> {
    write_csv(data, File::create(path)?)
}

/// Label of `name` in `classes`, for callers holding class names.
pub fn class_label(classes: &ClassSet, name: &str) -> Result<ClassLabel> {
    classes
        .label_of(name)
        .ok_or_else(|| Error::input(format!("unknown class `{name}`")))
}
