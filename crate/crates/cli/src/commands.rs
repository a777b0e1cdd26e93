use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use stabilimeter::bias::{measure_bias_strength, BiasSweepSettings, MixtureParams, Orientation, PreferenceSettings};
use stabilimeter::distribution::DEFAULT_ENUMERATION_LIMIT;
use stabilimeter::io::{read_dataset, read_schema, write_csv, write_dataset};
use stabilimeter::stability::{FailurePolicy, StabilityOptions};
use stabilimeter::{
    estimate_agreement, estimate_stability_accuracy, exact_agreement_with_limit, make_correlated_scenario,
    make_drift_sequence, monitor_drift, sample_dataset, AccuracyChooser, AttributeDistribution, AttributeSchema,
    BooleanFormula, ClassLabel, ClassSet, Concept, Dataset, DriftAlarm, DriftSequence, Execution, FixedLearner,
    KnnLearner, LabeledDistribution, Learner, MajorityLearner, MemorizingLearner, SeedSpec, TreeLearner, TreeParams,
};

use crate::args::*;
use crate::error::{CliError, CliResult};

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Agreement(a) => agreement(a),
        Command::Stability(a) => stability(a),
        Command::BiasStrength(a) => bias_strength(a),
        Command::Drift(a) => drift(a),
        Command::Demo(DemoCommand::Correlated(a)) => demo_correlated(a),
        Command::Demo(DemoCommand::Drift(a)) => demo_drift(a),
    }
}

impl RunArgs {
    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn emit(&self, text: &str) -> CliResult<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn emit_json<T: Serialize>(&self, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(stabilimeter::Error::from)?;
        text.push('\n');
        self.emit(&text)
    }
}

/// Build a learner from its name and parameter flags.
pub fn build_learner(args: &LearnerArgs, name: &str, candidates: Option<&[Concept]>) -> CliResult<Box<dyn Learner>> {
    if let Some(base) = name.strip_prefix("memorizing:") {
        let base = build_learner(args, base, candidates)?;
        return Ok(Box::new(MemorizingLearner::new(base, args.epsilon)?));
    }
    Ok(match name {
        "tree" => {
            let params = TreeParams {
                min_gain_ratio: args.min_gain_ratio,
                max_depth: args.max_depth,
                min_leaf: args.min_leaf,
            };
            params.validate()?;
            Box::new(TreeLearner::new(params))
        }
        "knn" => Box::new(KnnLearner::new(args.k)),
        "majority" => Box::new(MajorityLearner),
        "constant" => Box::new(FixedLearner::new(Concept::constant(ClassLabel(args.constant_class)))),
        "chooser" => match candidates {
            Some(c) => Box::new(AccuracyChooser::new(c.to_vec())?),
            None => return Err(CliError::Usage("the chooser learner is only available to bias-strength".into())),
        },
        other => return Err(CliError::Usage(format!("unknown learner `{other}`"))),
    })
}

/// A concept argument: an existing file, or inline concept text.
pub fn load_concept(arg: &str) -> CliResult<Concept> {
    let path = Path::new(arg);
    let text = if path.is_file() {
        std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?
    } else {
        arg.to_string()
    };
    Ok(Concept::from_text(&text)?)
}

/// Attach the file name to I/O and parse failures.
fn with_path(path: &Path, e: stabilimeter::Error) -> CliError {
    match e {
        stabilimeter::Error::Io(source) => CliError::io(path, source),
        stabilimeter::Error::Parse { line, message } => stabilimeter::Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        }
        .into(),
        other => other.into(),
    }
}

struct Space {
    schema: Arc<AttributeSchema>,
    classes: Arc<ClassSet>,
    data: Option<Dataset>,
}

impl Space {
    fn resolve(space: &SpaceArgs, data: Option<&Path>, concepts: &[&Concept]) -> CliResult<Space> {
        if let Some(path) = data {
            let d = read_dataset(path, space.schema.as_deref()).map_err(|e| with_path(path, e))?;
            return Ok(Space {
                schema: Arc::clone(d.schema()),
                classes: Arc::clone(d.classes()),
                data: Some(d),
            });
        }
        if let Some(path) = &space.schema {
            let spec = read_schema(path).map_err(|e| with_path(path, e))?;
            return Ok(Space {
                schema: Arc::new(spec.schema),
                classes: Arc::new(spec.classes.unwrap_or_else(ClassSet::binary)),
                data: None,
            });
        }
        let s = match space.attributes {
            Some(s) => s,
            None => concepts
                .iter()
                .filter_map(|c| c.max_attribute())
                .max()
                .map_or(1, |m| m + 1),
        };
        Ok(Space {
            schema: Arc::new(AttributeSchema::boolean(s)?),
            classes: Arc::new(ClassSet::binary()),
            data: None,
        })
    }

    fn distribution(&self, kind: DistKind) -> CliResult<AttributeDistribution> {
        match kind {
            DistKind::Uniform => Ok(AttributeDistribution::uniform(Arc::clone(&self.schema))),
            DistKind::Empirical => match &self.data {
                Some(d) => Ok(AttributeDistribution::empirical(d)?),
                None => Err(CliError::Usage("--dist empirical needs --data".into())),
            },
        }
    }
}

#[derive(Serialize)]
struct AgreementOutput {
    value: f64,
    agreeing: u64,
    sample_count: u64,
    worst_case_std: f64,
    /// Exact agreement as a fraction, when the space is small enough to enumerate.
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
}

fn agreement(a: AgreementArgs) -> CliResult<()> {
    let f1 = load_concept(&a.f1)?;
    let f2 = load_concept(&a.f2)?;
    let space = Space::resolve(&a.space, a.data.as_deref(), &[&f1, &f2])?;
    f1.validate(&space.schema, &space.classes)?;
    f2.validate(&space.schema, &space.classes)?;
    let dist = space.distribution(a.space.dist)?;
    let est = estimate_agreement(&f1, &f2, &dist, a.n, SeedSpec::new(a.run.seed), a.run.exec())?;
    let exact = match exact_agreement_with_limit(&f1, &f2, &dist, DEFAULT_ENUMERATION_LIMIT) {
        Ok(r) => Some(format!("{}/{}", r.numer(), r.denom())),
        Err(stabilimeter::Error::Capacity(_)) if !a.exact => None,
        Err(e) => return Err(e.into()),
    };
    match a.run.format {
        Format::Json => a.run.emit_json(&AgreementOutput {
            value: est.value,
            agreeing: est.agreeing,
            sample_count: est.sample_count,
            worst_case_std: est.worst_case_std,
            exact,
        }),
        Format::Csv => a.run.emit(&format!(
            "value,agreeing,sample_count,worst_case_std\n{},{},{},{}\n",
            est.value, est.agreeing, est.sample_count, est.worst_case_std
        )),
    }
}

fn stability(a: StabilityArgs) -> CliResult<()> {
    let space = Space::resolve(&a.space, Some(&a.data), &[])?;
    let data = space.data.as_ref().expect("data given");
    let dist = space.distribution(a.space.dist)?;
    let learner = build_learner(&a.learner, &a.learner.learner, None)?;
    let options = StabilityOptions {
        m: a.m,
        n: a.n,
        exec: a.run.exec(),
        on_failure: if a.skip_failures {
            FailurePolicy::SkipIteration
        } else {
            FailurePolicy::Abort
        },
    };
    let report = estimate_stability_accuracy(learner.as_ref(), data, &dist, options, SeedSpec::new(a.run.seed))?;
    match a.run.format {
        Format::Json => a.run.emit_json(&report),
        Format::Csv => a.run.emit(&report.to_csv()),
    }
}

fn bias_strength(a: BiasArgs) -> CliResult<()> {
    let f1 = load_concept(&a.f1)?;
    let f2 = load_concept(&a.f2)?;
    let space = Space::resolve(&a.space, a.data.as_deref(), &[&f1, &f2])?;
    let dist = space.distribution(a.space.dist)?;
    let learner = build_learner(&a.learner, &a.learner.learner, Some(&[f1.clone(), f2.clone()]))?;
    let template = MixtureParams::new(dist.clone(), 0.0, f1, f2, Arc::clone(&space.classes))?;
    let settings = BiasSweepSettings {
        grid_step: a.p_step,
        orientation: if a.swap_roles {
            Orientation::F1Weighted
        } else {
            Orientation::F2Weighted
        },
        preference: PreferenceSettings {
            train_size: a.train_size,
            trials: a.trials,
            n_agree: a.n,
            exec: a.run.exec(),
        },
    };
    let result = measure_bias_strength(learner.as_ref(), &template, &dist, settings, SeedSpec::new(a.run.seed))?;
    match a.run.format {
        Format::Json => a.run.emit_json(&result),
        Format::Csv => a.run.emit(&result.to_csv()),
    }
}

/// CSV files of `dir` in file-name order.
fn batch_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == "csv") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

#[derive(Serialize)]
struct DriftOutput {
    batches: usize,
    /// Pairs whose agreement fell below the threshold.
    alarms: Vec<(usize, usize)>,
    pairs: Vec<DriftAlarm>,
}

fn drift(a: DriftArgs) -> CliResult<()> {
    let files = batch_files(&a.data)?;
    if files.len() < 2 {
        return Err(stabilimeter::Error::Input(format!(
            "{} holds {} batch files, need at least 2",
            a.data.display(),
            files.len()
        ))
        .into());
    }
    let spec = match &a.space.schema {
        Some(p) => Some(read_schema(p).map_err(|e| with_path(p, e))?),
        None => None,
    };
    // without a sidecar every batch must infer the same schema
    let mut batches = Vec::with_capacity(files.len());
    for f in &files {
        let file = std::fs::File::open(f).map_err(|e| CliError::io(f, e))?;
        batches.push(stabilimeter::io::read_csv(file, spec.as_ref()).map_err(|e| with_path(f, e))?);
    }
    let first = &batches[0];
    let dist = match a.space.dist {
        DistKind::Uniform => AttributeDistribution::uniform(Arc::clone(first.schema())),
        DistKind::Empirical => AttributeDistribution::empirical(first)?,
    };
    let learner = build_learner(&a.learner, &a.learner.learner, None)?;
    let pairs = monitor_drift(learner.as_ref(), &batches, &dist, a.n, a.threshold, SeedSpec::new(a.run.seed), a.run.exec())?;
    match a.run.format {
        Format::Json => a.run.emit_json(&DriftOutput {
            batches: batches.len(),
            alarms: pairs.iter().filter(|p| p.fired).map(|p| p.batch_pair_index).collect(),
            pairs,
        }),
        Format::Csv => {
            let mut out = String::from("from,to,agreement,fired\n");
            for p in &pairs {
                out.push_str(&format!("{},{},{},{}\n", p.batch_pair_index.0, p.batch_pair_index.1, p.agreement, p.fired));
            }
            a.run.emit(&out)
        }
    }
}

fn demo_correlated(a: CorrelatedArgs) -> CliResult<()> {
    let dist = make_correlated_scenario(a.s, a.noise_rate)?;
    let data = sample_dataset(&dist, a.train_size, SeedSpec::new(a.seed))?;
    match &a.out {
        Some(path) => Ok(write_dataset(&data, path)?),
        None => Ok(write_csv(&data, std::io::stdout().lock())?),
    }
}

fn demo_drift(a: DemoDriftArgs) -> CliResult<()> {
    let schema = Arc::new(AttributeSchema::boolean(a.s)?);
    let classes = Arc::new(ClassSet::binary());
    let uniform = AttributeDistribution::uniform(schema);
    let target = Concept::formula(BooleanFormula::var(0));
    let after = if a.no_drift { target.clone() } else { target.complement() };
    let pre = LabeledDistribution::concept_noise(target, uniform.clone(), a.flip_rate, Arc::clone(&classes))?;
    let post = LabeledDistribution::concept_noise(after, uniform, a.flip_rate, classes)?;
    let seq = DriftSequence {
        pre_drift: pre,
        post_drift: post,
        drift_at: a.drift_at,
        batch_count: a.batch_count,
        batch_size: a.batch_size,
    };
    let batches = make_drift_sequence(&seq, SeedSpec::new(a.seed))?;
    std::fs::create_dir_all(&a.out).map_err(|e| CliError::io(&a.out, e))?;
    for (k, b) in batches.iter().enumerate() {
        write_dataset(b, &a.out.join(format!("batch_{k:03}.csv")))?;
    }
    Ok(())
}
