//! Preferential bias measurement.
//!
//! Training sets are drawn from a two-concept mixture: each vector comes
//! from a base distribution D'_A and is labeled by `f1` with probability
//! `1 - p` and by `f2` with probability `p`. A learner *prefers* `f1` at
//! `p` when the concepts it learns agree more with `f1` than with `f2` on
//! average over independent training sets. Sweeping `p` over a grid shows
//! how much evidence against `f1` the learner needs before it switches;
//! that switch point is the strength of its bias toward `f1`.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agreement::count_agreements;
use crate::concept::Concept;
use crate::dataset::{Dataset, LabeledExample};
use crate::distribution::{sample_dataset, AttributeDistribution, LabeledDistribution};
use crate::error::{Error, Result};
use crate::learners::{learner_failure, Learner};
use crate::schema::{ClassLabel, ClassSet};
use crate::seed::{Execution, SeedSpec};

/// Significance level of the per-grid-point sign test.
pub const SIGN_TEST_ALPHA: f64 = 0.05;

pub const DEFAULT_GRID_STEP: f64 = 0.05;
pub const DEFAULT_TRIALS: usize = 30;
pub const DEFAULT_TRAIN_SIZE: usize = 100;

/// 1 if the labels are equal, 0 otherwise.
pub fn delta(c1: ClassLabel, c2: ClassLabel) -> u8 {
    u8::from(c1 == c2)
}

#[derive(Debug, Clone)]
pub struct MixtureParams {
    pub base: AttributeDistribution,
    /// Probability that a label comes from `f2`.
    pub p: f64,
    pub f1: Concept,
    pub f2: Concept,
    pub classes: Arc<ClassSet>,
}

impl MixtureParams {
    pub fn new(
        base: AttributeDistribution,
        p: f64,
        f1: Concept,
        f2: Concept,
        classes: Arc<ClassSet>,
    ) -> Result<Self> {
        let params = MixtureParams {
            base,
            p,
            f1,
            f2,
            classes,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::parameter(format!("p must lie in [0, 1], got {}", self.p)));
        }
        let schema = self.base.schema();
        self.f1.validate(&schema, &self.classes)?;
        self.f2.validate(&schema, &self.classes)
    }

    pub(crate) fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> LabeledExample {
        let vector = self.base.sample(rng);
        let label = if rng.gen_bool(self.p) {
            self.f2.classify(&vector)
        } else {
            self.f1.classify(&vector)
        };
        LabeledExample::new(vector, label)
    }

    fn with_p(&self, p: f64) -> Self {
        MixtureParams { p, ..self.clone() }
    }
}

/// `size` iid draws from the mixture.
pub fn sample_mixture(params: &MixtureParams, size: usize, seed: SeedSpec) -> Result<Dataset> {
    sample_dataset(&LabeledDistribution::Mixture(params.clone()), size, seed)
}

/// Which concept the mixture weight `p` is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// Labels come from `f2` with probability `p`; preference for `f1`
    /// is expected to fade as `p` grows.
    #[default]
    F2Weighted,
    /// Labels come from `f1` with probability `p`; preference for `f1`
    /// is expected to grow with `p`.
    F1Weighted,
}

#[derive(Debug, Clone, Copy)]
pub struct PreferenceSettings {
    pub train_size: usize,
    pub trials: usize,
    pub n_agree: u64,
    pub exec: Execution,
}

impl Default for PreferenceSettings {
    fn default() -> Self {
        PreferenceSettings {
            train_size: DEFAULT_TRAIN_SIZE,
            trials: DEFAULT_TRIALS,
            n_agree: crate::stability::DEFAULT_N,
            exec: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialAgreement {
    pub agree_f1: f64,
    pub agree_f2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceResult {
    pub mean_agree_f1: f64,
    pub mean_agree_f2: f64,
    pub trials: usize,
    pub per_trial: Vec<TrialAgreement>,
    /// `mean_agree_f1 > mean_agree_f2`.
    pub prefers_f1: bool,
    /// Trials where the learned concept agreed more with `f1` / with `f2`.
    pub wins_f1: usize,
    pub wins_f2: usize,
    /// Two-sided sign-test p-value of the paired differences.
    pub sign_test_p_value: f64,
    /// Whether the sign test rejects "no preference" at [`SIGN_TEST_ALPHA`].
    pub decided: bool,
}

/// Two-sided sign test: probability under Binomial(wins + losses, 1/2) of a
/// split at least as lopsided as the one observed.
pub fn sign_test_p_value(wins: usize, losses: usize) -> f64 {
    let n = wins + losses;
    if n == 0 {
        return 1.0;
    }
    let k = wins.max(losses);
    // P(X >= k), accumulated in log space to survive large n
    let ln_half_n = n as f64 * 0.5f64.ln();
    let mut ln_choose = 0.0; // ln C(n, 0)
    let mut tail = 0.0;
    for i in 0..=n {
        if i > 0 {
            ln_choose += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        if i >= k {
            tail += (ln_choose + ln_half_n).exp();
        }
    }
    (2.0 * tail).min(1.0)
}

/// Estimate whether `learner` prefers `params.f1` to `params.f2` on
/// training sets drawn from the mixture.
pub fn measure_preference(
    learner: &dyn Learner,
    params: &MixtureParams,
    agree_dist: &AttributeDistribution,
    settings: PreferenceSettings,
    seed: SeedSpec,
) -> Result<PreferenceResult> {
    if settings.trials == 0 {
        return Err(Error::parameter("trials must be at least 1"));
    }
    if settings.n_agree == 0 {
        return Err(Error::parameter("n_agree must be at least 1"));
    }
    params.validate()?;
    if *agree_dist.schema() != *params.base.schema() {
        return Err(Error::input("agreement distribution and mixture use different schemas"));
    }
    let n = settings.n_agree;
    let outcomes = settings.exec.map_indices(settings.trials, |t| -> Result<TrialAgreement> {
        let t = t as u64;
        let data = sample_mixture(params, settings.train_size, seed.derive("mixture-sample", t))?;
        let learned = learner
            .train(&data, seed.derive("mixture-train", t))
            .map_err(|e| learner_failure(learner, e))?;
        learned
            .validate(data.schema(), data.classes())
            .map_err(|e| learner_failure(learner, e))?;
        // one stream for both, so f1 == f2 gives identical estimates
        let agree_seed = seed.derive("preference-agreement", t);
        let a1 = count_agreements(&params.f1, &learned, agree_dist, n, agree_seed, Execution::Sequential);
        let a2 = count_agreements(&params.f2, &learned, agree_dist, n, agree_seed, Execution::Sequential);
        Ok(TrialAgreement {
            agree_f1: a1 as f64 / n as f64,
            agree_f2: a2 as f64 / n as f64,
        })
    });
    let per_trial = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let trials = per_trial.len();
    let mean_agree_f1 = per_trial.iter().map(|t| t.agree_f1).sum::<f64>() / trials as f64;
    let mean_agree_f2 = per_trial.iter().map(|t| t.agree_f2).sum::<f64>() / trials as f64;
    let wins_f1 = per_trial.iter().filter(|t| t.agree_f1 > t.agree_f2).count();
    let wins_f2 = per_trial.iter().filter(|t| t.agree_f1 < t.agree_f2).count();
    let sign_test_p_value = sign_test_p_value(wins_f1, wins_f2);
    Ok(PreferenceResult {
        mean_agree_f1,
        mean_agree_f2,
        trials,
        per_trial,
        prefers_f1: mean_agree_f1 > mean_agree_f2,
        wins_f1,
        wins_f2,
        sign_test_p_value,
        decided: sign_test_p_value < SIGN_TEST_ALPHA,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct BiasSweepSettings {
    pub grid_step: f64,
    pub orientation: Orientation,
    pub preference: PreferenceSettings,
}

impl Default for BiasSweepSettings {
    fn default() -> Self {
        BiasSweepSettings {
            grid_step: DEFAULT_GRID_STEP,
            orientation: Orientation::F2Weighted,
            preference: PreferenceSettings::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p: f64,
    pub mean_agree_f1: f64,
    pub mean_agree_f2: f64,
    pub decided: bool,
    pub prefers_f1: bool,
}

impl CurvePoint {
    /// +1 decided for f1, -1 decided for f2, 0 undecided.
    fn verdict(&self) -> i8 {
        match (self.decided, self.mean_agree_f1.partial_cmp(&self.mean_agree_f2)) {
            (true, Some(std::cmp::Ordering::Greater)) => 1,
            (true, Some(std::cmp::Ordering::Less)) => -1,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasStrengthResult {
    pub curve: Vec<CurvePoint>,
    /// Grid point where the decided preference for `f1` ends: the largest
    /// such `p` for [`Orientation::F2Weighted`], the smallest for
    /// [`Orientation::F1Weighted`]. `None` when no point is decided for
    /// `f1` or the curve is indeterminate.
    pub flip_threshold: Option<f64>,
    /// Evidence against `f1` needed to overcome the bias, reported only
    /// when it exceeds 0.5.
    pub strength: Option<f64>,
    pub biased_toward_f1_at_half: bool,
    /// Decided preferences reverse direction along the grid.
    pub indeterminate: bool,
    pub orientation: Orientation,
    #[serde(skip)]
    pub preferences: Vec<PreferenceResult>,
}

impl BiasStrengthResult {
    /// Two columns, `p` and `mean_agree_f1 - mean_agree_f2`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,preference\n");
        for c in &self.curve {
            out.push_str(&format!("{},{}\n", c.p, c.mean_agree_f1 - c.mean_agree_f2));
        }
        out
    }
}

/// Grid `0, step, 2 step, ..., 1`, always containing 0.5 and 1.
pub fn p_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.1) {
        return Err(Error::parameter(format!("grid step must lie in (0, 0.1], got {step}")));
    }
    let round = |x: f64| (x * 1e9).round() / 1e9;
    let mut grid: Vec<f64> = (0..)
        .map(|i| round(i as f64 * step))
        .take_while(|&p| p < 1.0)
        .collect();
    grid.push(1.0);
    if !grid.contains(&0.5) {
        grid.push(0.5);
        grid.sort_by(f64::total_cmp);
    }
    Ok(grid)
}

/// Sweep the mixture weight over a grid and locate where the learner's
/// preference for `f1` gives out. The `p` of `template` is ignored.
pub fn measure_bias_strength(
    learner: &dyn Learner,
    template: &MixtureParams,
    agree_dist: &AttributeDistribution,
    settings: BiasSweepSettings,
    seed: SeedSpec,
) -> Result<BiasStrengthResult> {
    let grid = p_grid(settings.grid_step)?;
    let template = template.with_p(0.0);
    template.validate()?;
    let mut preferences = Vec::with_capacity(grid.len());
    for (i, &p) in grid.iter().enumerate() {
        let weight_f2 = match settings.orientation {
            Orientation::F2Weighted => p,
            Orientation::F1Weighted => 1.0 - p,
        };
        preferences.push(measure_preference(
            learner,
            &template.with_p(weight_f2),
            agree_dist,
            settings.preference,
            seed.derive("grid", i as u64),
        )?);
    }
    let curve: Vec<CurvePoint> = grid
        .iter()
        .zip(&preferences)
        .map(|(&p, r)| CurvePoint {
            p,
            mean_agree_f1: r.mean_agree_f1,
            mean_agree_f2: r.mean_agree_f2,
            decided: r.decided,
            prefers_f1: r.prefers_f1,
        })
        .collect();

    let verdicts: Vec<i8> = curve.iter().map(CurvePoint::verdict).collect();
    let first_of = |v: i8| verdicts.iter().position(|&x| x == v);
    let last_of = |v: i8| verdicts.iter().rposition(|&x| x == v);
    let (indeterminate, flip_threshold) = match settings.orientation {
        Orientation::F2Weighted => {
            // expect f1 verdicts first, f2 verdicts after
            let bad = matches!((first_of(-1), last_of(1)), (Some(a), Some(b)) if a < b);
            (bad, last_of(1).map(|i| curve[i].p))
        }
        Orientation::F1Weighted => {
            let bad = matches!((last_of(-1), first_of(1)), (Some(a), Some(b)) if a > b);
            (bad, first_of(1).map(|i| curve[i].p))
        }
    };
    let flip_threshold = if indeterminate { None } else { flip_threshold };
    let strength = flip_threshold
        .map(|t| match settings.orientation {
            Orientation::F2Weighted => t,
            Orientation::F1Weighted => 1.0 - t,
        })
        .filter(|&s| s > 0.5);
    let half = curve
        .iter()
        .find(|c| c.p == 0.5)
        .expect("grid contains 0.5");

    Ok(BiasStrengthResult {
        biased_toward_f1_at_half: half.prefers_f1,
        curve,
        flip_threshold,
        strength,
        indeterminate,
        orientation: settings.orientation,
        preferences,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{AccuracyChooser, FixedLearner};
    use crate::schema::AttributeSchema;

    fn setup() -> (AttributeDistribution, Concept, Concept, Arc<ClassSet>) {
        let schema = Arc::new(AttributeSchema::boolean(2).unwrap());
        (
            AttributeDistribution::uniform(schema),
            Concept::formula("(var 0)".parse().unwrap()),
            Concept::formula("(var 1)".parse().unwrap()),
            Arc::new(ClassSet::binary()),
        )
    }

    #[test]
    fn delta_values() {
        let (a, b) = (ClassLabel(0), ClassLabel(1));
        assert_eq!(delta(a, a), 1);
        assert_eq!(delta(a, b), 0);
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(delta(ClassLabel(x), ClassLabel(y)), delta(ClassLabel(y), ClassLabel(x)));
            }
        }
    }

    #[test]
    fn degenerate_mixtures() {
        let (base, f1, f2, classes) = setup();
        let p0 = MixtureParams::new(base.clone(), 0.0, f1.clone(), f2.clone(), Arc::clone(&classes)).unwrap();
        let d = sample_mixture(&p0, 300, SeedSpec::new(1)).unwrap();
        assert!(d.examples().iter().all(|e| e.label == f1.classify(&e.vector)));
        let p1 = p0.with_p(1.0);
        let d = sample_mixture(&p1, 300, SeedSpec::new(1)).unwrap();
        assert!(d.examples().iter().all(|e| e.label == f2.classify(&e.vector)));
        assert!(MixtureParams::new(base, 1.5, f1, f2, classes).is_err());
    }

    #[test]
    fn balanced_mixture_on_disagreement_region() {
        let (base, f1, f2, classes) = setup();
        let params = MixtureParams::new(base, 0.5, f1.clone(), f2.clone(), classes).unwrap();
        let d = sample_mixture(&params, 20_000, SeedSpec::new(17)).unwrap();
        let disagree: Vec<_> = d
            .examples()
            .iter()
            .filter(|e| f1.classify(&e.vector) != f2.classify(&e.vector))
            .collect();
        let k = disagree.len() as f64;
        let frac = disagree.iter().filter(|e| e.label == f1.classify(&e.vector)).count() as f64 / k;
        let std = 0.5 / k.sqrt();
        assert!((frac - 0.5).abs() <= 4.0 * std, "{frac}");
        // where the concepts agree the label is their common value
        assert!(d
            .examples()
            .iter()
            .filter(|e| f1.classify(&e.vector) == f2.classify(&e.vector))
            .all(|e| e.label == f1.classify(&e.vector)));
    }

    #[test]
    fn sign_test_reference_values() {
        // Binomial(10, 1/2): P(X >= 9) = 11/1024, two-sided 22/1024
        assert!((sign_test_p_value(9, 1) - 22.0 / 1024.0).abs() < 1e-12);
        assert!((sign_test_p_value(1, 9) - 22.0 / 1024.0).abs() < 1e-12);
        assert_eq!(sign_test_p_value(5, 5), 1.0);
        assert_eq!(sign_test_p_value(0, 0), 1.0);
        // 30 of 30: 2 / 2^30
        assert!((sign_test_p_value(30, 0) - 2.0f64.powi(-29)).abs() < 1e-20);
        assert!(sign_test_p_value(3000, 0) < 1e-300 || sign_test_p_value(3000, 0) == 0.0);
    }

    #[test]
    fn fixed_learners_have_fixed_preferences() {
        let (base, f1, f2, classes) = setup();
        let settings = PreferenceSettings { train_size: 20, trials: 10, n_agree: 2000, exec: Execution::Parallel };
        for p in [0.0, 0.5, 1.0] {
            let params = MixtureParams::new(base.clone(), p, f1.clone(), f2.clone(), Arc::clone(&classes)).unwrap();
            let r1 = measure_preference(&FixedLearner::new(f1.clone()), &params, &base, settings, SeedSpec::new(3)).unwrap();
            assert_eq!(r1.mean_agree_f1, 1.0);
            assert!(r1.prefers_f1 && r1.decided);
            let r2 = measure_preference(&FixedLearner::new(f2.clone()), &params, &base, settings, SeedSpec::new(3)).unwrap();
            assert!(!r2.prefers_f1);
        }
    }

    #[test]
    fn identical_concepts_have_identical_agreement() {
        let (base, f1, _, classes) = setup();
        let params = MixtureParams::new(base.clone(), 0.3, f1.clone(), f1.clone(), classes).unwrap();
        let chooser = AccuracyChooser::new(vec![Concept::constant(ClassLabel(0)), f1]).unwrap();
        let settings = PreferenceSettings { train_size: 30, trials: 8, n_agree: 1000, exec: Execution::Sequential };
        let r = measure_preference(&chooser, &params, &base, settings, SeedSpec::new(5)).unwrap();
        assert_eq!(r.mean_agree_f1, r.mean_agree_f2);
        assert!(!r.prefers_f1 && !r.decided);
    }

    #[test]
    fn chooser_prefers_the_majority_source() {
        let (base, f1, f2, classes) = setup();
        let params = MixtureParams::new(base.clone(), 0.1, f1.clone(), f2.clone(), classes).unwrap();
        let chooser = AccuracyChooser::new(vec![f1, f2]).unwrap();
        let settings = PreferenceSettings { train_size: 100, trials: 20, n_agree: 2000, exec: Execution::Parallel };
        let r = measure_preference(&chooser, &params, &base, settings, SeedSpec::new(6)).unwrap();
        assert!(r.prefers_f1 && r.decided);
    }

    #[test]
    fn grid_construction() {
        let g = p_grid(0.05).unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[10], 0.5);
        assert_eq!(*g.last().unwrap(), 1.0);
        let g = p_grid(0.03).unwrap();
        assert!(g.contains(&0.5) && g.contains(&1.0));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(p_grid(0.2).is_err());
        assert!(p_grid(0.0).is_err());
    }

    #[test]
    fn always_f1_never_flips() {
        let (base, f1, f2, classes) = setup();
        let settings = BiasSweepSettings {
            grid_step: 0.1,
            orientation: Orientation::F2Weighted,
            preference: PreferenceSettings { train_size: 20, trials: 10, n_agree: 1000, exec: Execution::Parallel },
        };
        let template = MixtureParams::new(base.clone(), 0.0, f1.clone(), f2, classes).unwrap();
        let r = measure_bias_strength(&FixedLearner::new(f1), &template, &base, settings, SeedSpec::new(2)).unwrap();
        assert_eq!(r.flip_threshold, Some(1.0));
        assert_eq!(r.strength, Some(1.0));
        assert!(r.biased_toward_f1_at_half && !r.indeterminate);
        let csv = r.to_csv();
        assert!(csv.starts_with("p,preference\n"));
        assert_eq!(csv.lines().count(), 12);
    }

    #[test]
    fn orientations_report_the_same_strength_for_a_fixed_learner() {
        let (base, f1, f2, classes) = setup();
        let mut settings = BiasSweepSettings {
            grid_step: 0.1,
            orientation: Orientation::F1Weighted,
            preference: PreferenceSettings { train_size: 20, trials: 10, n_agree: 1000, exec: Execution::Parallel },
        };
        let l = FixedLearner::new(f1.clone());
        let template = MixtureParams::new(base.clone(), 0.0, f1, f2, classes).unwrap();
        let swapped = measure_bias_strength(&l, &template, &base, settings, SeedSpec::new(2)).unwrap();
        assert_eq!(swapped.flip_threshold, Some(0.0));
        assert_eq!(swapped.strength, Some(1.0));
        settings.orientation = Orientation::F2Weighted;
        let printed = measure_bias_strength(&l, &template, &base, settings, SeedSpec::new(2)).unwrap();
        assert_eq!(printed.strength, swapped.strength);
    }
}
