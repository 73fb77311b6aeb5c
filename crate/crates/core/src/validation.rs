//! Seeded validation harnesses.
//!
//! Each harness instantiates a known finite distribution and classifier
//! family, so every "true" quantity is computable by exact enumeration,
//! then checks an inequality over many seeded trials:
//!
//! - `theorem2`: the multiclass deviation bound on
//!   `‖C_S^G − C^G‖` holds in at least a `1 − δ` fraction of trials.
//! - `theorem1-binary`: the binary divergence bound
//!   `kl(R_S, R) ≤ (KL + ln(ξ(m)/δ))/m` holds likewise.
//! - `concentration`: the empirical tail of `‖Σ_i C'_i‖` stays below
//!   `2Q·exp(−ε²/8σ²)` (plus three-sigma binomial estimation slack) on
//!   an ε grid.
//! - `prop1`: the majority-vote/Gibbs relations
//!   `R(B,p,q) ≤ Q·R(G,p,q)` and `‖C^B‖ ≤ Q‖C^G‖` hold with zero
//!   violations — these are deterministic theorems, not tail events.
//!
//! Per-trial randomness comes from substreams indexed by
//! `(seed, domain, trial)`, so reports are bit-reproducible and trials
//! can be evaluated in any order.

use serde::{Deserialize, Serialize};

use crate::bounds::{binary_kl, deviation_bound, matrix_tail_bound, xi, BoundInputs};
use crate::confusion::{
    empirical_confusion, true_confusion, ConfusionMatrix, DiscreteDistribution, LabeledSample,
    PredictionVector,
};
use crate::ensemble::{
    bayes_true_confusion, conditional_bayes_risk, conditional_gibbs_risk, gibbs_empirical_confusion,
    gibbs_true_confusion, kl_divergence, PredictionTable, WeightDistribution,
};
use crate::error::{Error, Result};
use crate::report::fmt_f64;
use crate::rng::{derive_stream, domains, SplitMix64};

/// The only generator this build implements; configs must pin it.
pub const RNG_ALGORITHM: &str = "splitmix64";

/// Concentration of the data-dependent posterior: weights are damped by
/// `exp(−β · empirical_error)` before Dirichlet noise.
const DATA_DEPENDENT_BETA: f64 = 10.0;

/// Entrywise tolerance for the majority-vote factor check.
pub const VOTE_FACTOR_ENTRY_TOL: f64 = 1e-12;
/// Norm tolerance for the majority-vote factor check.
pub const VOTE_FACTOR_NORM_TOL: f64 = 1e-9;

/// Rejection budget when drawing i.i.d. samples that must contain every
/// class.
const IID_REJECTION_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Harness {
    Theorem2,
    Theorem1Binary,
    Concentration,
    Prop1,
}

impl Harness {
    pub fn name(self) -> &'static str {
        match self {
            Harness::Theorem2 => "theorem2",
            Harness::Theorem1Binary => "theorem1-binary",
            Harness::Concentration => "concentration",
            Harness::Prop1 => "prop1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PosteriorMode {
    Uniform,
    #[serde(alias = "dirichlet")]
    RandomDirichlet,
    PointMass,
    /// Chosen after observing the trial sample: Dirichlet noise damped
    /// toward classifiers with low empirical error. Exercises the
    /// "every posterior, including sample-dependent ones" quantifier.
    DataDependent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorMode {
    Uniform,
    #[serde(alias = "dirichlet")]
    RandomDirichlet,
    PointMass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    /// Fixed per-class counts; each class drawn i.i.d. from its
    /// class-conditional distribution. Keeps `m₋` a configuration knob.
    Stratified,
    /// Joint i.i.d. draws, rejected until every class is represented.
    Iid,
}

fn default_posterior() -> PosteriorMode {
    PosteriorMode::Uniform
}
fn default_prior() -> PriorMode {
    PriorMode::Uniform
}
fn default_sampling() -> SamplingMode {
    SamplingMode::Stratified
}
fn default_error_rate() -> f64 {
    0.15
}
fn default_floor() -> f64 {
    0.05
}
fn default_rng() -> String {
    RNG_ALGORITHM.to_string()
}

/// Full description of a validation run. Identical configs (including
/// the seed) produce bit-identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub harness: Harness,
    pub num_classes: usize,
    pub support_size: usize,
    pub num_classifiers: usize,
    /// Stratified per-class sample size (`theorem2`, `concentration`).
    #[serde(default)]
    pub per_class_size: Option<usize>,
    /// Total i.i.d. sample size (`theorem1-binary`).
    #[serde(default)]
    pub sample_size: Option<usize>,
    pub num_trials: usize,
    pub delta: f64,
    pub seed: u64,
    #[serde(default = "default_posterior")]
    pub posterior_mode: PosteriorMode,
    #[serde(default = "default_prior")]
    pub prior_mode: PriorMode,
    /// Mean per-example error probability of a classifier; individual
    /// classifiers vary in [0.5×, 1.5×] of this.
    #[serde(default = "default_error_rate")]
    pub classifier_error_rate: f64,
    /// Lower bound on every class marginal of the generated
    /// distribution.
    #[serde(default = "default_floor")]
    pub class_marginal_floor: f64,
    #[serde(default = "default_sampling")]
    pub sampling: SamplingMode,
    /// ε grid for the concentration harness; defaults to 15 points
    /// evenly spaced in [0.05, 1.5].
    #[serde(default)]
    pub epsilon_grid: Option<Vec<f64>>,
    /// Pinned generator name; reports are only comparable across
    /// platforms because the generator is fixed.
    #[serde(default = "default_rng")]
    pub rng: String,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rng != RNG_ALGORITHM {
            return Err(Error::InvalidConfig(format!(
                "unknown rng '{}'; this build pins '{RNG_ALGORITHM}'",
                self.rng
            )));
        }
        if self.num_classes < 2 {
            return Err(Error::InvalidConfig("num_classes must be at least 2".into()));
        }
        if self.support_size < self.num_classes {
            return Err(Error::InvalidConfig(format!(
                "support_size {} is below num_classes {}",
                self.support_size, self.num_classes
            )));
        }
        if self.num_classifiers < 1 {
            return Err(Error::InvalidConfig("num_classifiers must be at least 1".into()));
        }
        if self.num_trials < 1 {
            return Err(Error::InvalidConfig("num_trials must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "delta = {} outside (0, 1]",
                self.delta
            )));
        }
        if !(0.0..=1.0).contains(&self.classifier_error_rate) {
            return Err(Error::InvalidConfig(format!(
                "classifier_error_rate = {} outside [0, 1]",
                self.classifier_error_rate
            )));
        }
        if self.class_marginal_floor <= 0.0 || !self.class_marginal_floor.is_finite() {
            return Err(Error::InvalidConfig(
                "class_marginal_floor must be positive".into(),
            ));
        }
        if self.num_classes as f64 * self.class_marginal_floor > 1.0 {
            return Err(Error::InvalidConfig(format!(
                "infeasible floor: {} classes x floor {} exceeds total mass 1",
                self.num_classes, self.class_marginal_floor
            )));
        }
        match self.harness {
            Harness::Theorem2 | Harness::Concentration => {
                let m = self.per_class_size.ok_or_else(|| {
                    Error::InvalidConfig(format!(
                        "harness '{}' needs per_class_size",
                        self.harness.name()
                    ))
                })?;
                if m < 1 {
                    return Err(Error::InvalidConfig("per_class_size must be at least 1".into()));
                }
            }
            Harness::Theorem1Binary => {
                if self.num_classes != 2 {
                    return Err(Error::InvalidConfig(format!(
                        "harness 'theorem1-binary' needs num_classes = 2, got {}",
                        self.num_classes
                    )));
                }
                let m = self.sample_size.ok_or_else(|| {
                    Error::InvalidConfig("harness 'theorem1-binary' needs sample_size".into())
                })?;
                if m < 2 {
                    return Err(Error::InvalidConfig("sample_size must be at least 2".into()));
                }
            }
            Harness::Prop1 => {
                if self.posterior_mode == PosteriorMode::DataDependent {
                    return Err(Error::InvalidConfig(
                        "prop1 draws no sample, so a data-dependent posterior is undefined".into(),
                    ));
                }
            }
        }
        if let Some(grid) = &self.epsilon_grid {
            if grid.is_empty() {
                return Err(Error::InvalidConfig("epsilon_grid must not be empty".into()));
            }
            if grid.iter().any(|&e| !e.is_finite() || e < 0.0) {
                return Err(Error::InvalidConfig(
                    "epsilon_grid values must be finite and nonnegative".into(),
                ));
            }
        }
        Ok(())
    }

    fn per_class_sizes(&self) -> Vec<usize> {
        vec![
            self.per_class_size.expect("validated per_class_size");
            self.num_classes
        ]
    }
}

/// One checked trial. `threshold` is absent when the trial's bound is
/// vacuous (it can then never be violated) or when the harness checks
/// at a coarser granularity than trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub statistic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub violation: bool,
}

/// One ε on the concentration grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub epsilon: f64,
    pub empirical_tail: f64,
    pub bound: f64,
    /// Three-sigma binomial estimation slack `3·√(p̂(1−p̂)/T)` added to
    /// the bound so finite-trial noise cannot fail a true inequality.
    pub slack: f64,
    pub pass: bool,
}

/// Extra accounting for the majority-vote factor harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoteFactorSummary {
    pub entrywise_violations: usize,
    pub norm_violations: usize,
    pub max_entrywise_excess: f64,
    pub max_norm_excess: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The configuration makes every bound vacuous; nothing could be
    /// violated, which is reported rather than hidden.
    VacuousPass,
}

/// Outcome of a harness run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub harness: Harness,
    pub rng: String,
    pub config: SimulationConfig,
    pub trials: usize,
    /// For per-trial harnesses: trials whose statistic exceeded its
    /// threshold. For `concentration`: failing grid points.
    pub violations: usize,
    pub violation_rate: f64,
    pub vacuous_trials: usize,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<GridPoint>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub majority_vote: Option<VoteFactorSummary>,
    pub records: Vec<TrialRecord>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        matches!(self.verdict, Verdict::Pass | Verdict::VacuousPass)
    }
}

/// Per-trial CSV with deterministic float formatting.
pub fn trial_records_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from("trial,statistic,threshold,violation\n");
    for r in records {
        let threshold = r.threshold.map(fmt_f64).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.trial,
            fmt_f64(r.statistic),
            threshold,
            r.violation
        ));
    }
    out
}

/// The fixed part of a simulated experiment: the distribution, the
/// classifier family evaluated on its support, and the prior.
#[derive(Debug, Clone)]
pub struct World {
    pub dist: DiscreteDistribution,
    pub table: PredictionTable,
    pub prior: WeightDistribution,
}

/// Build the distribution and the classifier predictions on its
/// support. The first `Q` support points carry one class each, so every
/// class is represented; each of them also receives the configured
/// floor mass, so every class marginal is at least the floor.
pub fn make_discrete_distribution(
    config: &SimulationConfig,
    seed: u64,
) -> Result<(DiscreteDistribution, PredictionTable)> {
    let q = config.num_classes;
    let n = config.support_size;
    if n < q {
        return Err(Error::InvalidConfig(format!(
            "support_size {n} is below num_classes {q}"
        )));
    }
    let floor = config.class_marginal_floor;
    if q as f64 * floor > 1.0 {
        return Err(Error::InvalidConfig(format!(
            "infeasible floor: {q} classes x floor {floor} exceeds total mass 1"
        )));
    }

    let mut dist_rng = derive_stream(seed, domains::DISTRIBUTION, 0);
    let mut labels: Vec<usize> = (0..q).collect();
    labels.extend((q..n).map(|_| dist_rng.next_index(q)));

    let raw: Vec<f64> = (0..n).map(|_| dist_rng.next_f64() + 1e-3).collect();
    let raw_total: f64 = raw.iter().sum();
    let free_mass = 1.0 - q as f64 * floor;
    let probabilities: Vec<f64> = raw
        .iter()
        .enumerate()
        .map(|(i, &w)| free_mass * w / raw_total + if i < q { floor } else { 0.0 })
        .collect();
    let dist = DiscreteDistribution::new(labels.clone(), probabilities, q)?;

    let mut pred_rng = derive_stream(seed, domains::PREDICTIONS, 0);
    let mut classifiers = Vec::with_capacity(config.num_classifiers);
    for _ in 0..config.num_classifiers {
        let rate = (config.classifier_error_rate * (0.5 + pred_rng.next_f64())).min(0.95);
        let preds: Vec<usize> = labels
            .iter()
            .map(|&truth| {
                if config.classifier_error_rate > 0.0 && pred_rng.next_f64() < rate {
                    // Uniform over the wrong labels.
                    let k = pred_rng.next_index(q - 1);
                    if k >= truth {
                        k + 1
                    } else {
                        k
                    }
                } else {
                    truth
                }
            })
            .collect();
        classifiers.push(PredictionVector::new(preds, q)?);
    }
    Ok((dist, PredictionTable::new(classifiers)?))
}

fn make_prior(config: &SimulationConfig) -> Result<WeightDistribution> {
    let n = config.num_classifiers;
    match config.prior_mode {
        PriorMode::Uniform => WeightDistribution::uniform(n),
        PriorMode::RandomDirichlet => {
            let mut rng = derive_stream(config.seed, domains::PRIOR, 0);
            let raw: Vec<f64> = (0..n).map(|_| rng.next_exp()).collect();
            WeightDistribution::from_unnormalized(&raw)
        }
        PriorMode::PointMass => WeightDistribution::point_mass(n, 0),
    }
}

pub fn build_world(config: &SimulationConfig) -> Result<World> {
    let (dist, table) = make_discrete_distribution(config, config.seed)?;
    let prior = make_prior(config)?;
    Ok(World { dist, table, prior })
}

/// A drawn training set together with the support point behind each
/// example, so support-level predictions can be projected onto it.
#[derive(Debug, Clone)]
pub struct SampleDraw {
    pub sample: LabeledSample,
    pub support_indices: Vec<usize>,
}

fn sample_stratified_with(
    dist: &DiscreteDistribution,
    per_class: &[usize],
    rng: &mut SplitMix64,
) -> Result<SampleDraw> {
    let q = dist.num_classes();
    if per_class.len() != q {
        return Err(Error::DimensionMismatch(format!(
            "{} per-class sizes for {} classes",
            per_class.len(),
            q
        )));
    }
    if per_class.contains(&0) {
        return Err(Error::InvalidConfig("per-class sizes must all be at least 1".into()));
    }
    let mut labels = Vec::new();
    let mut support_indices = Vec::new();
    for (y, &m_y) in per_class.iter().enumerate() {
        // Cumulative class-conditional weights over the support points
        // of class y.
        let points: Vec<usize> = (0..dist.support_size())
            .filter(|&x| dist.label(x) == y)
            .collect();
        let mut cumulative = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        for &x in &points {
            acc += dist.probability(x);
            cumulative.push(acc);
        }
        if acc <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "class {} has no conditional support to sample from",
                y + 1
            )));
        }
        for _ in 0..m_y {
            let x = points[rng.next_categorical(&cumulative)];
            labels.push(y);
            support_indices.push(x);
        }
    }
    Ok(SampleDraw {
        sample: LabeledSample::new(labels, q)?,
        support_indices,
    })
}

/// Stratified training-set draw: `per_class[y]` examples i.i.d. from the
/// class-conditional distribution of each class `y`; deterministic per
/// seed.
pub fn sample_training_set(
    dist: &DiscreteDistribution,
    per_class: &[usize],
    seed: u64,
) -> Result<SampleDraw> {
    sample_stratified_with(dist, per_class, &mut SplitMix64::new(seed))
}

fn sample_iid_with(
    dist: &DiscreteDistribution,
    m: usize,
    rng: &mut SplitMix64,
) -> Result<SampleDraw> {
    let q = dist.num_classes();
    if m < q {
        return Err(Error::InvalidConfig(format!(
            "sample size {m} cannot cover all {q} classes"
        )));
    }
    let mut cumulative = Vec::with_capacity(dist.support_size());
    let mut acc = 0.0;
    for x in 0..dist.support_size() {
        acc += dist.probability(x);
        cumulative.push(acc);
    }
    for _ in 0..IID_REJECTION_LIMIT {
        let support_indices: Vec<usize> =
            (0..m).map(|_| rng.next_categorical(&cumulative)).collect();
        let labels: Vec<usize> = support_indices.iter().map(|&x| dist.label(x)).collect();
        let mut seen = vec![false; q];
        for &y in &labels {
            seen[y] = true;
        }
        if seen.iter().all(|&s| s) {
            return Ok(SampleDraw {
                sample: LabeledSample::new(labels, q)?,
                support_indices,
            });
        }
    }
    Err(Error::InvalidConfig(format!(
        "could not draw an i.i.d. sample of size {m} containing every class \
         within {IID_REJECTION_LIMIT} attempts; raise sample_size or the class floor"
    )))
}

/// Joint i.i.d. training-set draw of size `m`, redrawn until every class
/// appears; deterministic per seed.
pub fn sample_training_set_iid(
    dist: &DiscreteDistribution,
    m: usize,
    seed: u64,
) -> Result<SampleDraw> {
    sample_iid_with(dist, m, &mut SplitMix64::new(seed))
}

fn draw_trial_sample(
    config: &SimulationConfig,
    dist: &DiscreteDistribution,
    rng: &mut SplitMix64,
) -> Result<SampleDraw> {
    match config.sampling {
        SamplingMode::Stratified => {
            sample_stratified_with(dist, &config.per_class_sizes(), rng)
        }
        SamplingMode::Iid => {
            let m: usize = config.per_class_sizes().iter().sum();
            sample_iid_with(dist, m, rng)
        }
    }
}

/// Fraction of the sample each classifier misclassifies.
fn classifier_empirical_errors(table: &PredictionTable, sample: &LabeledSample) -> Vec<f64> {
    let m = sample.len() as f64;
    table
        .classifiers()
        .iter()
        .map(|c| {
            let wrong = (0..sample.len())
                .filter(|&i| c.prediction(i) != sample.label(i))
                .count();
            wrong as f64 / m
        })
        .collect()
}

/// Exact misclassification probability of each classifier under the
/// distribution.
fn classifier_true_risks(table: &PredictionTable, dist: &DiscreteDistribution) -> Vec<f64> {
    table
        .classifiers()
        .iter()
        .map(|c| {
            (0..dist.support_size())
                .filter(|&x| c.prediction(x) != dist.label(x))
                .map(|x| dist.probability(x))
                .sum()
        })
        .collect()
}

fn posterior_for_trial(
    mode: PosteriorMode,
    n: usize,
    empirical_errors: Option<&[f64]>,
    rng: &mut SplitMix64,
) -> Result<WeightDistribution> {
    match mode {
        PosteriorMode::Uniform => WeightDistribution::uniform(n),
        PosteriorMode::RandomDirichlet => {
            let raw: Vec<f64> = (0..n).map(|_| rng.next_exp()).collect();
            WeightDistribution::from_unnormalized(&raw)
        }
        PosteriorMode::PointMass => WeightDistribution::point_mass(n, rng.next_index(n)),
        PosteriorMode::DataDependent => {
            let errors = empirical_errors.ok_or_else(|| {
                Error::InvalidConfig(
                    "data-dependent posterior needs per-classifier empirical errors".into(),
                )
            })?;
            let raw: Vec<f64> = errors
                .iter()
                .map(|&e| rng.next_exp() * (-DATA_DEPENDENT_BETA * e).exp())
                .collect();
            WeightDistribution::from_unnormalized(&raw)
        }
    }
}

fn verdict_for_rate(
    trials: usize,
    violations: usize,
    vacuous_trials: usize,
    delta: f64,
) -> (Verdict, Option<String>) {
    if vacuous_trials == trials {
        return (
            Verdict::VacuousPass,
            Some(
                "every trial produced a vacuous bound; nothing could be violated. \
                 Check m_minus > 8Q and that the prior supports the posterior"
                    .to_string(),
            ),
        );
    }
    let rate = violations as f64 / trials as f64;
    if rate <= delta {
        (Verdict::Pass, None)
    } else {
        (Verdict::Fail, None)
    }
}

/// Everything observable about one deviation-bound trial.
#[derive(Debug, Clone)]
pub struct DeviationTrial {
    pub record: TrialRecord,
    pub empirical: ConfusionMatrix,
    pub true_gibbs: ConfusionMatrix,
    pub kl: f64,
    pub m_minus: usize,
}

/// Run a single deviation-bound trial; the full harness is a loop over
/// this function, so any trial can be reproduced in isolation.
pub fn deviation_trial(
    world: &World,
    config: &SimulationConfig,
    trial: usize,
) -> Result<DeviationTrial> {
    let mut sample_rng = derive_stream(config.seed, domains::TRIAL_SAMPLE, trial as u64);
    let draw = draw_trial_sample(config, &world.dist, &mut sample_rng)?;
    let table_on_sample = world.table.project(&draw.support_indices);

    let mut posterior_rng = derive_stream(config.seed, domains::TRIAL_POSTERIOR, trial as u64);
    let errors = match config.posterior_mode {
        PosteriorMode::DataDependent => {
            Some(classifier_empirical_errors(&table_on_sample, &draw.sample))
        }
        _ => None,
    };
    let posterior = posterior_for_trial(
        config.posterior_mode,
        world.table.num_classifiers(),
        errors.as_deref(),
        &mut posterior_rng,
    )?;

    let kl = kl_divergence(&posterior, &world.prior)?;
    let empirical = gibbs_empirical_confusion(&table_on_sample, &posterior, &draw.sample)?;
    let true_gibbs = gibbs_true_confusion(&world.table, &posterior, &world.dist)?;
    let deviation = empirical.matrix().sub(true_gibbs.matrix())?.operator_norm()?;

    let counts = draw.sample.class_counts();
    let bound = deviation_bound(&BoundInputs {
        kl_divergence: kl,
        m_minus: counts.m_minus(),
        num_classes: config.num_classes,
        delta: config.delta,
        empirical_norm: None,
    })?;
    let (threshold, violation) = match bound.bound {
        Some(b) => (Some(b), deviation > b),
        None => (None, false),
    };
    Ok(DeviationTrial {
        record: TrialRecord {
            trial,
            statistic: deviation,
            threshold,
            violation,
        },
        empirical,
        true_gibbs,
        kl,
        m_minus: counts.m_minus(),
    })
}

/// Harness `theorem2`: deviation-bound validity over seeded trials.
pub fn validate_deviation_bound(config: &SimulationConfig) -> Result<ValidationReport> {
    config.validate()?;
    let world = build_world(config)?;
    let mut records = Vec::with_capacity(config.num_trials);
    let mut violations = 0;
    let mut vacuous_trials = 0;
    for t in 0..config.num_trials {
        let trial = deviation_trial(&world, config, t)?;
        if trial.record.threshold.is_none() {
            vacuous_trials += 1;
        }
        if trial.record.violation {
            violations += 1;
        }
        records.push(trial.record);
    }
    let (verdict, mut warning) =
        verdict_for_rate(config.num_trials, violations, vacuous_trials, config.delta);
    // A stratified config below the m_minus threshold is vacuous before
    // any trial runs; surface that prominently.
    if config.sampling == SamplingMode::Stratified {
        if let Some(m) = config.per_class_size {
            if m <= 8 * config.num_classes && warning.is_none() {
                warning = Some(format!(
                    "per_class_size {m} does not exceed 8Q = {}; bounds are vacuous",
                    8 * config.num_classes
                ));
            }
        }
    }
    Ok(ValidationReport {
        harness: Harness::Theorem2,
        rng: RNG_ALGORITHM.to_string(),
        config: config.clone(),
        trials: config.num_trials,
        violations,
        violation_rate: violations as f64 / config.num_trials as f64,
        vacuous_trials,
        verdict,
        warning,
        grid: None,
        majority_vote: None,
        records,
    })
}

/// Everything observable about one binary-bound trial.
#[derive(Debug, Clone)]
pub struct BinaryTrial {
    pub record: TrialRecord,
    pub empirical_risk: f64,
    pub true_risk: f64,
    pub kl: f64,
}

/// Run a single binary divergence-bound trial: draw an i.i.d. sample,
/// pick a posterior, compare `kl(R_S, R)` against the budget
/// `(KL + ln(ξ(m)/δ))/m` with `R` exact by enumeration.
pub fn binary_trial(world: &World, config: &SimulationConfig, trial: usize) -> Result<BinaryTrial> {
    let m = config.sample_size.expect("validated sample_size");
    let mut sample_rng = derive_stream(config.seed, domains::TRIAL_SAMPLE, trial as u64);
    let draw = sample_iid_with(&world.dist, m, &mut sample_rng)?;
    let table_on_sample = world.table.project(&draw.support_indices);

    let empirical_errors = classifier_empirical_errors(&table_on_sample, &draw.sample);
    let mut posterior_rng = derive_stream(config.seed, domains::TRIAL_POSTERIOR, trial as u64);
    let posterior = posterior_for_trial(
        config.posterior_mode,
        world.table.num_classifiers(),
        Some(&empirical_errors),
        &mut posterior_rng,
    )?;

    let kl = kl_divergence(&posterior, &world.prior)?;
    let true_risks = classifier_true_risks(&world.table, &world.dist);
    let empirical_risk: f64 = posterior
        .weights()
        .iter()
        .zip(&empirical_errors)
        .map(|(w, e)| w * e)
        .sum();
    let true_risk: f64 = posterior
        .weights()
        .iter()
        .zip(&true_risks)
        .map(|(w, r)| w * r)
        .sum();

    let statistic = binary_kl(empirical_risk, true_risk);
    let (threshold, violation) = if kl.is_finite() {
        let budget = (kl + (xi(m) / config.delta).ln()) / m as f64;
        (Some(budget), statistic > budget)
    } else {
        (None, false)
    };
    Ok(BinaryTrial {
        record: TrialRecord {
            trial,
            statistic,
            threshold,
            violation,
        },
        empirical_risk,
        true_risk,
        kl,
    })
}

/// Harness `theorem1-binary`: binary divergence-bound validity.
pub fn validate_binary_bound(config: &SimulationConfig) -> Result<ValidationReport> {
    config.validate()?;
    let world = build_world(config)?;
    let mut records = Vec::with_capacity(config.num_trials);
    let mut violations = 0;
    let mut vacuous_trials = 0;
    for t in 0..config.num_trials {
        let trial = binary_trial(&world, config, t)?;
        if trial.record.threshold.is_none() {
            vacuous_trials += 1;
        }
        if trial.record.violation {
            violations += 1;
        }
        records.push(trial.record);
    }
    let (verdict, warning) =
        verdict_for_rate(config.num_trials, violations, vacuous_trials, config.delta);
    Ok(ValidationReport {
        harness: Harness::Theorem1Binary,
        rng: RNG_ALGORITHM.to_string(),
        config: config.clone(),
        trials: config.num_trials,
        violations,
        violation_rate: violations as f64 / config.num_trials as f64,
        vacuous_trials,
        verdict,
        warning,
        grid: None,
        majority_vote: None,
        records,
    })
}

/// Deviation norm `‖C_S^f − C^f‖` of the first classifier for one
/// concentration trial. The centering term is exact: under stratified
/// sampling with fixed per-class counts, the expectation of the
/// empirical confusion matrix is the true one.
pub fn concentration_trial(
    world: &World,
    config: &SimulationConfig,
    trial: usize,
) -> Result<f64> {
    let mut sample_rng = derive_stream(config.seed, domains::TRIAL_SAMPLE, trial as u64);
    let draw = sample_stratified_with(&world.dist, &config.per_class_sizes(), &mut sample_rng)?;
    let member = world.table.classifier(0).project(&draw.support_indices);
    let empirical = empirical_confusion(&draw.sample, &member)?;
    let exact = true_confusion(&world.dist, world.table.classifier(0))?;
    empirical.matrix().sub(exact.matrix())?.operator_norm()
}

fn default_epsilon_grid() -> Vec<f64> {
    let (lo, hi, n) = (0.05, 1.5, 15);
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

/// Harness `concentration`: empirical tail of the summed centered
/// per-example confusion matrices against `2Q·exp(−ε²/8σ²)`.
pub fn validate_concentration(config: &SimulationConfig) -> Result<ValidationReport> {
    config.validate()?;
    let world = build_world(config)?;
    let trials = config.num_trials;
    let mut deviations = Vec::with_capacity(trials);
    for t in 0..trials {
        deviations.push(concentration_trial(&world, config, t)?);
    }
    let records: Vec<TrialRecord> = deviations
        .iter()
        .enumerate()
        .map(|(t, &d)| TrialRecord {
            trial: t,
            statistic: d,
            threshold: None,
            violation: false,
        })
        .collect();

    // Exact variance proxy for the stratified per-class counts.
    let per_class = config.per_class_sizes();
    let sigma_exact: f64 = per_class.iter().map(|&m| 1.0 / m as f64).sum();

    let grid_eps = config
        .epsilon_grid
        .clone()
        .unwrap_or_else(default_epsilon_grid);
    let t_f = trials as f64;
    let grid: Vec<GridPoint> = grid_eps
        .iter()
        .map(|&eps| {
            let hits = deviations.iter().filter(|&&d| d >= eps).count();
            let empirical_tail = hits as f64 / t_f;
            let bound = matrix_tail_bound(eps, sigma_exact, config.num_classes);
            let slack = 3.0 * (empirical_tail * (1.0 - empirical_tail) / t_f).sqrt();
            GridPoint {
                epsilon: eps,
                empirical_tail,
                bound,
                slack,
                pass: empirical_tail <= bound + slack,
            }
        })
        .collect();

    let violations = grid.iter().filter(|g| !g.pass).count();
    let verdict = if violations == 0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let violation_rate = violations as f64 / grid.len() as f64;
    Ok(ValidationReport {
        harness: Harness::Concentration,
        rng: RNG_ALGORITHM.to_string(),
        config: config.clone(),
        trials,
        violations,
        violation_rate,
        vacuous_trials: 0,
        verdict,
        warning: None,
        grid: Some(grid),
        majority_vote: None,
        records,
    })
}

/// Everything observable about one majority-vote factor triple.
#[derive(Debug, Clone)]
pub struct VoteFactorTrial {
    pub record: TrialRecord,
    pub max_entrywise_excess: f64,
    pub norm_excess: f64,
    pub entrywise_violation: bool,
    pub norm_violation: bool,
}

/// Check `R(B,p,q) ≤ Q·R(G,p,q)` for every class pair (diagonal
/// included) and `‖C^B‖ ≤ Q‖C^G‖` on one randomly generated
/// (distribution, family, posterior) triple.
pub fn vote_factor_trial(config: &SimulationConfig, trial: usize) -> Result<VoteFactorTrial> {
    let mut world_rng = derive_stream(config.seed, domains::TRIAL_SAMPLE, trial as u64);
    let triple_seed = world_rng.next_u64();
    let (dist, table) = make_discrete_distribution(config, triple_seed)?;

    let mut posterior_rng = derive_stream(config.seed, domains::TRIAL_POSTERIOR, trial as u64);
    let posterior = posterior_for_trial(
        config.posterior_mode,
        config.num_classifiers,
        None,
        &mut posterior_rng,
    )?;

    let q = config.num_classes;
    let mut max_excess = f64::NEG_INFINITY;
    for p in 0..q {
        for c in 0..q {
            let bayes = conditional_bayes_risk(&table, &posterior, &dist, p, c)?;
            let gibbs = conditional_gibbs_risk(&table, &posterior, &dist, p, c)?;
            max_excess = max_excess.max(bayes - q as f64 * gibbs);
        }
    }
    let bayes_norm = bayes_true_confusion(&table, &posterior, &dist)?.operator_norm()?;
    let gibbs_norm = gibbs_true_confusion(&table, &posterior, &dist)?.operator_norm()?;
    let norm_excess = bayes_norm - q as f64 * gibbs_norm;

    let entrywise_violation = max_excess > VOTE_FACTOR_ENTRY_TOL;
    let norm_violation = norm_excess > VOTE_FACTOR_NORM_TOL;
    Ok(VoteFactorTrial {
        record: TrialRecord {
            trial,
            statistic: max_excess,
            threshold: Some(VOTE_FACTOR_ENTRY_TOL),
            violation: entrywise_violation || norm_violation,
        },
        max_entrywise_excess: max_excess,
        norm_excess,
        entrywise_violation,
        norm_violation,
    })
}

/// Harness `prop1`: majority-vote factor relations must hold with zero
/// violations — they are deterministic theorems.
pub fn validate_majority_factor(config: &SimulationConfig) -> Result<ValidationReport> {
    config.validate()?;
    let mut records = Vec::with_capacity(config.num_trials);
    let mut summary = VoteFactorSummary {
        entrywise_violations: 0,
        norm_violations: 0,
        max_entrywise_excess: f64::NEG_INFINITY,
        max_norm_excess: f64::NEG_INFINITY,
    };
    let mut violations = 0;
    for t in 0..config.num_trials {
        let trial = vote_factor_trial(config, t)?;
        summary.entrywise_violations += trial.entrywise_violation as usize;
        summary.norm_violations += trial.norm_violation as usize;
        summary.max_entrywise_excess = summary.max_entrywise_excess.max(trial.max_entrywise_excess);
        summary.max_norm_excess = summary.max_norm_excess.max(trial.norm_excess);
        if trial.record.violation {
            violations += 1;
        }
        records.push(trial.record);
    }
    let verdict = if violations == 0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(ValidationReport {
        harness: Harness::Prop1,
        rng: RNG_ALGORITHM.to_string(),
        config: config.clone(),
        trials: config.num_trials,
        violations,
        violation_rate: violations as f64 / config.num_trials as f64,
        vacuous_trials: 0,
        verdict,
        warning: None,
        grid: None,
        majority_vote: Some(summary),
        records,
    })
}

/// Dispatch on the configured harness.
pub fn run_harness(config: &SimulationConfig) -> Result<ValidationReport> {
    config.validate()?;
    match config.harness {
        Harness::Theorem2 => validate_deviation_bound(config),
        Harness::Theorem1Binary => validate_binary_bound(config),
        Harness::Concentration => validate_concentration(config),
        Harness::Prop1 => validate_majority_factor(config),
    }
}
