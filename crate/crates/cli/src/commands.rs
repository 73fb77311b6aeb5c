//! Command implementations: assemble parsed inputs into library calls
//! and serializable reports.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use confusion_bounds::report::to_json_string;
use confusion_bounds::validation::{self, trial_records_csv, SimulationConfig, ValidationReport};
use confusion_bounds::{
    binary_risk_bound, deviation_bound, gibbs_empirical_confusion, kl_divergence,
    majority_vote_bound_report, norm_bound, sigma_squared, xi, BoundInputs, BoundReport,
    LabeledSample, PredictionTable, PredictionVector, SigmaSquared, WeightDistribution,
};

use crate::csv::{parse_predictions_csv, parse_sample_csv, parse_weights_csv};
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const ORIENTATION: &str = "true-class-rows";

/// Provenance block embedded in every emitted report.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num_classes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    pub tool_version: String,
    pub rng: String,
    pub timestamp_unix: u64,
}

impl RunManifest {
    fn new(command: &str, inputs: Vec<String>) -> Self {
        Self {
            command: command.to_string(),
            inputs,
            num_classes: None,
            delta: None,
            seed: None,
            trials: None,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            rng: validation::RNG_ALGORITHM.to_string(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

/// Everything the multiclass `bound` command emits.
#[derive(Debug, Serialize)]
pub struct BoundOutput {
    pub schema_version: u32,
    pub manifest: RunManifest,
    pub orientation: &'static str,
    pub num_classes: usize,
    pub num_classifiers: usize,
    pub class_counts: Vec<usize>,
    pub m_minus: usize,
    pub empirical_gibbs_confusion: Vec<Vec<f64>>,
    pub empirical_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kl_divergence: Option<f64>,
    pub kl_infinite: bool,
    pub sigma_squared: SigmaSquared,
    pub deviation_bound: BoundReport,
    pub norm_bound: BoundReport,
    pub majority_vote_bound: BoundReport,
}

/// Everything the `binary-bound` command emits.
#[derive(Debug, Serialize)]
pub struct BinaryBoundOutput {
    pub schema_version: u32,
    pub manifest: RunManifest,
    pub num_classes: usize,
    pub sample_size: usize,
    pub num_classifiers: usize,
    pub empirical_gibbs_risk: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kl_divergence: Option<f64>,
    pub kl_infinite: bool,
    pub xi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kl_budget: Option<f64>,
    pub gibbs_risk_bound: BoundReport,
    /// Twice the Gibbs risk bound; absent when vacuous.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub majority_vote_risk_bound: Option<f64>,
}

/// Wrapper around a harness report.
#[derive(Debug, Serialize)]
pub struct ValidateOutput {
    pub schema_version: u32,
    pub manifest: RunManifest,
    pub report: ValidationReport,
}

/// Parsed and cross-checked CSV inputs, converted to library types
/// (labels shifted to 0-based).
pub struct EnsembleData {
    pub sample: LabeledSample,
    pub table: PredictionTable,
    pub prior: WeightDistribution,
    pub posterior: WeightDistribution,
    pub num_classes: usize,
}

pub fn load_ensemble_data(
    sample_path: &Path,
    predictions_path: &Path,
    prior_path: &Path,
    posterior_path: &Path,
) -> Result<EnsembleData, CliError> {
    let sample = parse_sample_csv(sample_path)?;
    let preds = parse_predictions_csv(predictions_path)?;

    if preds.ids.len() != sample.ids.len() {
        return Err(CliError::Dimension(format!(
            "{} lists {} examples but {} lists {}",
            sample_path.display(),
            sample.ids.len(),
            predictions_path.display(),
            preds.ids.len()
        )));
    }
    if let Some(i) = (0..sample.ids.len()).find(|&i| sample.ids[i] != preds.ids[i]) {
        return Err(CliError::Dimension(format!(
            "example id mismatch at row {}: sample has '{}' but predictions have '{}' \
             (rows must appear in the same order)",
            i + 1,
            sample.ids[i],
            preds.ids[i]
        )));
    }

    // The class count is the largest label mentioned anywhere; every
    // class below it must then be present in the sample.
    let max_sample = sample.labels.iter().copied().max().unwrap_or(0);
    let max_pred = preds
        .columns
        .iter()
        .flat_map(|c| c.iter().copied())
        .max()
        .unwrap_or(0);
    let num_classes = max_sample.max(max_pred);

    let sample = LabeledSample::new(
        sample.labels.iter().map(|&l| l - 1).collect(),
        num_classes,
    )?;
    let table = PredictionTable::new(
        preds
            .columns
            .iter()
            .map(|col| PredictionVector::new(col.iter().map(|&l| l - 1).collect(), num_classes))
            .collect::<Result<Vec<_>, _>>()?,
    )?;

    let prior = load_weights(prior_path, &preds.classifier_names)?;
    let posterior = load_weights(posterior_path, &preds.classifier_names)?;
    Ok(EnsembleData {
        sample,
        table,
        prior,
        posterior,
        num_classes,
    })
}

fn load_weights(path: &Path, classifier_names: &[String]) -> Result<WeightDistribution, CliError> {
    let rows = parse_weights_csv(path)?;
    if rows.len() != classifier_names.len() {
        return Err(CliError::Dimension(format!(
            "{} lists {} weights but the predictions header names {} classifiers",
            path.display(),
            rows.len(),
            classifier_names.len()
        )));
    }
    if let Some(j) = (0..rows.len()).find(|&j| rows[j].0 != classifier_names[j]) {
        return Err(CliError::Dimension(format!(
            "classifier id mismatch at row {} of {}: expected '{}', got '{}' \
             (rows must follow the predictions header order)",
            j + 1,
            path.display(),
            classifier_names[j],
            rows[j].0
        )));
    }
    Ok(WeightDistribution::new(rows.into_iter().map(|(_, w)| w).collect())?)
}

fn check_delta(delta: f64) -> Result<(), CliError> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(CliError::Parameter(format!(
            "delta = {delta} outside (0, 1]"
        )));
    }
    Ok(())
}

/// The `bound` command: multiclass deviation/norm/majority-vote bounds
/// from CSV inputs.
pub fn cmd_bound(
    sample_path: &Path,
    predictions_path: &Path,
    prior_path: &Path,
    posterior_path: &Path,
    delta: f64,
) -> Result<BoundOutput, CliError> {
    check_delta(delta)?;
    let data = load_ensemble_data(sample_path, predictions_path, prior_path, posterior_path)?;

    let counts = data.sample.class_counts();
    let kl = kl_divergence(&data.posterior, &data.prior)?;
    let empirical = gibbs_empirical_confusion(&data.table, &data.posterior, &data.sample)?;
    let empirical_norm = empirical.operator_norm()?;
    let sigma = sigma_squared(&counts);

    let inputs = BoundInputs {
        kl_divergence: kl,
        m_minus: counts.m_minus(),
        num_classes: data.num_classes,
        delta,
        empirical_norm: Some(empirical_norm),
    };
    let deviation = deviation_bound(&inputs)?;
    let norm = norm_bound(&inputs)?;
    let majority = majority_vote_bound_report(&norm)?;

    let mut manifest = RunManifest::new(
        "bound",
        vec![
            sample_path.display().to_string(),
            predictions_path.display().to_string(),
            prior_path.display().to_string(),
            posterior_path.display().to_string(),
        ],
    );
    manifest.num_classes = Some(data.num_classes);
    manifest.delta = Some(delta);

    Ok(BoundOutput {
        schema_version: SCHEMA_VERSION,
        manifest,
        orientation: ORIENTATION,
        num_classes: data.num_classes,
        num_classifiers: data.table.num_classifiers(),
        class_counts: counts.counts().to_vec(),
        m_minus: counts.m_minus(),
        empirical_gibbs_confusion: empirical.matrix().rows(),
        empirical_norm,
        kl_divergence: kl.is_finite().then_some(kl),
        kl_infinite: kl.is_infinite(),
        sigma_squared: sigma,
        deviation_bound: deviation,
        norm_bound: norm,
        majority_vote_bound: majority,
    })
}

/// The `binary-bound` command: Bernoulli-divergence risk bound for
/// two-class data.
pub fn cmd_binary_bound(
    sample_path: &Path,
    predictions_path: &Path,
    prior_path: &Path,
    posterior_path: &Path,
    delta: f64,
) -> Result<BinaryBoundOutput, CliError> {
    check_delta(delta)?;
    let data = load_ensemble_data(sample_path, predictions_path, prior_path, posterior_path)?;
    if data.num_classes != 2 {
        return Err(CliError::Domain(format!(
            "{} classes detected; the binary-bound command needs exactly 2 \
             (use the bound command for multiclass data)",
            data.num_classes
        )));
    }

    let m = data.sample.len();
    let kl = kl_divergence(&data.posterior, &data.prior)?;
    let empirical_risk: f64 = data
        .table
        .classifiers()
        .iter()
        .zip(data.posterior.weights())
        .map(|(c, &w)| {
            let wrong = (0..m).filter(|&i| c.prediction(i) != data.sample.label(i)).count();
            w * wrong as f64 / m as f64
        })
        .sum();

    let xi_value = xi(m);
    let kl_budget = kl
        .is_finite()
        .then(|| (kl + (xi_value / delta).ln()) / m as f64);
    let report = binary_risk_bound(empirical_risk, kl, m, delta)?;
    let majority = report.bound.map(|b| 2.0 * b);

    let mut manifest = RunManifest::new(
        "binary-bound",
        vec![
            sample_path.display().to_string(),
            predictions_path.display().to_string(),
            prior_path.display().to_string(),
            posterior_path.display().to_string(),
        ],
    );
    manifest.num_classes = Some(2);
    manifest.delta = Some(delta);

    Ok(BinaryBoundOutput {
        schema_version: SCHEMA_VERSION,
        manifest,
        num_classes: 2,
        sample_size: m,
        num_classifiers: data.table.num_classifiers(),
        empirical_gibbs_risk: empirical_risk,
        kl_divergence: kl.is_finite().then_some(kl),
        kl_infinite: kl.is_infinite(),
        xi: xi_value,
        kl_budget,
        gibbs_risk_bound: report,
        majority_vote_risk_bound: majority,
    })
}

/// Load a TOML config, reporting the offending line and column on
/// parse failures.
pub fn load_config(path: &Path) -> Result<SimulationConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    toml::from_str(&text).map_err(|err| {
        let (line, column) = err
            .span()
            .map(|span| offset_to_line_col(&text, span.start))
            .unwrap_or((0, 0));
        CliError::parse(path, line, column, err.message().to_string())
    })
}

fn offset_to_line_col(text: &str, offset: usize) -> (usize, usize) {
    let clamped = offset.min(text.len());
    let mut line = 1;
    let mut col = 1;
    for (i, ch) in text.char_indices() {
        if i >= clamped {
            break;
        }
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

/// Flag overrides applied on top of a config file.
#[derive(Debug, Default, Clone)]
pub struct ValidateOverrides {
    pub harness: Option<validation::Harness>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub delta: Option<f64>,
}

/// The `validate` command: run one harness from a config file.
pub fn cmd_validate(
    config_path: &Path,
    overrides: &ValidateOverrides,
) -> Result<ValidateOutput, CliError> {
    let mut config = load_config(config_path)?;
    if let Some(h) = overrides.harness {
        config.harness = h;
    }
    if let Some(t) = overrides.trials {
        config.num_trials = t;
    }
    if let Some(s) = overrides.seed {
        config.seed = s;
    }
    if let Some(d) = overrides.delta {
        config.delta = d;
    }
    let report = validation::run_harness(&config)?;

    let mut manifest = RunManifest::new("validate", vec![config_path.display().to_string()]);
    manifest.num_classes = Some(config.num_classes);
    manifest.delta = Some(config.delta);
    manifest.seed = Some(config.seed);
    manifest.trials = Some(config.num_trials);

    Ok(ValidateOutput {
        schema_version: SCHEMA_VERSION,
        manifest,
        report,
    })
}

/// Serialize a report with the deterministic float formatter.
pub fn render_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    to_json_string(value).map_err(|e| CliError::Numerical(format!("serialization failed: {e}")))
}

/// Per-trial CSV for a validation report.
pub fn render_trials_csv(output: &ValidateOutput) -> String {
    trial_records_csv(&output.report.records)
}

/// Derive the trials-CSV path next to a JSON output path.
pub fn trials_csv_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".to_string());
    name.push_str(".trials.csv");
    out.with_file_name(name)
}
