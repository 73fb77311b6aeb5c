//! Labeled samples, discrete distributions, and confusion matrices.
//!
//! Class labels are `0..Q` internally; file formats at the CLI boundary
//! are 1-based. A confusion matrix is oriented row = true class `p`,
//! column = predicted class `q`, so entry `(p, q)` estimates
//! `P(f(x) = q | y = p)`. The error-measure variant zeroes the diagonal:
//! its only nonzero entries correspond to misclassifications. The
//! conditional variant keeps the diagonal, making every row a
//! conditional distribution that sums to one.

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Slack for validating probabilities assembled from floating-point
/// sums; values within this margin of [0, 1] are clamped.
const PROB_SLACK: f64 = 1e-9;

/// A labeled sample: one class label per example, every class in
/// `0..num_classes` represented at least once.
#[derive(Debug, Clone)]
pub struct LabeledSample {
    labels: Vec<usize>,
    num_classes: usize,
}

impl LabeledSample {
    pub fn new(labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if num_classes == 0 {
            return Err(Error::InvalidSample("need at least one class".into()));
        }
        let mut counts = vec![0usize; num_classes];
        for (i, &y) in labels.iter().enumerate() {
            if y >= num_classes {
                return Err(Error::InvalidSample(format!(
                    "label {} at example {} out of range for {} classes",
                    y + 1,
                    i,
                    num_classes
                )));
            }
            counts[y] += 1;
        }
        if let Some(y) = counts.iter().position(|&c| c == 0) {
            return Err(Error::InvalidSample(format!(
                "class {} has no examples; every class needs at least one",
                y + 1
            )));
        }
        Ok(Self {
            labels,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn label(&self, index: usize) -> usize {
        self.labels[index]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Exact per-class tallies and their minimum.
    pub fn class_counts(&self) -> ClassCounts {
        let mut counts = vec![0usize; self.num_classes];
        for &y in &self.labels {
            counts[y] += 1;
        }
        // Every count is >= 1 by the constructor invariant.
        let m_minus = counts.iter().copied().min().unwrap();
        ClassCounts { counts, m_minus }
    }
}

/// Per-class example counts `m_1..m_Q` and their minimum `m₋`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCounts {
    counts: Vec<usize>,
    m_minus: usize,
}

impl ClassCounts {
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn count(&self, class: usize) -> usize {
        self.counts[class]
    }

    pub fn m_minus(&self) -> usize {
        self.m_minus
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn num_classes(&self) -> usize {
        self.counts.len()
    }
}

/// One classifier's predicted labels over a fixed example set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionVector {
    predictions: Vec<usize>,
    num_classes: usize,
}

impl PredictionVector {
    pub fn new(predictions: Vec<usize>, num_classes: usize) -> Result<Self> {
        if let Some((i, &p)) = predictions.iter().enumerate().find(|(_, &p)| p >= num_classes) {
            return Err(Error::InvalidSample(format!(
                "prediction {} at example {} out of range for {} classes",
                p + 1,
                i,
                num_classes
            )));
        }
        Ok(Self {
            predictions,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.predictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictions.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn prediction(&self, index: usize) -> usize {
        self.predictions[index]
    }

    pub fn predictions(&self) -> &[usize] {
        &self.predictions
    }

    /// Restrict to a subset of example positions (used to project
    /// support-level predictions onto a drawn sample).
    pub fn project(&self, indices: &[usize]) -> Self {
        Self {
            predictions: indices.iter().map(|&i| self.predictions[i]).collect(),
            num_classes: self.num_classes,
        }
    }
}

/// Confusion matrix: entries in [0, 1], row sums at most 1. When
/// `diagonal_zeroed` the diagonal is exactly zero and only
/// misclassification mass remains.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix {
    matrix: SquareMatrix,
    diagonal_zeroed: bool,
}

impl ConfusionMatrix {
    pub fn new(matrix: SquareMatrix, diagonal_zeroed: bool) -> Result<Self> {
        let q = matrix.order();
        let mut entries = matrix.entries().to_vec();
        for (pos, e) in entries.iter_mut().enumerate() {
            if *e < -PROB_SLACK || *e > 1.0 + PROB_SLACK {
                return Err(Error::InvalidMatrix(format!(
                    "confusion entry {} at ({},{}) outside [0,1]",
                    e,
                    pos / q,
                    pos % q
                )));
            }
            *e = e.clamp(0.0, 1.0);
        }
        for p in 0..q {
            if diagonal_zeroed && entries[p * q + p] != 0.0 {
                return Err(Error::InvalidMatrix(format!(
                    "diagonal entry ({p},{p}) must be zero, got {}",
                    entries[p * q + p]
                )));
            }
            let row_sum: f64 = entries[p * q..(p + 1) * q].iter().sum();
            if row_sum > 1.0 + PROB_SLACK {
                return Err(Error::InvalidMatrix(format!(
                    "row {p} sums to {row_sum}, exceeding 1"
                )));
            }
        }
        Ok(Self {
            matrix: SquareMatrix::new(q, entries)?,
            diagonal_zeroed,
        })
    }

    pub fn zeros(order: usize) -> Result<Self> {
        Self::new(SquareMatrix::zeros(order)?, true)
    }

    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    pub fn get(&self, p: usize, q: usize) -> f64 {
        self.matrix.get(p, q)
    }

    pub fn diagonal_zeroed(&self) -> bool {
        self.diagonal_zeroed
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    /// Copy with the diagonal discarded, turning a conditional matrix
    /// into the error-measure form.
    pub fn with_zeroed_diagonal(&self) -> Self {
        let q = self.order();
        let mut entries = self.matrix.entries().to_vec();
        for p in 0..q {
            entries[p * q + p] = 0.0;
        }
        Self {
            matrix: SquareMatrix::new(q, entries).expect("entries already validated"),
            diagonal_zeroed: true,
        }
    }

    pub fn operator_norm(&self) -> Result<f64> {
        self.matrix.operator_norm()
    }
}

/// Finite distribution over (support point, label) pairs. Making the
/// distribution finite and known lets true confusion matrices be
/// computed by exact enumeration.
#[derive(Debug, Clone)]
pub struct DiscreteDistribution {
    labels: Vec<usize>,
    probabilities: Vec<f64>,
    num_classes: usize,
}

impl DiscreteDistribution {
    pub fn new(labels: Vec<usize>, probabilities: Vec<f64>, num_classes: usize) -> Result<Self> {
        if labels.len() != probabilities.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels but {} probabilities",
                labels.len(),
                probabilities.len()
            )));
        }
        if labels.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let mut marginals = vec![0.0f64; num_classes];
        for (i, (&y, &p)) in labels.iter().zip(&probabilities).enumerate() {
            if y >= num_classes {
                return Err(Error::InvalidDistribution(format!(
                    "label {} at support point {} out of range for {} classes",
                    y + 1,
                    i,
                    num_classes
                )));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "probability {p} at support point {i} is not a finite nonnegative value"
                )));
            }
            marginals[y] += p;
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        if let Some(y) = marginals.iter().position(|&m| m <= 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "class {} has zero marginal probability",
                y + 1
            )));
        }
        Ok(Self {
            labels,
            probabilities,
            num_classes,
        })
    }

    pub fn support_size(&self) -> usize {
        self.labels.len()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn label(&self, point: usize) -> usize {
        self.labels[point]
    }

    pub fn probability(&self, point: usize) -> f64 {
        self.probabilities[point]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Marginal probability of each class.
    pub fn class_marginals(&self) -> Vec<f64> {
        let mut marginals = vec![0.0; self.num_classes];
        for (&y, &p) in self.labels.iter().zip(&self.probabilities) {
            marginals[y] += p;
        }
        marginals
    }
}

/// Per-example confusion matrix: at most one nonzero entry,
/// `(y_i, f(x_i)) = 1 / m_{y_i}` when the prediction is wrong, the zero
/// matrix when it is correct.
pub fn example_confusion(
    index: usize,
    sample: &LabeledSample,
    prediction: usize,
    counts: &ClassCounts,
) -> Result<ConfusionMatrix> {
    let q = sample.num_classes();
    if index >= sample.len() {
        return Err(Error::InvalidParameter(format!(
            "example index {index} out of range for sample of size {}",
            sample.len()
        )));
    }
    if prediction >= q {
        return Err(Error::InvalidParameter(format!(
            "prediction {} out of range for {} classes",
            prediction + 1,
            q
        )));
    }
    let truth = sample.label(index);
    let mut entries = vec![0.0; q * q];
    if prediction != truth {
        entries[truth * q + prediction] = 1.0 / counts.count(truth) as f64;
    }
    ConfusionMatrix::new(SquareMatrix::new(q, entries)?, true)
}

fn tally(sample: &LabeledSample, preds: &PredictionVector) -> Result<Vec<usize>> {
    if preds.len() != sample.len() {
        return Err(Error::DimensionMismatch(format!(
            "sample has {} examples but predictions have {}",
            sample.len(),
            preds.len()
        )));
    }
    if preds.num_classes() != sample.num_classes() {
        return Err(Error::DimensionMismatch(format!(
            "sample has {} classes but predictions have {}",
            sample.num_classes(),
            preds.num_classes()
        )));
    }
    let q = sample.num_classes();
    let mut counts = vec![0usize; q * q];
    for i in 0..sample.len() {
        counts[sample.label(i) * q + preds.prediction(i)] += 1;
    }
    Ok(counts)
}

/// Empirical confusion matrix with the diagonal discarded: entry
/// `(p, q)`, p ≠ q, is the fraction of class-`p` examples predicted as
/// class `q`. Equals the sum of `example_confusion` over all examples.
pub fn empirical_confusion(
    sample: &LabeledSample,
    preds: &PredictionVector,
) -> Result<ConfusionMatrix> {
    let q = sample.num_classes();
    let tallies = tally(sample, preds)?;
    let counts = sample.class_counts();
    let mut entries = vec![0.0; q * q];
    for p in 0..q {
        for c in 0..q {
            if p != c {
                entries[p * q + c] = tallies[p * q + c] as f64 / counts.count(p) as f64;
            }
        }
    }
    ConfusionMatrix::new(SquareMatrix::new(q, entries)?, true)
}

/// Empirical conditional-frequency matrix: the diagonal is retained and
/// every row sums to one. Zeroing its diagonal reproduces
/// [`empirical_confusion`].
pub fn empirical_conditional_matrix(
    sample: &LabeledSample,
    preds: &PredictionVector,
) -> Result<ConfusionMatrix> {
    let q = sample.num_classes();
    let tallies = tally(sample, preds)?;
    let counts = sample.class_counts();
    let mut entries = vec![0.0; q * q];
    for p in 0..q {
        for c in 0..q {
            entries[p * q + c] = tallies[p * q + c] as f64 / counts.count(p) as f64;
        }
    }
    ConfusionMatrix::new(SquareMatrix::new(q, entries)?, false)
}

/// True confusion matrix of a classifier under a known finite
/// distribution: entry `(p, q)`, p ≠ q, is `P(f(x) = q | y = p)`,
/// computed by exact enumeration over the support. Diagonal zero.
pub fn true_confusion(
    dist: &DiscreteDistribution,
    preds_on_support: &PredictionVector,
) -> Result<ConfusionMatrix> {
    if preds_on_support.len() != dist.support_size() {
        return Err(Error::DimensionMismatch(format!(
            "distribution support has {} points but predictions cover {}",
            dist.support_size(),
            preds_on_support.len()
        )));
    }
    if preds_on_support.num_classes() != dist.num_classes() {
        return Err(Error::DimensionMismatch(format!(
            "distribution has {} classes but predictions have {}",
            dist.num_classes(),
            preds_on_support.num_classes()
        )));
    }
    let q = dist.num_classes();
    let marginals = dist.class_marginals();
    let mut joint = vec![0.0f64; q * q];
    for x in 0..dist.support_size() {
        joint[dist.label(x) * q + preds_on_support.prediction(x)] += dist.probability(x);
    }
    let mut entries = vec![0.0; q * q];
    for p in 0..q {
        for c in 0..q {
            if p != c {
                entries[p * q + c] = joint[p * q + c] / marginals[p];
            }
        }
    }
    ConfusionMatrix::new(SquareMatrix::new(q, entries)?, true)
}
