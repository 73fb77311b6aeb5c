//! Weighted ensembles over a finite classifier family.
//!
//! A weight distribution over the family induces two classifiers: the
//! Gibbs classifier, which draws a member at random and uses its
//! prediction (so its confusion matrix is the weighted average of the
//! members'), and the majority-vote classifier, which predicts the
//! class with the largest total vote mass. Ties in the vote go to the
//! smallest class index; every inequality checked by the validation
//! harnesses holds for any tie rule, but a deterministic rule keeps
//! runs reproducible.

use crate::confusion::{
    empirical_confusion, true_confusion, ConfusionMatrix, DiscreteDistribution, LabeledSample,
    PredictionVector,
};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Tolerance on weight-vector normalization.
const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A finite classifier family, represented by each member's predictions
/// on a common example set (a sample or a distribution support).
#[derive(Debug, Clone)]
pub struct PredictionTable {
    classifiers: Vec<PredictionVector>,
}

impl PredictionTable {
    pub fn new(classifiers: Vec<PredictionVector>) -> Result<Self> {
        let first = classifiers
            .first()
            .ok_or_else(|| Error::InvalidSample("need at least one classifier".into()))?;
        let (len, q) = (first.len(), first.num_classes());
        for (j, c) in classifiers.iter().enumerate() {
            if c.len() != len {
                return Err(Error::DimensionMismatch(format!(
                    "classifier {j} predicts {} examples, expected {len}",
                    c.len()
                )));
            }
            if c.num_classes() != q {
                return Err(Error::DimensionMismatch(format!(
                    "classifier {j} uses {} classes, expected {q}",
                    c.num_classes()
                )));
            }
        }
        Ok(Self { classifiers })
    }

    pub fn num_classifiers(&self) -> usize {
        self.classifiers.len()
    }

    pub fn num_examples(&self) -> usize {
        self.classifiers[0].len()
    }

    pub fn num_classes(&self) -> usize {
        self.classifiers[0].num_classes()
    }

    pub fn classifier(&self, j: usize) -> &PredictionVector {
        &self.classifiers[j]
    }

    pub fn classifiers(&self) -> &[PredictionVector] {
        &self.classifiers
    }

    /// Restrict every classifier to a subset of example positions.
    pub fn project(&self, indices: &[usize]) -> Self {
        Self {
            classifiers: self.classifiers.iter().map(|c| c.project(indices)).collect(),
        }
    }
}

/// Probability vector over the classifier family (a prior or posterior).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDistribution {
    weights: Vec<f64>,
}

impl WeightDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        if let Some((i, &w)) = weights
            .iter()
            .enumerate()
            .find(|(_, &w)| !w.is_finite() || w < 0.0)
        {
            return Err(Error::InvalidWeights(format!(
                "weight {w} at index {i} is not a finite nonnegative value"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {total}, expected 1 within {WEIGHT_SUM_TOL:.0e}"
            )));
        }
        Ok(Self { weights })
    }

    /// Normalize a vector of nonnegative, not-all-zero weights.
    pub fn from_unnormalized(raw: &[f64]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        if let Some((i, &w)) = raw.iter().enumerate().find(|(_, &w)| !w.is_finite() || w < 0.0) {
            return Err(Error::InvalidWeights(format!(
                "weight {w} at index {i} is not a finite nonnegative value"
            )));
        }
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidWeights("weights sum to zero".into()));
        }
        let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        // Absorb the normalization rounding into the largest weight so
        // the sum-to-one invariant holds exactly enough for `new`.
        let drift: f64 = 1.0 - weights.iter().sum::<f64>();
        let argmax = weights
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        weights[argmax] += drift;
        Self::new(weights)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        Self::from_unnormalized(&vec![1.0; n])
    }

    pub fn point_mass(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::InvalidWeights(format!(
                "point-mass index {index} out of range for {n} classifiers"
            )));
        }
        let mut weights = vec![0.0; n];
        weights[index] = 1.0;
        Self::new(weights)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, j: usize) -> f64 {
        self.weights[j]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Vote mass per class for one example; sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct VoteProfile {
    gamma: Vec<f64>,
}

impl VoteProfile {
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn class_mass(&self, class: usize) -> f64 {
        self.gamma[class]
    }
}

/// Kullback–Leibler divergence `Σ q_i ln(q_i / p_i)` between weight
/// vectors, with `0·ln(0/·) = 0`. Returns `f64::INFINITY` when the
/// posterior puts mass where the prior has none; callers propagate that
/// marker into a vacuous bound rather than an error.
pub fn kl_divergence(posterior: &WeightDistribution, prior: &WeightDistribution) -> Result<f64> {
    if posterior.len() != prior.len() {
        return Err(Error::DimensionMismatch(format!(
            "posterior has {} weights but prior has {}",
            posterior.len(),
            prior.len()
        )));
    }
    let mut sum = 0.0;
    for (&q, &p) in posterior.weights().iter().zip(prior.weights()) {
        if q == 0.0 {
            continue;
        }
        if p == 0.0 {
            return Ok(f64::INFINITY);
        }
        sum += q * (q / p).ln();
    }
    // Rounding can nudge the sum fractionally below zero when the
    // distributions coincide.
    Ok(sum.max(0.0))
}

/// Vote profile of one example: `gamma[q]` is the total weight of
/// classifiers predicting class `q` there.
pub fn vote_profile(
    table: &PredictionTable,
    posterior: &WeightDistribution,
    example: usize,
) -> Result<VoteProfile> {
    if posterior.len() != table.num_classifiers() {
        return Err(Error::DimensionMismatch(format!(
            "table has {} classifiers but posterior has {} weights",
            table.num_classifiers(),
            posterior.len()
        )));
    }
    if example >= table.num_examples() {
        return Err(Error::InvalidParameter(format!(
            "example index {example} out of range for {} examples",
            table.num_examples()
        )));
    }
    let mut gamma = vec![0.0; table.num_classes()];
    for (j, c) in table.classifiers().iter().enumerate() {
        gamma[c.prediction(example)] += posterior.weight(j);
    }
    Ok(VoteProfile { gamma })
}

/// Majority-vote prediction: the class with the largest vote mass,
/// ties broken toward the smallest class index.
pub fn bayes_predict(profile: &VoteProfile) -> usize {
    let mut best = 0;
    for (c, &g) in profile.gamma.iter().enumerate() {
        if g > profile.gamma[best] {
            best = c;
        }
    }
    best
}

fn check_alignment(table: &PredictionTable, posterior: &WeightDistribution) -> Result<()> {
    if posterior.len() != table.num_classifiers() {
        return Err(Error::DimensionMismatch(format!(
            "table has {} classifiers but posterior has {} weights",
            table.num_classifiers(),
            posterior.len()
        )));
    }
    Ok(())
}

fn weighted_confusion_average(
    members: &[ConfusionMatrix],
    posterior: &WeightDistribution,
) -> Result<ConfusionMatrix> {
    let q = members[0].order();
    let mut entries = vec![0.0; q * q];
    for (m, &w) in members.iter().zip(posterior.weights()) {
        for (e, &v) in entries.iter_mut().zip(m.matrix().entries()) {
            *e += w * v;
        }
    }
    ConfusionMatrix::new(SquareMatrix::new(q, entries)?, true)
}

/// Empirical confusion matrix of the Gibbs classifier: the
/// posterior-weighted average of the members' empirical confusion
/// matrices.
pub fn gibbs_empirical_confusion(
    table: &PredictionTable,
    posterior: &WeightDistribution,
    sample: &LabeledSample,
) -> Result<ConfusionMatrix> {
    check_alignment(table, posterior)?;
    let members: Vec<ConfusionMatrix> = table
        .classifiers()
        .iter()
        .map(|c| empirical_confusion(sample, c))
        .collect::<Result<_>>()?;
    weighted_confusion_average(&members, posterior)
}

/// True confusion matrix of the Gibbs classifier under a known finite
/// distribution: the posterior-weighted average of the members' exact
/// confusion matrices.
pub fn gibbs_true_confusion(
    table: &PredictionTable,
    posterior: &WeightDistribution,
    dist: &DiscreteDistribution,
) -> Result<ConfusionMatrix> {
    check_alignment(table, posterior)?;
    let members: Vec<ConfusionMatrix> = table
        .classifiers()
        .iter()
        .map(|c| true_confusion(dist, c))
        .collect::<Result<_>>()?;
    weighted_confusion_average(&members, posterior)
}

/// Majority-vote predictions on every support point.
pub fn bayes_predictions(
    table: &PredictionTable,
    posterior: &WeightDistribution,
) -> Result<PredictionVector> {
    check_alignment(table, posterior)?;
    let preds: Vec<usize> = (0..table.num_examples())
        .map(|x| Ok(bayes_predict(&vote_profile(table, posterior, x)?)))
        .collect::<Result<_>>()?;
    PredictionVector::new(preds, table.num_classes())
}

/// True confusion matrix of the majority-vote classifier, by exact
/// enumeration over the support. Diagonal zeroed, matching the
/// error-measure convention.
pub fn bayes_true_confusion(
    table: &PredictionTable,
    posterior: &WeightDistribution,
    dist: &DiscreteDistribution,
) -> Result<ConfusionMatrix> {
    let preds = bayes_predictions(table, posterior)?;
    true_confusion(dist, &preds)
}

fn check_class_pair(dist: &DiscreteDistribution, p: usize, q: usize) -> Result<()> {
    if p >= dist.num_classes() || q >= dist.num_classes() {
        return Err(Error::InvalidParameter(format!(
            "class pair ({},{}) out of range for {} classes",
            p + 1,
            q + 1,
            dist.num_classes()
        )));
    }
    Ok(())
}

/// Conditional Gibbs risk: the probability, conditioned on the true
/// class being `p`, that a posterior-drawn classifier predicts `q`.
/// Unlike the confusion matrix this keeps the diagonal `q = p`
/// accessible.
pub fn conditional_gibbs_risk(
    table: &PredictionTable,
    posterior: &WeightDistribution,
    dist: &DiscreteDistribution,
    p: usize,
    q: usize,
) -> Result<f64> {
    check_alignment(table, posterior)?;
    check_class_pair(dist, p, q)?;
    if table.num_examples() != dist.support_size() {
        return Err(Error::DimensionMismatch(format!(
            "table covers {} examples but support has {} points",
            table.num_examples(),
            dist.support_size()
        )));
    }
    let class_mass = dist.class_marginals()[p];
    let mut risk = 0.0;
    for x in 0..dist.support_size() {
        if dist.label(x) != p {
            continue;
        }
        let gamma_q = vote_profile(table, posterior, x)?.class_mass(q);
        risk += dist.probability(x) * gamma_q;
    }
    Ok(risk / class_mass)
}

/// Conditional majority-vote risk: the probability, conditioned on the
/// true class being `p`, that the majority vote predicts `q`.
pub fn conditional_bayes_risk(
    table: &PredictionTable,
    posterior: &WeightDistribution,
    dist: &DiscreteDistribution,
    p: usize,
    q: usize,
) -> Result<f64> {
    check_alignment(table, posterior)?;
    check_class_pair(dist, p, q)?;
    if table.num_examples() != dist.support_size() {
        return Err(Error::DimensionMismatch(format!(
            "table covers {} examples but support has {} points",
            table.num_examples(),
            dist.support_size()
        )));
    }
    let class_mass = dist.class_marginals()[p];
    let mut risk = 0.0;
    for x in 0..dist.support_size() {
        if dist.label(x) != p {
            continue;
        }
        if bayes_predict(&vote_profile(table, posterior, x)?) == q {
            risk += dist.probability(x);
        }
    }
    Ok(risk / class_mass)
}

/// Misclassification rate from a diagonal-zeroed confusion matrix and
/// class priors: the 1-norm of `Cᵀ·priors`, i.e.
/// `Σ_p priors_p Σ_{q≠p} c_pq`.
pub fn misclassification_rate(matrix: &ConfusionMatrix, priors: &[f64]) -> Result<f64> {
    if !matrix.diagonal_zeroed() {
        return Err(Error::InvalidParameter(
            "misclassification rate needs a diagonal-zeroed confusion matrix".into(),
        ));
    }
    if priors.len() != matrix.order() {
        return Err(Error::DimensionMismatch(format!(
            "{} priors for an order-{} matrix",
            priors.len(),
            matrix.order()
        )));
    }
    if priors.iter().any(|&p| !p.is_finite() || p < 0.0) {
        return Err(Error::InvalidParameter(
            "class priors must be finite and nonnegative".into(),
        ));
    }
    let total: f64 = priors.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "class priors sum to {total}, expected 1"
        )));
    }
    let q = matrix.order();
    let rate = priors
        .iter()
        .enumerate()
        .map(|(p, &prior)| prior * (0..q).map(|c| matrix.get(p, c)).sum::<f64>())
        .sum();
    Ok(rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[&[usize]], q: usize) -> PredictionTable {
        PredictionTable::new(
            rows.iter()
                .map(|r| PredictionVector::new(r.to_vec(), q).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn kl_of_identical_distributions_is_zero() {
        let w = WeightDistribution::new(vec![0.25, 0.25, 0.5]).unwrap();
        assert_eq!(kl_divergence(&w, &w).unwrap(), 0.0);
    }

    #[test]
    fn kl_of_point_mass_against_uniform() {
        let post = WeightDistribution::new(vec![1.0, 0.0]).unwrap();
        let prior = WeightDistribution::new(vec![0.5, 0.5]).unwrap();
        let kl = kl_divergence(&post, &prior).unwrap();
        assert!((kl - std::f64::consts::LN_2).abs() < 1e-15, "kl = {kl}");
    }

    #[test]
    fn kl_is_infinite_without_absolute_continuity() {
        let post = WeightDistribution::new(vec![0.5, 0.5]).unwrap();
        let prior = WeightDistribution::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(kl_divergence(&post, &prior).unwrap(), f64::INFINITY);
    }

    #[test]
    fn kl_rejects_length_mismatch() {
        let a = WeightDistribution::new(vec![1.0]).unwrap();
        let b = WeightDistribution::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            kl_divergence(&a, &b),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn weights_must_sum_to_one() {
        assert!(WeightDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(WeightDistribution::new(vec![0.5, -0.5, 1.0]).is_err());
    }

    #[test]
    fn vote_profile_single_classifier() {
        let t = table(&[&[1]], 3);
        let w = WeightDistribution::uniform(1).unwrap();
        let g = vote_profile(&t, &w, 0).unwrap();
        assert_eq!(g.gamma(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn vote_profile_two_classifiers() {
        let t = table(&[&[0], &[1]], 3);
        let w = WeightDistribution::new(vec![0.6, 0.4]).unwrap();
        let g = vote_profile(&t, &w, 0).unwrap();
        assert_eq!(g.gamma(), &[0.6, 0.4, 0.0]);
    }

    #[test]
    fn vote_profile_uniform_over_four() {
        let t = table(&[&[0], &[0], &[1], &[2]], 3);
        let w = WeightDistribution::uniform(4).unwrap();
        let g = vote_profile(&t, &w, 0).unwrap();
        assert_eq!(g.gamma(), &[0.5, 0.25, 0.25]);
    }

    #[test]
    fn bayes_predict_takes_argmax_and_breaks_ties_low() {
        assert_eq!(bayes_predict(&VoteProfile { gamma: vec![0.6, 0.4, 0.0] }), 0);
        assert_eq!(bayes_predict(&VoteProfile { gamma: vec![0.25, 0.5, 0.25] }), 1);
        assert_eq!(bayes_predict(&VoteProfile { gamma: vec![0.5, 0.5, 0.0] }), 0);
    }

    #[test]
    fn gibbs_empirical_point_mass_recovers_member() {
        let sample = LabeledSample::new(vec![0, 0, 1], 2).unwrap();
        let t = table(&[&[0, 1, 1], &[0, 0, 0]], 2);
        let w = WeightDistribution::point_mass(2, 0).unwrap();
        let g = gibbs_empirical_confusion(&t, &w, &sample).unwrap();
        let direct = empirical_confusion(&sample, t.classifier(0)).unwrap();
        assert_eq!(g.matrix().entries(), direct.matrix().entries());
    }

    #[test]
    fn gibbs_empirical_uniform_is_entrywise_mean() {
        let sample = LabeledSample::new(vec![0, 0, 1, 1], 2).unwrap();
        let t = table(&[&[1, 0, 1, 1], &[0, 0, 0, 1]], 2);
        let w = WeightDistribution::uniform(2).unwrap();
        let g = gibbs_empirical_confusion(&t, &w, &sample).unwrap();
        let a = empirical_confusion(&sample, t.classifier(0)).unwrap();
        let b = empirical_confusion(&sample, t.classifier(1)).unwrap();
        for p in 0..2 {
            for q in 0..2 {
                let mean = 0.5 * (a.get(p, q) + b.get(p, q));
                assert!((g.get(p, q) - mean).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn gibbs_of_perfect_family_is_zero() {
        let sample = LabeledSample::new(vec![0, 1, 1], 2).unwrap();
        let t = table(&[&[0, 1, 1], &[0, 1, 1]], 2);
        let w = WeightDistribution::uniform(2).unwrap();
        let g = gibbs_empirical_confusion(&t, &w, &sample).unwrap();
        assert!(g.matrix().entries().iter().all(|&e| e == 0.0));
    }

    #[test]
    fn bayes_true_confusion_majority_correct_everywhere() {
        // Two of three equal-weight members are correct on every point.
        let dist = DiscreteDistribution::new(vec![0, 1], vec![0.5, 0.5], 2).unwrap();
        let t = table(&[&[0, 1], &[0, 1], &[1, 0]], 2);
        let w = WeightDistribution::uniform(3).unwrap();
        let b = bayes_true_confusion(&t, &w, &dist).unwrap();
        assert!(b.matrix().entries().iter().all(|&e| e == 0.0));
    }

    #[test]
    fn bayes_point_mass_equals_member_true_confusion() {
        let dist =
            DiscreteDistribution::new(vec![0, 0, 1], vec![0.3, 0.2, 0.5], 2).unwrap();
        let t = table(&[&[0, 1, 1], &[1, 1, 0]], 2);
        let w = WeightDistribution::point_mass(2, 1).unwrap();
        let b = bayes_true_confusion(&t, &w, &dist).unwrap();
        let direct = true_confusion(&dist, t.classifier(1)).unwrap();
        assert_eq!(b.matrix().entries(), direct.matrix().entries());
    }

    #[test]
    fn conditional_risks_of_perfect_single_classifier() {
        let dist = DiscreteDistribution::new(vec![0, 1], vec![0.5, 0.5], 2).unwrap();
        let t = table(&[&[0, 1]], 2);
        let w = WeightDistribution::uniform(1).unwrap();
        assert_eq!(conditional_gibbs_risk(&t, &w, &dist, 0, 1).unwrap(), 0.0);
        assert_eq!(conditional_gibbs_risk(&t, &w, &dist, 0, 0).unwrap(), 1.0);
        assert_eq!(conditional_bayes_risk(&t, &w, &dist, 1, 1).unwrap(), 1.0);
    }

    #[test]
    fn misclassification_rate_single_entry() {
        let m = ConfusionMatrix::new(
            SquareMatrix::new(2, vec![0.0, 0.2, 0.0, 0.0]).unwrap(),
            true,
        )
        .unwrap();
        let rate = misclassification_rate(&m, &[0.5, 0.5]).unwrap();
        assert!((rate - 0.1).abs() < 1e-15);
    }

    #[test]
    fn misclassification_rate_of_zero_matrix() {
        let m = ConfusionMatrix::zeros(3).unwrap();
        assert_eq!(misclassification_rate(&m, &[0.2, 0.3, 0.5]).unwrap(), 0.0);
    }

    #[test]
    fn misclassification_rate_rejects_bad_priors() {
        let m = ConfusionMatrix::zeros(2).unwrap();
        assert!(misclassification_rate(&m, &[0.5, 0.6]).is_err());
        assert!(misclassification_rate(&m, &[0.5]).is_err());
    }

    #[test]
    fn misclassification_rate_requires_zeroed_diagonal() {
        let m = ConfusionMatrix::new(
            SquareMatrix::new(2, vec![0.9, 0.1, 0.0, 1.0]).unwrap(),
            false,
        )
        .unwrap();
        assert!(misclassification_rate(&m, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn point_mass_posterior_matches_gibbs_member_true_confusion() {
        let dist =
            DiscreteDistribution::new(vec![0, 1, 1], vec![0.4, 0.3, 0.3], 2).unwrap();
        let t = table(&[&[1, 1, 0], &[0, 1, 1]], 2);
        let w = WeightDistribution::point_mass(2, 0).unwrap();
        let g = gibbs_true_confusion(&t, &w, &dist).unwrap();
        let direct = true_confusion(&dist, t.classifier(0)).unwrap();
        assert_eq!(g.matrix().entries(), direct.matrix().entries());
    }
}
