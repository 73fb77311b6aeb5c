//! Confusion-matrix generalization bounds for multiclass ensemble
//! classifiers.
//!
//! The library measures a classifier's error by its confusion matrix —
//! the matrix of class-conditional error probabilities with the diagonal
//! discarded — sized by the operator (spectral) norm. For an ensemble
//! weighted by a posterior distribution it provides:
//!
//! - exact empirical and true confusion matrices, Gibbs (weighted
//!   average) and majority-vote variants, built from prediction tables
//!   and finite discrete distributions ([`confusion`], [`ensemble`]);
//! - closed-form high-probability bounds relating the empirical and true
//!   Gibbs confusion norms, the binary Bernoulli-divergence risk bound,
//!   and the factor-Q bridge from Gibbs to majority-vote risk
//!   ([`bounds`]);
//! - the spectral machinery behind the norm: self-adjoint dilation plus
//!   a cyclic Jacobi eigensolver ([`matrix`]);
//! - seeded Monte-Carlo and exact-enumeration harnesses that certify
//!   every inequality empirically, with bit-reproducible reports
//!   ([`validation`]).

pub mod bounds;
pub mod confusion;
pub mod ensemble;
pub mod error;
pub mod matrix;
pub mod report;
pub mod rng;
pub mod validation;

pub use bounds::{
    binary_kl, binary_kl_inverse, binary_risk_bound, deviation_bound, majority_vote_bound_report,
    majority_vote_norm_bound, matrix_tail_bound, norm_bound, sigma_squared, xi, BoundInputs,
    BoundKind, BoundReport, SigmaSquared,
};
pub use confusion::{
    empirical_conditional_matrix, empirical_confusion, example_confusion, true_confusion,
    ClassCounts, ConfusionMatrix, DiscreteDistribution, LabeledSample, PredictionVector,
};
pub use ensemble::{
    bayes_predict, bayes_predictions, bayes_true_confusion, conditional_bayes_risk,
    conditional_gibbs_risk, gibbs_empirical_confusion, gibbs_true_confusion, kl_divergence,
    misclassification_rate, vote_profile, PredictionTable, VoteProfile, WeightDistribution,
};
pub use error::{Error, Result};
pub use matrix::{SquareMatrix, SymmetricMatrix};
pub use validation::{
    build_world, make_discrete_distribution, run_harness, sample_training_set,
    sample_training_set_iid, Harness, PosteriorMode, PriorMode, SamplingMode, SimulationConfig,
    TrialRecord, ValidationReport, Verdict, World,
};
