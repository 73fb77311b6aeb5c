//! Closed-form generalization bounds and their numeric building blocks.
//!
//! Multiclass path: with per-class counts `m_y`, minimum `m₋`, and a
//! posterior/prior divergence `KL`, the operator-norm deviation between
//! the empirical and true Gibbs confusion matrices is bounded (with
//! probability `1 − δ`, whenever `m₋ > 8Q`) by
//!
//! ```text
//! √( 8Q / (m₋ − 8Q) · [KL + ln(m₋ / 4δ)] )
//! ```
//!
//! Binary path: the Gibbs risk satisfies
//! `kl(R_S, R) ≤ (KL + ln(ξ(m)/δ)) / m`, inverted here by bisection,
//! with `kl` the Bernoulli divergence and `ξ(m)` the binomial
//! normalizer `Σ_i C(m,i) (i/m)^i (1−i/m)^(m−i)`.
//!
//! Failed preconditions (`m₋ ≤ 8Q`, infinite `KL`) yield a structured
//! vacuous report instead of an error: a vacuous bound is a meaningful
//! mathematical outcome that callers must be able to surface.

use serde::{Deserialize, Serialize};

use crate::confusion::ClassCounts;
use crate::error::{Error, Result};

/// Lanczos coefficients (g = 7) for the log-gamma approximation, kept
/// at their published precision; relative error is near machine
/// precision for arguments ≥ 1.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision, clippy::inconsistent_digit_grouping)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Natural log of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma needs a positive argument");
    let z = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Natural log of the binomial coefficient `C(m, i)`.
fn ln_choose(m: usize, i: usize) -> f64 {
    ln_gamma(m as f64 + 1.0) - ln_gamma(i as f64 + 1.0) - ln_gamma((m - i) as f64 + 1.0)
}

/// Binomial normalizer `ξ(m) = Σ_{i=0}^m C(m,i) (i/m)^i (1−i/m)^(m−i)`
/// with the `0⁰ = 1` convention, evaluated term-by-term in log space so
/// it stays stable up to `m` in the millions. The endpoint terms
/// `i = 0` and `i = m` each contribute exactly 1, so `ξ(m) ≥ 2`.
pub fn xi(m: usize) -> f64 {
    assert!(m >= 1, "xi needs m >= 1");
    let mf = m as f64;
    let mut sum = 2.0;
    for i in 1..m {
        let fi = i as f64;
        let log_term =
            ln_choose(m, i) + fi * (fi / mf).ln() + (mf - fi) * ((mf - fi) / mf).ln();
        sum += log_term.exp();
    }
    sum
}

/// Bernoulli Kullback–Leibler divergence
/// `kl(a, b) = a ln(a/b) + (1−a) ln((1−a)/(1−b))` with `0·ln 0 = 0`.
/// Returns `f64::INFINITY` when `b ∈ {0, 1}` disagrees with `a`.
pub fn binary_kl(a: f64, b: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&a), "a = {a} outside [0,1]");
    debug_assert!((0.0..=1.0).contains(&b), "b = {b} outside [0,1]");
    let first = if a == 0.0 {
        0.0
    } else if b == 0.0 {
        return f64::INFINITY;
    } else {
        a * (a / b).ln()
    };
    let second = if a == 1.0 {
        0.0
    } else if b == 1.0 {
        return f64::INFINITY;
    } else {
        (1.0 - a) * ((1.0 - a) / (1.0 - b)).ln()
    };
    (first + second).max(0.0)
}

/// Upper saturation point for the divergence inversion; `binary_kl`
/// stays finite there for every `a < 1`.
const KL_INVERSE_CAP: f64 = 1.0 - 1e-15;

/// Largest `b ∈ [a, 1)` with `binary_kl(a, b) ≤ budget`, by bisection.
/// `binary_kl(a, ·)` is strictly increasing on `[a, 1)`, so bisection is
/// safe; the interval is shrunk to ~1e-14, well inside the 1e-12
/// contract, because the divergence is steep near 1. Saturates at
/// `1 − 1e-15` for budgets beyond the representable range.
pub fn binary_kl_inverse(a: f64, budget: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&a), "a = {a} outside [0,1]");
    debug_assert!(budget >= 0.0, "budget = {budget} is negative");
    if budget == 0.0 || a >= KL_INVERSE_CAP {
        return a;
    }
    if binary_kl(a, KL_INVERSE_CAP) <= budget {
        return KL_INVERSE_CAP;
    }
    let (mut lo, mut hi) = (a, KL_INVERSE_CAP);
    for _ in 0..200 {
        if hi - lo <= 1e-14 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if binary_kl(a, mid) <= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Variance proxy of the per-example confusion matrices: exact value
/// `Σ_y 1/m_y` and its upper bound `Q / m₋`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaSquared {
    pub exact: f64,
    pub upper: f64,
}

pub fn sigma_squared(counts: &ClassCounts) -> SigmaSquared {
    let exact = counts.counts().iter().map(|&m| 1.0 / m as f64).sum();
    let upper = counts.num_classes() as f64 / counts.m_minus() as f64;
    SigmaSquared { exact, upper }
}

/// Tail bound `2Q·exp(−ε²/(8σ²))` on the probability that the operator
/// norm of a sum of centered per-example confusion matrices reaches ε.
pub fn matrix_tail_bound(epsilon: f64, sigma_sq: f64, num_classes: usize) -> f64 {
    debug_assert!(epsilon >= 0.0, "epsilon = {epsilon} is negative");
    debug_assert!(sigma_sq > 0.0, "sigma_sq = {sigma_sq} must be positive");
    2.0 * num_classes as f64 * (-epsilon * epsilon / (8.0 * sigma_sq)).exp()
}

/// `Q · gibbs_norm`: norm bound for the majority-vote confusion matrix
/// given one for the Gibbs confusion matrix.
pub fn majority_vote_norm_bound(gibbs_norm: f64, num_classes: usize) -> Result<f64> {
    if num_classes < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 classes, got {num_classes}"
        )));
    }
    if !gibbs_norm.is_finite() || gibbs_norm < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gibbs norm {gibbs_norm} must be finite and nonnegative"
        )));
    }
    Ok(num_classes as f64 * gibbs_norm)
}

/// Inputs shared by the bound evaluators. `kl_divergence` may be
/// `f64::INFINITY` (posterior unsupported by the prior), which yields a
/// vacuous report.
#[derive(Debug, Clone, Copy)]
pub struct BoundInputs {
    pub kl_divergence: f64,
    pub m_minus: usize,
    pub num_classes: usize,
    pub delta: f64,
    /// Operator norm of the empirical Gibbs confusion matrix; required
    /// by [`norm_bound`], unused by [`deviation_bound`].
    pub empirical_norm: Option<f64>,
}

impl BoundInputs {
    fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta = {} outside (0, 1]",
                self.delta
            )));
        }
        if self.m_minus < 1 {
            return Err(Error::InvalidParameter("m_minus must be at least 1".into()));
        }
        if self.num_classes < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 classes, got {}",
                self.num_classes
            )));
        }
        if self.kl_divergence.is_nan() || self.kl_divergence < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "KL divergence {} must be nonnegative (or +inf)",
                self.kl_divergence
            )));
        }
        if let Some(norm) = self.empirical_norm {
            if !norm.is_finite() || norm < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "empirical norm {norm} must be finite and nonnegative"
                )));
            }
        }
        Ok(())
    }
}

/// Which bound a report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// Deviation between empirical and true Gibbs confusion norms.
    Deviation,
    /// Upper bound on the true Gibbs confusion norm.
    Norm,
    /// Binary Gibbs risk bound via the Bernoulli divergence.
    Binary,
    /// Majority-vote norm bound derived from a Gibbs norm bound.
    BayesFactor,
}

/// Components echoed alongside every bound value. For the binary kind,
/// `m_minus` holds the full sample size and `sigma_sq_bound` is absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundComponents {
    /// `None` encodes an infinite divergence.
    pub kl_divergence: Option<f64>,
    pub kl_infinite: bool,
    pub m_minus: usize,
    pub num_classes: usize,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_sq_bound: Option<f64>,
}

/// A computed bound or a structured vacuous outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    /// `None` exactly when `vacuous` is set.
    pub bound: Option<f64>,
    pub vacuous: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vacuous_reason: Option<String>,
    /// Set when the bound exceeds √Q, the largest operator norm a
    /// confusion matrix with unit row sums can attain; past that scale
    /// the bound is uninformative for this norm even though finite.
    pub exceeds_norm_scale: bool,
    pub components: BoundComponents,
}

impl BoundReport {
    fn components(inputs: &BoundInputs, sigma_sq_bound: Option<f64>) -> BoundComponents {
        let infinite = inputs.kl_divergence.is_infinite();
        BoundComponents {
            kl_divergence: (!infinite).then_some(inputs.kl_divergence),
            kl_infinite: infinite,
            m_minus: inputs.m_minus,
            num_classes: inputs.num_classes,
            delta: inputs.delta,
            sigma_sq_bound,
        }
    }

    fn vacuous(kind: BoundKind, inputs: &BoundInputs, sigma: Option<f64>, reason: String) -> Self {
        Self {
            kind,
            bound: None,
            vacuous: true,
            vacuous_reason: Some(reason),
            exceeds_norm_scale: false,
            components: Self::components(inputs, sigma),
        }
    }

    fn finite(kind: BoundKind, inputs: &BoundInputs, sigma: Option<f64>, value: f64) -> Self {
        let scale_cap = (inputs.num_classes as f64).sqrt();
        Self {
            kind,
            bound: Some(value),
            vacuous: false,
            vacuous_reason: None,
            exceeds_norm_scale: value > scale_cap,
            components: Self::components(inputs, sigma),
        }
    }
}

/// Shared precondition handling for the multiclass bounds. Returns the
/// deviation term when the bound is informative.
fn deviation_term(inputs: &BoundInputs) -> std::result::Result<f64, String> {
    let q = inputs.num_classes;
    let m_minus = inputs.m_minus;
    if inputs.kl_divergence.is_infinite() {
        return Err(
            "KL divergence is infinite: the posterior puts mass where the prior has none"
                .to_string(),
        );
    }
    if m_minus <= 8 * q {
        return Err(format!(
            "m_minus = {m_minus} does not exceed 8Q = {}; the bound needs every class count above 8Q",
            8 * q
        ));
    }
    let complexity =
        inputs.kl_divergence + (m_minus as f64 / (4.0 * inputs.delta)).ln();
    Ok((8.0 * q as f64 / (m_minus - 8 * q) as f64 * complexity).sqrt())
}

/// Deviation bound: with probability `1 − δ`, the operator norm of the
/// difference between the empirical and true Gibbs confusion matrices
/// is at most `√(8Q/(m₋−8Q)·[KL + ln(m₋/4δ)])`.
pub fn deviation_bound(inputs: &BoundInputs) -> Result<BoundReport> {
    inputs.validate()?;
    let sigma = Some(inputs.num_classes as f64 / inputs.m_minus as f64);
    Ok(match deviation_term(inputs) {
        Ok(value) => BoundReport::finite(BoundKind::Deviation, inputs, sigma, value),
        Err(reason) => BoundReport::vacuous(BoundKind::Deviation, inputs, sigma, reason),
    })
}

/// Norm bound: the true Gibbs confusion norm is at most the empirical
/// norm plus the deviation term. Requires `empirical_norm`.
pub fn norm_bound(inputs: &BoundInputs) -> Result<BoundReport> {
    inputs.validate()?;
    let empirical = inputs.empirical_norm.ok_or_else(|| {
        Error::InvalidParameter("norm bound needs the empirical confusion norm".into())
    })?;
    let sigma = Some(inputs.num_classes as f64 / inputs.m_minus as f64);
    Ok(match deviation_term(inputs) {
        Ok(value) => BoundReport::finite(BoundKind::Norm, inputs, sigma, empirical + value),
        Err(reason) => BoundReport::vacuous(BoundKind::Norm, inputs, sigma, reason),
    })
}

/// Derive the majority-vote norm report from a Gibbs norm report: the
/// same components with the bound multiplied by Q.
pub fn majority_vote_bound_report(norm_report: &BoundReport) -> Result<BoundReport> {
    if norm_report.kind != BoundKind::Norm {
        return Err(Error::InvalidParameter(format!(
            "majority-vote report derives from a norm report, got {:?}",
            norm_report.kind
        )));
    }
    let q = norm_report.components.num_classes;
    let scale_cap = (q as f64).sqrt();
    let bound = norm_report.bound.map(|b| q as f64 * b);
    Ok(BoundReport {
        kind: BoundKind::BayesFactor,
        bound,
        vacuous: norm_report.vacuous,
        vacuous_reason: norm_report.vacuous_reason.clone(),
        exceeds_norm_scale: bound.is_some_and(|b| b > scale_cap),
        components: norm_report.components.clone(),
    })
}

/// Binary risk bound: inverts `kl(R_S, ·)` at budget
/// `(KL + ln(ξ(m)/δ))/m`. The `m_minus` component of the report holds
/// the full sample size.
pub fn binary_risk_bound(
    empirical_risk: f64,
    kl_divergence: f64,
    sample_size: usize,
    delta: f64,
) -> Result<BoundReport> {
    if !(0.0..=1.0).contains(&empirical_risk) {
        return Err(Error::InvalidParameter(format!(
            "empirical risk {empirical_risk} outside [0,1]"
        )));
    }
    if sample_size < 1 {
        return Err(Error::InvalidParameter("sample size must be at least 1".into()));
    }
    let inputs = BoundInputs {
        kl_divergence,
        m_minus: sample_size,
        num_classes: 2,
        delta,
        empirical_norm: None,
    };
    inputs.validate()?;
    if kl_divergence.is_infinite() {
        return Ok(BoundReport::vacuous(
            BoundKind::Binary,
            &inputs,
            None,
            "KL divergence is infinite: the posterior puts mass where the prior has none"
                .to_string(),
        ));
    }
    let budget = (kl_divergence + (xi(sample_size) / delta).ln()) / sample_size as f64;
    let value = binary_kl_inverse(empirical_risk, budget);
    let mut report = BoundReport::finite(BoundKind::Binary, &inputs, None, value);
    // Risks live in [0,1]; the √Q scale flag is for norms only.
    report.exceeds_norm_scale = false;
    Ok(report)
}
