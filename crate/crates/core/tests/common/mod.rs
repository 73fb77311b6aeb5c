//! Independent test oracles. Nothing here shares code with the library
//! paths it checks: the spectral oracle locates the top eigenvalue of
//! CᵀC by interval bisection with Sylvester inertia counting; small
//! orders additionally get closed-form singular values; ξ is summed
//! directly with exact binomial recurrences.

// Each test binary uses its own subset of these oracles.
#![allow(dead_code)]

use confusion_bounds::rng::SplitMix64;
use confusion_bounds::SquareMatrix;

/// Number of eigenvalues of the symmetric matrix `a` strictly above
/// `shift`, by the inertia (pivot signs) of `a − shift·I` under
/// symmetric Gaussian elimination. Returns `None` on pivot breakdown;
/// callers re-try with a jittered shift.
fn eigenvalues_above(a: &[Vec<f64>], shift: f64) -> Option<usize> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &v)| if i == j { v - shift } else { v })
                .collect()
        })
        .collect();
    let mut positive = 0;
    for k in 0..n {
        let pivot = m[k][k];
        if pivot.abs() < 1e-300 {
            return None;
        }
        if pivot > 0.0 {
            positive += 1;
        }
        for i in (k + 1)..n {
            let factor = m[i][k] / pivot;
            for j in k..n {
                m[i][j] -= factor * m[k][j];
            }
        }
    }
    Some(positive)
}

fn count_above(a: &[Vec<f64>], shift: f64, scale: f64) -> usize {
    let mut jitter = 0.0;
    for _ in 0..60 {
        if let Some(count) = eigenvalues_above(a, shift + jitter) {
            return count;
        }
        jitter = if jitter == 0.0 {
            1e-14 * scale.max(1.0)
        } else {
            jitter * 3.0
        };
    }
    panic!("inertia counting kept hitting exact eigenvalues at shift {shift}");
}

/// Brute-force operator norm: bisection for the largest eigenvalue of
/// CᵀC via inertia counts, then a square root. Independent of the
/// dilation/Jacobi path under test.
pub fn oracle_operator_norm(c: &SquareMatrix) -> f64 {
    let n = c.order();
    // B = CᵀC.
    let b: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| c.get(k, i) * c.get(k, j)).sum())
                .collect()
        })
        .collect();
    let frob: f64 = b.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    if frob == 0.0 {
        return 0.0;
    }
    let mut lo = 0.0f64;
    let mut hi = frob + 1.0;
    for _ in 0..110 {
        let mid = 0.5 * (lo + hi);
        if count_above(&b, mid, frob) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).max(0.0).sqrt()
}

/// Closed-form largest singular value of a 2×2 matrix, from the
/// quadratic characteristic polynomial of CᵀC.
pub fn closed_form_norm_2x2(c: &SquareMatrix) -> f64 {
    assert_eq!(c.order(), 2);
    let (a, b, d, e) = (c.get(0, 0), c.get(0, 1), c.get(1, 0), c.get(1, 1));
    let trace = a * a + b * b + d * d + e * e;
    let det = a * e - b * d;
    let disc = (trace * trace - 4.0 * det * det).max(0.0).sqrt();
    (0.5 * (trace + disc)).max(0.0).sqrt()
}

/// Closed-form largest singular value of a 3×3 matrix: the largest
/// eigenvalue of the symmetric CᵀC via the trigonometric cubic formula.
pub fn closed_form_norm_3x3(c: &SquareMatrix) -> f64 {
    assert_eq!(c.order(), 3);
    let mut b = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = (0..3).map(|k| c.get(k, i) * c.get(k, j)).sum();
        }
    }
    let p1 = b[0][1] * b[0][1] + b[0][2] * b[0][2] + b[1][2] * b[1][2];
    let q = (b[0][0] + b[1][1] + b[2][2]) / 3.0;
    if p1 == 0.0 {
        return b[0][0].max(b[1][1]).max(b[2][2]).max(0.0).sqrt();
    }
    let p2 = (b[0][0] - q).powi(2) + (b[1][1] - q).powi(2) + (b[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let mut m = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (b[i][j] - if i == j { q } else { 0.0 }) / p;
        }
    }
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let r = (det / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    (q + 2.0 * p * phi.cos()).max(0.0).sqrt()
}

/// Power-iteration estimate of the operator norm (Rayleigh quotient on
/// CᵀC), run to stationarity.
pub fn power_iteration_norm(c: &SquareMatrix, iterations: usize) -> f64 {
    let n = c.order();
    let b: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| c.get(k, i) * c.get(k, j)).sum())
                .collect()
        })
        .collect();
    // Deterministic start vector with all components populated.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.13 * (i as f64 + 1.0)).collect();
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let w: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| b[i][j] * v[j]).sum())
            .collect();
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        v = w.iter().map(|x| x / norm).collect();
        let next: f64 = (0..n)
            .map(|i| v[i] * (0..n).map(|j| b[i][j] * v[j]).sum::<f64>())
            .sum();
        if (next - lambda).abs() <= 1e-16 * next.abs().max(1.0) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.max(0.0).sqrt()
}

/// Direct summation of `ξ(m)` with exact multiplicative binomial
/// coefficients; usable well past m = 50.
pub fn xi_direct(m: usize) -> f64 {
    let mf = m as f64;
    let mut sum = 2.0;
    let mut choose = 1.0f64;
    for i in 1..m {
        choose *= (mf - i as f64 + 1.0) / i as f64;
        let fi = i as f64;
        sum += choose * (fi / mf).powi(i as i32) * ((mf - fi) / mf).powi((m - i) as i32);
    }
    sum
}

/// Random square matrix with entries uniform in `[lo, hi]`.
pub fn random_matrix(order: usize, lo: f64, hi: f64, rng: &mut SplitMix64) -> SquareMatrix {
    let entries: Vec<f64> = (0..order * order)
        .map(|_| lo + (hi - lo) * rng.next_f64())
        .collect();
    SquareMatrix::new(order, entries).unwrap()
}
