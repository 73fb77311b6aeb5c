//! Independent oracles for the acceptance suite: a Sylvester-inertia
//! bisection spectral norm (no shared code with the dilation/Jacobi
//! path under test) and direct ξ summation with exact binomial
//! recurrences.

#![allow(dead_code)]

use confusion_bounds::rng::SplitMix64;
use confusion_bounds::SquareMatrix;

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

/// Brute-force operator norm: largest eigenvalue of CᵀC located by
/// inertia-count bisection, then a square root.
pub fn oracle_operator_norm(c: &SquareMatrix) -> f64 {
    let n = c.order();
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

/// Direct summation of ξ(m) with exact multiplicative binomials.
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
