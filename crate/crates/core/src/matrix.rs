//! Dense small square matrices, self-adjoint dilation, and the operator
//! (spectral) norm.
//!
//! The operator norm of a real square matrix `C` — its largest singular
//! value — is computed through the symmetric dilation
//!
//! ```text
//! S(C) = [ 0   C ]
//!        [ Cᵀ  0 ]
//! ```
//!
//! whose largest eigenvalue equals ‖C‖. One cyclic-Jacobi symmetric
//! eigensolver therefore serves every norm computation in the crate.
//! Matrices here are confusion-matrix sized (order ≤ a few hundred), so
//! Jacobi's robustness beats asymptotically faster methods.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum number of full Jacobi sweeps before reporting non-convergence.
const MAX_JACOBI_SWEEPS: usize = 100;

/// Off-diagonal Frobenius residual threshold, relative to the matrix
/// scale (`max(1, ‖A‖_F)`), below which the diagonal is accepted as the
/// eigenvalue set.
const JACOBI_RESIDUAL: f64 = 1e-13;

/// Dense real square matrix with finite entries, stored row-major.
/// Entry `(p, q)` is row `p`, column `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix {
    order: usize,
    entries: Vec<f64>,
}

impl SquareMatrix {
    /// Build from row-major entries. Rejects empty matrices, length
    /// mismatches, and non-finite entries.
    pub fn new(order: usize, entries: Vec<f64>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidMatrix("order must be at least 1".into()));
        }
        if entries.len() != order * order {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for order {}, got {}",
                order * order,
                order,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|e| !e.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "non-finite entry {} at row {}, column {}",
                entries[pos],
                pos / order,
                pos % order
            )));
        }
        Ok(Self { order, entries })
    }

    pub fn zeros(order: usize) -> Result<Self> {
        Self::new(order, vec![0.0; order * order])
    }

    pub fn identity(order: usize) -> Result<Self> {
        let mut entries = vec![0.0; order * order];
        for i in 0..order {
            entries[i * order + i] = 1.0;
        }
        Self::new(order, entries)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.order + col]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Rows as nested vectors, for report emission.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.order)
            .map(|r| self.entries[r * self.order..(r + 1) * self.order].to_vec())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut entries = vec![0.0; self.order * self.order];
        for r in 0..self.order {
            for c in 0..self.order {
                entries[c * self.order + r] = self.get(r, c);
            }
        }
        Self {
            order: self.order,
            entries,
        }
    }

    /// Entrywise scaling by a finite scalar.
    pub fn scale(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.order,
            self.entries.iter().map(|e| e * factor).collect(),
        )
    }

    /// Entrywise difference; orders must agree.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::DimensionMismatch(format!(
                "cannot subtract order-{} matrix from order-{} matrix",
                other.order, self.order
            )));
        }
        Self::new(
            self.order,
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// Entrywise sum; orders must agree.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::DimensionMismatch(format!(
                "cannot add order-{} matrix to order-{} matrix",
                other.order, self.order
            )));
        }
        Self::new(
            self.order,
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e * e).sum::<f64>().sqrt()
    }

    /// Self-adjoint dilation `[[0, C], [Cᵀ, 0]]` of order `2Q`.
    pub fn dilate(&self) -> SymmetricMatrix {
        let q = self.order;
        let n = 2 * q;
        let mut entries = vec![0.0; n * n];
        for r in 0..q {
            for c in 0..q {
                let v = self.get(r, c);
                entries[r * n + (q + c)] = v;
                entries[(q + c) * n + r] = v;
            }
        }
        SymmetricMatrix { order: n, entries }
    }

    /// Operator (spectral) norm: the largest singular value, computed as
    /// the maximum eigenvalue of the dilation.
    pub fn operator_norm(&self) -> Result<f64> {
        let lambda = self.dilate().max_eigenvalue()?;
        // The dilation spectrum is symmetric about zero, so the top
        // eigenvalue is nonnegative up to solver residual.
        Ok(lambda.max(0.0))
    }
}

/// Symmetric matrix; construction enforces exact symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    order: usize,
    entries: Vec<f64>,
}

impl SymmetricMatrix {
    /// Build from row-major entries, which must be exactly symmetric.
    pub fn new(order: usize, entries: Vec<f64>) -> Result<Self> {
        let base = SquareMatrix::new(order, entries)?;
        for r in 0..order {
            for c in (r + 1)..order {
                if base.get(r, c) != base.get(c, r) {
                    return Err(Error::InvalidMatrix(format!(
                        "entries ({r},{c}) and ({c},{r}) differ: {} vs {}",
                        base.get(r, c),
                        base.get(c, r)
                    )));
                }
            }
        }
        Ok(Self {
            order,
            entries: base.entries,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.order + col]
    }

    /// All eigenvalues (unsorted), via the cyclic Jacobi rotation method.
    ///
    /// Converges when the off-diagonal Frobenius residual drops below
    /// `1e-13 · max(1, ‖A‖_F)`; fails with a residual-carrying error
    /// after 100 sweeps otherwise.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.order;
        let mut a = self.entries.clone();
        let scale = self
            .entries
            .iter()
            .map(|e| e * e)
            .sum::<f64>()
            .sqrt()
            .max(1.0);
        let threshold = JACOBI_RESIDUAL * scale;

        let off_diagonal = |a: &[f64]| -> f64 {
            let mut s = 0.0;
            for r in 0..n {
                for c in (r + 1)..n {
                    let v = a[r * n + c];
                    s += 2.0 * v * v;
                }
            }
            s.sqrt()
        };

        let mut residual = off_diagonal(&a);
        for _sweep in 0..MAX_JACOBI_SWEEPS {
            if residual <= threshold {
                return Ok((0..n).map(|i| a[i * n + i]).collect());
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    // Rotation angle choosing the smaller tangent root,
                    // which keeps the iteration stable.
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + (1.0 + theta * theta).sqrt())
                    } else {
                        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;

                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                }
            }
            residual = off_diagonal(&a);
        }
        if residual <= threshold {
            return Ok((0..n).map(|i| a[i * n + i]).collect());
        }
        Err(Error::NonConvergence {
            residual,
            sweeps: MAX_JACOBI_SWEEPS,
        })
    }

    /// Largest algebraic eigenvalue.
    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(self
            .eigenvalues()?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max))
    }
}
