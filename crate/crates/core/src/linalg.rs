//! Small dense least-squares solver backing the predictor fits.
//!
//! Systems here are tiny (at most a few hundred rows and nine columns), so
//! the solve goes through the normal equations with a cyclic Jacobi
//! eigendecomposition of the Gram matrix. Rank-deficient systems — constant
//! traces, collinear companions — get the minimum-norm solution instead of
//! aborting, with a degenerate flag for the caller.

use alloc::vec;
use alloc::vec::Vec;

/// Eigenvalues below `RANK_TOL` times the largest one are treated as zero.
const RANK_TOL: f64 = 1e-12;

pub(crate) struct Lstsq {
    pub coeffs: Vec<f64>,
    pub degenerate: bool,
}

/// Minimum-norm least-squares solution of `a * x ≈ b` for a row-major
/// `rows x cols` matrix.
pub(crate) fn lstsq(rows: usize, cols: usize, a: &[f64], b: &[f64]) -> Lstsq {
    debug_assert_eq!(a.len(), rows * cols);
    debug_assert_eq!(b.len(), rows);

    // Gram matrix AᵀA and right-hand side Aᵀb.
    let mut gram = vec![0.0; cols * cols];
    let mut rhs = vec![0.0; cols];
    for i in 0..cols {
        for j in i..cols {
            let mut sum = 0.0;
            for r in 0..rows {
                sum += a[r * cols + i] * a[r * cols + j];
            }
            gram[i * cols + j] = sum;
            gram[j * cols + i] = sum;
        }
        let mut sum = 0.0;
        for r in 0..rows {
            sum += a[r * cols + i] * b[r];
        }
        rhs[i] = sum;
    }

    let (eigvals, eigvecs) = jacobi_eigh(cols, &gram);

    let mut lambda_max = 0.0;
    for &l in &eigvals {
        if l > lambda_max {
            lambda_max = l;
        }
    }
    if lambda_max <= 0.0 {
        // Zero design matrix; the minimum-norm solution is zero.
        return Lstsq {
            coeffs: vec![0.0; cols],
            degenerate: true,
        };
    }

    let cutoff = lambda_max * RANK_TOL;
    let mut coeffs = vec![0.0; cols];
    let mut degenerate = false;
    for k in 0..cols {
        let lambda = eigvals[k];
        if lambda <= cutoff {
            degenerate = true;
            continue;
        }
        // Project the right-hand side onto eigenvector k (column k).
        let mut proj = 0.0;
        for i in 0..cols {
            proj += eigvecs[i * cols + k] * rhs[i];
        }
        let scale = proj / lambda;
        for i in 0..cols {
            coeffs[i] += scale * eigvecs[i * cols + k];
        }
    }

    Lstsq { coeffs, degenerate }
}

/// Cyclic Jacobi eigendecomposition of a symmetric `n x n` matrix.
/// Returns eigenvalues and a row-major matrix whose columns are the
/// corresponding eigenvectors. Deterministic: fixed sweep order, fixed
/// convergence threshold.
fn jacobi_eigh(n: usize, mat: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut a = mat.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    if n <= 1 {
        return (a, v);
    }

    let mut frob2 = 0.0;
    for &x in mat {
        frob2 += x * x;
    }

    for _sweep in 0..64 {
        let mut off2 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off2 += a[p * n + q] * a[p * n + q];
            }
        }
        if off2 <= frob2 * 1e-32 {
            break;
        }
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e154 {
                    // Avoid overflow in theta²; the rotation is tiny anyway.
                    0.5 / theta
                } else if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
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
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let eigvals = (0..n).map(|i| a[i * n + i]).collect();
    (eigvals, v)
}
