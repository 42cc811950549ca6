use super::Matrix;
use crate::error::{usage, Result};

/// Householder QR of a square matrix, sign-normalized so that `diag(R) ≥ 0`.
pub fn householder_qr(m: &Matrix) -> Result<(Matrix, Matrix)> {
    if !m.is_square() {
        return usage("householder_qr expects a square matrix");
    }
    let n = m.rows();
    let mut r = m.clone();
    let mut q = Matrix::identity(n);
    let mut v = vec![0.0; n];

    for k in 0..n.saturating_sub(1) {
        let norm = (k..n).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if r[(k, k)] >= 0.0 { -norm } else { norm };
        for i in 0..n {
            v[i] = if i < k { 0.0 } else { r[(i, k)] };
        }
        v[k] -= alpha;
        let vnorm2: f64 = v[k..].iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // R ← (I − 2vvᵀ/vᵀv) R
        for j in 0..n {
            let dot: f64 = (k..n).map(|i| v[i] * r[(i, j)]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..n {
                r[(i, j)] -= f * v[i];
            }
        }
        // Q ← Q (I − 2vvᵀ/vᵀv)
        for i in 0..n {
            let dot: f64 = (k..n).map(|l| q[(i, l)] * v[l]).sum();
            let f = 2.0 * dot / vnorm2;
            for l in k..n {
                q[(i, l)] -= f * v[l];
            }
        }
    }

    for k in 0..n {
        for i in k + 1..n {
            r[(i, k)] = 0.0;
        }
        if r[(k, k)] < 0.0 {
            for j in 0..n {
                r[(k, j)] = -r[(k, j)];
                q[(j, k)] = -q[(j, k)];
            }
        }
    }
    Ok((q, r))
}
