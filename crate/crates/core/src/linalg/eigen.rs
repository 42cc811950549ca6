use super::Matrix;
use crate::error::{usage, Result};

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition `S = V diag(λ) Vᵀ` of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Sorted descending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: Matrix,
}

/// Cyclic Jacobi eigensolver.
///
/// Eigenvalues are returned in descending order (stable with respect to the
/// original diagonal position on ties) and every eigenvector has its
/// largest-magnitude entry positive.
pub fn sym_eigen(s: &Matrix) -> Result<SymEigen> {
    if !s.is_square() {
        return usage("sym_eigen expects a square matrix");
    }
    let n = s.rows();
    let scale = s.frobenius_norm();
    let asym = s.sub(&s.transpose()).frobenius_norm();
    if asym > 1e-12 * scale {
        return usage(format!("matrix is not symmetric (‖S − Sᵀ‖ = {asym:e})"));
    }

    let mut a = Matrix::from_fn(n, n, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]));
    let mut v = Matrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() <= 0.5 * f64::EPSILON * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // skip entries that are negligible against both diagonals
                if apq.abs() * 1e17 < app.abs().min(aqq.abs()) {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].total_cmp(&a[(x, x)]));
    let values = order.iter().map(|&k| a[(k, k)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = v.column(src);
        let pivot = col
            .iter()
            .copied()
            .reduce(|m, x| if x.abs() > m.abs() { x } else { m })
            .unwrap_or(1.0);
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for (i, x) in col.into_iter().enumerate() {
            vectors[(i, dst)] = sign * x;
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Eigenvalues of a symmetric matrix, descending, via Householder
/// tridiagonalization and implicit QL. Falls back to [`sym_eigen`] if QL
/// fails to converge.
pub fn sym_eigenvalues(s: &Matrix) -> Result<Vec<f64>> {
    if !s.is_square() {
        return usage("sym_eigenvalues expects a square matrix");
    }
    let n = s.rows();
    let scale = s.frobenius_norm();
    let asym = s.sub(&s.transpose()).frobenius_norm();
    if asym > 1e-12 * scale {
        return usage(format!("matrix is not symmetric (‖S − Sᵀ‖ = {asym:e})"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| s.row(i).to_vec()).collect();
    let (mut d, mut e) = tridiagonalize(&mut a);
    let mut values = if implicit_ql(&mut d, &mut e) {
        d
    } else {
        sym_eigen(s)?.values
    };
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

fn tridiagonalize(a: &mut [Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = a.len();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        if l > 0 {
            let scale: f64 = a[i][..=l].iter().map(|x| x.abs()).sum();
            if scale == 0.0 {
                e[i] = a[i][l];
                continue;
            }
            let mut h = 0.0;
            for k in 0..=l {
                a[i][k] /= scale;
                h += a[i][k] * a[i][k];
            }
            let f = a[i][l];
            let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
            e[i] = scale * g;
            h -= f * g;
            a[i][l] = f - g;
            let mut f = 0.0;
            for j in 0..=l {
                let mut g = 0.0;
                for k in 0..=j {
                    g += a[j][k] * a[i][k];
                }
                for k in j + 1..=l {
                    g += a[k][j] * a[i][k];
                }
                e[j] = g / h;
                f += e[j] * a[i][j];
            }
            let hh = f / (h + h);
            for j in 0..=l {
                let f = a[i][j];
                let g = e[j] - hh * f;
                e[j] = g;
                for k in 0..=j {
                    a[j][k] -= f * e[k] + g * a[i][k];
                }
            }
        } else {
            e[i] = a[i][l];
        }
    }
    for (i, di) in d.iter_mut().enumerate() {
        *di = a[i][i];
    }
    (d, e)
}

/// Implicit QL on the tridiagonal `(d, e)` with `e[i]` coupling rows `i−1, i`.
/// Returns `false` if some eigenvalue needs more than 60 iterations.
fn implicit_ql(d: &mut [f64], e: &mut [f64]) -> bool {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return false;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    true
}

/// Largest singular value, `sqrt(λ_max(MᵀM))`.
pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    let g = m.gram();
    let values = sym_eigenvalues(&g).expect("Gram matrix is symmetric by construction");
    values[0].max(0.0).sqrt()
}
