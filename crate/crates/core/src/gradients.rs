//! Riemannian gradient machinery for the trace objectives.
//!
//! For the ALS objective `f(U₀,…,U_{d−1}) = tr(A ×₀ U₀ᵀ ⋯ ×_{d−1} U_{d−1}ᵀ)`
//! the projected gradient in mode `l` is `U_l Λ(U_l)` with
//! `Λ(U) = (Uᵀ∇f̃ − ∇f̃ᵀU)/2`. When the working tensor
//! `W = A ×₀ U₀ᵀ ⋯` is maintained, `UᵀG` collapses to the diagonal-fiber
//! matrix of `W`, which gives the `O(n²)` production path
//! [`lambda_fast`]. The element-wise gradient formulas are kept as the
//! reference path.
//!
//! Sign convention: `Ṙ(i,j,0)` has `−1` at `(i,j)`, so the directional
//! derivative of `φ ↦ f(…, U_l R(i,j,φ), …)` at zero is `−2Λ_ij`. The gate
//! only uses `|Λ_ij|`.

use crate::error::{usage, Result};
use crate::linalg::{spectral_norm, Matrix};
use crate::tensor::{DenseTensor, SYMMETRY_TOL};

/// Below this value of `‖Λ‖₂ / n` every pivot pair is admissible.
pub const STATIONARITY_FLOOR: f64 = 1e-13;

/// Skew-symmetric `n × n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaMatrix(Matrix);

impl LambdaMatrix {
    /// `(X − Xᵀ)/2`; exactly skew.
    pub fn skew_part(x: &Matrix) -> Self {
        assert!(x.is_square(), "skew part of non-square matrix");
        let n = x.rows();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = 0.5 * (x[(i, j)] - x[(j, i)]);
                m[(i, j)] = v;
                m[(j, i)] = -v;
            }
        }
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(&self.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    /// Upper-triangle pair with the largest `|Λ_ij|`.
    pub fn max_pair(&self) -> (usize, usize) {
        let n = self.dim();
        let mut best = (0, 1);
        for i in 0..n {
            for j in i + 1..n {
                if self.0[(i, j)].abs() > self.0[(best.0, best.1)].abs() {
                    best = (i, j);
                }
            }
        }
        best
    }
}

/// `f̃(U₀,…) = tr(A ×₀ U₀ᵀ ⋯ ×_{d−1} U_{d−1}ᵀ)` for arbitrary square factors.
pub fn f_tilde(a: &DenseTensor, factors: &[Matrix]) -> Result<f64> {
    Ok(a.multi_mode_product(factors, true)?.trace())
}

/// `f̃_s(U) = tr(A ×₀ Uᵀ ⋯ ×_{d−1} Uᵀ)`.
pub fn f_tilde_sym(a: &DenseTensor, u: &Matrix) -> Result<f64> {
    f_tilde(a, &vec![u.clone(); a.order()])
}

/// Element-wise gradient of `f̃` with respect to the mode-`mode` factor:
/// `G[m, r] = (A ×_{k≠mode} U_kᵀ)` at `(r,…,r, m, r,…,r)`.
pub fn grad_tilde_mode(a: &DenseTensor, factors: &[Matrix], mode: usize) -> Result<Matrix> {
    a.check_mode(mode)?;
    check_factors(a, factors)?;
    let mut b = a.clone();
    for (k, u) in factors.iter().enumerate() {
        if k != mode {
            b = b.mode_product(&u.transpose(), k)?;
        }
    }
    b.diagonal_fiber_matrix(mode)
}

/// `Λ = (UᵀG − GᵀU)/2`.
pub fn lambda_of(u: &Matrix, g: &Matrix) -> Result<LambdaMatrix> {
    Ok(LambdaMatrix::skew_part(&u.tr_matmul(g)?))
}

/// `Λ(U_mode)` read off the current working tensor: `(D − Dᵀ)/2` with `D`
/// the mode-`mode` diagonal-fiber matrix of `w`.
pub fn lambda_fast(w: &DenseTensor, mode: usize) -> Result<LambdaMatrix> {
    Ok(LambdaMatrix::skew_part(&w.diagonal_fiber_matrix(mode)?))
}

/// Element-wise gradient of `f̃_s` at `U` for a symmetric `A`, grouped by the
/// number `k` of indices equal to `m`:
///
/// `∂f̃_s/∂u_{mr} = Σ_k C(d,k) k u_{mr}^{k−1} (A ×_k Ûᵀ ⋯ ×_{d−1} Ûᵀ)_{m…m r…r}`
///
/// where `Û` is `U` with row `m` zeroed, so the trailing `d−k` indices avoid `m`.
pub fn grad_tilde_sym(a: &DenseTensor, u: &Matrix) -> Result<Matrix> {
    if !a.is_symmetric(SYMMETRY_TOL * a.frobenius_norm().max(1.0)) {
        return usage("grad_tilde_sym requires a symmetric tensor");
    }
    let (d, n) = (a.order(), a.dim());
    if u.rows() != n || u.cols() != n {
        return usage(format!("factor must be {n}x{n}"));
    }
    let mut g = Matrix::zeros(n, n);
    for m in 0..n {
        let mut u_hat = u.clone();
        for c in 0..n {
            u_hat[(m, c)] = 0.0;
        }
        let u_hat_t = u_hat.transpose();
        // partial[k] = A ×_k Ûᵀ ⋯ ×_{d−1} Ûᵀ, built from the last mode down
        let mut partial = vec![a.clone(); d + 1];
        for k in (1..d).rev() {
            partial[k] = partial[k + 1].mode_product(&u_hat_t, k)?;
        }
        for r in 0..n {
            let mut idx = vec![r; d];
            let mut total = 0.0;
            for k in 1..=d {
                idx[k - 1] = m;
                let coef = binomial(d, k) * k as f64 * u[(m, r)].powi(k as i32 - 1);
                if coef != 0.0 {
                    total += coef * partial[k].get(&idx)?;
                }
            }
            g[(m, r)] = total;
        }
    }
    Ok(g)
}

/// `Λ(U)` for the symmetric objective from the current symmetric working
/// tensor: `d (D₀ − D₀ᵀ)/2`.
pub fn lambda_fast_sym(w: &DenseTensor) -> LambdaMatrix {
    let d0 = w.diagonal_fiber_matrix(0).expect("mode 0 always exists");
    LambdaMatrix::skew_part(&d0.scale(w.order() as f64))
}

/// Matrix norm on the right-hand side of the gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GateNorm {
    #[default]
    Spectral,
    Frobenius,
}

impl GateNorm {
    pub fn of(self, lambda: &LambdaMatrix) -> f64 {
        match self {
            GateNorm::Spectral => lambda.spectral_norm(),
            GateNorm::Frobenius => lambda.frobenius_norm(),
        }
    }
}

/// Outcome of the admissibility test for one pivot pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateCheck {
    pub admissible: bool,
    /// `2|Λ_ij|`.
    pub pair_abs2: f64,
    /// `‖Λ‖` in the norm used by the test.
    pub norm: f64,
}

pub fn check_eta(eta: f64, n: usize) -> Result<()> {
    if !(eta > 0.0 && eta <= 2.0 / n as f64) {
        return usage(format!("eta must lie in (0, 2/n] = (0, {}], got {eta}", 2.0 / n as f64));
    }
    Ok(())
}

/// `2|Λ_ij| ≥ η‖Λ‖₂`, passing vacuously when `‖Λ‖₂ ≤ n · 1e-13`.
pub fn pivot_admissible(lambda: &LambdaMatrix, i: usize, j: usize, eta: f64) -> Result<bool> {
    Ok(gate(lambda, lambda.spectral_norm(), i, j, eta)?.admissible)
}

/// `2|Λ_ij| ≥ η·norm` with a precomputed `norm` of `Λ`, also reporting the gate quantities.
pub fn gate(
    lambda: &LambdaMatrix,
    norm: f64,
    i: usize,
    j: usize,
    eta: f64,
) -> Result<GateCheck> {
    let n = lambda.dim();
    check_eta(eta, n)?;
    if i >= j || j >= n {
        return usage(format!("invalid pivot ({i}, {j}) for n = {n}"));
    }
    let pair_abs2 = 2.0 * lambda.get(i, j).abs();
    let admissible = norm <= STATIONARITY_FLOOR * n as f64 || pair_abs2 >= eta * norm;
    Ok(GateCheck {
        admissible,
        pair_abs2,
        norm,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_factors(a: &DenseTensor, factors: &[Matrix]) -> Result<()> {
    if factors.len() != a.order() {
        return usage(format!(
            "expected {} factors, got {}",
            a.order(),
            factors.len()
        ));
    }
    let n = a.dim();
    if factors.iter().any(|u| u.rows() != n || u.cols() != n) {
        return usage(format!("every factor must be {n}x{n}"));
    }
    Ok(())
}
