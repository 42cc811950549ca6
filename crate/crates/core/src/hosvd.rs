//! HOSVD preconditioning.

use crate::error::Result;
use crate::linalg::{sym_eigen, Matrix};
use crate::par::{self, Execution};
use crate::tensor::DenseTensor;

#[derive(Debug, Clone)]
pub struct HosvdResult {
    /// `Ũ_l`: left singular vectors of the mode-`l` unfolding, by descending singular value.
    pub factors: Vec<Matrix>,
    /// Squared singular values per mode, descending.
    pub sigma_sq: Vec<Vec<f64>>,
    /// `A ×₀ Ũ₀ᵀ ⋯ ×_{d−1} Ũ_{d−1}ᵀ`.
    pub core: DenseTensor,
}

pub fn hosvd(a: &DenseTensor) -> Result<HosvdResult> {
    hosvd_with(a, Execution::default())
}

/// [`hosvd`] with an explicit execution mode for the per-mode eigenproblems.
pub fn hosvd_with(a: &DenseTensor, exec: Execution) -> Result<HosvdResult> {
    let per_mode = par::map_range(exec, a.order(), |l| {
        let gram = a.matricize(l)?.transpose().gram();
        sym_eigen(&gram)
    });
    let mut factors = Vec::with_capacity(a.order());
    let mut sigma_sq = Vec::with_capacity(a.order());
    for eig in per_mode {
        let eig = eig?;
        factors.push(eig.vectors);
        sigma_sq.push(eig.values);
    }
    let core = a.multi_mode_product(&factors, true)?;
    Ok(HosvdResult {
        factors,
        sigma_sq,
        core,
    })
}
