//! Seeded random tensor ensembles.
//!
//! Every generator draws from a `ChaCha8Rng` seeded with `seed`, so a
//! given `(d, n, seed)` reproduces bit-identical output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{perm, DenseTensor};
use crate::error::{usage, Result};
use crate::linalg::{householder_qr, Matrix};

/// Interval the planted diagonal is drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagRange {
    pub lo: f64,
    pub hi: f64,
}

impl DiagRange {
    pub const UNIT: DiagRange = DiagRange { lo: 0.0, hi: 1.0 };
    pub const SIGNED: DiagRange = DiagRange { lo: -1.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return usage(format!("invalid diagonal range [{lo}, {hi}]"));
        }
        Ok(Self { lo, hi })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.lo + (self.hi - self.lo) * rng.random::<f64>()
    }
}

impl Default for DiagRange {
    fn default() -> Self {
        Self::UNIT
    }
}

/// Haar-distributed orthogonal matrix: QR of a standard-normal matrix with
/// `diag(R) ≥ 0`, which makes `Q` unique.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let g = Matrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    householder_qr(&g).expect("square by construction").0
}

/// Entries i.i.d. uniform on `[0, 1)`.
pub fn gen_uniform(order: usize, dim: usize, seed: u64) -> Result<DenseTensor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseTensor::from_fn(order, dim, |_| rng.random::<f64>())
}

/// `diag(λ) ×₀ Q₀ ×₁ Q₁ ⋯` with independent random orthogonal `Q_l`.
///
/// Returns the tensor and the planted diagonal `λ`.
pub fn gen_orth_diagonalizable(
    order: usize,
    dim: usize,
    seed: u64,
    range: DiagRange,
) -> Result<(DenseTensor, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diag: Vec<f64> = (0..dim).map(|_| range.sample(&mut rng)).collect();
    let mut t = DenseTensor::diagonal_from(order, &diag)?;
    for mode in 0..order {
        let q = random_orthogonal(dim, &mut rng);
        t = t.mode_product(&q, mode)?;
    }
    Ok((t, diag))
}

/// `diag(λ) ×₀ Q ×₁ Q ⋯` with a single random orthogonal `Q`, symmetrized
/// exactly over index permutations to remove rounding asymmetry.
pub fn gen_sym_diagonalizable(
    order: usize,
    dim: usize,
    seed: u64,
    range: DiagRange,
) -> Result<(DenseTensor, Vec<f64>, Matrix)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diag: Vec<f64> = (0..dim).map(|_| range.sample(&mut rng)).collect();
    let q = random_orthogonal(dim, &mut rng);
    let mut t = DenseTensor::diagonal_from(order, &diag)?;
    for mode in 0..order {
        t = t.mode_product(&q, mode)?;
    }
    t.symmetrize();
    Ok((t, diag, q))
}

/// Full antisymmetrization `(1/d!) Σ_π sign(π) T∘π` of a uniform tensor.
///
/// Entries with a repeated index are exactly zero and permuted entries are
/// exact sign flips of one another.
pub fn gen_antisymmetric(order: usize, dim: usize, seed: u64) -> Result<DenseTensor> {
    let base = gen_uniform(order, dim, seed)?;
    let perms = perm::permutations(order);
    let scale = 1.0 / perms.len() as f64;
    let mut out = DenseTensor::zeros(order, dim)?;
    let mut idx = vec![0; order];
    let mut p_idx = vec![0; order];
    for off in 0..base.len() {
        base.decode_into(off, &mut idx);
        if idx.windows(2).any(|w| w[0] >= w[1]) {
            continue;
        }
        let value = perms
            .iter()
            .map(|(p, s)| {
                for (k, &src) in p.iter().enumerate() {
                    p_idx[k] = idx[src];
                }
                s * base.get(&p_idx).expect("index in range")
            })
            .sum::<f64>()
            * scale;
        for (p, s) in &perms {
            for (k, &src) in p.iter().enumerate() {
                p_idx[k] = idx[src];
            }
            out.set(&p_idx, s * value)?;
        }
    }
    Ok(out)
}
