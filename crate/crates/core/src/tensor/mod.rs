//! Dense cubical tensors of order `d` and dimension `n`.
//!
//! Entries are stored with the **first index varying fastest**, so the
//! element at `(i₀, …, i_{d−1})` lives at offset `Σ_k i_k · n^k` and mode-0
//! fibers are contiguous. All indices are zero-based.
//!
//! The mode-`l` matricization is the `n × n^{d−1}` matrix whose row is `i_l`
//! and whose column enumerates the remaining indices lexicographically with
//! the lowest remaining mode fastest (see [`MatricizationIndexMap`]).

mod generate;
mod io;
mod perm;

pub use generate::{
    gen_antisymmetric, gen_orth_diagonalizable, gen_sym_diagonalizable, gen_uniform,
    random_orthogonal, DiagRange,
};
pub use io::{read_tns, read_tns_file, write_tns, write_tns_file};

use crate::error::{usage, Error, Result};
use crate::linalg::{Matrix, PlaneRotation};

/// Default absolute tolerance for the symmetry predicates.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    order: usize,
    dim: usize,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(order: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        check_shape(order, dim)?;
        let len = checked_len(order, dim)?;
        if data.len() != len {
            return usage(format!(
                "order-{order} tensor of dimension {dim} needs {len} entries, got {}",
                data.len()
            ));
        }
        if let Some(k) = data.iter().position(|x| !x.is_finite()) {
            return usage(format!("entry {k} is not finite"));
        }
        Ok(Self { order, dim, data })
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        check_shape(order, dim)?;
        Ok(Self {
            order,
            dim,
            data: vec![0.0; checked_len(order, dim)?],
        })
    }

    /// Diagonal tensor with the given diagonal; order must be at least 2.
    pub fn diagonal_from(order: usize, diag: &[f64]) -> Result<Self> {
        let mut t = Self::zeros(order, diag.len())?;
        let step = t.diagonal_step();
        for (i, &v) in diag.iter().enumerate() {
            t.data[i * step] = v;
        }
        if diag.iter().any(|x| !x.is_finite()) {
            return usage("diagonal entries must be finite");
        }
        Ok(t)
    }

    pub fn from_fn(order: usize, dim: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let mut t = Self::zeros(order, dim)?;
        let mut idx = vec![0; order];
        for off in 0..t.data.len() {
            t.decode_into(off, &mut idx);
            t.data[off] = f(&idx);
        }
        Self::new(order, dim, t.data)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// `n^mode`, the offset step of index `mode`.
    #[inline]
    pub fn stride(&self, mode: usize) -> usize {
        self.dim.pow(mode as u32)
    }

    /// Offset step between consecutive diagonal entries, `Σ_k n^k`.
    #[inline]
    pub fn diagonal_step(&self) -> usize {
        (0..self.order).map(|k| self.stride(k)).sum()
    }

    pub fn offset(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.order {
            return usage(format!(
                "index has {} components, tensor has order {}",
                idx.len(),
                self.order
            ));
        }
        if let Some((k, &i)) = idx.iter().enumerate().find(|(_, &i)| i >= self.dim) {
            return usage(format!("index {i} at mode {k} out of range 0..{}", self.dim));
        }
        Ok(idx
            .iter()
            .rev()
            .fold(0, |acc, &i| acc * self.dim + i))
    }

    pub fn decode_into(&self, mut off: usize, idx: &mut [usize]) {
        for slot in idx.iter_mut() {
            *slot = off % self.dim;
            off /= self.dim;
        }
    }

    pub fn get(&self, idx: &[usize]) -> Result<f64> {
        Ok(self.data[self.offset(idx)?])
    }

    pub fn set(&mut self, idx: &[usize], value: f64) -> Result<()> {
        let off = self.offset(idx)?;
        self.data[off] = value;
        Ok(())
    }

    /// Entry at `(i, …, i)`.
    #[inline]
    pub fn diag_entry(&self, i: usize) -> f64 {
        self.data[i * self.diagonal_step()]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.diag_entry(i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.diag_entry(i)).sum()
    }

    pub fn inner(&self, other: &DenseTensor) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the off-diagonal part, summed directly over
    /// off-diagonal entries so that small values keep full relative accuracy.
    pub fn off_norm(&self) -> f64 {
        let step = self.diagonal_step();
        self.data
            .iter()
            .enumerate()
            .filter(|(k, _)| k % step != 0 || k / step >= self.dim)
            .map(|(_, a)| a * a)
            .sum::<f64>()
            .sqrt()
    }

    pub fn relative_off_norm(&self) -> Result<f64> {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return Err(Error::Degenerate(
                "relative off-norm of the zero tensor".into(),
            ));
        }
        Ok(self.off_norm() / norm)
    }

    /// Visits the start offset of every mode-`mode` fiber, in matricization
    /// column order.
    pub fn for_each_fiber(&self, mode: usize, mut f: impl FnMut(usize)) {
        let sl = self.stride(mode);
        let outer = self.data.len() / (sl * self.dim);
        for o in 0..outer {
            let block = o * sl * self.dim;
            for inner in 0..sl {
                f(block + inner);
            }
        }
    }

    pub fn matricize(&self, mode: usize) -> Result<Matrix> {
        self.check_mode(mode)?;
        let n = self.dim;
        let cols = self.data.len() / n;
        let sl = self.stride(mode);
        let mut m = Matrix::zeros(n, cols);
        let mut col = 0;
        self.for_each_fiber(mode, |base| {
            for i in 0..n {
                m[(i, col)] = self.data[base + i * sl];
            }
            col += 1;
        });
        Ok(m)
    }

    /// Inverse of [`DenseTensor::matricize`].
    pub fn dematricize(m: &Matrix, order: usize, mode: usize) -> Result<Self> {
        let n = m.rows();
        let mut t = Self::zeros(order, n)?;
        t.check_mode(mode)?;
        if m.cols() * n != t.data.len() {
            return usage(format!(
                "{}x{} matrix is not a mode-{mode} unfolding of an order-{order} tensor",
                m.rows(),
                m.cols()
            ));
        }
        let sl = t.stride(mode);
        let mut bases = Vec::with_capacity(m.cols());
        t.for_each_fiber(mode, |b| bases.push(b));
        for (col, base) in bases.into_iter().enumerate() {
            for i in 0..n {
                t.data[base + i * sl] = m[(i, col)];
            }
        }
        Self::new(order, n, t.data)
    }

    /// `self ×_mode X`, i.e. the tensor whose mode-`mode` unfolding is `X · A_(mode)`.
    pub fn mode_product(&self, x: &Matrix, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let n = self.dim;
        if x.rows() != n || x.cols() != n {
            return usage(format!(
                "mode product needs a {n}x{n} matrix, got {}x{}",
                x.rows(),
                x.cols()
            ));
        }
        let sl = self.stride(mode);
        let mut out = vec![0.0; self.data.len()];
        let mut fiber = vec![0.0; n];
        self.for_each_fiber(mode, |base| {
            for (b, slot) in fiber.iter_mut().enumerate() {
                *slot = self.data[base + b * sl];
            }
            for a in 0..n {
                let row = x.row(a);
                out[base + a * sl] = row.iter().zip(&fiber).map(|(p, q)| p * q).sum();
            }
        });
        Ok(Self {
            order: self.order,
            dim: n,
            data: out,
        })
    }

    /// `self ×₀ M₀ᵀ ×₁ M₁ᵀ ⋯` (or without the transposes), one factor per mode.
    pub fn multi_mode_product(&self, factors: &[Matrix], transpose: bool) -> Result<Self> {
        if factors.len() != self.order {
            return usage(format!(
                "expected {} factors, got {}",
                self.order,
                factors.len()
            ));
        }
        let mut t = self.clone();
        for (mode, f) in factors.iter().enumerate() {
            t = if transpose {
                t.mode_product(&f.transpose(), mode)?
            } else {
                t.mode_product(f, mode)?
            };
        }
        Ok(t)
    }

    /// `D[t, r]` = entry at `(r, …, r, t, r, …, r)` with `t` at `mode`.
    pub fn diagonal_fiber_matrix(&self, mode: usize) -> Result<Matrix> {
        self.check_mode(mode)?;
        let sl = self.stride(mode);
        let rest = self.diagonal_step() - sl;
        Ok(Matrix::from_fn(self.dim, self.dim, |t, r| {
            self.data[r * rest + t * sl]
        }))
    }

    /// In-place `W ← W ×_mode Rᵀ`: rows `i`, `j` of the mode unfolding become
    /// `(c·rowᵢ + s·rowⱼ, −s·rowᵢ + c·rowⱼ)`. Touches `2·n^{d−1}` entries.
    pub fn rotate_mode(&mut self, mode: usize, rot: &PlaneRotation) {
        let (i, j) = rot.pivot();
        assert!(mode < self.order && j < self.dim, "rotation outside tensor");
        let sl = self.stride(mode);
        let (c, s) = (rot.cos(), rot.sin());
        let (oi, oj) = (i * sl, j * sl);
        let block = sl * self.dim;
        let outer = self.data.len() / block;
        for o in 0..outer {
            let start = o * block;
            for inner in start..start + sl {
                let x = self.data[inner + oi];
                let y = self.data[inner + oj];
                self.data[inner + oi] = c * x + s * y;
                self.data[inner + oj] = -s * x + c * y;
            }
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.transposition_defect(1.0) <= tol
    }

    pub fn is_antisymmetric(&self, tol: f64) -> bool {
        self.transposition_defect(-1.0) <= tol
    }

    /// `max |T(idx) − sign · T(idx with two positions swapped)|` over all pairs.
    pub fn transposition_defect(&self, sign: f64) -> f64 {
        let mut idx = vec![0; self.order];
        let mut worst = 0.0_f64;
        for off in 0..self.data.len() {
            self.decode_into(off, &mut idx);
            for a in 0..self.order {
                for b in a + 1..self.order {
                    if idx[a] == idx[b] && sign > 0.0 {
                        continue;
                    }
                    let delta = (idx[b] as isize - idx[a] as isize)
                        * (self.stride(a) as isize - self.stride(b) as isize);
                    let swapped = (off as isize + delta) as usize;
                    worst = worst.max((self.data[off] - sign * self.data[swapped]).abs());
                }
            }
        }
        worst
    }

    /// Replaces every entry by the mean over its index-permutation orbit.
    /// The result is exactly symmetric.
    pub fn symmetrize(&mut self) {
        let perms = perm::permutations(self.order);
        let mut idx = vec![0; self.order];
        let mut p_idx = vec![0; self.order];
        let mut orbit = Vec::with_capacity(perms.len());
        for off in 0..self.data.len() {
            self.decode_into(off, &mut idx);
            if idx.windows(2).any(|w| w[0] > w[1]) {
                continue;
            }
            orbit.clear();
            for (p, _) in &perms {
                for (k, &src) in p.iter().enumerate() {
                    p_idx[k] = idx[src];
                }
                orbit.push(p_idx.iter().rev().fold(0, |acc, &i| acc * self.dim + i));
            }
            orbit.sort_unstable();
            orbit.dedup();
            let mean = orbit.iter().map(|&o| self.data[o]).sum::<f64>() / orbit.len() as f64;
            for &o in &orbit {
                self.data[o] = mean;
            }
        }
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.order {
            return usage(format!(
                "mode {mode} out of range for order-{} tensor",
                self.order
            ));
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &DenseTensor) -> Result<()> {
        if self.order != other.order || self.dim != other.dim {
            return usage("tensor shapes differ");
        }
        Ok(())
    }
}

/// Bijection between tensor indices and `(row, column)` of a mode-`l` unfolding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatricizationIndexMap {
    order: usize,
    dim: usize,
    mode: usize,
}

impl MatricizationIndexMap {
    pub fn new(order: usize, dim: usize, mode: usize) -> Result<Self> {
        check_shape(order, dim)?;
        if mode >= order {
            return usage(format!("mode {mode} out of range for order {order}"));
        }
        Ok(Self { order, dim, mode })
    }

    pub fn rows(&self) -> usize {
        self.dim
    }

    pub fn cols(&self) -> usize {
        self.dim.pow(self.order as u32 - 1)
    }

    pub fn to_row_col(&self, idx: &[usize]) -> (usize, usize) {
        let mut col = 0;
        for (k, &i) in idx.iter().enumerate().rev() {
            if k != self.mode {
                col = col * self.dim + i;
            }
        }
        (idx[self.mode], col)
    }

    pub fn to_index(&self, row: usize, mut col: usize) -> Vec<usize> {
        let mut idx = vec![0; self.order];
        for (k, slot) in idx.iter_mut().enumerate() {
            if k == self.mode {
                *slot = row;
            } else {
                *slot = col % self.dim;
                col /= self.dim;
            }
        }
        idx
    }
}

fn check_shape(order: usize, dim: usize) -> Result<()> {
    if order < 2 {
        return usage(format!("tensor order must be at least 2, got {order}"));
    }
    if dim < 1 {
        return usage("tensor dimension must be positive");
    }
    Ok(())
}

fn checked_len(order: usize, dim: usize) -> Result<usize> {
    dim.checked_pow(order as u32)
        .filter(|&l| l <= 1 << 32)
        .ok_or_else(|| Error::Usage(format!("{dim}^{order} entries is too large")))
}
