//! Plane (Givens) rotations.
//!
//! `R(i, j, φ)` is the identity except for the block
//!
//! ```text
//! R[i,i] = c   R[i,j] = -s
//! R[j,i] = s   R[j,j] =  c
//! ```
//!
//! with `c = cos φ`, `s = sin φ`. Pivot indices are zero-based here.

use super::Matrix;
use crate::error::{usage, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneRotation {
    i: usize,
    j: usize,
    c: f64,
    s: f64,
}

impl PlaneRotation {
    /// Builds a rotation in the `(i, j)` plane; `(c, s)` is renormalized onto the unit circle.
    pub fn new(i: usize, j: usize, c: f64, s: f64) -> Result<Self> {
        if i >= j {
            return usage(format!("pivot requires i < j, got ({i}, {j})"));
        }
        let r = c.hypot(s);
        if !(r.is_finite() && r > 0.0) {
            return usage(format!("invalid rotation coefficients ({c}, {s})"));
        }
        Ok(Self {
            i,
            j,
            c: c / r,
            s: s / r,
        })
    }

    pub fn identity(i: usize, j: usize) -> Result<Self> {
        Self::new(i, j, 1.0, 0.0)
    }

    pub fn pivot(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    pub fn cos(&self) -> f64 {
        self.c
    }

    pub fn sin(&self) -> f64 {
        self.s
    }

    /// The same plane, opposite angle.
    pub fn inverse(&self) -> Self {
        Self { s: -self.s, ..*self }
    }

    /// Materializes the full `n × n` rotation matrix.
    pub fn to_matrix(&self, n: usize) -> Matrix {
        let mut r = Matrix::identity(n);
        r[(self.i, self.i)] = self.c;
        r[(self.i, self.j)] = -self.s;
        r[(self.j, self.i)] = self.s;
        r[(self.j, self.j)] = self.c;
        r
    }
}

/// Outcome of the single-mode angle problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceRotation {
    /// Optimal `(cos φ, sin φ)`.
    Angle { c: f64, s: f64 },
    /// `D = N = 0`: every angle gives the same pair-sum.
    Degenerate,
}

/// Maximizes `g(φ) = cos φ · D + sin φ · N` where `D` is the sum of the two pivot diagonal
/// entries and `N` the difference of the two off-fiber entries.
///
/// The maximizer is `(c, s) = (D, N)/hypot(D, N)` and the maximum is `hypot(D, N)`.
pub fn rotation_from_trace_pair(d: f64, n: f64) -> TraceRotation {
    let r = d.hypot(n);
    if r == 0.0 {
        TraceRotation::Degenerate
    } else {
        TraceRotation::Angle { c: d / r, s: n / r }
    }
}

/// `M ← Rᵀ M`: rows `i`, `j` become `(c·rowᵢ + s·rowⱼ, −s·rowᵢ + c·rowⱼ)`.
pub fn apply_rotation_left(m: &mut Matrix, rot: &PlaneRotation) {
    let (i, j) = rot.pivot();
    assert!(j < m.rows(), "pivot outside matrix rows");
    let (c, s) = (rot.c, rot.s);
    for col in 0..m.cols() {
        let x = m[(i, col)];
        let y = m[(j, col)];
        m[(i, col)] = c * x + s * y;
        m[(j, col)] = -s * x + c * y;
    }
}

/// `U ← U R`: columns `i`, `j` become `(c·colᵢ + s·colⱼ, −s·colᵢ + c·colⱼ)`.
pub fn post_multiply_rotation(u: &mut Matrix, rot: &PlaneRotation) {
    let (i, j) = rot.pivot();
    assert!(j < u.cols(), "pivot outside matrix columns");
    let (c, s) = (rot.c, rot.s);
    for row in 0..u.rows() {
        let x = u[(row, i)];
        let y = u[(row, j)];
        u[(row, i)] = c * x + s * y;
        u[(row, j)] = -s * x + c * y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
        Matrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
    }

    fn angle_pair(rot: TraceRotation) -> (f64, f64) {
        match rot {
            TraceRotation::Angle { c, s } => (c, s),
            TraceRotation::Degenerate => panic!("unexpected degenerate"),
        }
    }

    #[test]
    fn trace_pair_examples() {
        assert_eq!(angle_pair(rotation_from_trace_pair(1.0, 0.0)), (1.0, 0.0));
        assert_eq!(angle_pair(rotation_from_trace_pair(0.0, 1.0)), (0.0, 1.0));
        let (c, s) = angle_pair(rotation_from_trace_pair(3.0, 4.0));
        assert!((c - 0.6).abs() < 1e-15 && (s - 0.8).abs() < 1e-15);
        assert_eq!(rotation_from_trace_pair(0.0, 0.0), TraceRotation::Degenerate);
    }

    #[test]
    fn trace_pair_beats_dense_sampling() {
        let (d, n) = (3.0, 4.0);
        let (c, s) = angle_pair(rotation_from_trace_pair(d, n));
        let best = c * d + s * n;
        assert!((best - 5.0).abs() < 1e-14);
        let sampled = (0..10_000)
            .map(|k| {
                let phi = std::f64::consts::TAU * k as f64 / 10_000.0;
                phi.cos() * d + phi.sin() * n
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(best >= sampled - 1e-12);
        assert!(best - sampled < 1e-6);
    }

    #[test]
    fn left_rotation_special_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_matrix(&mut rng, 4, 3);

        let mut id = m.clone();
        apply_rotation_left(&mut id, &PlaneRotation::identity(0, 2).unwrap());
        assert_eq!(id, m);

        let mut swapped = m.clone();
        apply_rotation_left(&mut swapped, &PlaneRotation::new(1, 3, 0.0, 1.0).unwrap());
        for col in 0..3 {
            assert_eq!(swapped[(1, col)], m[(3, col)]);
            assert_eq!(swapped[(3, col)], -m[(1, col)]);
            assert_eq!(swapped[(0, col)], m[(0, col)]);
        }

        let rot = PlaneRotation::new(0, 1, 0.3, 0.7).unwrap();
        let mut back = m.clone();
        apply_rotation_left(&mut back, &rot);
        apply_rotation_left(&mut back, &rot.inverse());
        assert!(back.sub(&m).max_abs() < 1e-14);
    }

    #[test]
    fn left_rotation_is_transposed_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = random_matrix(&mut rng, 5, 4);
        let rot = PlaneRotation::new(1, 4, 0.8, -0.6).unwrap();
        let mut fast = m.clone();
        apply_rotation_left(&mut fast, &rot);
        let dense = rot.to_matrix(5).transpose().matmul(&m).unwrap();
        assert!(fast.sub(&dense).max_abs() < 1e-15);
        assert!((fast.frobenius_norm() - m.frobenius_norm()).abs() < 1e-13);
    }

    #[test]
    fn post_multiply_matches_dense_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let u = random_matrix(&mut rng, 5, 5);
            let i = rng.random_range(0..4);
            let j = rng.random_range(i + 1..5);
            let phi: f64 = rng.random_range(-3.0..3.0);
            let rot = PlaneRotation::new(i, j, phi.cos(), phi.sin()).unwrap();
            let mut fast = u.clone();
            post_multiply_rotation(&mut fast, &rot);
            let dense = u.matmul(&rot.to_matrix(5)).unwrap();
            assert!(fast.sub(&dense).max_abs() <= 1e-15);
        }
    }

    #[test]
    fn post_multiply_of_identity_is_rotation() {
        let rot = PlaneRotation::new(0, 1, 0.6, 0.8).unwrap();
        let mut u = Matrix::identity(3);
        post_multiply_rotation(&mut u, &rot);
        assert_eq!(u, rot.to_matrix(3));
    }

    #[test]
    fn accumulated_rotations_stay_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 6;
        let mut u = Matrix::identity(n);
        for _ in 0..10_000 {
            let i = rng.random_range(0..n - 1);
            let j = rng.random_range(i + 1..n);
            let phi: f64 = rng.random_range(-3.2..3.2);
            post_multiply_rotation(&mut u, &PlaneRotation::new(i, j, phi.cos(), phi.sin()).unwrap());
        }
        assert!(u.orthogonality_error() <= 1e-13, "{}", u.orthogonality_error());
    }

    #[test]
    fn constructor_rejects_bad_pivots() {
        assert!(PlaneRotation::new(2, 2, 1.0, 0.0).is_err());
        assert!(PlaneRotation::new(3, 1, 1.0, 0.0).is_err());
        assert!(PlaneRotation::new(0, 1, 0.0, 0.0).is_err());
    }
}
