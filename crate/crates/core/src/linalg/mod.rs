//! Small dense linear algebra used by the solvers.

mod eigen;
mod matrix;
mod qr;
mod roots;
mod rotation;

pub use eigen::{spectral_norm, sym_eigen, sym_eigenvalues, SymEigen};
pub use matrix::Matrix;
pub use qr::householder_qr;
pub use roots::{eval_poly, real_roots, residual_bound};
pub use rotation::{
    apply_rotation_left, post_multiply_rotation, rotation_from_trace_pair, PlaneRotation,
    TraceRotation,
};
