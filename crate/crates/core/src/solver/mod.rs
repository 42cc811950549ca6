//! Trace-maximization solvers: configuration, telemetry and results shared by
//! the ALS and symmetry-preserving drivers.

mod als;
mod sym;

pub use als::{microiteration, run, AlsState};
pub use sym::{
    angle_poly_coeffs, best_sym_angle, gs_value, mode1_angle, run_sym, SymSubproblem,
    SymVariant,
};

use crate::error::{usage, Result};
pub use crate::gradients::GateNorm;
use crate::gradients::{check_eta, lambda_fast, lambda_fast_sym};
use crate::linalg::Matrix;
use crate::tensor::DenseTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Init {
    #[default]
    Identity,
    Hosvd,
}

/// How the gate threshold η is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eta {
    /// `η = 1 / (k·n)`.
    PerDim(f64),
    Fixed(f64),
}

impl Eta {
    pub fn value(self, n: usize) -> f64 {
        match self {
            Eta::PerDim(k) => 1.0 / (k * n as f64),
            Eta::Fixed(v) => v,
        }
    }
}

impl Default for Eta {
    fn default() -> Self {
        Eta::PerDim(100.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub eta: Eta,
    /// Stop once the trace changes by less than this over one cycle.
    pub tol: f64,
    /// Measure the per-cycle change relative to `|trace|` instead of absolutely.
    pub relative_tol: bool,
    pub max_cycles: usize,
    pub init: Init,
    /// Norm of `Λ` the gate compares against.
    pub gate_norm: GateNorm,
    /// Record a [`CycleAudit`] at every cycle boundary.
    pub audit: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eta: Eta::default(),
            tol: 1e-4,
            relative_tol: false,
            max_cycles: 200,
            init: Init::Identity,
            gate_norm: GateNorm::Spectral,
            audit: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        check_eta(self.eta.value(n), n)?;
        if !(self.tol > 0.0) {
            return usage(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_cycles == 0 {
            return usage("max_cycles must be at least 1");
        }
        Ok(())
    }
}

/// Row-cyclic pivot order `(0,1), (0,2), …, (n−2, n−1)`.
pub fn pivot_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// One microiteration (ALS) or one pivot step (symmetric) of telemetry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    /// 1-based cycle number.
    pub cycle: usize,
    /// Position within the cycle, 0-based.
    pub micro_index: usize,
    pub pivot: (usize, usize),
    /// Rotated mode; `None` when the rotation acts in all modes at once.
    pub mode: Option<usize>,
    pub applied: bool,
    /// Trace after this step.
    pub trace: f64,
    pub rel_offnorm: f64,
    /// `2|Λ_ij|`.
    pub lambda_pivot_abs2: f64,
    /// `‖Λ‖₂`.
    pub lambda_spec_norm: f64,
}

/// Invariant checks taken at a cycle boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleAudit {
    pub cycle: usize,
    /// `|‖W‖ − ‖A‖| / ‖A‖`.
    pub norm_drift: f64,
    /// Max over factors of `‖UᵀU − I‖_F`.
    pub orthogonality: f64,
    /// `‖W ×₀ U₀ ⋯ − A‖ / ‖A‖`.
    pub reconstruction: f64,
    /// Symmetry defect of `W` (symmetric solver only).
    pub symmetry_defect: Option<f64>,
    /// Gap between the incrementally tracked trace and a full resummation.
    pub trace_drift: f64,
}

/// Per-cycle summary.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleSummary {
    pub cycle: usize,
    pub trace: f64,
    pub rel_offnorm: f64,
    pub applied: usize,
    pub degenerate: usize,
    /// `histogram[k]` = number of pivots at which exactly `k` modes were rotated
    /// (ALS: `k ≤ d`; symmetric: `k ∈ {0, 1}`).
    pub histogram: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Trace change over the last cycle fell below the tolerance.
    Converged,
    CycleCap,
    /// A whole cycle applied no rotation and hit at least one degenerate pair.
    DegenerateAbort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Als,
    Sym(SymVariant),
}

#[derive(Debug, Clone)]
pub struct DecompositionResult {
    pub kind: SolverKind,
    /// Core tensor `S = A ×₀ U₀ᵀ ⋯ ×_{d−1} U_{d−1}ᵀ`.
    pub core: DenseTensor,
    /// One factor per mode; the symmetric solver repeats its single `U`.
    pub factors: Vec<Matrix>,
    pub stop_reason: StopReason,
    pub cycles: usize,
    pub records: Vec<TraceRecord>,
    pub summaries: Vec<CycleSummary>,
    pub audits: Vec<CycleAudit>,
    pub degenerate_skips: usize,
    pub eta: f64,
    pub input_norm: f64,
    pub starting_trace: f64,
    pub starting_rel_offnorm: f64,
    pub final_trace: f64,
    pub final_rel_offnorm: f64,
}

impl DecompositionResult {
    pub fn converged(&self) -> bool {
        self.stop_reason == StopReason::Converged
    }

    /// Diagnostic for runs that stopped on a fully degenerate cycle.
    pub fn diagnostic(&self) -> Option<String> {
        (self.stop_reason == StopReason::DegenerateAbort).then(|| {
            format!(
                "cycle {} applied no rotation ({} degenerate pivots); \
                 the starting point is a degenerate critical point, retry with HOSVD initialization",
                self.cycles,
                self.summaries.last().map_or(0, |s| s.degenerate)
            )
        })
    }

    pub fn factor(&self, mode: usize) -> &Matrix {
        &self.factors[mode]
    }
}

/// Largest `‖Λ‖₂` over modes on the final core (`‖Λ_sym‖₂` for symmetric runs).
pub fn stationarity_check(result: &DecompositionResult) -> f64 {
    match result.kind {
        SolverKind::Als => (0..result.core.order())
            .map(|l| {
                lambda_fast(&result.core, l)
                    .expect("mode in range")
                    .spectral_norm()
            })
            .fold(0.0, f64::max),
        SolverKind::Sym(_) => lambda_fast_sym(&result.core).spectral_norm(),
    }
}

pub(crate) fn rel_offnorm_from(norm_sq: f64, diag_sq: f64) -> f64 {
    if norm_sq == 0.0 {
        0.0
    } else {
        ((norm_sq - diag_sq).max(0.0) / norm_sq).sqrt()
    }
}

pub(crate) fn rel_offnorm(t: &DenseTensor) -> f64 {
    let norm = t.frobenius_norm();
    if norm == 0.0 {
        0.0
    } else {
        t.off_norm() / norm
    }
}

pub(crate) fn audit(
    cycle: usize,
    a: &DenseTensor,
    w: &DenseTensor,
    factors: &[Matrix],
    tracked_trace: f64,
    symmetric: bool,
) -> CycleAudit {
    let a_norm = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let rebuilt = w.multi_mode_product(factors, false).expect("factor shapes");
    let diff = rebuilt
        .as_slice()
        .iter()
        .zip(a.as_slice())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    CycleAudit {
        cycle,
        norm_drift: (w.frobenius_norm() - a.frobenius_norm()).abs() / a_norm,
        orthogonality: factors
            .iter()
            .map(Matrix::orthogonality_error)
            .fold(0.0, f64::max),
        reconstruction: diff / a_norm,
        symmetry_defect: symmetric.then(|| w.transposition_defect(1.0)),
        trace_drift: (tracked_trace - w.trace()).abs(),
    }
}

pub(crate) fn stop_check(cfg: &SolverConfig, start: f64, end: f64) -> bool {
    let change = (end - start).abs();
    if cfg.relative_tol {
        change < cfg.tol * end.abs().max(f64::MIN_POSITIVE)
    } else {
        change < cfg.tol
    }
}
