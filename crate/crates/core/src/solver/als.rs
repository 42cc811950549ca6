//! Cyclic-pivot ALS Jacobi trace maximization over `d` independent factors.

use super::{
    audit, rel_offnorm, rel_offnorm_from, stop_check, CycleSummary, DecompositionResult, Init,
    SolverConfig, SolverKind, StopReason, TraceRecord,
};
use crate::error::{usage, Result};
use crate::gradients::{gate, GateNorm, lambda_fast};
use crate::hosvd::hosvd;
use crate::linalg::{post_multiply_rotation, rotation_from_trace_pair, Matrix, PlaneRotation, TraceRotation};
use crate::tensor::DenseTensor;

/// Mutable solver state: working tensor, factors and running telemetry.
#[derive(Debug, Clone)]
pub struct AlsState {
    w: DenseTensor,
    factors: Vec<Matrix>,
    eta: f64,
    gate_norm: GateNorm,
    norm_sq: f64,
    diag_sq: f64,
    trace: f64,
    cycle: usize,
    micro_index: usize,
    degenerate_skips: usize,
}

impl AlsState {
    /// Initial state for `a` under `cfg.init`.
    pub fn new(a: &DenseTensor, cfg: &SolverConfig) -> Result<Self> {
        if a.order() < 3 {
            return usage(format!(
                "order {} not supported: for d = 2 the trace is invariant under the iteration",
                a.order()
            ));
        }
        if a.dim() < 2 {
            return usage("dimension must be at least 2");
        }
        cfg.validate(a.dim())?;
        let (w, factors) = match cfg.init {
            Init::Identity => (a.clone(), vec![Matrix::identity(a.dim()); a.order()]),
            Init::Hosvd => {
                let h = hosvd(a)?;
                (h.core, h.factors)
            }
        };
        let mut state = Self {
            norm_sq: 0.0,
            diag_sq: 0.0,
            trace: 0.0,
            w,
            factors,
            eta: cfg.eta.value(a.dim()),
            gate_norm: cfg.gate_norm,
            cycle: 1,
            micro_index: 0,
            degenerate_skips: 0,
        };
        state.resync();
        Ok(state)
    }

    pub fn working_tensor(&self) -> &DenseTensor {
        &self.w
    }

    pub fn factors(&self) -> &[Matrix] {
        &self.factors
    }

    /// Incrementally tracked trace.
    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn degenerate_skips(&self) -> usize {
        self.degenerate_skips
    }

    fn resync(&mut self) {
        self.norm_sq = self.w.as_slice().iter().map(|x| x * x).sum();
        self.diag_sq = self.w.diagonal().iter().map(|x| x * x).sum();
        self.trace = self.w.trace();
    }
}

/// One gated rotation of mode `l` at pivot `(i, j)`.
pub fn microiteration(state: &mut AlsState, l: usize, pivot: (usize, usize)) -> Result<TraceRecord> {
    let (i, j) = pivot;
    let lambda = lambda_fast(&state.w, l)?;
    let spec_norm = lambda.spectral_norm();
    let gate_norm = match state.gate_norm {
        GateNorm::Spectral => spec_norm,
        other => other.of(&lambda),
    };
    let check = gate(&lambda, gate_norm, i, j, state.eta)?;
    let mut applied = false;
    if check.admissible {
        let (pp, qq) = (state.w.diag_entry(i), state.w.diag_entry(j));
        let mut idx = vec![i; state.w.order()];
        idx[l] = j;
        let pqp = state.w.get(&idx)?;
        idx.fill(j);
        idx[l] = i;
        let qpq = state.w.get(&idx)?;
        match rotation_from_trace_pair(pp + qq, pqp - qpq) {
            TraceRotation::Degenerate => state.degenerate_skips += 1,
            TraceRotation::Angle { c, s } => {
                let rot = PlaneRotation::new(i, j, c, s)?;
                state.w.rotate_mode(l, &rot);
                post_multiply_rotation(&mut state.factors[l], &rot);
                let (np, nq) = (state.w.diag_entry(i), state.w.diag_entry(j));
                state.trace += (np + nq) - (pp + qq);
                state.diag_sq += np * np + nq * nq - pp * pp - qq * qq;
                applied = true;
            }
        }
    }
    let record = TraceRecord {
        cycle: state.cycle,
        micro_index: state.micro_index,
        pivot,
        mode: Some(l),
        applied,
        trace: state.trace,
        rel_offnorm: rel_offnorm_from(state.norm_sq, state.diag_sq),
        lambda_pivot_abs2: check.pair_abs2,
        lambda_spec_norm: spec_norm,
    };
    state.micro_index += 1;
    Ok(record)
}

/// Runs the ALS iteration on `a` until the per-cycle trace change drops
/// below `cfg.tol`, `cfg.max_cycles` is reached, or a cycle is fully degenerate.
pub fn run(a: &DenseTensor, cfg: &SolverConfig) -> Result<DecompositionResult> {
    let mut state = AlsState::new(a, cfg)?;
    let (d, n) = (a.order(), a.dim());
    let pivots = super::pivot_pairs(n);
    let starting_trace = state.trace;
    let starting_rel_offnorm = rel_offnorm(&state.w);
    let mut records = Vec::with_capacity(pivots.len() * d);
    let mut summaries = Vec::new();
    let mut audits = Vec::new();
    let mut stop_reason = StopReason::CycleCap;

    for cycle in 1..=cfg.max_cycles {
        state.cycle = cycle;
        state.micro_index = 0;
        let cycle_start = state.trace;
        let degenerate_before = state.degenerate_skips;
        let mut histogram = vec![0; d + 1];
        let mut applied = 0;
        for &pivot in &pivots {
            let mut modes = 0;
            for l in 0..d {
                let rec = microiteration(&mut state, l, pivot)?;
                modes += rec.applied as usize;
                records.push(rec);
            }
            histogram[modes] += 1;
            applied += modes;
        }
        let tracked = state.trace;
        if cfg.audit {
            audits.push(audit(cycle, a, &state.w, &state.factors, tracked, false));
        }
        state.resync();
        let degenerate = state.degenerate_skips - degenerate_before;
        summaries.push(CycleSummary {
            cycle,
            trace: state.trace,
            rel_offnorm: rel_offnorm(&state.w),
            applied,
            degenerate,
            histogram,
        });
        if applied == 0 && degenerate > 0 {
            stop_reason = StopReason::DegenerateAbort;
            break;
        }
        if stop_check(cfg, cycle_start, state.trace) {
            stop_reason = StopReason::Converged;
            break;
        }
    }

    let cycles = summaries.len();
    let final_rel_offnorm = rel_offnorm(&state.w);
    Ok(DecompositionResult {
        kind: SolverKind::Als,
        final_trace: state.trace,
        final_rel_offnorm,
        degenerate_skips: state.degenerate_skips,
        eta: state.eta,
        input_norm: a.frobenius_norm(),
        core: state.w,
        factors: state.factors,
        stop_reason,
        cycles,
        records,
        summaries,
        audits,
        starting_trace,
        starting_rel_offnorm,
    })
}
