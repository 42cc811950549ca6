//! Symmetry-preserving trace maximization: one rotation applied in all modes.

use super::{
    audit, rel_offnorm, rel_offnorm_from, stop_check, CycleSummary, DecompositionResult, Init,
    SolverConfig, SolverKind, StopReason, TraceRecord,
};
use crate::error::{usage, Error, Result};
use crate::gradients::{gate, GateNorm, lambda_fast_sym};
use crate::hosvd::hosvd;
use crate::linalg::{
    post_multiply_rotation, real_roots, rotation_from_trace_pair, Matrix, PlaneRotation,
    TraceRotation,
};
use crate::tensor::{DenseTensor, SYMMETRY_TOL};

/// Symmetric working tensors are re-symmetrized every this many cycles.
pub const RESYMMETRIZE_EVERY: usize = 10;

const GRID_POINTS: usize = 360;
const GOLDEN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SymVariant {
    /// Angle maximizing the pair-sum after rotating all modes.
    #[default]
    Full,
    /// Angle optimal for mode 0 alone, applied in all modes.
    Mode1,
}

/// The `2 × ⋯ × 2` subtensor of `W` at pivot `(p, q)`.
///
/// Entry `mask` has index `q` in mode `k` when bit `k` is set and `p` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SymSubproblem {
    order: usize,
    entries: Vec<f64>,
}

impl SymSubproblem {
    pub fn from_tensor(w: &DenseTensor, p: usize, q: usize) -> Result<Self> {
        if p >= w.dim() || q >= w.dim() || p == q {
            return usage(format!("invalid pivot ({p}, {q})"));
        }
        let d = w.order();
        let mut idx = vec![0; d];
        let entries = (0..1usize << d)
            .map(|mask| {
                for (k, slot) in idx.iter_mut().enumerate() {
                    *slot = if mask >> k & 1 == 1 { q } else { p };
                }
                w.get(&idx).expect("index in range")
            })
            .collect();
        Ok(Self { order: d, entries })
    }

    /// Builds a symmetric subproblem from `e[k]`, the entry with `k` indices equal to `q`.
    pub fn from_counts(e: &[f64]) -> Self {
        let order = e.len() - 1;
        let entries = (0..1usize << order)
            .map(|mask| e[mask.count_ones() as usize])
            .collect();
        Self { order, entries }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entry(&self, mask: usize) -> f64 {
        self.entries[mask]
    }

    /// Entry with the first `k` indices equal to `q`.
    pub fn by_count(&self, k: usize) -> f64 {
        self.entries[(1 << k) - 1]
    }

    /// Largest difference between entries that should coincide by symmetry.
    pub fn symmetry_defect(&self) -> f64 {
        self.entries
            .iter()
            .enumerate()
            .map(|(mask, &v)| (v - self.by_count(mask.count_ones() as usize)).abs())
            .fold(0.0, f64::max)
    }
}

/// Pair-sum `a'_{p…p} + a'_{q…q}` after rotating every mode by `R(p, q, φ)`,
/// computed by explicitly rotating the subtensor.
pub fn gs_value(sub: &SymSubproblem, c: f64, s: f64) -> f64 {
    let mut e = sub.entries.clone();
    for k in 0..sub.order {
        let bit = 1 << k;
        for m in 0..e.len() {
            if m & bit == 0 {
                let (x, y) = (e[m], e[m | bit]);
                e[m] = c * x + s * y;
                e[m | bit] = -s * x + c * y;
            }
        }
    }
    e[0] + e[e.len() - 1]
}

/// Coefficients (highest degree first) of `g_s'(φ) / cos^d φ` as a polynomial in `t = tan φ`,
/// scaled by `−1/d`. Only `d ∈ {3, 4}`.
pub fn angle_poly_coeffs(sub: &SymSubproblem) -> Result<Vec<f64>> {
    let e = |k| sub.by_count(k);
    match sub.order {
        3 => {
            let (a111, a112, a122, a222) = (e(0), e(1), e(2), e(3));
            Ok(vec![
                a112 + a122,
                a111 - a222 + 2.0 * a112 - 2.0 * a122,
                a111 + a222 - 2.0 * a112 - 2.0 * a122,
                a122 - a112,
            ])
        }
        4 => {
            let (a1111, a1112, a1122, a1222, a2222) = (e(0), e(1), e(2), e(3), e(4));
            Ok(vec![
                a1222 - a1112,
                6.0 * a1122 - a1111 - a2222,
                6.0 * (a1112 - a1222),
                a1111 + a2222 - 6.0 * a1122,
                a1222 - a1112,
            ])
        }
        d => usage(format!("no angle polynomial for order {d}")),
    }
}

/// Rotation maximizing [`gs_value`]; never worse than `(1, 0)`.
pub fn best_sym_angle(sub: &SymSubproblem) -> (f64, f64) {
    let mut candidates = vec![(1.0, 0.0), (0.0, 1.0), (0.0, -1.0)];
    match angle_poly_coeffs(sub) {
        Ok(coeffs) => match real_roots(&coeffs) {
            Ok(roots) => {
                for t in roots {
                    let r = t.hypot(1.0);
                    candidates.push((1.0 / r, t / r));
                    candidates.push((-1.0 / r, -t / r));
                }
            }
            Err(Error::Degenerate(_)) => {}
            Err(e) => unreachable!("polynomial degree is at most 4: {e}"),
        },
        Err(_) => {
            let phi = golden_search(|phi| gs_value(sub, phi.cos(), phi.sin()));
            candidates.push((phi.cos(), phi.sin()));
        }
    }
    if sub.order % 2 == 0 {
        for cand in candidates.iter_mut() {
            *cand = fold_quarter_turn(*cand);
        }
    }
    let mut best = candidates[0];
    let mut best_val = gs_value(sub, best.0, best.1);
    for &(c, s) in &candidates[1..] {
        let v = gs_value(sub, c, s);
        if v > best_val {
            best = (c, s);
            best_val = v;
        }
    }
    best
}

/// For even order `g` has period π/2; pick the representative with `|φ| ≤ π/4`
/// so that ties never turn into index swaps.
fn fold_quarter_turn((mut c, mut s): (f64, f64)) -> (f64, f64) {
    if c < 0.0 {
        (c, s) = (-c, -s);
    }
    if s > c {
        (s, -c)
    } else if -s > c {
        (-s, c)
    } else {
        (c, s)
    }
}

/// Grid search over the full circle followed by golden-section refinement.
fn golden_search(f: impl Fn(f64) -> f64) -> f64 {
    let h = 2.0 * std::f64::consts::PI / GRID_POINTS as f64;
    let start = (0..GRID_POINTS)
        .map(|k| -std::f64::consts::PI + k as f64 * h)
        .max_by(|x, y| f(*x).total_cmp(&f(*y)))
        .expect("grid is non-empty");
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (start - h, start + h);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > GOLDEN_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// The single-mode optimum for mode 0, to be applied in every mode.
pub fn mode1_angle(sub: &SymSubproblem) -> TraceRotation {
    let all = (1 << sub.order) - 1;
    rotation_from_trace_pair(sub.entry(0) + sub.entry(all), sub.entry(1) - sub.entry(all ^ 1))
}

/// Symmetry-preserving iteration on a symmetric `a`.
pub fn run_sym(a: &DenseTensor, cfg: &SolverConfig, variant: SymVariant) -> Result<DecompositionResult> {
    let (d, n) = (a.order(), a.dim());
    if d < 3 {
        return usage(format!(
            "order {d} not supported: for d = 2 the trace is invariant under the iteration"
        ));
    }
    if n < 2 {
        return usage("dimension must be at least 2");
    }
    if !a.is_symmetric(SYMMETRY_TOL * a.frobenius_norm().max(1.0)) {
        return usage("symmetric solver requires a symmetric tensor");
    }
    cfg.validate(n)?;
    let eta = cfg.eta.value(n);
    let (mut w, mut u) = match cfg.init {
        Init::Identity => (a.clone(), Matrix::identity(n)),
        Init::Hosvd => {
            let u = hosvd(a)?.factors.swap_remove(0);
            let mut w = a.multi_mode_product(&vec![u.clone(); d], true)?;
            w.symmetrize();
            (w, u)
        }
    };
    let pivots = super::pivot_pairs(n);
    let norm_sq: f64 = w.as_slice().iter().map(|x| x * x).sum();
    let mut diag_sq: f64 = w.diagonal().iter().map(|x| x * x).sum();
    let mut trace = w.trace();
    let starting_trace = trace;
    let starting_rel_offnorm = rel_offnorm(&w);
    let mut records = Vec::with_capacity(pivots.len());
    let mut summaries = Vec::new();
    let mut audits = Vec::new();
    let mut degenerate_skips = 0;
    let mut stop_reason = StopReason::CycleCap;

    for cycle in 1..=cfg.max_cycles {
        let cycle_start = trace;
        let mut applied = 0;
        let mut degenerate = 0;
        for (micro_index, &(p, q)) in pivots.iter().enumerate() {
            let lambda = lambda_fast_sym(&w);
            let spec_norm = lambda.spectral_norm();
            let gate_norm = match cfg.gate_norm {
                GateNorm::Spectral => spec_norm,
                other => other.of(&lambda),
            };
            let check = gate(&lambda, gate_norm, p, q, eta)?;
            let mut this_applied = false;
            if check.admissible {
                let sub = SymSubproblem::from_tensor(&w, p, q)?;
                let angle = match variant {
                    SymVariant::Full => Some(best_sym_angle(&sub)),
                    SymVariant::Mode1 => match mode1_angle(&sub) {
                        TraceRotation::Angle { c, s } => Some((c, s)),
                        TraceRotation::Degenerate => None,
                    },
                };
                match angle {
                    None => degenerate += 1,
                    Some((c, s)) => {
                        let (pp, qq) = (w.diag_entry(p), w.diag_entry(q));
                        let rot = PlaneRotation::new(p, q, c, s)?;
                        for l in 0..d {
                            w.rotate_mode(l, &rot);
                        }
                        post_multiply_rotation(&mut u, &rot);
                        let (np, nq) = (w.diag_entry(p), w.diag_entry(q));
                        trace += (np + nq) - (pp + qq);
                        diag_sq += np * np + nq * nq - pp * pp - qq * qq;
                        this_applied = true;
                        applied += 1;
                    }
                }
            }
            records.push(TraceRecord {
                cycle,
                micro_index,
                pivot: (p, q),
                mode: None,
                applied: this_applied,
                trace,
                rel_offnorm: rel_offnorm_from(norm_sq, diag_sq),
                lambda_pivot_abs2: check.pair_abs2,
                lambda_spec_norm: spec_norm,
            });
        }
        degenerate_skips += degenerate;
        if cycle % RESYMMETRIZE_EVERY == 0 {
            w.symmetrize();
        }
        if cfg.audit {
            audits.push(audit(cycle, a, &w, &vec![u.clone(); d], trace, true));
        }
        trace = w.trace();
        diag_sq = w.diagonal().iter().map(|x| x * x).sum();
        summaries.push(CycleSummary {
            cycle,
            trace,
            rel_offnorm: rel_offnorm(&w),
            applied,
            degenerate,
            histogram: vec![pivots.len() - applied, applied],
        });
        if applied == 0 && degenerate > 0 {
            stop_reason = StopReason::DegenerateAbort;
            break;
        }
        if stop_check(cfg, cycle_start, trace) {
            stop_reason = StopReason::Converged;
            break;
        }
    }

    let cycles = summaries.len();
    Ok(DecompositionResult {
        kind: SolverKind::Sym(variant),
        final_trace: trace,
        final_rel_offnorm: rel_offnorm(&w),
        degenerate_skips,
        eta,
        input_norm: a.frobenius_norm(),
        core: w,
        factors: vec![u; d],
        stop_reason,
        cycles,
        records,
        summaries,
        audits,
        starting_trace,
        starting_rel_offnorm,
    })
}
