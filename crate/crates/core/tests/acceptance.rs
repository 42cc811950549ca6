//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any asserted criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tracemax::batch::{run_als_batch, run_als_sweep, run_sym_batch};
use tracemax::gradients::{f_tilde, grad_tilde_mode, lambda_fast, lambda_of};
use tracemax::linalg::{
    eval_poly, real_roots, rotation_from_trace_pair, Matrix, PlaneRotation, TraceRotation,
};
use tracemax::solver::{
    angle_poly_coeffs, best_sym_angle, gs_value, stationarity_check, SymSubproblem,
};
use tracemax::tensor::{
    gen_antisymmetric, gen_orth_diagonalizable, gen_sym_diagonalizable, gen_uniform,
    random_orthogonal, DiagRange,
};
use tracemax::{
    DecompositionResult, DenseTensor, Eta, Execution, Init, SolverConfig, StopReason, SymVariant,
};

const EXEC: Execution = Execution::Parallel;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn cfg(eta: f64) -> SolverConfig {
    SolverConfig {
        eta: Eta::PerDim(eta),
        audit: true,
        ..SolverConfig::default()
    }
}

fn ok(results: Vec<tracemax::Result<DecompositionResult>>) -> Vec<DecompositionResult> {
    results.into_iter().map(|r| r.expect("solver run")).collect()
}

/// Runs shared by several criteria.
struct Ensembles {
    /// d=3 n=20 orth-diag, seeds 0..20: (tensor, diagonal, η=1/(1000n) run, η=1/n run).
    diag3: Vec<(DenseTensor, Vec<f64>, DecompositionResult, DecompositionResult)>,
    /// d=4 n=10 orth-diag, seeds 0..20, η=1/(1000n).
    diag4: Vec<(DenseTensor, Vec<f64>, DecompositionResult)>,
    /// Random d=3 n=20, seeds 0..5, one run per η ∈ {1/n, 1/(10n), 1/(100n), 1/(1000n)}.
    random3: Vec<(DenseTensor, Vec<DecompositionResult>)>,
    /// Symmetric d=3 n=20 sym-diag, seeds 0..10: (tensor, Full, Mode1).
    sym3: Vec<(DenseTensor, DecompositionResult, DecompositionResult)>,
}

const ETA_SWEEP: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];

fn build_ensembles() -> Ensembles {
    let gen3: Vec<_> = (0..20)
        .map(|s| gen_orth_diagonalizable(3, 20, s, DiagRange::UNIT).unwrap())
        .collect();
    let tensors: Vec<_> = gen3.iter().map(|(t, _)| t.clone()).collect();
    let runs = run_als_sweep(&tensors, &[cfg(1000.0), cfg(1.0)], EXEC);
    let diag3 = gen3
        .into_iter()
        .zip(runs)
        .map(|((t, d), mut r)| {
            let big = r.pop().unwrap().unwrap();
            let small = r.pop().unwrap().unwrap();
            (t, d, small, big)
        })
        .collect();

    let gen4: Vec<_> = (0..20)
        .map(|s| gen_orth_diagonalizable(4, 10, s, DiagRange::UNIT).unwrap())
        .collect();
    let tensors: Vec<_> = gen4.iter().map(|(t, _)| t.clone()).collect();
    let runs = ok(run_als_batch(&tensors, &cfg(1000.0), EXEC));
    let diag4 = gen4.into_iter().zip(runs).map(|((t, d), r)| (t, d, r)).collect();

    let tensors: Vec<_> = (0..5).map(|s| gen_uniform(3, 20, s).unwrap()).collect();
    let cfgs: Vec<_> = ETA_SWEEP.iter().map(|&k| cfg(k)).collect();
    let runs = run_als_sweep(&tensors, &cfgs, EXEC);
    let random3 = tensors
        .into_iter()
        .zip(runs)
        .map(|(t, r)| (t, ok(r)))
        .collect();

    let tensors: Vec<_> = (0..10)
        .map(|s| gen_sym_diagonalizable(3, 20, s, DiagRange::UNIT).unwrap().0)
        .collect();
    let full = ok(run_sym_batch(&tensors, &cfg(1000.0), SymVariant::Full, EXEC));
    let mode1 = ok(run_sym_batch(&tensors, &cfg(1000.0), SymVariant::Mode1, EXEC));
    let sym3 = tensors
        .into_iter()
        .zip(full.into_iter().zip(mode1))
        .map(|(t, (f, m))| (t, f, m))
        .collect();

    Ensembles {
        diag3,
        diag4,
        random3,
        sym3,
    }
}

impl Ensembles {
    fn all_runs(&self) -> Vec<(&DenseTensor, &DecompositionResult)> {
        let mut v = Vec::new();
        for (t, _, s, b) in &self.diag3 {
            v.push((t, s));
            v.push((t, b));
        }
        for (t, _, r) in &self.diag4 {
            v.push((t, r));
        }
        for (t, rs) in &self.random3 {
            v.extend(rs.iter().map(|r| (t, r)));
        }
        for (t, f, m) in &self.sym3 {
            v.push((t, f));
            v.push((t, m));
        }
        v
    }
}

fn criterion_1(e: &Ensembles) -> Outcome {
    let mut failures = Vec::new();
    let mut worst_off = 0.0_f64;
    let mut worst_gap = 0.0_f64;
    let instances = e
        .diag3
        .iter()
        .map(|(_, d, r, _)| (3, d, r))
        .chain(e.diag4.iter().map(|(_, d, r)| (4, d, r)));
    for (seed, (order, diag, r)) in instances.enumerate() {
        let gap = (r.final_trace - diag.iter().sum::<f64>()).abs();
        worst_off = worst_off.max(r.final_rel_offnorm);
        worst_gap = worst_gap.max(gap);
        if !(r.converged() && r.cycles <= 200 && r.final_rel_offnorm <= 1e-6 && gap <= 1e-4) {
            failures.push(format!(
                "d={order} seed {}: converged={} off={:.1e} trace gap={:.1e}",
                seed % 20,
                r.converged(),
                r.final_rel_offnorm,
                gap
            ));
        }
    }
    let mut detail = format!(
        "{}/40 instances recovered; worst rel off-norm {worst_off:.1e}, worst trace gap {worst_gap:.1e}",
        40 - failures.len()
    );
    for f in &failures {
        detail.push_str(&format!("\n      {f}"));
    }
    outcome(failures.is_empty(), detail)
}

fn criterion_2(e: &Ensembles) -> Outcome {
    let mut hits = 0;
    let mut gaps = Vec::new();
    for (_, _, small, big) in &e.diag3 {
        let gap = big.final_rel_offnorm - small.final_rel_offnorm;
        gaps.push(gap);
        if gap >= 1e-3 && big.final_trace <= small.final_trace + 1e-8 {
            hits += 1;
        }
    }
    let max_gap = gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    outcome(
        hits >= 10,
        format!("{hits}/20 instances with off-norm gap >= 1e-3 (need 10); largest gap {max_gap:.1e}"),
    )
}

fn criterion_3(e: &Ensembles) -> Outcome {
    let mut means = Vec::new();
    let mut full_share = 0.0;
    for k in 0..ETA_SWEEP.len() {
        let (mut modes, mut iters, mut full) = (0usize, 0usize, 0usize);
        for (_, runs) in &e.random3 {
            for s in &runs[k].summaries {
                modes += s.applied;
                iters += s.histogram.iter().sum::<usize>();
                full += s.histogram[3];
            }
        }
        means.push(modes as f64 / iters as f64);
        full_share = full as f64 / iters as f64;
    }
    let monotone = means.windows(2).all(|w| w[0] < w[1]);
    outcome(
        monotone && full_share >= 0.95,
        format!(
            "mean applied per iteration {:?}; all-modes share at 1/(1000n) {:.4}",
            means.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>(),
            full_share
        ),
    )
}

fn criterion_4(e: &Ensembles) -> Outcome {
    let mut applied = 0usize;
    let mut violations = 0usize;
    for (_, r) in e.all_runs() {
        if r.kind == tracemax::solver::SolverKind::Sym(SymVariant::Mode1) {
            continue;
        }
        let mut prev = r.starting_trace;
        let mut cycle = 1;
        for rec in &r.records {
            if rec.cycle != cycle {
                prev = r.summaries[cycle - 1].trace;
                cycle = rec.cycle;
            }
            if rec.applied {
                applied += 1;
                if rec.trace < prev - 1e-12 {
                    violations += 1;
                }
                prev = rec.trace;
            }
        }
    }
    outcome(
        applied >= 100_000 && violations == 0,
        format!("{applied} applied microiterations, {violations} violations"),
    )
}

fn criterion_5(e: &Ensembles) -> Outcome {
    let (mut drift, mut orth, mut recon) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut audits = 0;
    for (_, r) in e.all_runs() {
        for a in &r.audits {
            drift = drift.max(a.norm_drift);
            orth = orth.max(a.orthogonality);
            recon = recon.max(a.reconstruction);
            audits += 1;
        }
    }
    outcome(
        drift <= 1e-10 && orth <= 1e-10 && recon <= 1e-9,
        format!("{audits} cycle audits; max norm drift {drift:.1e}, max orthogonality {orth:.1e}, max reconstruction {recon:.1e}"),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst_eq, mut worst_fd) = (0.0_f64, 0.0_f64);
    let h = 1e-5;
    for k in 0..100 {
        let order = 3 + k % 2;
        let n = 3 + (k / 2) % 3;
        let a = DenseTensor::from_fn(order, n, |_| rng.random_range(-1.0..1.0)).unwrap();
        let factors: Vec<Matrix> = (0..order).map(|_| random_orthogonal(n, &mut rng)).collect();
        let w = a.multi_mode_product(&factors, true).unwrap();
        for l in 0..order {
            let fast = lambda_fast(&w, l).unwrap();
            let slow = lambda_of(&factors[l], &grad_tilde_mode(&a, &factors, l).unwrap()).unwrap();
            worst_eq = worst_eq.max(fast.as_matrix().sub(slow.as_matrix()).max_abs());
            let i = rng.random_range(0..n - 1);
            let j = rng.random_range(i + 1..n);
            let along = |phi: f64| {
                let mut f = factors.clone();
                let rot = PlaneRotation::new(i, j, phi.cos(), phi.sin()).unwrap();
                f[l] = f[l].matmul(&rot.to_matrix(n)).unwrap();
                f_tilde(&a, &f).unwrap()
            };
            let fd = (along(h) - along(-h)) / (2.0 * h);
            worst_fd = worst_fd.max((fd.abs() - 2.0 * fast.get(i, j).abs()).abs());
        }
    }
    outcome(
        worst_eq <= 1e-12 && worst_fd <= 1e-6,
        format!("max |fast - gradient path| {worst_eq:.1e}; max |FD - 2|Λ_ij|| {worst_fd:.1e}"),
    )
}

/// Pair-sum after rotating all modes, from the binomial expansion
/// `Σ_j C(d,j) (e_j + (−1)^j e_{d−j}) c^{d−j} s^j`.
fn gs_expanded(e: &[f64], c: f64, s: f64) -> f64 {
    let d = e.len() - 1;
    let mut binom = 1.0;
    let mut total = 0.0;
    for j in 0..=d {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        total += binom * (e[j] + sign * e[d - j]) * c.powi((d - j) as i32) * s.powi(j as i32);
        binom = binom * (d - j) as f64 / (j + 1) as f64;
    }
    total
}

/// `d/dφ` of [`gs_expanded`] at `(c, s) = (cos φ, sin φ)`.
fn gs_expanded_deriv(e: &[f64], c: f64, s: f64) -> f64 {
    let d = e.len() - 1;
    let mut binom = 1.0;
    let mut total = 0.0;
    for j in 0..=d {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let beta = e[j] + sign * e[d - j];
        let mut term = 0.0;
        if j < d {
            term -= (d - j) as f64 * c.powi((d - j - 1) as i32) * s.powi((j + 1) as i32);
        }
        if j > 0 {
            term += j as f64 * c.powi((d - j + 1) as i32) * s.powi((j - 1) as i32);
        }
        total += binom * beta * term;
        binom = binom * (d - j) as f64 / (j + 1) as f64;
    }
    total
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    const SAMPLES: usize = 100_000;
    let grid: Vec<(f64, f64)> = (0..SAMPLES)
        .map(|k| {
            let phi = -PI + 2.0 * PI * k as f64 / SAMPLES as f64;
            (phi.cos(), phi.sin())
        })
        .collect();
    let mut worst_pair = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let (d, n) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let best = match rotation_from_trace_pair(d, n) {
            TraceRotation::Angle { c, s } => c * d + s * n,
            TraceRotation::Degenerate => 0.0,
        };
        let sampled = grid.iter().map(|&(c, s)| c * d + s * n).fold(f64::NEG_INFINITY, f64::max);
        worst_pair = worst_pair.max(sampled - best);
    }
    let mut worst_sym = f64::NEG_INFINITY;
    let mut worst_residual = 0.0_f64;
    for order in [3, 4] {
        for _ in 0..1000 {
            let e: Vec<f64> = (0..=order).map(|_| rng.random_range(-1.0..1.0)).collect();
            let sub = SymSubproblem::from_counts(&e);
            let (c, s) = best_sym_angle(&sub);
            let best = gs_value(&sub, c, s);
            let sampled = grid
                .iter()
                .map(|&(c, s)| gs_expanded(&e, c, s))
                .fold(f64::NEG_INFINITY, f64::max);
            worst_sym = worst_sym.max(sampled - best);
            let coeffs = angle_poly_coeffs(&sub).unwrap();
            for t in real_roots(&coeffs).unwrap() {
                let phi = t.atan();
                let deriv = gs_expanded_deriv(&e, phi.cos(), phi.sin());
                worst_residual = worst_residual.max(deriv.abs());
                assert!(eval_poly(&coeffs, t).0.is_finite());
            }
        }
    }
    outcome(
        worst_pair <= 1e-9 && worst_sym <= 1e-9 && worst_residual <= 1e-9,
        format!(
            "sampling excess: single-mode {worst_pair:.1e}, symmetric {worst_sym:.1e}; max root derivative residual {worst_residual:.1e}"
        ),
    )
}

fn criterion_8(e: &Ensembles) -> Outcome {
    let mut worst = 0.0_f64;
    let mut count = 0;
    for (t, r) in e.all_runs() {
        if r.converged() {
            worst = worst.max(stationarity_check(r) / t.frobenius_norm());
            count += 1;
        }
    }
    outcome(
        worst <= 1e-3,
        format!("{count} converged runs; max ‖Λ‖₂/‖A‖ = {worst:.1e}"),
    )
}

fn criterion_9(e: &Ensembles) -> Outcome {
    let (_, full, mode1) = &e.sym3[0];
    let defect = |r: &DecompositionResult| {
        r.audits
            .iter()
            .filter_map(|a| a.symmetry_defect)
            .fold(0.0_f64, f64::max)
    };
    let sym_ok = defect(full) <= 1e-10 && defect(mode1) <= 1e-10;
    let pass = full.final_rel_offnorm <= 1e-6
        && (mode1.final_trace - full.final_trace).abs() <= 1e-3
        && mode1.cycles >= full.cycles
        && sym_ok;
    let agree = e
        .sym3
        .iter()
        .filter(|(_, f, m)| (m.final_trace - f.final_trace).abs() <= 1e-3 && m.cycles >= f.cycles)
        .count();
    let full_ok = e.sym3.iter().filter(|(_, f, _)| f.final_rel_offnorm <= 1e-6).count();
    outcome(
        pass,
        format!(
            "seed 0: Full off {:.1e} in {} cycles, Mode1 trace diff {:.1e} in {} cycles, max symmetry defect {:.1e}; \
             seeds 0..10 (informational): Full off <= 1e-6 on {full_ok}/10, Mode1 agrees on {agree}/10",
            full.final_rel_offnorm,
            full.cycles,
            (mode1.final_trace - full.final_trace).abs(),
            mode1.cycles,
            defect(full).max(defect(mode1))
        ),
    )
}

/// Whether `x` and `y` agree up to a signed permutation of columns.
fn same_up_to_signed_perm(x: &Matrix, y: &Matrix, tol: f64) -> bool {
    let n = x.cols();
    let mut used = vec![false; n];
    for i in 0..n {
        let xi = x.column(i);
        let hit = (0..n).find(|&j| {
            !used[j] && {
                let yj = y.column(j);
                let plus = xi.iter().zip(&yj).all(|(a, b)| (a - b).abs() <= tol);
                let minus = xi.iter().zip(&yj).all(|(a, b)| (a + b).abs() <= tol);
                plus || minus
            }
        });
        match hit {
            Some(j) => used[j] = true,
            None => return false,
        }
    }
    true
}

fn criterion_10() -> (Outcome, Outcome) {
    let mut instances = Vec::new();
    let mut seed = 0;
    while instances.len() < 10 {
        let (t, diag, _) = gen_sym_diagonalizable(4, 6, seed, DiagRange::SIGNED).unwrap();
        if diag.iter().any(|&x| x < 0.0) {
            instances.push((seed, t, diag));
        }
        seed += 1;
    }
    let tensors: Vec<_> = instances.iter().map(|(_, t, _)| t.clone()).collect();
    let sym = ok(run_sym_batch(&tensors, &cfg(1000.0), SymVariant::Full, EXEC));
    let als = ok(run_als_batch(&tensors, &cfg(1000.0), EXEC));

    let mut a_ok = true;
    let mut lines = Vec::new();
    for ((seed, t, diag), r) in instances.iter().zip(&sym) {
        let stationary = stationarity_check(r) <= 1e-3 * t.frobenius_norm();
        let fine = r.final_trace >= r.starting_trace && (!r.converged() || stationary);
        a_ok &= fine;
        lines.push(format!(
            "seed {seed}: start {:.4} final {:.4} (Σdiag {:.4}, Σ|diag| {:.4}) off {:.1e} ‖Λ‖₂/‖A‖ {:.1e} cycles {} {:?}",
            r.starting_trace,
            r.final_trace,
            diag.iter().sum::<f64>(),
            diag.iter().map(|x| x.abs()).sum::<f64>(),
            r.final_rel_offnorm,
            stationarity_check(r) / t.frobenius_norm(),
            r.cycles,
            r.stop_reason
        ));
    }
    let mut detail_a = String::from("symmetric solver on d=4 n=6 signed diagonal tensors:");
    for l in &lines {
        detail_a.push_str(&format!("\n      {l}"));
    }

    let mut matches = 0;
    for r in &als {
        let neg = r.factors[0].scale(-1.0);
        if (1..4).all(|k| same_up_to_signed_perm(&neg, &r.factors[k], 1e-3)) {
            matches += 1;
        }
    }
    let detail_b = format!("-U1 = U2 = U3 = U4 up to signed column permutation on {matches}/10 (report only; 7 expected)");
    (outcome(a_ok, detail_a), outcome(matches >= 7, detail_b))
}

fn criterion_11() -> Outcome {
    let mut failures = Vec::new();
    for seed in 0..5 {
        let a = gen_antisymmetric(3, 4, seed).unwrap();
        let ident = tracemax::run(&a, &cfg(100.0)).unwrap();
        let hosvd = tracemax::run(&a, &SolverConfig { init: Init::Hosvd, ..cfg(100.0) }).unwrap();
        let first = &hosvd.summaries[0];
        let pass = ident.stop_reason == StopReason::DegenerateAbort
            && ident.diagnostic().is_some()
            && first.applied >= 1
            && first.trace > hosvd.starting_trace;
        if !pass {
            failures.push(seed);
        }
    }
    outcome(
        failures.is_empty(),
        format!("5 antisymmetric d=3 n=4 tensors; failing seeds {failures:?}"),
    )
}

fn criterion_12() -> Outcome {
    let tensors: Vec<_> = (0..10).map(|s| gen_uniform(4, 10, s).unwrap()).collect();
    let cfgs = [
        cfg(100.0),
        SolverConfig {
            init: Init::Hosvd,
            ..cfg(100.0)
        },
    ];
    let runs = run_als_sweep(&tensors, &cfgs, EXEC);
    let mut start_ok = 0;
    let mut agree = 0;
    let mut diffs = Vec::new();
    for r in runs {
        let r = ok(r);
        let tol = cfgs[0].tol;
        start_ok += (r[1].starting_trace >= r[0].starting_trace) as usize;
        let diff = (r[0].final_trace - r[1].final_trace).abs();
        agree += (diff <= 10.0 * tol) as usize;
        diffs.push(format!("{diff:.1e}"));
    }
    outcome(
        start_ok == 10 && agree >= 8,
        format!("HOSVD start >= identity start on {start_ok}/10; final traces within 10·tol on {agree}/10 (need 8); diffs {diffs:?}"),
    )
}

fn main() {
    let t0 = Instant::now();
    let mut results: Vec<(String, Outcome, bool)> = Vec::new();
    let mut record = |id: &str, o: Outcome, asserted: bool| {
        let tag = match (o.pass, asserted) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "MISS",
        };
        println!("criterion {id:<4} {tag}  {}", o.detail);
        results.push((id.to_string(), o, asserted));
    };

    record("6", criterion_6(), true);
    record("7", criterion_7(), true);
    let e = build_ensembles();
    record("1", criterion_1(&e), true);
    record("2", criterion_2(&e), true);
    record("3", criterion_3(&e), true);
    record("4", criterion_4(&e), true);
    record("5", criterion_5(&e), true);
    record("8", criterion_8(&e), true);
    record("9", criterion_9(&e), true);
    let (a, b) = criterion_10();
    record("10a", a, true);
    record("10b", b, false);
    record("11", criterion_11(), true);
    record("12", criterion_12(), true);

    let failed: Vec<_> = results
        .iter()
        .filter(|(_, o, asserted)| *asserted && !o.pass)
        .map(|(id, _, _)| id.as_str())
        .collect();
    println!(
        "acceptance: {} asserted criteria, {} failed {:?} ({:.1?})",
        results.iter().filter(|r| r.2).count(),
        failed.len(),
        failed,
        t0.elapsed()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
