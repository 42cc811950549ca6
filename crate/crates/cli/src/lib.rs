//! Experiment harness: tensor generation, solver runs and telemetry output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use tracemax::solver::{CycleSummary, GateNorm, TraceRecord};
use tracemax::tensor::{
    gen_antisymmetric, gen_orth_diagonalizable, gen_sym_diagonalizable, gen_uniform,
    read_tns_file, write_tns_file, DiagRange,
};
use tracemax::{
    run, run_sym, stationarity_check, DecompositionResult, DenseTensor, Eta, Init, SolverConfig,
    StopReason, SymVariant,
};

/// Exit code for runs that stopped on a fully degenerate cycle.
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Als,
    Sym,
    SymMode1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    Uniform,
    OrthDiag,
    SymDiag,
    Antisym,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitArg {
    Identity,
    Hosvd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateNormArg {
    Spectral,
    Frobenius,
}

/// Parses `1/n`, `1/(10n)`, `1/(Kn)` or a plain decimal.
pub fn parse_eta(s: &str) -> std::result::Result<Eta, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t == "1/n" {
        return Ok(Eta::PerDim(1.0));
    }
    if let Some(k) = t.strip_prefix("1/(").and_then(|r| r.strip_suffix("n)")) {
        let k: f64 = k.parse().map_err(|_| format!("bad eta multiplier in {s:?}"))?;
        if k > 0.0 {
            return Ok(Eta::PerDim(k));
        }
        return Err(format!("eta multiplier must be positive in {s:?}"));
    }
    t.parse::<f64>()
        .map(Eta::Fixed)
        .map_err(|_| format!("eta must be 1/n, 1/(Kn) or a decimal, got {s:?}"))
}

/// Parses `lo,hi`.
pub fn parse_range(s: &str) -> std::result::Result<DiagRange, String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("range must be lo,hi, got {s:?}"))?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound in {s:?}"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound in {s:?}"))?;
    DiagRange::new(lo, hi).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenArgs {
    /// Tensor ensemble.
    #[arg(long = "gen", value_enum)]
    pub generator: Generator,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    #[arg(long, default_value_t = 20)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Diagonal entry range `lo,hi` for the diagonalizable ensembles.
    #[arg(long, value_parser = parse_range, default_value = "0,1")]
    #[serde(serialize_with = "ser_range")]
    pub diag_range: DiagRange,
}

fn ser_range<S: serde::Serializer>(r: &DiagRange, s: S) -> std::result::Result<S::Ok, S::Error> {
    [r.lo, r.hi].serialize(s)
}

fn ser_eta<S: serde::Serializer>(e: &Eta, s: S) -> std::result::Result<S::Ok, S::Error> {
    match e {
        Eta::PerDim(k) if *k == 1.0 => "1/n".to_string().serialize(s),
        Eta::PerDim(k) => format!("1/({k}n)").serialize(s),
        Eta::Fixed(v) => v.serialize(s),
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SourceArgs {
    /// Read the tensor from a TNS file.
    #[arg(long = "in", conflicts_with = "generator", required_unless_present = "generator")]
    pub input: Option<PathBuf>,
    #[arg(long = "gen", value_enum)]
    pub generator: Option<Generator>,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    #[arg(long, default_value_t = 20)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_parser = parse_range, default_value = "0,1")]
    #[serde(serialize_with = "ser_range")]
    pub diag_range: DiagRange,
}

impl SourceArgs {
    pub fn load(&self) -> Result<DenseTensor> {
        match (&self.input, self.generator) {
            (Some(path), None) => read_tns_file(path)
                .with_context(|| format!("reading {}", path.display())),
            (None, Some(g)) => Ok(generate(g, self.order, self.dim, self.seed, self.diag_range)?.0),
            _ => bail!("exactly one of --in and --gen is required"),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value = "als")]
    pub algo: Algo,
    /// Gate threshold: `1/n`, `1/(10n)`, `1/(100n)`, `1/(1000n)` or a decimal.
    #[arg(long, value_parser = parse_eta, default_value = "1/(100n)")]
    #[serde(serialize_with = "ser_eta")]
    pub eta: Eta,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_cycles: usize,
    #[arg(long, value_enum, default_value = "identity")]
    pub init: InitArg,
    #[arg(long, value_enum, default_value = "spectral")]
    pub gate_norm: GateNormArg,
}

impl SolverArgs {
    pub fn config(&self, init: InitArg) -> SolverConfig {
        SolverConfig {
            eta: self.eta,
            tol: self.tol,
            max_cycles: self.max_cycles,
            init: match init {
                InitArg::Identity => Init::Identity,
                InitArg::Hosvd => Init::Hosvd,
            },
            gate_norm: match self.gate_norm {
                GateNormArg::Spectral => GateNorm::Spectral,
                GateNormArg::Frobenius => GateNorm::Frobenius,
            },
            ..SolverConfig::default()
        }
    }

    pub fn solve(&self, a: &DenseTensor, init: InitArg) -> Result<DecompositionResult> {
        let cfg = self.config(init);
        let result = match self.algo {
            Algo::Als => run(a, &cfg),
            Algo::Sym => run_sym(a, &cfg, SymVariant::Full),
            Algo::SymMode1 => run_sym(a, &cfg, SymVariant::Mode1),
        };
        Ok(result?)
    }
}

/// Generated tensor with its true diagonal when the ensemble has one.
pub fn generate(
    g: Generator,
    order: usize,
    dim: usize,
    seed: u64,
    range: DiagRange,
) -> Result<(DenseTensor, Option<Vec<f64>>)> {
    Ok(match g {
        Generator::Uniform => (gen_uniform(order, dim, seed)?, None),
        Generator::OrthDiag => {
            let (t, d) = gen_orth_diagonalizable(order, dim, seed, range)?;
            (t, Some(d))
        }
        Generator::SymDiag => {
            let (t, d, _) = gen_sym_diagonalizable(order, dim, seed, range)?;
            (t, Some(d))
        }
        Generator::Antisym => (gen_antisymmetric(order, dim, seed)?, None),
    })
}

/// `path` with `suffix` appended to its file name.
pub fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn cmd_generate(args: &GenArgs, out: &Path) -> Result<()> {
    let (t, diag) = generate(args.generator, args.order, args.dim, args.seed, args.diag_range)?;
    write_tns_file(&t, out).with_context(|| format!("writing {}", out.display()))?;
    if let Some(diag) = diag {
        let path = with_suffix(out, ".diag");
        let mut w = BufWriter::new(File::create(&path)?);
        for v in diag {
            writeln!(w, "{v:.16e}")?;
        }
        w.flush()?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct CsvRow {
    cycle: usize,
    micro_index: usize,
    pivot_i: usize,
    pivot_j: usize,
    mode: usize,
    applied: u8,
    trace: f64,
    rel_offnorm: f64,
    lambda_pivot_abs2: f64,
    lambda_spec_norm: f64,
}

/// Telemetry CSV; pivots and modes are 1-based, mode 0 marks an all-mode rotation.
pub fn write_telemetry<W: Write>(records: &[TraceRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRow {
            cycle: r.cycle,
            micro_index: r.micro_index,
            pivot_i: r.pivot.0 + 1,
            pivot_j: r.pivot.1 + 1,
            mode: r.mode.map_or(0, |m| m + 1),
            applied: r.applied as u8,
            trace: r.trace,
            rel_offnorm: r.rel_offnorm,
            lambda_pivot_abs2: r.lambda_pivot_abs2,
            lambda_spec_norm: r.lambda_spec_norm,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct CycleJson {
    pub cycle: usize,
    pub trace: f64,
    pub rel_offnorm: f64,
    pub applied: usize,
    pub degenerate: usize,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub converged: bool,
    pub stop_reason: &'static str,
    pub cycles: usize,
    pub starting_trace: f64,
    pub starting_rel_offnorm: f64,
    pub final_trace: f64,
    pub final_rel_offnorm: f64,
    pub degenerate_skips: usize,
    pub eta: f64,
    pub stationarity: f64,
    /// Per cycle: number of pivots at which `k` rotations were applied, `k = 0, 1, …`.
    pub microiteration_histogram: Vec<Vec<usize>>,
    pub per_cycle: Vec<CycleJson>,
    pub diagnostic: Option<String>,
}

pub fn stop_reason_str(r: StopReason) -> &'static str {
    match r {
        StopReason::Converged => "converged",
        StopReason::CycleCap => "cycle-cap",
        StopReason::DegenerateAbort => "degenerate-abort",
    }
}

impl Summary {
    pub fn from_result(r: &DecompositionResult) -> Self {
        Self {
            converged: r.converged(),
            stop_reason: stop_reason_str(r.stop_reason),
            cycles: r.cycles,
            starting_trace: r.starting_trace,
            starting_rel_offnorm: r.starting_rel_offnorm,
            final_trace: r.final_trace,
            final_rel_offnorm: r.final_rel_offnorm,
            degenerate_skips: r.degenerate_skips,
            eta: r.eta,
            stationarity: stationarity_check(r),
            microiteration_histogram: r.summaries.iter().map(|s| s.histogram.clone()).collect(),
            per_cycle: r.summaries.iter().map(cycle_json).collect(),
            diagnostic: r.diagnostic(),
        }
    }
}

fn cycle_json(s: &CycleSummary) -> CycleJson {
    CycleJson {
        cycle: s.cycle,
        trace: s.trace,
        rel_offnorm: s.rel_offnorm,
        applied: s.applied,
        degenerate: s.degenerate,
    }
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_csv(records: &[TraceRecord], path: &Path) -> Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_telemetry(records, BufWriter::new(f))
}

#[derive(Serialize)]
struct RunReport<'a> {
    source: &'a SourceArgs,
    solver: &'a SolverArgs,
    #[serde(flatten)]
    summary: Summary,
}

/// Writes `<out>.csv` and `<out>.json`; returns the process exit code.
pub fn cmd_run(source: &SourceArgs, solver: &SolverArgs, out: &Path) -> Result<i32> {
    let a = source.load()?;
    let r = solver.solve(&a, solver.init)?;
    write_csv(&r.records, &with_suffix(out, ".csv"))?;
    let report = RunReport {
        source,
        solver,
        summary: Summary::from_result(&r),
    };
    write_json(&report, &with_suffix(out, ".json"))?;
    Ok(exit_code(&r))
}

#[derive(Debug, Serialize)]
pub struct InitOutcome {
    pub starting_trace: f64,
    pub starting_rel_offnorm: f64,
    pub final_trace: f64,
    pub final_rel_offnorm: f64,
    pub cycles: usize,
    pub stop_reason: &'static str,
    pub diagnostic: Option<String>,
}

impl InitOutcome {
    fn from_result(r: &DecompositionResult) -> Self {
        Self {
            starting_trace: r.starting_trace,
            starting_rel_offnorm: r.starting_rel_offnorm,
            final_trace: r.final_trace,
            final_rel_offnorm: r.final_rel_offnorm,
            cycles: r.cycles,
            stop_reason: stop_reason_str(r.stop_reason),
            diagnostic: r.diagnostic(),
        }
    }
}

#[derive(Serialize)]
struct CompareReport<'a> {
    source: &'a SourceArgs,
    solver: &'a SolverArgs,
    identity: InitOutcome,
    hosvd: InitOutcome,
}

/// Writes `<out>.identity.csv`, `<out>.hosvd.csv` and `<out>.compare.json`.
pub fn cmd_compare_init(source: &SourceArgs, solver: &SolverArgs, out: &Path) -> Result<i32> {
    let a = source.load()?;
    let ident = solver.solve(&a, InitArg::Identity)?;
    let hosvd = solver.solve(&a, InitArg::Hosvd)?;
    write_csv(&ident.records, &with_suffix(out, ".identity.csv"))?;
    write_csv(&hosvd.records, &with_suffix(out, ".hosvd.csv"))?;
    let report = CompareReport {
        source,
        solver,
        identity: InitOutcome::from_result(&ident),
        hosvd: InitOutcome::from_result(&hosvd),
    };
    write_json(&report, &with_suffix(out, ".compare.json"))?;
    Ok(exit_code(&ident).max(exit_code(&hosvd)))
}

fn exit_code(r: &DecompositionResult) -> i32 {
    if let Some(msg) = r.diagnostic() {
        eprintln!("tracemax: {msg}");
        EXIT_DEGENERATE
    } else {
        0
    }
}
