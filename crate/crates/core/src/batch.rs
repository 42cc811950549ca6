//! Independent solver runs over an ensemble of tensors.

use crate::error::Result;
use crate::par::{self, Execution};
use crate::solver::{run, run_sym, DecompositionResult, SolverConfig, SymVariant};
use crate::tensor::DenseTensor;

pub fn run_als_batch(
    tensors: &[DenseTensor],
    cfg: &SolverConfig,
    exec: Execution,
) -> Vec<Result<DecompositionResult>> {
    par::map(exec, tensors, |a| run(a, cfg))
}

pub fn run_sym_batch(
    tensors: &[DenseTensor],
    cfg: &SolverConfig,
    variant: SymVariant,
    exec: Execution,
) -> Vec<Result<DecompositionResult>> {
    par::map(exec, tensors, |a| run_sym(a, cfg, variant))
}

/// Runs every configuration in `cfgs` on every tensor; output is indexed
/// `[tensor][config]`.
pub fn run_als_sweep(
    tensors: &[DenseTensor],
    cfgs: &[SolverConfig],
    exec: Execution,
) -> Vec<Vec<Result<DecompositionResult>>> {
    let jobs: Vec<(usize, usize)> = (0..tensors.len())
        .flat_map(|t| (0..cfgs.len()).map(move |c| (t, c)))
        .collect();
    let mut flat = par::map(exec, &jobs, |&(t, c)| run(&tensors[t], &cfgs[c])).into_iter();
    (0..tensors.len())
        .map(|_| flat.by_ref().take(cfgs.len()).collect())
        .collect()
}
