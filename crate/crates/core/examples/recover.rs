//! Recovers the diagonal of a rotated diagonal tensor.

use tracemax::tensor::{gen_orth_diagonalizable, DiagRange};
use tracemax::{run, Eta, SolverConfig};

fn main() -> tracemax::Result<()> {
    let (a, diag) = gen_orth_diagonalizable(3, 12, 7, DiagRange::UNIT)?;
    let cfg = SolverConfig {
        eta: Eta::PerDim(1000.0),
        ..SolverConfig::default()
    };
    let r = run(&a, &cfg)?;
    println!(
        "{:?} after {} cycles: trace {:.6} -> {:.6} (diagonal sum {:.6}), off-norm {:.2e}",
        r.stop_reason,
        r.cycles,
        r.starting_trace,
        r.final_trace,
        diag.iter().sum::<f64>(),
        r.final_rel_offnorm
    );
    Ok(())
}
