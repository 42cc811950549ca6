pub mod batch;
pub mod error;
pub mod gradients;
pub mod hosvd;
pub mod linalg;
pub mod par;
pub mod solver;
pub mod tensor;

pub use error::{Error, Result};
pub use par::Execution;
pub use solver::{
    run, run_sym, stationarity_check, DecompositionResult, Eta, Init, SolverConfig, StopReason,
    SymVariant,
};
pub use tensor::DenseTensor;
