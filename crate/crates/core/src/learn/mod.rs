//! Feature standardization, kernels, the binary SVM dual solver, the
//! one-vs-one multiclass wrapper and grid model selection.

mod kernel;
mod multiclass;
mod select;
mod smo;
mod standardize;

pub use kernel::{kernel, kernel_matrix, KernelKind, KernelSpec};
pub use multiclass::{
    predict_standardized, train_one_vs_one, vote, Hyperparams, PairMachine, Prediction, SvmModel,
};
pub use select::{model_select, stratified_halves, ModelGrid, Selection};
pub use smo::{solve_dual, train_binary, BinarySvm, DualSolution, SolveStats, DEFAULT_TOL};
pub use standardize::{Standardizer, STD_FLOOR};
