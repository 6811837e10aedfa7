//! Sparse steady-state solvers for Lindblad master equations.
//!
//! The crate builds vectorized Liouvillians from Hamiltonians and collapse
//! operators, reorders them for factorization, and finds the steady state by
//! direct LU, preconditioned Krylov iteration or shifted inverse power
//! iteration. A dense reference solver and a validation report are included
//! for checking results at small sizes.

pub mod bench;
pub mod error;
pub mod factor;
pub mod krylov;
pub mod liouvillian;
pub mod models;
pub mod ordering;
pub mod quantum;
pub mod sparse;
pub mod steady;

pub use bench::{read_results, run_bench, write_results, BenchRecord, Format, SweepSpec};
pub use error::{Error, Result};
pub use factor::{condest, ilutp, lu, lu_with, solve_lu, LUFactors, LuOptions};
pub use krylov::{bicgstab, gmres, IterOptions, IterResult};
pub use liouvillian::{build_liouvillian, LiouvillianSystem, Variant, WeightRule};
pub use models::{Model, ModelSpec, System};
pub use ordering::{band_profile, col_min_degree, rcm, weighted_mbm, BandProfile};
pub use quantum::{create, destroy, embed, number, spin_ops, QuantumOperator, SpinOps};
pub use sparse::{unvec, vec, Permutation, SparseComplexMatrix};
pub use steady::{
    dense_null_space, dense_oracle, inverse_power, reorder, solve, solve_direct, solve_iterative, validate,
    KrylovSolver, Method, Ordering, Reordered, SolverOptions, SteadyStateResult, ValidationOptions, ValidationReport,
};
