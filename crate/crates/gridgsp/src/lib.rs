//! Learn a sparse, complex-valued, Hermitian graph Laplacian from a dataset
//! of complex state vectors, then interpolate missing entries of new state
//! vectors by solving a Hermitian positive-definite system with conjugate
//! gradient.
//!
//! Pipeline: center the observations, form the empirical covariance, recover
//! each column of a sparse precision matrix with a per-column linear program,
//! symmetrize, interpret the result as a Hermitian graph Laplacian, and solve
//! `(BᵀB + μL) x* = Bᵀy` for any sampling pattern `B` and observation `y`.

pub mod clime;
pub mod config;
pub mod data;
pub mod error;
pub mod eval;
pub mod interpolate;
pub mod laplacian;
pub mod linalg;
pub mod lp;
pub mod pipeline;
pub mod tol;

pub use clime::{
    build_column_lp, column_residual_inf_norm, estimate_precision, solve_column, symmetrize, ClimeConfig,
    ColumnLpProblem, PrecisionEstimate,
};
pub use data::{
    load_csv, parse_csv_bytes, random_hermitian_laplacian, sample_gmrf, save_csv, split, DataSource, Dataset,
    GroundTruthModel,
};
pub use error::{Error, Result};
pub use eval::{
    mse_complex, mse_decomposed, run_covariance_sweep, run_split_ablation, run_sweep, run_sweep_with_options,
    ExperimentReport, MseStat, ReportRow, SweepKind, SweepSpec,
};
pub use interpolate::{
    apply_sampling, interpolate, objective_value, InterpolateConfig, InterpolationResult, SamplingPattern,
};
pub use laplacian::{
    adjacency_and_degree, default_pd_floor, ensure_pd, spectral_summary, AdjacencyView, HermitianLaplacian,
    SpectralSummary,
};
pub use linalg::{
    center_columns, empirical_covariance, hermitian_quadratic_form, ComplexDenseMatrix, ComplexVector,
    CovarianceMatrix, HermitianOperator, Normalizer,
};
pub use lp::{solve_lp, LpAlgorithm, LpSolution, LpStatus, SolverSettings, SparseRealMatrix, StandardFormLp, VarBound};
pub use pipeline::{learn_laplacian, LearnOutcome, LearnSettings};
pub use tol::Tolerances;
