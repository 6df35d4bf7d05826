//! Residual equations, a solver and test tooling for the implicit complementarity problem.
//!
//! Given `A ∈ ℝⁿˣⁿ`, `b ∈ ℝⁿ` and a map `f: ℝⁿ → ℝⁿ`, the implicit
//! complementarity problem `ICP(A, b, f)` asks for `r` with
//!
//! ```text
//! H(r) = r - f(r) >= 0,   F(r) = A r + b >= 0,   H(r)ᵀ F(r) = 0.
//! ```
//!
//! The crate provides the problem data ([`IcpInstance`]), three residuals
//! whose zeros are exactly the solutions ([`natural_residual`],
//! [`scaled_residual`], [`delta_residual`]), a projection fixed-point solver,
//! a brute-force enumeration oracle for affine `f`, and a seeded generator
//! of instances with planted solutions.
//!
//! ```
//! use icpkit::{natural_residual, IcpInstance, ImplicitMap, Matrix, Vector};
//!
//! // f(r) = r / 2, A = [2], b = (-4): the solution is r* = 2.
//! let f = ImplicitMap::affine(Matrix::from_rows(&[[0.5]])?, Vector::new(vec![0.0])?)?;
//! let inst = IcpInstance::new(Matrix::from_rows(&[[2.0]])?, Vector::new(vec![-4.0])?, f)?;
//! let r = Vector::new(vec![2.0])?;
//! assert_eq!(natural_residual(&inst, &r)?.as_slice(), &[0.0]);
//! # Ok::<(), icpkit::IcpError>(())
//! ```

// NaN must fail every check, so comparisons are written as `!(x <= tol)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod generator;
pub mod linalg;
pub mod oracle;
pub mod problem;
pub mod residuals;
pub mod solver;

pub use error::{IcpError, Result};
pub use generator::{
    generate_matrix, generate_planted, GeneratorSpec, MapFamily, MatrixFamily, PlantedInstance, SeededStream,
};
pub use linalg::{inf_norm, mat_vec, positive_part, solve_linear, DiagonalScaling, Matrix, Vector};
pub use oracle::{certify, enumerate_solutions, OracleResult};
pub use problem::{IcpInstance, ImplicitMap, Mapping, SolutionCheck, ToleranceConfig, Violation};
pub use residuals::{
    delta_residual, natural_residual, natural_residual_literal, residual_norms, s_map, scaled_residual,
    scaled_residual_literal, DeltaFunction, ResidualNorms,
};
pub use solver::{projection_iterate, solve_with_restarts, SolveReport, SolveStatus, SolverConfig};
