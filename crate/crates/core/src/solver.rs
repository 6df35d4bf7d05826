//! Projection fixed-point iteration.
//!
//! A point solves the problem iff `H(r) = (H(r) - F(r))₊`. Writing
//! `H(r) = r - f(r)`, inserting a step `ω Ω` in front of `F` and reading the
//! equation as a fixed point for `r` gives the update
//!
//! ```text
//! r  <-  f(r) + (r - f(r) - ω Ω (A r + b))₊
//! ```
//!
//! which for `f = 0` is the classical projected iteration
//! `r <- (r - ω Ω (A r + b))₊`. Componentwise the update is
//! `max(f_i(r), r_i - ω ω_i F_i(r))`, so when both affine maps are
//! ∞-norm contractions (e.g. `‖C‖∞ < 1` and Jacobi scaling of a strictly
//! diagonally dominant `A`) the iteration converges globally.

use std::cmp::Ordering;

use crate::error::{IcpError, Result};
use crate::linalg::{inf_norm, positive_part, DiagonalScaling, Vector};
use crate::problem::IcpInstance;
use crate::residuals::natural_residual;

/// Iterates with `‖r‖∞` above this are reported as diverged.
pub const DIVERGENCE_BOUND: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    omega: DiagonalScaling,
    relaxation: f64,
    max_iters: usize,
    resid_tol: f64,
}

impl SolverConfig {
    /// `relaxation ∈ (0, 2]`, `max_iters ≥ 1`, `resid_tol > 0`.
    pub fn new(omega: DiagonalScaling, relaxation: f64, max_iters: usize, resid_tol: f64) -> Result<Self> {
        if !(relaxation > 0.0 && relaxation <= 2.0) {
            return Err(IcpError::InvalidSolverConfig(format!(
                "relaxation {relaxation} outside (0, 2]"
            )));
        }
        if max_iters == 0 {
            return Err(IcpError::InvalidSolverConfig("max_iters must be at least 1".into()));
        }
        if !(resid_tol > 0.0 && resid_tol.is_finite()) {
            return Err(IcpError::InvalidSolverConfig(format!(
                "resid_tol {resid_tol} must be positive"
            )));
        }
        Ok(SolverConfig {
            omega,
            relaxation,
            max_iters,
            resid_tol,
        })
    }

    /// `Ω = diag(1/A_ii)` when every `A_ii > 0`, identity otherwise;
    /// relaxation 1, 10 000 iterations, tolerance `1e-10`.
    pub fn for_instance(inst: &IcpInstance) -> Self {
        SolverConfig {
            omega: default_omega(inst),
            relaxation: 1.0,
            max_iters: 10_000,
            resid_tol: 1e-10,
        }
    }

    pub fn with_relaxation(self, relaxation: f64) -> Result<Self> {
        SolverConfig::new(self.omega, relaxation, self.max_iters, self.resid_tol)
    }

    pub fn with_max_iters(self, max_iters: usize) -> Result<Self> {
        SolverConfig::new(self.omega, self.relaxation, max_iters, self.resid_tol)
    }

    pub fn with_resid_tol(self, resid_tol: f64) -> Result<Self> {
        SolverConfig::new(self.omega, self.relaxation, self.max_iters, resid_tol)
    }

    pub fn with_omega(self, omega: DiagonalScaling) -> Result<Self> {
        SolverConfig::new(omega, self.relaxation, self.max_iters, self.resid_tol)
    }

    pub fn omega(&self) -> &DiagonalScaling {
        &self.omega
    }

    pub fn relaxation(&self) -> f64 {
        self.relaxation
    }

    pub fn max_iters(&self) -> usize {
        self.max_iters
    }

    pub fn resid_tol(&self) -> f64 {
        self.resid_tol
    }
}

/// Jacobi scaling `diag(1/A_ii)` if the diagonal of `A` is positive.
pub fn default_omega(inst: &IcpInstance) -> DiagonalScaling {
    let diag = inst.a().diagonal();
    if diag.iter().all(|&d| d > 0.0) {
        if let Ok(omega) = DiagonalScaling::new(diag.iter().map(|d| 1.0 / d).collect()) {
            return omega;
        }
    }
    DiagonalScaling::identity(inst.dim())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxItersReached,
    Diverged,
}

/// Trace of one run.
///
/// `residual_history[k]` is `‖R(r^k)‖∞`, so the history has
/// `iterations + 1` entries. A non-finite iterate is recorded as an
/// infinite residual, and `final_point` is then the last finite iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub final_point: Vector,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().expect("history is never empty")
    }

    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

fn step(inst: &IcpInstance, r: &Vector, cfg: &SolverConfig) -> Result<Vector> {
    let fr = inst.f().eval(r)?;
    let h = r.sub(&fr)?;
    let scaled = cfg.omega.apply(&inst.evaluate_f(r)?)?;
    let inner: Vec<f64> = h
        .iter()
        .zip(scaled.iter())
        .map(|(hi, si)| hi - cfg.relaxation * si)
        .collect();
    fr.add(&positive_part(&Vector::from_raw(inner)))
}

fn residual_inf(inst: &IcpInstance, r: &Vector) -> Result<f64> {
    let norm = inf_norm(&natural_residual(inst, r)?);
    Ok(if norm.is_nan() { f64::INFINITY } else { norm })
}

/// Runs the projection iteration from `r0`.
///
/// The stopping test precedes each update, so a starting point that already
/// meets `resid_tol` returns with zero iterations.
pub fn projection_iterate(inst: &IcpInstance, r0: &Vector, cfg: &SolverConfig) -> Result<SolveReport> {
    let n = inst.dim();
    for found in [r0.len(), cfg.omega.dim()] {
        if found != n {
            return Err(IcpError::DimensionMismatch { expected: n, found });
        }
    }

    let mut r = r0.clone();
    let mut history = Vec::new();
    let mut k = 0;
    loop {
        let res = residual_inf(inst, &r)?;
        history.push(res);
        if res <= cfg.resid_tol {
            return Ok(report(SolveStatus::Converged, k, history, r));
        }
        if k == cfg.max_iters {
            return Ok(report(SolveStatus::MaxItersReached, k, history, r));
        }
        k += 1;
        let next = match step(inst, &r, cfg) {
            Ok(next) if next.is_finite() => next,
            Ok(_) | Err(IcpError::NonFinite { .. }) => {
                history.push(f64::INFINITY);
                return Ok(report(SolveStatus::Diverged, k, history, r));
            }
            Err(e) => return Err(e),
        };
        if next.inf_norm() > DIVERGENCE_BOUND {
            history.push(residual_inf(inst, &next)?);
            return Ok(report(SolveStatus::Diverged, k, history, next));
        }
        r = next;
    }
}

fn report(status: SolveStatus, iterations: usize, residual_history: Vec<f64>, final_point: Vector) -> SolveReport {
    debug_assert_eq!(residual_history.len(), iterations + 1);
    SolveReport {
        status,
        iterations,
        residual_history,
        final_point,
    }
}

/// Runs [`projection_iterate`] from every start and returns the report with
/// the smallest final residual; ties go to fewer iterations, then to the
/// earlier start.
pub fn solve_with_restarts(inst: &IcpInstance, cfg: &SolverConfig, starts: &[Vector]) -> Result<SolveReport> {
    let mut best: Option<SolveReport> = None;
    for start in starts {
        let rep = projection_iterate(inst, start, cfg)?;
        let better = match &best {
            None => true,
            Some(b) => match rep.final_residual().total_cmp(&b.final_residual()) {
                Ordering::Less => true,
                Ordering::Equal => rep.iterations < b.iterations,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some(rep);
        }
    }
    best.ok_or(IcpError::NoStarts)
}
