//! Brute-force solution enumeration for problems with affine `f`.
//!
//! At a solution every component has `H_i = 0` or `F_i = 0`. For
//! `f(r) = C r + d` both conditions are linear, so each index set `S`
//! (components with `H_i = 0`) determines an `n×n` linear system
//!
//! ```text
//! ((I - C) r)_i = d_i    for i in S
//! (A r)_i       = -b_i   for i not in S
//! ```
//!
//! whose solution is kept when it is feasible. Trying all `2ⁿ` sets finds
//! every solution that is isolated within its piece.

use rayon::prelude::*;

use crate::error::{IcpError, Result};
use crate::linalg::{solve_linear, Matrix, Vector};
use crate::problem::{IcpInstance, SolutionCheck, ToleranceConfig};

/// Largest dimension the oracle accepts (65 536 linear solves).
pub const N_MAX: usize = 16;
/// Feasibility and complementarity slack for accepted candidates.
pub const ACCEPT_TOL: f64 = 1e-9;
/// Candidates closer than this (∞-norm) are the same solution.
pub const DEDUP_RADIUS: f64 = 1e-8;

/// Every distinct solution found, in order of first discovery (index sets
/// are visited with `S` encoded as a bit mask, bit `i` set meaning
/// `H_i = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub solutions: Vec<Vector>,
    /// Per solution: some component has both `|H_i|` and `|F_i|` within
    /// [`ACCEPT_TOL`] of zero, so several index sets lead to it.
    pub degenerate: Vec<bool>,
    /// Index sets whose linear system was singular and skipped.
    pub singular_subsystems: usize,
    /// Index sets examined, `2ⁿ`.
    pub index_sets: usize,
}

impl OracleResult {
    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    /// Whether `r` lies within [`DEDUP_RADIUS`] of a listed solution.
    pub fn contains(&self, r: &Vector) -> bool {
        self.solutions
            .iter()
            .any(|s| s.distance_inf(r).map(|d| d <= DEDUP_RADIUS).unwrap_or(false))
    }
}

enum Candidate {
    Singular,
    Rejected,
    Accepted { point: Vector, tight: bool },
}

fn accept_tol() -> ToleranceConfig {
    ToleranceConfig {
        feas_tol: ACCEPT_TOL,
        comp_tol: ACCEPT_TOL,
        resid_tol: ACCEPT_TOL,
    }
}

fn solve_index_set(inst: &IcpInstance, c: &Matrix, d: &Vector, mask: usize) -> Result<Candidate> {
    let n = inst.dim();
    let (a, b) = (inst.a(), inst.b());
    let mut rows = Vec::with_capacity(n * n);
    let mut rhs = Vec::with_capacity(n);
    for i in 0..n {
        if mask & (1 << i) != 0 {
            rows.extend((0..n).map(|j| if i == j { 1.0 - c.get(i, j) } else { -c.get(i, j) }));
            rhs.push(d[i]);
        } else {
            rows.extend_from_slice(a.row(i));
            rhs.push(-b[i]);
        }
    }
    let system = Matrix::from_raw(n, rows);
    let point = match solve_linear(&system, &Vector::from_raw(rhs)) {
        Ok(x) if x.is_finite() => x,
        Ok(_) | Err(IcpError::Singular { .. }) => return Ok(Candidate::Singular),
        Err(e) => return Err(e),
    };
    let (h, f) = inst.evaluate_hf(&point)?;
    if !SolutionCheck::from_components(&h, &f, &accept_tol()).is_solution() {
        return Ok(Candidate::Rejected);
    }
    let tight = h
        .iter()
        .zip(f.iter())
        .any(|(hi, fi)| hi.abs() <= ACCEPT_TOL && fi.abs() <= ACCEPT_TOL);
    Ok(Candidate::Accepted { point, tight })
}

/// Enumerates all `2ⁿ` complementary index sets.
///
/// Requires a zero or affine `f` and `n ≤ min(n_max, N_MAX)`. Index sets are
/// solved in parallel and merged in mask order, so the result does not
/// depend on scheduling.
pub fn enumerate_solutions(inst: &IcpInstance, n_max: usize) -> Result<OracleResult> {
    let n = inst.dim();
    let cap = n_max.min(N_MAX);
    if n > cap {
        return Err(IcpError::OracleTooLarge { n, n_max: cap });
    }
    let (c, d) = inst.f().affine_parts(n).ok_or(IcpError::NonAffineMap)?;

    let index_sets = 1usize << n;
    let candidates = (0..index_sets)
        .into_par_iter()
        .map(|mask| solve_index_set(inst, &c, &d, mask))
        .collect::<Result<Vec<_>>>()?;

    let mut out = OracleResult {
        solutions: Vec::new(),
        degenerate: Vec::new(),
        singular_subsystems: 0,
        index_sets,
    };
    for cand in candidates {
        match cand {
            Candidate::Singular => out.singular_subsystems += 1,
            Candidate::Rejected => {}
            Candidate::Accepted { point, tight } => {
                let seen = out
                    .solutions
                    .iter()
                    .position(|s| s.distance_inf(&point).map(|dist| dist < DEDUP_RADIUS).unwrap_or(false));
                match seen {
                    Some(k) => out.degenerate[k] = true,
                    None => {
                        out.solutions.push(point);
                        out.degenerate.push(tight);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Whether `r` is within [`DEDUP_RADIUS`] of an enumerated solution.
pub fn certify(inst: &IcpInstance, r: &Vector) -> Result<bool> {
    if r.len() != inst.dim() {
        return Err(IcpError::DimensionMismatch {
            expected: inst.dim(),
            found: r.len(),
        });
    }
    Ok(enumerate_solutions(inst, N_MAX)?.contains(r))
}
