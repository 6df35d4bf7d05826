//! Verification campaigns: evaluate every residual formulation at known
//! solutions and at perturbed points, and check that each one vanishes
//! exactly where the complementarity predicate holds.

use std::fmt;
use std::time::Instant;

use icpkit::oracle::{enumerate_solutions, N_MAX};
use icpkit::{
    delta_residual, inf_norm, natural_residual, projection_iterate, scaled_residual, DeltaFunction, DiagonalScaling,
    IcpError, IcpInstance, SeededStream, SolverConfig, ToleranceConfig, Vector,
};
use rayon::prelude::*;
use serde::Serialize;

/// Perturbation sizes applied along each unit direction.
pub const PERTURBATIONS: [f64; 3] = [1e-6, 1e-2, 0.5];
/// Range of the random positive scalings, sampled log-uniformly.
pub const SCALING_RANGE: (f64, f64) = (1e-3, 1e3);
/// At a solution, `‖G‖∞` may be this many times `resid_tol`.
pub const DELTA_ZERO_FACTOR: f64 = 1e3;

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub tol: ToleranceConfig,
    pub deltas: Vec<DeltaFunction>,
    /// Number of random `(Ω₁, Ω₂)` pairs per instance.
    pub scalings: usize,
    /// Run the oracle only up to this dimension.
    pub oracle_max_n: usize,
    /// Also run the projection solver from the origin.
    pub solve: bool,
    /// Seed for the scaling draws.
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tol: ToleranceConfig::default(),
            deltas: DeltaFunction::catalog().to_vec(),
            scalings: 3,
            oracle_max_n: 12,
            solve: false,
            seed: 0x1c9_7e57,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyInput {
    pub id: String,
    pub instance: IcpInstance,
    pub planted: Option<Vector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointSource {
    Oracle,
    Solver,
    Planted,
    Perturbed,
}

impl fmt::Display for PointSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointSource::Oracle => "oracle",
            PointSource::Solver => "solver",
            PointSource::Planted => "planted",
            PointSource::Perturbed => "perturbed",
        })
    }
}

/// One `(instance, formulation, point)` evaluation. Field order is the CSV
/// column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub instance_id: String,
    pub n: usize,
    pub formulation: String,
    pub point_source: PointSource,
    pub residual_inf: f64,
    pub is_solution: bool,
    pub iterations: Option<usize>,
    pub wall_ms: f64,
}

pub const CSV_HEADER: &str = "instance_id,n,formulation,point_source,residual_inf,is_solution,iterations,wall_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    /// Index into [`VerifyOutcome::rows`].
    pub row: usize,
    pub point: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOutcome {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<Failure>,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Point {
    source: PointSource,
    label: String,
    r: Vector,
    iterations: Option<usize>,
    /// Tolerance under which the point must be a solution, if it is one.
    expect: Option<ToleranceConfig>,
}

fn candidate_points(input: &VerifyInput, opts: &VerifyOptions) -> Result<Vec<Point>, IcpError> {
    let inst = &input.instance;
    let n = inst.dim();
    let mut points = Vec::new();
    if let Some(p) = &input.planted {
        points.push(Point {
            source: PointSource::Planted,
            label: "planted".into(),
            r: p.clone(),
            iterations: None,
            expect: Some(opts.tol),
        });
    }
    if inst.f().is_affine() && n <= opts.oracle_max_n.min(N_MAX) {
        for (k, s) in enumerate_solutions(inst, N_MAX)?.solutions.into_iter().enumerate() {
            points.push(Point {
                source: PointSource::Oracle,
                label: format!("oracle[{k}]"),
                r: s,
                iterations: None,
                expect: Some(opts.tol),
            });
        }
    }
    if opts.solve {
        let cfg = SolverConfig::for_instance(inst).with_resid_tol(opts.tol.resid_tol.max(f64::MIN_POSITIVE))?;
        let rep = projection_iterate(inst, &Vector::zeros(n), &cfg)?;
        let loose = 10.0 * opts.tol.resid_tol;
        points.push(Point {
            source: PointSource::Solver,
            label: format!("solver({:?})", rep.status),
            iterations: Some(rep.iterations),
            expect: rep
                .converged()
                .then(|| ToleranceConfig::new(loose, loose, opts.tol.resid_tol))
                .transpose()?,
            r: rep.final_point,
        });
    }
    let anchor = points.first().map(|p| p.r.clone());
    if let Some(anchor) = anchor {
        for eps in PERTURBATIONS {
            for j in 0..n {
                let mut r = anchor.to_vec();
                r[j] += eps;
                points.push(Point {
                    source: PointSource::Perturbed,
                    label: format!("perturbed(eps={eps}, j={j})"),
                    r: Vector::new(r)?,
                    iterations: None,
                    expect: None,
                });
            }
        }
    }
    Ok(points)
}

fn instance_seed(base: u64, index: usize) -> u64 {
    base ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Verifies one instance. `index` decorrelates the scaling draws between
/// instances of a campaign.
pub fn verify_instance(input: &VerifyInput, index: usize, opts: &VerifyOptions) -> Result<VerifyOutcome, IcpError> {
    let inst = &input.instance;
    let n = inst.dim();
    let tol = opts.tol;
    let mut stream = SeededStream::new(instance_seed(opts.seed, index));
    let scalings: Vec<(DiagonalScaling, DiagonalScaling)> = (0..opts.scalings)
        .map(|_| {
            let w1 = stream.log_uniform_scaling(n, SCALING_RANGE.0, SCALING_RANGE.1);
            let w2 = stream.log_uniform_scaling(n, SCALING_RANGE.0, SCALING_RANGE.1);
            (w1, w2)
        })
        .collect();

    let mut out = VerifyOutcome::default();
    for point in candidate_points(input, opts)? {
        let sol = inst.is_solution(&point.r, &point.expect.unwrap_or(tol))?.is_solution();
        let mut emit = |formulation: String, residual_inf: f64, wall: Instant, reasons: Vec<String>| {
            let row = out.rows.len();
            out.rows.push(ResultRow {
                instance_id: input.id.clone(),
                n,
                formulation,
                point_source: point.source,
                residual_inf,
                is_solution: sol,
                iterations: point.iterations,
                wall_ms: wall.elapsed().as_secs_f64() * 1e3,
            });
            for reason in reasons {
                out.failures.push(Failure {
                    row,
                    point: point.label.clone(),
                    reason,
                });
            }
        };

        let start = Instant::now();
        let norm = inf_norm(&natural_residual(inst, &point.r)?);
        let mut reasons = Vec::new();
        if point.expect.is_some() {
            if !sol {
                reasons.push("known solution fails the complementarity predicate".to_string());
            }
            if !(norm <= tol.resid_tol) {
                reasons.push(format!(
                    "natural residual {norm:e} exceeds {:e} at a solution",
                    tol.resid_tol
                ));
            }
        }
        if !sol && norm <= tol.comp_tol {
            reasons.push(format!("natural residual {norm:e} vanishes at a non-solution"));
        }
        emit("R".into(), norm, start, reasons);

        if !scalings.is_empty() {
            let start = Instant::now();
            let mut worst: f64 = 0.0;
            let mut reasons = Vec::new();
            for (k, (w1, w2)) in scalings.iter().enumerate() {
                let norm = inf_norm(&scaled_residual(inst, &point.r, w1, w2)?);
                worst = worst.max(norm);
                let upper = tol.resid_tol * w1.max().max(w2.max());
                let lower = tol.comp_tol * w1.min().min(w2.min());
                if point.expect.is_some() && !(norm <= upper) {
                    reasons.push(format!(
                        "scaled residual {norm:e} exceeds {upper:e} at a solution (scaling {k})"
                    ));
                }
                if !sol && norm <= lower {
                    reasons.push(format!(
                        "scaled residual {norm:e} vanishes at a non-solution (scaling {k})"
                    ));
                }
            }
            emit("Rbar".into(), worst, start, reasons);
        }

        for delta in &opts.deltas {
            let start = Instant::now();
            let g = delta_residual(inst, &point.r, delta)?;
            let norm = inf_norm(&g);
            let mut reasons = Vec::new();
            let zero_tol = DELTA_ZERO_FACTOR * tol.resid_tol;
            if point.expect.is_some() && !(norm <= zero_tol) {
                reasons.push(format!("delta residual {norm:e} exceeds {zero_tol:e} at a solution"));
            }
            if !sol && norm == 0.0 {
                reasons.push("delta residual vanishes at a non-solution".to_string());
            }
            emit(format!("G:{}", delta.name()), norm, start, reasons);
        }
    }
    Ok(out)
}

/// Verifies all inputs, in parallel, with rows in input order.
pub fn verify_all(inputs: &[VerifyInput], opts: &VerifyOptions) -> Result<VerifyOutcome, IcpError> {
    let parts = inputs
        .par_iter()
        .enumerate()
        .map(|(i, input)| verify_instance(input, i, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = VerifyOutcome::default();
    for part in parts {
        let offset = out.rows.len();
        out.failures.extend(part.failures.into_iter().map(|mut f| {
            f.row += offset;
            f
        }));
        out.rows.extend(part.rows);
    }
    Ok(out)
}
