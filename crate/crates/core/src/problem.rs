//! Problem data for the implicit complementarity problem `ICP(A, b, f)`:
//! find `r` with
//!
//! ```text
//! H(r) = r - f(r) >= 0,   F(r) = A r + b >= 0,   H(r)_i F(r)_i = 0 for all i.
//! ```
//!
//! When `f` is identically zero the problem is the linear complementarity
//! problem `LCP(A, b)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{IcpError, Result};
use crate::linalg::{mat_vec, Matrix, Vector};

/// Evaluation contract for user-supplied implicit maps.
///
/// Implementations must be deterministic and reentrant, and must return a
/// vector of the same length as the input. Non-finite output is reported as
/// an error by the evaluating operation.
pub trait Mapping: Send + Sync {
    fn name(&self) -> &str;
    fn eval(&self, r: &[f64]) -> Vec<f64>;
}

/// The map `f: ℝⁿ → ℝⁿ` of the problem.
#[derive(Clone)]
pub enum ImplicitMap {
    /// `f(r) = 0`; the problem reduces to an LCP.
    Zero,
    /// `f(r) = C r + d`.
    Affine { c: Matrix, d: Vector },
    /// Any other map honoring the [`Mapping`] contract. The brute-force
    /// oracle and the file format do not support this variant.
    Custom(Arc<dyn Mapping>),
}

impl ImplicitMap {
    pub fn affine(c: Matrix, d: Vector) -> Result<Self> {
        if c.dim() != d.len() {
            return Err(IcpError::DimensionMismatch {
                expected: c.dim(),
                found: d.len(),
            });
        }
        Ok(ImplicitMap::Affine { c, d })
    }

    pub fn custom(map: impl Mapping + 'static) -> Self {
        ImplicitMap::Custom(Arc::new(map))
    }

    /// Dimension fixed by the map itself, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            ImplicitMap::Affine { c, .. } => Some(c.dim()),
            _ => None,
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, ImplicitMap::Zero | ImplicitMap::Affine { .. })
    }

    /// `(C, d)` with `C = 0, d = 0` for the zero map; `None` for custom maps.
    pub fn affine_parts(&self, n: usize) -> Option<(Matrix, Vector)> {
        match self {
            ImplicitMap::Zero => Some((Matrix::zeros(n), Vector::zeros(n))),
            ImplicitMap::Affine { c, d } => Some((c.clone(), d.clone())),
            ImplicitMap::Custom(_) => None,
        }
    }

    pub fn eval(&self, r: &Vector) -> Result<Vector> {
        match self {
            ImplicitMap::Zero => Ok(Vector::zeros(r.len())),
            ImplicitMap::Affine { c, d } => mat_vec(c, r)?.add(d),
            ImplicitMap::Custom(map) => {
                let out = map.eval(r);
                if out.len() != r.len() {
                    return Err(IcpError::DimensionMismatch {
                        expected: r.len(),
                        found: out.len(),
                    });
                }
                Vector::new(out)
            }
        }
    }
}

impl fmt::Debug for ImplicitMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImplicitMap::Zero => write!(f, "Zero"),
            ImplicitMap::Affine { c, d } => f.debug_struct("Affine").field("c", c).field("d", d).finish(),
            ImplicitMap::Custom(map) => write!(f, "Custom({})", map.name()),
        }
    }
}

/// The triple `(A, b, f)` with matching dimensions.
#[derive(Debug, Clone)]
pub struct IcpInstance {
    a: Matrix,
    b: Vector,
    f: ImplicitMap,
}

impl IcpInstance {
    pub fn new(a: Matrix, b: Vector, f: ImplicitMap) -> Result<Self> {
        let n = a.dim();
        if b.len() != n {
            return Err(IcpError::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        if let Some(m) = f.dim() {
            if m != n {
                return Err(IcpError::DimensionMismatch { expected: n, found: m });
            }
        }
        Ok(IcpInstance { a, b, f })
    }

    /// `LCP(A, b)`, i.e. `f = 0`.
    pub fn lcp(a: Matrix, b: Vector) -> Result<Self> {
        IcpInstance::new(a, b, ImplicitMap::Zero)
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    pub fn f(&self) -> &ImplicitMap {
        &self.f
    }

    fn check(&self, r: &Vector) -> Result<()> {
        if r.len() == self.dim() {
            Ok(())
        } else {
            Err(IcpError::DimensionMismatch {
                expected: self.dim(),
                found: r.len(),
            })
        }
    }

    /// `H(r) = r - f(r)`.
    pub fn evaluate_h(&self, r: &Vector) -> Result<Vector> {
        self.check(r)?;
        match &self.f {
            // Exactly r, not r - 0 (which would turn -0.0 into +0.0).
            ImplicitMap::Zero => Ok(r.clone()),
            f => r.sub(&f.eval(r)?),
        }
    }

    /// `F(r) = A r + b`.
    pub fn evaluate_f(&self, r: &Vector) -> Result<Vector> {
        self.check(r)?;
        mat_vec(&self.a, r)?.add(&self.b)
    }

    /// `(H(r), F(r))`, each evaluated once.
    pub fn evaluate_hf(&self, r: &Vector) -> Result<(Vector, Vector)> {
        Ok((self.evaluate_h(r)?, self.evaluate_f(r)?))
    }

    /// Checks the complementarity system componentwise; see
    /// [`SolutionCheck`].
    pub fn is_solution(&self, r: &Vector, tol: &ToleranceConfig) -> Result<SolutionCheck> {
        let (h, f) = self.evaluate_hf(r)?;
        Ok(SolutionCheck::from_components(&h, &f, tol))
    }
}

/// Numerical slack for the solution predicate and residual thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Allowed negativity of `H_i` and `F_i`.
    pub feas_tol: f64,
    /// Allowed magnitude of each product `H_i F_i`.
    pub comp_tol: f64,
    /// Threshold on residual ∞-norms.
    pub resid_tol: f64,
}

impl ToleranceConfig {
    pub fn new(feas_tol: f64, comp_tol: f64, resid_tol: f64) -> Result<Self> {
        for (name, value) in [("feas_tol", feas_tol), ("comp_tol", comp_tol), ("resid_tol", resid_tol)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(IcpError::InvalidTolerance { name, value });
            }
        }
        Ok(ToleranceConfig {
            feas_tol,
            comp_tol,
            resid_tol,
        })
    }

    /// Same value for all three.
    pub fn uniform(tol: f64) -> Result<Self> {
        ToleranceConfig::new(tol, tol, tol)
    }

    pub fn exact() -> Self {
        ToleranceConfig {
            feas_tol: 0.0,
            comp_tol: 0.0,
            resid_tol: 0.0,
        }
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            feas_tol: 1e-10,
            comp_tol: 1e-10,
            resid_tol: 1e-10,
        }
    }
}

/// A worst-case value and where it occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub index: usize,
    pub value: f64,
}

/// Outcome of [`IcpInstance::is_solution`].
///
/// `r` is accepted iff `H_i ≥ -feas_tol`, `F_i ≥ -feas_tol` and
/// `|H_i F_i| ≤ comp_tol` for every `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionCheck {
    pub satisfied: bool,
    /// Smallest `H_i`.
    pub min_h: Violation,
    /// Smallest `F_i`.
    pub min_f: Violation,
    /// Largest `|H_i F_i|`.
    pub max_product: Violation,
}

impl SolutionCheck {
    pub fn from_components(h: &[f64], f: &[f64], tol: &ToleranceConfig) -> Self {
        debug_assert_eq!(h.len(), f.len());
        let first = Violation { index: 0, value: h[0] };
        let mut min_h = first;
        let mut min_f = Violation { index: 0, value: f[0] };
        let mut max_product = Violation {
            index: 0,
            value: (h[0] * f[0]).abs(),
        };
        for i in 1..h.len() {
            if h[i] < min_h.value {
                min_h = Violation { index: i, value: h[i] };
            }
            if f[i] < min_f.value {
                min_f = Violation { index: i, value: f[i] };
            }
            let p = (h[i] * f[i]).abs();
            if p > max_product.value {
                max_product = Violation { index: i, value: p };
            }
        }
        let satisfied =
            min_h.value >= -tol.feas_tol && min_f.value >= -tol.feas_tol && max_product.value <= tol.comp_tol;
        SolutionCheck {
            satisfied,
            min_h,
            min_f,
            max_product,
        }
    }

    pub fn is_solution(&self) -> bool {
        self.satisfied
    }
}
