//! Equation reformulations of the complementarity system.
//!
//! Each residual below vanishes exactly at the solutions of `ICP(A, b, f)`:
//!
//! * [`natural_residual`]: `R(r) = H(r) - (H(r) - F(r))₊`, which is the
//!   componentwise `min(H_i, F_i)`.
//! * [`scaled_residual`]: `R̄(r) = Ω₁H(r) - (Ω₁H(r) - Ω₂F(r))₊` for positive
//!   diagonal `Ω₁, Ω₂`, i.e. `min(ω₁ᵢ H_i, ω₂ᵢ F_i)`.
//! * [`delta_residual`]: `G_i(r) = δ(|F_i - H_i|) - δ(F_i) - δ(H_i)` for a
//!   strictly increasing `δ` with `δ(0) = 0`.
//!
//! The sign of each `G_i` classifies the component: positive when `H_i < 0`
//! or `F_i < 0`, negative when both are positive, and zero exactly on the
//! complementary set `H_i ≥ 0, F_i ≥ 0, H_i F_i = 0`.

use std::fmt;

use crate::error::{IcpError, Result};
use crate::linalg::{inf_norm, positive_part, DiagonalScaling, Vector};
use crate::problem::IcpInstance;

/// Number of grid points used to validate monotonicity of a δ.
pub const DELTA_GRID_POINTS: usize = 1000;
/// Half-width of the validation grid `[-10, 10]`.
pub const DELTA_GRID_RADIUS: f64 = 10.0;

/// A strictly increasing `δ: ℝ → ℝ` with `δ(0) = 0`.
#[derive(Clone, Copy)]
pub struct DeltaFunction {
    name: &'static str,
    forward: fn(f64) -> f64,
}

fn cube(t: f64) -> f64 {
    t * t * t
}

impl DeltaFunction {
    /// Validates `δ(0) = 0` and strict increase on a 1000-point grid over
    /// `[-10, 10]`.
    pub fn new(name: &'static str, forward: fn(f64) -> f64) -> Result<Self> {
        let invalid = |reason: String| IcpError::InvalidDelta {
            name: name.to_string(),
            reason,
        };
        let at_zero = forward(0.0);
        if at_zero != 0.0 {
            return Err(invalid(format!("delta(0) = {at_zero}, expected 0")));
        }
        let step = 2.0 * DELTA_GRID_RADIUS / (DELTA_GRID_POINTS - 1) as f64;
        let mut prev = forward(-DELTA_GRID_RADIUS);
        for k in 1..DELTA_GRID_POINTS {
            let t = -DELTA_GRID_RADIUS + step * k as f64;
            let cur = forward(t);
            if !(cur > prev) {
                return Err(invalid(format!("not strictly increasing near t = {t}")));
            }
            prev = cur;
        }
        Ok(DeltaFunction { name, forward })
    }

    pub const fn identity() -> Self {
        DeltaFunction {
            name: "identity",
            forward: |t| t,
        }
    }

    pub const fn cubic() -> Self {
        DeltaFunction {
            name: "cubic",
            forward: cube,
        }
    }

    pub const fn tanh() -> Self {
        DeltaFunction {
            name: "tanh",
            forward: f64::tanh,
        }
    }

    pub const fn asinh() -> Self {
        DeltaFunction {
            name: "asinh",
            forward: f64::asinh,
        }
    }

    /// The shipped functions: linear, superlinear, bounded and sublinear
    /// growth.
    pub fn catalog() -> [DeltaFunction; 4] {
        [Self::identity(), Self::cubic(), Self::tanh(), Self::asinh()]
    }

    pub fn by_name(name: &str) -> Option<Self> {
        Self::catalog().into_iter().find(|d| d.name == name)
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.forward)(t)
    }

    /// `δ(|f - h|) - δ(f) - δ(h)` for one component.
    ///
    /// The subtraction is grouped as `(δ(hi - lo) - δ(hi)) - δ(lo)` with
    /// `hi = max(h, f)` and `lo = min(h, f)`. The first difference then has
    /// a definite sign (`≥ 0` when `lo < 0`, `≤ 0` when `lo > 0`), so the sign
    /// of the result survives rounding.
    pub fn component(&self, h: f64, f: f64) -> f64 {
        let (hi, lo) = if h >= f { (h, f) } else { (f, h) };
        let gap = self.eval((f - h).abs());
        (gap - self.eval(hi)) - self.eval(lo)
    }
}

impl fmt::Debug for DeltaFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DeltaFunction({})", self.name)
    }
}

impl PartialEq for DeltaFunction {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

fn check_scaling(n: usize, omega: &DiagonalScaling) -> Result<()> {
    if omega.dim() == n {
        Ok(())
    } else {
        Err(IcpError::DimensionMismatch {
            expected: n,
            found: omega.dim(),
        })
    }
}

/// `R(r)`, computed as the componentwise `min(H_i(r), F_i(r))`.
pub fn natural_residual(inst: &IcpInstance, r: &Vector) -> Result<Vector> {
    let (h, f) = inst.evaluate_hf(r)?;
    Ok(min_pair(&h, &f))
}

/// `R(r)` evaluated literally as `H - (H - F)₊`. Agrees with
/// [`natural_residual`] up to one rounding of `H - F`.
pub fn natural_residual_literal(inst: &IcpInstance, r: &Vector) -> Result<Vector> {
    let (h, f) = inst.evaluate_hf(r)?;
    h.sub(&positive_part(&h.sub(&f)?))
}

/// `S(r) = H(r) - R(r) = (H(r) - F(r))₊`. A point solves the problem iff
/// `S(r) = H(r)`.
pub fn s_map(inst: &IcpInstance, r: &Vector) -> Result<Vector> {
    let (h, f) = inst.evaluate_hf(r)?;
    Ok(positive_part(&h.sub(&f)?))
}

/// `R̄(r)`, computed as the componentwise `min(ω₁ᵢ H_i(r), ω₂ᵢ F_i(r))`.
pub fn scaled_residual(
    inst: &IcpInstance,
    r: &Vector,
    omega1: &DiagonalScaling,
    omega2: &DiagonalScaling,
) -> Result<Vector> {
    check_scaling(inst.dim(), omega1)?;
    check_scaling(inst.dim(), omega2)?;
    let (h, f) = inst.evaluate_hf(r)?;
    Ok(min_pair(&omega1.apply(&h)?, &omega2.apply(&f)?))
}

/// `R̄(r)` evaluated literally as `Ω₁H - (Ω₁H - Ω₂F)₊`.
pub fn scaled_residual_literal(
    inst: &IcpInstance,
    r: &Vector,
    omega1: &DiagonalScaling,
    omega2: &DiagonalScaling,
) -> Result<Vector> {
    check_scaling(inst.dim(), omega1)?;
    check_scaling(inst.dim(), omega2)?;
    let (h, f) = inst.evaluate_hf(r)?;
    let sh = omega1.apply(&h)?;
    let sf = omega2.apply(&f)?;
    sh.sub(&positive_part(&sh.sub(&sf)?))
}

/// `G(r)` with `G_i = δ(|F_i - H_i|) - δ(F_i) - δ(H_i)`.
///
/// `H` and `F` are evaluated once, so all three δ calls of a component see
/// the same arguments. Overflowing δ values (e.g. a cubic at huge
/// arguments) propagate as non-finite entries.
pub fn delta_residual(inst: &IcpInstance, r: &Vector, delta: &DeltaFunction) -> Result<Vector> {
    let (h, f) = inst.evaluate_hf(r)?;
    Ok(Vector::from_raw(
        h.iter()
            .zip(f.iter())
            .map(|(&hi, &fi)| delta.component(hi, fi))
            .collect(),
    ))
}

fn min_pair(a: &[f64], b: &[f64]) -> Vector {
    Vector::from_raw(a.iter().zip(b).map(|(x, y)| if x <= y { *x } else { *y }).collect())
}

/// ∞-norms of the three residuals at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualNorms {
    pub natural: f64,
    pub scaled: f64,
    pub delta: f64,
}

impl ResidualNorms {
    pub fn max(&self) -> f64 {
        self.natural.max(self.scaled).max(self.delta)
    }
}

pub fn residual_norms(
    inst: &IcpInstance,
    r: &Vector,
    omega1: &DiagonalScaling,
    omega2: &DiagonalScaling,
    delta: &DeltaFunction,
) -> Result<ResidualNorms> {
    Ok(ResidualNorms {
        natural: inf_norm(&natural_residual(inst, r)?),
        scaled: inf_norm(&scaled_residual(inst, r, omega1, omega2)?),
        delta: inf_norm(&delta_residual(inst, r, delta)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::problem::ImplicitMap;
    use proptest::prelude::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::new(xs.to_vec()).unwrap()
    }

    fn scaling(xs: &[f64]) -> DiagonalScaling {
        DiagonalScaling::new(xs.to_vec()).unwrap()
    }

    /// `A = [2], b = (-4), f(r) = r/2`. Enumerating the two complementary
    /// cases by hand: `F = 0` gives `r = 2, H = 1 ≥ 0` (accepted); `H = 0`
    /// gives `r = 0, F = -4 < 0` (rejected). So `r* = 2`.
    fn one_dim() -> IcpInstance {
        let f = ImplicitMap::affine(Matrix::from_rows(&[[0.5]]).unwrap(), v(&[0.0])).unwrap();
        IcpInstance::new(Matrix::from_rows(&[[2.0]]).unwrap(), v(&[-4.0]), f).unwrap()
    }

    /// LCP with `A = 0, b = (F0)` and `r = (H0)`, realizing any `(H, F)` pair
    /// in one dimension.
    fn realize(h: f64, f: f64) -> (IcpInstance, Vector) {
        (IcpInstance::lcp(Matrix::zeros(1), v(&[f])).unwrap(), v(&[h]))
    }

    #[test]
    fn natural_residual_examples() {
        let inst = one_dim();
        let star = v(&[2.0]);
        assert_eq!(inst.evaluate_h(&star).unwrap(), v(&[1.0]));
        assert_eq!(natural_residual(&inst, &star).unwrap(), v(&[0.0]));

        let zero = IcpInstance::lcp(Matrix::identity(1), v(&[0.0])).unwrap();
        assert_eq!(natural_residual(&zero, &v(&[0.0])).unwrap(), v(&[0.0]));

        let (inst, r) = realize(3.0, -1.0);
        assert_eq!(natural_residual(&inst, &r).unwrap(), v(&[-1.0]));
        assert_eq!(natural_residual_literal(&inst, &r).unwrap(), v(&[-1.0]));
    }

    #[test]
    fn s_map_examples() {
        let inst = one_dim();
        let star = v(&[2.0]);
        assert_eq!(s_map(&inst, &star).unwrap(), inst.evaluate_h(&star).unwrap());

        let (inst, r) = realize(2.5, 2.5);
        assert_eq!(s_map(&inst, &r).unwrap(), v(&[0.0]));

        let (inst, r) = realize(0.0, 4.0);
        assert_eq!(s_map(&inst, &r).unwrap(), v(&[0.0]));
    }

    #[test]
    fn s_map_differs_from_h_off_the_solution_set() {
        let inst = one_dim();
        let r = v(&[3.0]);
        assert_ne!(s_map(&inst, &r).unwrap(), inst.evaluate_h(&r).unwrap());
    }

    #[test]
    fn scaled_residual_examples() {
        let inst = one_dim();
        let out = scaled_residual(&inst, &v(&[2.0]), &scaling(&[2.0]), &scaling(&[3.0])).unwrap();
        assert_eq!(out, v(&[0.0]));

        let (inst, r) = realize(1.0, 1.0);
        let out = scaled_residual(&inst, &r, &scaling(&[5.0]), &scaling(&[1.0])).unwrap();
        assert_eq!(out, v(&[1.0]));

        let id = DiagonalScaling::identity(1);
        for x in [-3.0, 0.0, 1.5, 2.0, 7.0] {
            let r = v(&[x]);
            let inst = one_dim();
            assert_eq!(
                scaled_residual(&inst, &r, &id, &id).unwrap(),
                natural_residual(&inst, &r).unwrap()
            );
        }
    }

    #[test]
    fn scaled_residual_rejects_wrong_dimension() {
        let inst = one_dim();
        let err = scaled_residual(&inst, &v(&[1.0]), &scaling(&[1.0, 1.0]), &scaling(&[1.0])).unwrap_err();
        assert!(matches!(err, IcpError::DimensionMismatch { expected: 1, found: 2 }));
    }

    #[test]
    fn delta_residual_examples() {
        let id = DeltaFunction::identity();
        let (inst, r) = realize(1.0, 0.0);
        assert_eq!(delta_residual(&inst, &r, &id).unwrap(), v(&[0.0]));
        let (inst, r) = realize(1.0, 1.0);
        assert_eq!(delta_residual(&inst, &r, &id).unwrap(), v(&[-2.0]));
        let (inst, r) = realize(-1.0, 1.0);
        assert_eq!(delta_residual(&inst, &r, &id).unwrap(), v(&[2.0]));
    }

    #[test]
    fn residual_norms_at_zero_instance() {
        let zero = IcpInstance::lcp(Matrix::identity(2), v(&[0.0, 0.0])).unwrap();
        let id = DiagonalScaling::identity(2);
        for delta in DeltaFunction::catalog() {
            let norms = residual_norms(&zero, &v(&[0.0, 0.0]), &id, &id, &delta).unwrap();
            assert_eq!(norms.max(), 0.0);
        }
    }

    #[test]
    fn residual_norms_at_one_dim_solution_and_perturbation() {
        let inst = one_dim();
        let w1 = scaling(&[0.3]);
        let w2 = scaling(&[40.0]);
        for delta in DeltaFunction::catalog() {
            let at = residual_norms(&inst, &v(&[2.0]), &w1, &w2, &delta).unwrap();
            assert_eq!(at.max(), 0.0);
            let off = residual_norms(&inst, &v(&[3.0]), &w1, &w2, &delta).unwrap();
            assert!(off.natural > 0.0 && off.scaled > 0.0 && off.delta > 0.0);
        }
    }

    #[test]
    fn catalog_is_valid() {
        for delta in DeltaFunction::catalog() {
            let checked = DeltaFunction::new(delta.name, delta.forward).unwrap();
            assert_eq!(checked.eval(0.0), 0.0);
            assert_eq!(DeltaFunction::by_name(delta.name()), Some(delta));
        }
        assert!(DeltaFunction::by_name("exp").is_none());
    }

    #[test]
    fn rejects_invalid_delta() {
        assert!(matches!(
            DeltaFunction::new("shifted", |t| t + 1.0),
            Err(IcpError::InvalidDelta { .. })
        ));
        assert!(DeltaFunction::new("square", |t| t * t).is_err());
        assert!(DeltaFunction::new("flat", |t| t.clamp(-1.0, 1.0)).is_err());
    }

    fn region_strategy() -> impl Strategy<Value = f64> {
        prop_oneof![
            -1e3f64..1e3,
            -1e-6f64..1e-6,
            Just(0.0),
            (1e-9f64..1e-9 + 1e-12),
            (-1e-9f64 - 1e-12..-1e-9),
        ]
    }

    proptest! {
        #[test]
        fn min_identities_hold_exactly(h in -1e3f64..1e3, f in -1e3f64..1e3, w1 in 1e-3f64..1e3, w2 in 1e-3f64..1e3) {
            let (inst, r) = realize(h, f);
            prop_assert_eq!(natural_residual(&inst, &r).unwrap()[0], h.min(f));
            let lit = natural_residual_literal(&inst, &r).unwrap()[0];
            prop_assert!((lit - h.min(f)).abs() <= 4.0 * f64::EPSILON * h.abs().max(f.abs()));
            let out = scaled_residual(&inst, &r, &scaling(&[w1]), &scaling(&[w2])).unwrap()[0];
            prop_assert_eq!(out, (w1 * h).min(w2 * f));
        }

        #[test]
        fn delta_sign_trichotomy(h in region_strategy(), f in region_strategy()) {
            for delta in DeltaFunction::catalog() {
                let g = delta.component(h, f);
                if h < 0.0 || f < 0.0 {
                    prop_assert!(g > 0.0, "{:?} h={h} f={f} g={g}", delta);
                } else if h > 0.0 && f > 0.0 {
                    prop_assert!(g < 0.0, "{:?} h={h} f={f} g={g}", delta);
                } else {
                    prop_assert_eq!(g, 0.0);
                }
            }
        }
    }
}
