//! Seeded instances with planted solutions.
//!
//! All randomness comes from [`SeededStream`]: xoshiro256** seeded from a
//! `u64` through SplitMix64, with each double formed as
//! `(next_u64 >> 11) · 2⁻⁵³ ∈ [0, 1)`. Intervals are mapped affinely:
//! `[-1, 1)` as `2u - 1` and `(0.1, 1]` as `1 - 0.9u`. Draws happen in a
//! fixed order (see [`generate_planted`]), so a spec determines its instance
//! bit for bit on any implementation following the same recipe.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::error::{IcpError, Result};
use crate::linalg::{mat_vec, DiagonalScaling, Matrix, Vector};
use crate::problem::{IcpInstance, ImplicitMap};

/// Identifier of the pseudo-random stream, recorded in instance files.
pub const RNG_ALGORITHM: &str = "xoshiro256starstar-splitmix64";

/// Deterministic uniform draws.
#[derive(Debug, Clone)]
pub struct SeededStream(Xoshiro256StarStar);

impl SeededStream {
    pub fn new(seed: u64) -> Self {
        SeededStream(Xoshiro256StarStar::seed_from_u64(seed))
    }

    /// Uniform on `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[-1, 1)`.
    pub fn symmetric(&mut self) -> f64 {
        2.0 * self.unit() - 1.0
    }

    /// Uniform on `(0.1, 1]`.
    pub fn margin(&mut self) -> f64 {
        1.0 - 0.9 * self.unit()
    }

    /// Uniform on `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform index in `0..k`, `k ≥ 1`.
    pub fn index(&mut self, k: usize) -> usize {
        ((self.unit() * k as f64) as usize).min(k - 1)
    }

    /// Log-uniform positive scaling with entries in `[lo, hi)`.
    pub fn log_uniform_scaling(&mut self, n: usize, lo: f64, hi: f64) -> DiagonalScaling {
        let (a, b) = (lo.ln(), hi.ln());
        let diag = (0..n).map(|_| self.range(a, b).exp()).collect();
        DiagonalScaling::new(diag).expect("exp of a finite value is positive")
    }

    /// Point with entries uniform on `[-radius, radius)`.
    pub fn point(&mut self, n: usize, radius: f64) -> Vector {
        Vector::from_raw((0..n).map(|_| radius * self.symmetric()).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixFamily {
    /// Off-diagonal entries in `[-1, 1)`, diagonal equal to the row's
    /// absolute off-diagonal sum plus a margin in `(0.1, 1]`.
    DiagDominant,
    /// `B Bᵀ + n I` with `B` entries in `[-1, 1)`, symmetrically scaled to
    /// unit diagonal.
    SymmetricPd,
    /// Entries in `[-1, 1)`.
    Dense,
}

impl MatrixFamily {
    pub const ALL: [MatrixFamily; 3] = [
        MatrixFamily::DiagDominant,
        MatrixFamily::SymmetricPd,
        MatrixFamily::Dense,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MatrixFamily::DiagDominant => "diag_dominant",
            MatrixFamily::SymmetricPd => "symmetric_pd",
            MatrixFamily::Dense => "dense",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapFamily {
    Zero,
    /// `f(r) = C r + d` with `‖C‖∞ ≤ gamma < 1`.
    ContractiveAffine {
        gamma: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub n: usize,
    pub seed: u64,
    pub matrix_family: MatrixFamily,
    pub map_family: MapFamily,
    /// Fraction of components with `H_i(r*) = 0`.
    pub active_fraction: f64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(IcpError::InvalidSpec("n must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.active_fraction) {
            return Err(IcpError::InvalidSpec(format!(
                "active_fraction {} outside [0, 1]",
                self.active_fraction
            )));
        }
        if let MapFamily::ContractiveAffine { gamma } = self.map_family {
            if !(0.0..1.0).contains(&gamma) {
                return Err(IcpError::InvalidSpec(format!("gamma {gamma} outside [0, 1)")));
            }
        }
        Ok(())
    }

    /// `round(active_fraction · n)`.
    pub fn active_count(&self) -> usize {
        ((self.active_fraction * self.n as f64).round() as usize).min(self.n)
    }
}

/// A generated instance together with its planted solution.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub instance: IcpInstance,
    pub planted: Vector,
    /// Sorted indices with `H_i(r*) = 0`; `F_i(r*) = 0` on the complement.
    pub active_set: Vec<usize>,
    pub spec: GeneratorSpec,
}

fn draw_matrix(stream: &mut SeededStream, family: MatrixFamily, n: usize) -> Matrix {
    let mut data = vec![0.0; n * n];
    match family {
        MatrixFamily::DiagDominant => {
            for i in 0..n {
                let mut margin = 0.0;
                for j in 0..n {
                    if i == j {
                        margin = stream.margin();
                    } else {
                        data[i * n + j] = stream.symmetric();
                    }
                }
                let off: f64 = (0..n).filter(|&j| j != i).map(|j| data[i * n + j].abs()).sum();
                data[i * n + i] = off + margin;
            }
        }
        MatrixFamily::SymmetricPd => {
            let b: Vec<f64> = (0..n * n).map(|_| stream.symmetric()).collect();
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                for j in i..n {
                    let dot: f64 = (0..n).map(|k| b[i * n + k] * b[j * n + k]).sum();
                    m[i * n + j] = dot;
                }
                m[i * n + i] += n as f64;
            }
            let s: Vec<f64> = (0..n).map(|i| m[i * n + i].sqrt()).collect();
            for i in 0..n {
                for j in i..n {
                    let x = m[i * n + j] / (s[i] * s[j]);
                    data[i * n + j] = x;
                    data[j * n + i] = x;
                }
            }
        }
        MatrixFamily::Dense => {
            for x in data.iter_mut() {
                *x = stream.symmetric();
            }
        }
    }
    Matrix::from_raw(n, data)
}

fn draw_contraction(stream: &mut SeededStream, n: usize, gamma: f64) -> Matrix {
    let raw = Matrix::from_raw(n, (0..n * n).map(|_| stream.symmetric()).collect());
    let norm = raw.inf_norm();
    if norm == 0.0 || gamma == 0.0 {
        return Matrix::zeros(n);
    }
    let mut factor = gamma / norm;
    loop {
        let c = Matrix::from_raw(n, raw.row_major().iter().map(|x| x * factor).collect());
        if c.inf_norm() <= gamma {
            return c;
        }
        factor *= 1.0 - 4.0 * f64::EPSILON;
    }
}

/// Draws an `n×n` matrix of the given family from `seed`. Identical
/// arguments give identical matrices.
pub fn generate_matrix(family: MatrixFamily, n: usize, seed: u64) -> Result<Matrix> {
    if n == 0 {
        return Err(IcpError::InvalidSpec("n must be at least 1".into()));
    }
    Ok(draw_matrix(&mut SeededStream::new(seed), family, n))
}

/// Builds an instance backward from a chosen solution `r*` and active set
/// `S` of size `round(active_fraction · n)`.
///
/// Draw order from `SeededStream::new(seed)`:
///
/// 1. `A` (as in [`generate_matrix`]);
/// 2. affine maps only: `C` (`n²` entries in `[-1, 1)`, rescaled to
///    `‖C‖∞ = gamma`), then `r*` (`n` entries in `[-1, 1)`);
/// 3. `|S|` partial Fisher–Yates swaps on `0..n`, the first `|S|` slots
///    forming `S`;
/// 4. `n` margins `h_i`, then `n` margins `g_i`, all in `(0.1, 1]`.
///
/// Then `H_i(r*) = 0` and `F_i(r*) = g_i` on `S`, `H_i(r*) = h_i` and
/// `F_i(r*) = 0` off `S`. With `f = 0` the plant is forced to
/// `r*_i = 0` on `S` and `r*_i = h_i` off `S`.
pub fn generate_planted(spec: &GeneratorSpec) -> Result<PlantedInstance> {
    spec.validate()?;
    let n = spec.n;
    let mut stream = SeededStream::new(spec.seed);
    let a = draw_matrix(&mut stream, spec.matrix_family, n);
    let affine = match spec.map_family {
        MapFamily::Zero => None,
        MapFamily::ContractiveAffine { gamma } => {
            let c = draw_contraction(&mut stream, n, gamma);
            let r: Vec<f64> = (0..n).map(|_| stream.symmetric()).collect();
            Some((c, r))
        }
    };

    let k = spec.active_count();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + stream.index(n - i);
        perm.swap(i, j);
    }
    let mut in_set = vec![false; n];
    for &i in &perm[..k] {
        in_set[i] = true;
    }
    let h: Vec<f64> = (0..n).map(|_| stream.margin()).collect();
    let g: Vec<f64> = (0..n).map(|_| stream.margin()).collect();

    let (f, planted) = match affine {
        None => {
            let r = (0..n).map(|i| if in_set[i] { 0.0 } else { h[i] }).collect();
            (ImplicitMap::Zero, Vector::from_raw(r))
        }
        Some((c, r)) => {
            let r = Vector::from_raw(r);
            let cr = mat_vec(&c, &r)?;
            let d = (0..n)
                .map(|i| {
                    let free = r[i] - cr[i];
                    if in_set[i] {
                        free
                    } else {
                        free - h[i]
                    }
                })
                .collect();
            (ImplicitMap::affine(c, Vector::from_raw(d))?, r)
        }
    };
    let ar = mat_vec(&a, &planted)?;
    let b = (0..n).map(|i| if in_set[i] { g[i] - ar[i] } else { -ar[i] }).collect();
    let instance = IcpInstance::new(a, Vector::from_raw(b), f)?;

    Ok(PlantedInstance {
        instance,
        planted,
        active_set: (0..n).filter(|&i| in_set[i]).collect(),
        spec: *spec,
    })
}
