use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{QkdError, Result};
use crate::qudit::{cis, C64};

/// Tolerance on sum |a|^2 = 1 for amplitude matrices.
pub const AMPLITUDE_NORM_TOL: f64 = 1e-10;

/// Tolerance used by [`phi_cloner_matrix`] before it refuses unnormalized input.
pub const PARAM_NORM_TOL: f64 = 1e-6;

/// Real parameters of the phase-covariant cloner family
///
/// ```text
///   v x x
///   y y y
///   z z z
/// ```
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClonerParams {
    pub v: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ClonerParams {
    pub const fn new(v: f64, x: f64, y: f64, z: f64) -> Self {
        Self { v, x, y, z }
    }

    /// y = z member of the family.
    pub const fn symmetric(v: f64, x: f64, y: f64) -> Self {
        Self { v, x, y, z: y }
    }

    /// The identity cloner: Bob's copy is untouched.
    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0)
    }

    /// Uniform matrix, a_{m,n} = 1/3.
    pub const fn uniform() -> Self {
        let t = 1.0 / 3.0;
        Self::new(t, t, t, t)
    }

    /// Optimal crossing-point cloner rounded to four digits
    /// (normalization holds to about 2e-5).
    pub const fn reported_optimum() -> Self {
        Self::symmetric(0.8320, 0.1711, 0.2038)
    }

    /// v^2 + 2x^2 + 3y^2 + 3z^2
    pub fn norm_sqr(&self) -> f64 {
        self.v * self.v + 2.0 * self.x * self.x + 3.0 * self.y * self.y + 3.0 * self.z * self.z
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= f64::MIN_POSITIVE {
            return Err(QkdError::AmplitudesNotNormalized(n));
        }
        let s = n.sqrt().recip();
        Ok(Self::new(self.v * s, self.x * s, self.y * s, self.z * s))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (self.y - self.z).abs() <= tol
    }

    pub(crate) fn require_symmetric(&self) -> Result<()> {
        if self.is_symmetric(1e-10) {
            Ok(())
        } else {
            Err(QkdError::AsymmetricParams { y: self.y, z: self.z })
        }
    }

    /// Representative of the global sign symmetry with v >= 0.
    pub fn canonical_sign(&self) -> Self {
        if self.v < 0.0 || (self.v == 0.0 && self.x < 0.0) {
            Self::new(-self.v, -self.x, -self.y, -self.z)
        } else {
            *self
        }
    }
}

/// N x N complex cloner amplitudes `a_{m,n}`, row-major over (m, n).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AmplitudeMatrixJson", into = "AmplitudeMatrixJson")]
pub struct AmplitudeMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl AmplitudeMatrix {
    /// Validates shape and unit Frobenius norm (within 1e-10).
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim < 2 {
            return Err(QkdError::DimensionTooSmall(dim));
        }
        if entries.len() != dim * dim {
            return Err(QkdError::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let m = Self { dim, entries };
        let n = m.norm_sqr();
        if (n - 1.0).abs() > AMPLITUDE_NORM_TOL {
            return Err(QkdError::AmplitudesNotNormalized(n));
        }
        Ok(m)
    }

    /// Rescales arbitrary nonzero entries to unit norm.
    pub fn normalized(dim: usize, entries: Vec<C64>) -> Result<Self> {
        let n: f64 = entries.iter().map(|a| a.norm_sqr()).sum();
        if n <= f64::MIN_POSITIVE {
            return Err(QkdError::AmplitudesNotNormalized(n));
        }
        let s = n.sqrt().recip();
        Self::new(dim, entries.into_iter().map(|a| a * s).collect())
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&r| C64::new(r, 0.0)).collect())
    }

    pub(crate) fn from_parts_unchecked(dim: usize, entries: Vec<C64>) -> Self {
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.entries[m * self.dim + n]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Mixture weights |a_{m,n}|^2, row-major.
    pub fn weights(&self) -> Vec<f64> {
        self.entries.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn max_abs_diff(&self, other: &AmplitudeMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct AmplitudeMatrixJson {
    dim: usize,
    /// rows of [re, im] pairs
    entries: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<AmplitudeMatrixJson> for AmplitudeMatrix {
    type Error = QkdError;

    fn try_from(value: AmplitudeMatrixJson) -> Result<Self> {
        if value.entries.len() != value.dim {
            return Err(QkdError::DimensionMismatch {
                expected: value.dim,
                found: value.entries.len(),
            });
        }
        let mut flat = Vec::with_capacity(value.dim * value.dim);
        for row in &value.entries {
            if row.len() != value.dim {
                return Err(QkdError::DimensionMismatch {
                    expected: value.dim,
                    found: row.len(),
                });
            }
            flat.extend(row.iter().map(|p| C64::new(p[0], p[1])));
        }
        AmplitudeMatrix::new(value.dim, flat)
    }
}

impl From<AmplitudeMatrix> for AmplitudeMatrixJson {
    fn from(value: AmplitudeMatrix) -> Self {
        let entries = value
            .entries
            .chunks(value.dim)
            .map(|row| row.iter().map(|a| [a.re, a.im]).collect())
            .collect();
        AmplitudeMatrixJson {
            dim: value.dim,
            entries,
        }
    }
}

/// Amplitude matrix of the phase-covariant family. With `normalize` the
/// parameters are rescaled; otherwise a norm off by more than 1e-6 is an error.
pub fn phi_cloner_matrix(params: &ClonerParams, normalize: bool) -> Result<AmplitudeMatrix> {
    let p = if normalize {
        params.normalized()?
    } else {
        let n = params.norm_sqr();
        if (n - 1.0).abs() > PARAM_NORM_TOL {
            return Err(QkdError::AmplitudesNotNormalized(n));
        }
        *params
    };
    let ClonerParams { v, x, y, z } = p;
    let entries = [v, x, x, y, y, y, z, z, z].map(|r| C64::new(r, 0.0)).to_vec();
    Ok(AmplitudeMatrix::from_parts_unchecked(3, entries))
}

/// `b_{m,n} = (1/N) sum_{x,y} exp(2 pi i (n x - m y) / N) a_{x,y}`.
///
/// The transform is an involution: applying it twice returns `a`.
pub fn fourier_dual(a: &AmplitudeMatrix) -> AmplitudeMatrix {
    let dim = a.dim();
    let inv = 1.0 / dim as f64;
    let mut out = Vec::with_capacity(dim * dim);
    for m in 0..dim {
        for n in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for x in 0..dim {
                for y in 0..dim {
                    // (n x - m y) mod N, kept nonnegative
                    let k = (n * x + (dim - m) * y) % dim;
                    acc += cis(TAU * k as f64 / dim as f64) * a.get(x, y);
                }
            }
            out.push(acc * inv);
        }
    }
    AmplitudeMatrix::from_parts_unchecked(dim, out)
}
