use serde::{Deserialize, Serialize};

use super::linalg::{inner, kron, CMatrix, C64};
use crate::error::{QkdError, Result};

/// Tolerance used for normalization and other exact-arithmetic checks.
pub const EXACT_TOL: f64 = 1e-12;

/// Pure state of one or more qudits.
///
/// Amplitudes are stored row-major over `factors`: the first subsystem is the
/// slowest-varying index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateVectorJson", into = "StateVectorJson")]
pub struct StateVector {
    amps: Vec<C64>,
    factors: Vec<usize>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>, factors: Vec<usize>) -> Result<Self> {
        check_factors(&factors, amps.len())?;
        let norm = norm_sqr(&amps);
        if (norm - 1.0).abs() > EXACT_TOL {
            return Err(QkdError::NotNormalized(norm));
        }
        Ok(Self { amps, factors })
    }

    /// Single-subsystem state.
    pub fn single(amps: Vec<C64>) -> Result<Self> {
        let d = amps.len();
        Self::new(amps, vec![d])
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(amps: Vec<C64>, factors: Vec<usize>) -> Result<Self> {
        check_factors(&factors, amps.len())?;
        let norm = norm_sqr(&amps);
        if norm <= f64::MIN_POSITIVE {
            return Err(QkdError::NotNormalized(norm));
        }
        let s = norm.sqrt().recip();
        Ok(Self {
            amps: amps.into_iter().map(|a| a * s).collect(),
            factors,
        })
    }

    /// Caller guarantees unit norm up to rounding and a consistent factor list.
    pub(crate) fn from_parts_unchecked(amps: Vec<C64>, factors: Vec<usize>) -> Self {
        debug_assert_eq!(factors.iter().product::<usize>(), amps.len());
        debug_assert!((norm_sqr(&amps) - 1.0).abs() < 1e-9);
        Self { amps, factors }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// <self|other>
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.dim(), other.dim(), "inner product of mismatched states");
        inner(&self.amps, &other.amps)
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Self {
            amps: kron(&self.amps, &other.amps),
            factors,
        }
    }

    /// Componentwise complex conjugate.
    pub fn conj(&self) -> StateVector {
        Self {
            amps: self.amps.iter().map(|a| a.conj()).collect(),
            factors: self.factors.clone(),
        }
    }

    pub fn projector(&self) -> CMatrix {
        CMatrix::outer(&self.amps, &self.amps)
    }

    /// Equality up to a global phase: |<a|b>| = 1 within `tol`.
    pub fn equals_up_to_phase(&self, other: &StateVector, tol: f64) -> bool {
        self.dim() == other.dim() && (1.0 - self.inner(other).norm()).abs() <= tol
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_json_pairs(&self) -> Vec<[f64; 2]> {
        self.amps.iter().map(|a| [a.re, a.im]).collect()
    }
}

impl std::fmt::Display for StateVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let pairs = self.to_json_pairs();
        write!(f, "{}", serde_json::to_string(&pairs).map_err(|_| std::fmt::Error)?)
    }
}

#[derive(Serialize, Deserialize)]
struct StateVectorJson {
    factors: Vec<usize>,
    amps: Vec<[f64; 2]>,
}

impl TryFrom<StateVectorJson> for StateVector {
    type Error = QkdError;

    fn try_from(value: StateVectorJson) -> Result<Self> {
        let amps = value.amps.iter().map(|p| C64::new(p[0], p[1])).collect();
        StateVector::new(amps, value.factors)
    }
}

impl From<StateVector> for StateVectorJson {
    fn from(value: StateVector) -> Self {
        StateVectorJson {
            amps: value.to_json_pairs(),
            factors: value.factors,
        }
    }
}

fn norm_sqr(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

pub(crate) fn check_factors(factors: &[usize], dim: usize) -> Result<()> {
    if factors.is_empty() || factors.contains(&0) || factors.iter().product::<usize>() != dim {
        return Err(QkdError::InvalidFactors {
            factors: factors.to_vec(),
            dim,
        });
    }
    Ok(())
}

/// Square matrix operator on a single register.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: CMatrix,
}

impl Operator {
    pub fn new(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Applies a unitary to a single-register state.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.dim() != self.dim() {
            return Err(QkdError::DimensionMismatch {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        StateVector::normalized(self.matrix.apply(state.amps()), state.factors().to_vec())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.matrix.unitarity_defect() <= tol
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates all density-matrix invariants.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rho = Self { matrix };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn from_pure(state: &StateVector) -> Self {
        Self {
            matrix: state.projector(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim).scaled(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Hermitian within 1e-12, trace one within 1e-12, eigenvalues >= -1e-10.
    pub fn validate(&self) -> Result<()> {
        let herm = self.matrix.hermiticity_defect();
        if herm > EXACT_TOL {
            return Err(QkdError::InvalidDensityMatrix(format!(
                "matrix with hermiticity defect {herm:e}"
            )));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > EXACT_TOL || tr.im.abs() > EXACT_TOL {
            return Err(QkdError::InvalidDensityMatrix(format!("matrix with trace {tr}")));
        }
        let min_eig = self.matrix.hermitian_eigenvalues()[0];
        if min_eig < -1e-10 {
            return Err(QkdError::InvalidDensityMatrix(format!(
                "matrix with eigenvalue {min_eig:e}"
            )));
        }
        Ok(())
    }

    /// <psi|rho|psi>
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(QkdError::DimensionMismatch {
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        Ok(self.matrix.expectation(psi.amps()).re)
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized_amplitudes() {
        let err = StateVector::single(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, QkdError::NotNormalized(n) if (n - 2.0).abs() < 1e-15));
    }

    #[test]
    fn rejects_bad_factors() {
        let amps = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        assert!(matches!(
            StateVector::new(amps, vec![2, 2]),
            Err(QkdError::InvalidFactors { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let s = StateVector::normalized(
            vec![C64::new(1.0, 0.5), C64::new(0.0, -1.0), C64::new(0.25, 0.0)],
            vec![3],
        )
        .unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: StateVector = serde_json::from_str(&text).unwrap();
        assert!(s.max_abs_diff(&back) < 1e-15);
        assert!(s.to_string().starts_with("[["));
    }

    #[test]
    fn density_validation_catches_negative_eigenvalue() {
        let mut m = CMatrix::zeros(2);
        m.set(0, 0, C64::new(1.5, 0.0));
        m.set(1, 1, C64::new(-0.5, 0.0));
        assert!(DensityMatrix::new(m).is_err());
        assert!(DensityMatrix::new(DensityMatrix::maximally_mixed(3).matrix().clone()).is_ok());
    }
}
