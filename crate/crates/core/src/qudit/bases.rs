//! Phase-parametrized qudit bases, the maximally entangled state, the
//! shift/phase error operators and the generalized Bell basis.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::linalg::{cis, kron, CMatrix, C64};
use super::state::{Operator, StateVector};
use crate::error::{QkdError, Result};

pub const QUTRIT: usize = 3;

/// A phi-basis (or its complex conjugate) of a single register.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    phi: f64,
    conjugated: bool,
}

impl BasisSpec {
    /// `phi` is reduced to [0, 2pi).
    pub fn new(phi: f64, conjugated: bool) -> Self {
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Self { phi, conjugated }
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn conjugated(&self) -> bool {
        self.conjugated
    }

    /// The basis with the opposite conjugation flag.
    pub fn conjugate(&self) -> Self {
        Self {
            phi: self.phi,
            conjugated: !self.conjugated,
        }
    }

    pub fn state(&self, dim: usize, l: usize) -> Result<StateVector> {
        let s = phi_basis_state_dim(dim, self.phi, l)?;
        Ok(if self.conjugated { s.conj() } else { s })
    }

    pub fn states(&self, dim: usize) -> Result<Vec<StateVector>> {
        (0..dim).map(|l| self.state(dim, l)).collect()
    }
}

fn check_index(what: &'static str, index: usize, bound: usize) -> Result<()> {
    if index >= bound {
        return Err(QkdError::IndexOutOfRange { what, index, bound });
    }
    Ok(())
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(QkdError::DimensionTooSmall(dim));
    }
    Ok(())
}

/// `(1/sqrt(N)) sum_k exp(i k (2 pi l / N + phi)) |k>`.
pub fn phi_basis_state_dim(dim: usize, phi: f64, l: usize) -> Result<StateVector> {
    check_dim(dim)?;
    check_index("basis label", l, dim)?;
    let angle = TAU * l as f64 / dim as f64 + phi;
    let s = (dim as f64).sqrt().recip();
    let amps = (0..dim).map(|k| cis(k as f64 * angle) * s).collect();
    Ok(StateVector::from_parts_unchecked(amps, vec![dim]))
}

/// Qutrit phi-basis state `|l_phi>`.
pub fn phi_basis_state(phi: f64, l: usize) -> Result<StateVector> {
    phi_basis_state_dim(QUTRIT, phi, l)
}

/// Qutrit conjugate-basis state `|l_phi*>`.
pub fn conjugate_phi_basis_state(phi: f64, l: usize) -> Result<StateVector> {
    Ok(phi_basis_state(phi, l)?.conj())
}

/// The four bases `phi_i = 2 pi i / 12`, i = 0..3, in order.
pub fn optimal_bases() -> [BasisSpec; 4] {
    [0, 1, 2, 3].map(|i| BasisSpec::new(TAU / 12.0 * i as f64, false))
}

/// Qubit analogue: `phi_i = 2 pi i / 8`, i = 0..3.
pub fn qubit_optimal_bases() -> [BasisSpec; 4] {
    [0, 1, 2, 3].map(|i| BasisSpec::new(PI / 4.0 * i as f64, false))
}

pub fn computational_state(dim: usize, k: usize) -> Result<StateVector> {
    check_dim(dim)?;
    check_index("computational label", k, dim)?;
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    amps[k] = C64::new(1.0, 0.0);
    Ok(StateVector::from_parts_unchecked(amps, vec![dim]))
}

pub fn computational_basis(dim: usize) -> Result<Vec<StateVector>> {
    (0..dim).map(|k| computational_state(dim, k)).collect()
}

/// `(1/sqrt(N)) sum_k |k>|k>` with factors `[N, N]`.
pub fn max_entangled(dim: usize) -> Result<StateVector> {
    check_dim(dim)?;
    let s = (dim as f64).sqrt().recip();
    let mut amps = vec![C64::new(0.0, 0.0); dim * dim];
    for k in 0..dim {
        amps[k * dim + k] = C64::new(s, 0.0);
    }
    Ok(StateVector::from_parts_unchecked(amps, vec![dim, dim]))
}

/// `U_{m,n} = sum_k exp(2 pi i k n / N) |k+m mod N><k|`.
pub fn error_operator(m: usize, n: usize, dim: usize) -> Result<Operator> {
    check_dim(dim)?;
    check_index("shift", m, dim)?;
    check_index("phase", n, dim)?;
    let mut mat = CMatrix::zeros(dim);
    for k in 0..dim {
        mat.set((k + m) % dim, k, root_of_unity(k * n, dim));
    }
    Ok(Operator::new(mat))
}

/// `N^{-1/2} sum_k exp(2 pi i k n / N) |k>|k+m mod N>`.
pub fn bell_state(m: usize, n: usize, dim: usize) -> Result<StateVector> {
    check_dim(dim)?;
    check_index("shift", m, dim)?;
    check_index("phase", n, dim)?;
    let s = (dim as f64).sqrt().recip();
    let mut amps = vec![C64::new(0.0, 0.0); dim * dim];
    for k in 0..dim {
        amps[k * dim + (k + m) % dim] = root_of_unity(k * n, dim) * s;
    }
    Ok(StateVector::from_parts_unchecked(amps, vec![dim, dim]))
}

/// Bell state written in the rotated product basis:
/// `3^{-1/2} sum_k exp(2 pi i k n / 3) |k_phi> |(k+m)_phi*>`.
pub fn tilde_bell_state(m: usize, n: usize, phi: f64) -> Result<StateVector> {
    check_index("shift", m, QUTRIT)?;
    check_index("phase", n, QUTRIT)?;
    let s = 3f64.sqrt().recip();
    let mut amps = vec![C64::new(0.0, 0.0); QUTRIT * QUTRIT];
    for k in 0..QUTRIT {
        let left = phi_basis_state(phi, k)?;
        let right = conjugate_phi_basis_state(phi, (k + m) % QUTRIT)?;
        let w = root_of_unity(k * n, QUTRIT) * s;
        for (a, b) in amps.iter_mut().zip(kron(left.amps(), right.amps())) {
            *a += w * b;
        }
    }
    Ok(StateVector::from_parts_unchecked(amps, vec![QUTRIT, QUTRIT]))
}

/// exp(2 pi i k / N), reduced mod N first to keep the phase exact.
#[inline]
pub(crate) fn root_of_unity(k: usize, dim: usize) -> C64 {
    cis(TAU * (k % dim) as f64 / dim as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_zero_states() {
        let s = 3f64.sqrt().recip();
        let zero = phi_basis_state(0.0, 0).unwrap();
        assert!(zero.amps().iter().all(|a| (a - C64::new(s, 0.0)).norm() < 1e-15));
        let one = phi_basis_state(0.0, 1).unwrap();
        let w = cis(TAU / 3.0);
        let expect = [C64::new(s, 0.0), w * s, w * w * s];
        for (a, b) in one.amps().iter().zip(expect) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn label_out_of_range() {
        assert!(matches!(
            phi_basis_state(0.3, 3),
            Err(QkdError::IndexOutOfRange { index: 3, bound: 3, .. })
        ));
        assert!(conjugate_phi_basis_state(0.0, 7).is_err());
        assert!(error_operator(3, 0, 3).is_err());
        assert!(bell_state(0, 5, 3).is_err());
        assert!(matches!(max_entangled(1), Err(QkdError::DimensionTooSmall(1))));
    }

    #[test]
    fn optimal_bases_values() {
        let b = optimal_bases();
        assert_eq!(b[0].phi(), 0.0);
        assert!((b[3].phi() - PI / 2.0).abs() < 1e-15);
        for x in &b {
            for y in &b {
                let steps = (x.phi() - y.phi()) / (PI / 6.0);
                assert!((steps - steps.round()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn basis_spec_reduces_phi() {
        assert!((BasisSpec::new(-PI / 2.0, false).phi() - 1.5 * PI).abs() < 1e-15);
        assert!(BasisSpec::new(TAU, true).phi().abs() < 1e-15);
    }

    #[test]
    fn error_operator_examples() {
        let id = error_operator(0, 0, 3).unwrap();
        assert!(id.matrix().max_abs_diff(&CMatrix::identity(3)) < 1e-15);
        let shifted = error_operator(1, 0, 3)
            .unwrap()
            .apply(&computational_state(3, 0).unwrap())
            .unwrap();
        assert!(shifted.max_abs_diff(&computational_state(3, 1).unwrap()) < 1e-15);
        let z = error_operator(0, 1, 3).unwrap();
        for k in 0..3 {
            assert!((z.matrix().get(k, k) - cis(TAU * k as f64 / 3.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn bell_zero_zero_is_max_entangled() {
        let b = bell_state(0, 0, 3).unwrap();
        assert!(b.max_abs_diff(&max_entangled(3).unwrap()) < 1e-15);
    }
}
