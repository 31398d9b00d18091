use super::linalg::{CMatrix, C64};
use super::state::{check_factors, DensityMatrix, StateVector};
use crate::error::{QkdError, Result};

/// Splits flat indices into (kept, traced) flat indices, both row-major in
/// the original subsystem order.
struct IndexSplit {
    kept_dim: usize,
    traced_dim: usize,
    kept: Vec<usize>,
    traced: Vec<usize>,
}

impl IndexSplit {
    fn new(factors: &[usize], keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(QkdError::InvalidFactors {
                factors: factors.to_vec(),
                dim: factors.iter().product(),
            });
        }
        let mut mask = vec![false; factors.len()];
        for &k in keep {
            if k >= factors.len() {
                return Err(QkdError::IndexOutOfRange {
                    what: "subsystem",
                    index: k,
                    bound: factors.len(),
                });
            }
            mask[k] = true;
        }
        let dim: usize = factors.iter().product();
        let kept_dim: usize = factors.iter().zip(&mask).filter(|(_, m)| **m).map(|(f, _)| f).product();
        let traced_dim = dim / kept_dim;
        let mut kept = vec![0; dim];
        let mut traced = vec![0; dim];
        for flat in 0..dim {
            let mut rem = flat;
            let mut stride = dim;
            let (mut ki, mut ti) = (0, 0);
            for (f, keep_it) in factors.iter().zip(&mask) {
                stride /= f;
                let digit = rem / stride;
                rem %= stride;
                if *keep_it {
                    ki = ki * f + digit;
                } else {
                    ti = ti * f + digit;
                }
            }
            kept[flat] = ki;
            traced[flat] = ti;
        }
        Ok(Self {
            kept_dim,
            traced_dim,
            kept,
            traced,
        })
    }

    /// flat index from (kept, traced) digits
    fn inverse(&self) -> Vec<Vec<usize>> {
        let mut inv = vec![vec![0; self.traced_dim]; self.kept_dim];
        for (flat, (&k, &t)) in self.kept.iter().zip(&self.traced).enumerate() {
            inv[k][t] = flat;
        }
        inv
    }
}

/// Reduced state of the subsystems listed in `keep` (kept in ascending order).
pub fn partial_trace(state: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let split = IndexSplit::new(state.factors(), keep)?;
    let inv = split.inverse();
    let amps = state.amps();
    let mut rho = CMatrix::zeros(split.kept_dim);
    for r in 0..split.kept_dim {
        for c in r..split.kept_dim {
            let v: C64 = (0..split.traced_dim)
                .map(|t| amps[inv[r][t]] * amps[inv[c][t]].conj())
                .sum();
            rho.set(r, c, v);
            rho.set(c, r, v.conj());
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(rho))
}

/// Partial trace of a mixed state whose register layout is `factors`.
pub fn partial_trace_mixed(rho: &DensityMatrix, factors: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    check_factors(factors, rho.dim())?;
    let split = IndexSplit::new(factors, keep)?;
    let inv = split.inverse();
    let m = rho.matrix();
    let out = CMatrix::from_fn(split.kept_dim, |r, c| {
        (0..split.traced_dim).map(|t| m.get(inv[r][t], inv[c][t])).sum()
    });
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Outcome probabilities of measuring each register of `state` in its own
/// orthonormal basis. Output is row-major over the registers.
pub fn product_basis_probabilities(state: &StateVector, bases: &[&[StateVector]]) -> Result<Vec<f64>> {
    let amps = product_basis_amplitudes(state, bases)?;
    Ok(amps.iter().map(|a| a.norm_sqr()).collect())
}

/// Amplitudes `<b_1 ... b_r | state>` in a product of per-register bases.
pub fn product_basis_amplitudes(state: &StateVector, bases: &[&[StateVector]]) -> Result<Vec<C64>> {
    let factors = state.factors();
    if bases.len() != factors.len() {
        return Err(QkdError::DimensionMismatch {
            expected: factors.len(),
            found: bases.len(),
        });
    }
    for (basis, &f) in bases.iter().zip(factors) {
        if basis.len() != f || basis.iter().any(|b| b.dim() != f) {
            return Err(QkdError::DimensionMismatch {
                expected: f,
                found: basis.len(),
            });
        }
    }
    // Contract one register at a time: amplitude tensor stays row-major.
    let mut cur: Vec<C64> = state.amps().to_vec();
    let total = cur.len();
    let mut stride = total;
    for (basis, &f) in bases.iter().zip(factors) {
        stride /= f;
        let outer = total / (stride * f);
        let mut next = vec![C64::new(0.0, 0.0); total];
        for o in 0..outer {
            for (label, b) in basis.iter().enumerate() {
                let bamps = b.amps();
                for s in 0..stride {
                    let mut acc = C64::new(0.0, 0.0);
                    for (k, bk) in bamps.iter().enumerate() {
                        acc += bk.conj() * cur[(o * f + k) * stride + s];
                    }
                    next[(o * f + label) * stride + s] = acc;
                }
            }
        }
        cur = next;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::{computational_state, max_entangled, phi_basis_state};

    #[test]
    fn max_entangled_reduces_to_identity_over_three() {
        let rho = partial_trace(&max_entangled(3).unwrap(), &[0]).unwrap();
        rho.validate().unwrap();
        let target = DensityMatrix::maximally_mixed(3);
        assert!(rho.max_abs_diff(&target) < 1e-12);
        let rho_b = partial_trace(&max_entangled(3).unwrap(), &[1]).unwrap();
        assert!(rho_b.max_abs_diff(&target) < 1e-12);
    }

    #[test]
    fn product_state_reduces_to_factor() {
        let a = phi_basis_state(0.4, 2).unwrap();
        let b = computational_state(3, 1).unwrap();
        let rho = partial_trace(&a.tensor(&b), &[0]).unwrap();
        assert!(rho.max_abs_diff(&DensityMatrix::from_pure(&a)) < 1e-12);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        let rho_b = partial_trace(&a.tensor(&b), &[1]).unwrap();
        assert!(rho_b.max_abs_diff(&DensityMatrix::from_pure(&b)) < 1e-12);
    }

    #[test]
    fn mixed_partial_trace_matches_pure_route() {
        let a = phi_basis_state(0.9, 1).unwrap();
        let psi = a.tensor(&max_entangled(3).unwrap());
        let full = DensityMatrix::from_pure(&psi);
        for keep in [vec![0], vec![1], vec![2], vec![0, 2]] {
            let pure = partial_trace(&psi, &keep).unwrap();
            let mixed = partial_trace_mixed(&full, &[3, 3, 3], &keep).unwrap();
            assert!(pure.max_abs_diff(&mixed) < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_keep_sets() {
        let psi = max_entangled(3).unwrap();
        assert!(partial_trace(&psi, &[]).is_err());
        assert!(partial_trace(&psi, &[2]).is_err());
        let rho = DensityMatrix::maximally_mixed(9);
        assert!(matches!(
            partial_trace_mixed(&rho, &[2, 3], &[0]),
            Err(QkdError::InvalidFactors { .. })
        ));
    }

    #[test]
    fn product_basis_probabilities_sum_to_one() {
        let psi = max_entangled(3).unwrap();
        let b0 = crate::qudit::BasisSpec::new(0.2, false).states(3).unwrap();
        let b1 = crate::qudit::BasisSpec::new(0.2, true).states(3).unwrap();
        let p = product_basis_probabilities(&psi, &[&b0, &b1]).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for a in 0..3 {
            for b in 0..3 {
                let expect = if a == b { 1.0 / 3.0 } else { 0.0 };
                assert!((p[a * 3 + b] - expect).abs() < 1e-12);
            }
        }
    }
}
