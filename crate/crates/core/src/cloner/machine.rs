use super::amplitudes::{fourier_dual, AmplitudeMatrix};
use crate::error::{QkdError, Result};
use crate::qudit::{
    bell_state, error_operator, partial_trace, phi_basis_state_dim, CMatrix, DensityMatrix, StateVector, C64,
    EXACT_TOL,
};

/// Output of the cloner on one input state.
#[derive(Clone, Debug)]
pub struct CloneOutputs {
    /// Registers [A, B, C]: Bob's copy, Eve's copy, machine.
    pub joint: StateVector,
    pub rho_a: DensityMatrix,
    pub rho_b: DensityMatrix,
    /// Largest entrywise gap between the traced states and the
    /// `sum p_{m,n} |psi_{m,n}><psi_{m,n}|` mixtures (A with |a|^2, B with |b|^2).
    pub mixture_discrepancy: f64,
}

/// Runs the cloning transformation
/// `|psi> -> sum_{m,n} a_{m,n} U_{m,n}|psi>_A |B_{m,-n}>_{BC}`.
pub fn clone_state(a: &AmplitudeMatrix, input: &StateVector) -> Result<CloneOutputs> {
    let dim = a.dim();
    if input.factors() != [dim] {
        return Err(QkdError::DimensionMismatch {
            expected: dim,
            found: input.dim(),
        });
    }
    let norm = input.norm_sqr();
    if (norm - 1.0).abs() > EXACT_TOL {
        return Err(QkdError::NotNormalized(norm));
    }
    let mut joint = vec![C64::new(0.0, 0.0); dim * dim * dim];
    for m in 0..dim {
        for n in 0..dim {
            let amp = a.get(m, n);
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let shifted = error_operator(m, n, dim)?.matrix().apply(input.amps());
            let bell = bell_state(m, (dim - n) % dim, dim)?;
            for (i, s) in shifted.iter().enumerate() {
                let w = amp * s;
                for (j, b) in bell.amps().iter().enumerate() {
                    joint[i * dim * dim + j] += w * b;
                }
            }
        }
    }
    let joint = StateVector::from_parts_unchecked(joint, vec![dim, dim, dim]);
    let rho_a = partial_trace(&joint, &[0])?;
    let rho_b = partial_trace(&joint, &[1])?;

    let mix_a = mixture_density(&a.weights(), input)?;
    let mix_b = mixture_density(&fourier_dual(a).weights(), input)?;
    let mixture_discrepancy = rho_a.max_abs_diff(&mix_a).max(rho_b.max_abs_diff(&mix_b));

    Ok(CloneOutputs {
        joint,
        rho_a,
        rho_b,
        mixture_discrepancy,
    })
}

/// `sum_{m,n} w_{m,n} |psi_{m,n}><psi_{m,n}|` with `psi_{m,n} = U_{m,n} psi`.
pub fn mixture_density(weights: &[f64], psi: &StateVector) -> Result<DensityMatrix> {
    let dim = psi.dim();
    if weights.len() != dim * dim {
        return Err(QkdError::DimensionMismatch {
            expected: dim * dim,
            found: weights.len(),
        });
    }
    let mut rho = CMatrix::zeros(dim);
    for m in 0..dim {
        for n in 0..dim {
            let w = weights[m * dim + n];
            if w == 0.0 {
                continue;
            }
            let v = error_operator(m, n, dim)?.matrix().apply(psi.amps());
            rho.add_scaled(&CMatrix::outer(&v, &v), w);
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(rho))
}

/// `<psi|rho|psi>`.
pub fn fidelity(rho: &DensityMatrix, psi: &StateVector) -> Result<f64> {
    rho.expectation(psi)
}

/// Fidelity predicted for a phase-covariant cloner: `|a_00|^2 + sum_{m>0} mean_n |a_{m,n}|^2`.
/// For the (v, x, y, z) family this is v^2 + y^2 + z^2.
pub fn covariant_fidelity_reference(a: &AmplitudeMatrix) -> f64 {
    let dim = a.dim();
    let rows: f64 = (1..dim)
        .map(|m| (0..dim).map(|n| a.get(m, n).norm_sqr()).sum::<f64>() / dim as f64)
        .sum();
    a.get(0, 0).norm_sqr() + rows
}

/// Largest deviation of Bob's fidelity on phi-basis states from the
/// covariant reference value, over `phi_grid` and all labels.
pub fn phase_covariance_check(a: &AmplitudeMatrix, phi_grid: &[f64]) -> Result<f64> {
    let dim = a.dim();
    let reference = covariant_fidelity_reference(a);
    let weights = a.weights();
    let mut worst = 0.0f64;
    for &phi in phi_grid {
        for l in 0..dim {
            let psi = phi_basis_state_dim(dim, phi, l)?;
            let f = fidelity(&mixture_density(&weights, &psi)?, &psi)?;
            worst = worst.max((f - reference).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloner::{phi_cloner_matrix, ClonerParams};
    use crate::qudit::{computational_state, phi_basis_state};

    #[test]
    fn identity_cloner_leaves_bob_untouched() {
        let a = phi_cloner_matrix(&ClonerParams::identity(), false).unwrap();
        for psi in [phi_basis_state(0.3, 1).unwrap(), computational_state(3, 2).unwrap()] {
            let out = clone_state(&a, &psi).unwrap();
            assert!(out.rho_a.max_abs_diff(&DensityMatrix::from_pure(&psi)) < 1e-12);
            assert!((fidelity(&out.rho_a, &psi).unwrap() - 1.0).abs() < 1e-12);
            assert!(out.mixture_discrepancy < 1e-12);
        }
    }

    #[test]
    fn rejects_unnormalized_or_wrong_dimension_input() {
        let a = phi_cloner_matrix(&ClonerParams::identity(), false).unwrap();
        let two = StateVector::single(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        assert!(matches!(clone_state(&a, &two), Err(QkdError::DimensionMismatch { .. })));
    }

    #[test]
    fn fidelity_of_maximally_mixed() {
        let rho = DensityMatrix::maximally_mixed(3);
        let psi = phi_basis_state(1.1, 2).unwrap();
        assert!((fidelity(&rho, &psi).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let wrong = computational_state(2, 0).unwrap();
        assert!(fidelity(&rho, &wrong).is_err());
    }

    #[test]
    fn identity_cloner_has_no_phase_dependence() {
        let a = phi_cloner_matrix(&ClonerParams::identity(), false).unwrap();
        let grid: Vec<f64> = (0..24).map(|i| i as f64 * 0.26).collect();
        assert!(phase_covariance_check(&a, &grid).unwrap() < 1e-14);
    }
}
