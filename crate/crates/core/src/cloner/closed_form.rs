//! Closed-form fidelities, the rotated-basis coefficients and Eve's joint
//! outcome table for the (v, x, y, z) cloner family.

use serde::{Deserialize, Serialize};

use super::amplitudes::{fourier_dual, phi_cloner_matrix, AmplitudeMatrix, ClonerParams, AMPLITUDE_NORM_TOL};
use super::machine::{clone_state, fidelity, mixture_density};
use crate::error::{QkdError, Result};
use crate::qudit::{optimal_bases, phi_basis_state, product_basis_probabilities, root_of_unity, BasisSpec, C64, QUTRIT};

/// Fidelities and disturbances of both clones on phi-basis states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub f_a: f64,
    pub d_a1: f64,
    pub d_a2: f64,
    pub f_b: f64,
    pub d_b1: f64,
    pub d_b2: f64,
    /// False when y != z: the B values then come from explicit reduced states
    /// averaged over the four optimal bases.
    pub b_closed_form: bool,
    /// `F_A + D_A1 + D_A2 - 1`
    pub normalization_residual: f64,
}

pub fn closed_form_report(params: &ClonerParams) -> FidelityReport {
    let ClonerParams { v, x, y, z } = *params;
    let f_a = v * v + y * y + z * z;
    let d_a = x * x + y * y + z * z;
    let (f_b, d_b1, d_b2, b_closed_form) = if params.is_symmetric(1e-10) {
        let f_b = (v * v + 2.0 * x * x + 12.0 * y * y + 8.0 * x * y + 4.0 * v * y) / 3.0;
        let d_b = (v * v + 2.0 * x * x + 3.0 * y * y - 4.0 * x * y - 2.0 * v * y) / 3.0;
        (f_b, d_b, d_b, true)
    } else {
        let (f, d1, d2) = state_level_b_fidelities(params);
        (f, d1, d2, false)
    };
    FidelityReport {
        f_a,
        d_a1: d_a,
        d_a2: d_a,
        f_b,
        d_b1,
        d_b2,
        b_closed_form,
        normalization_residual: f_a + 2.0 * d_a - 1.0,
    }
}

fn family_matrix_unscaled(params: &ClonerParams) -> AmplitudeMatrix {
    let ClonerParams { v, x, y, z } = *params;
    let entries = [v, x, x, y, y, y, z, z, z].map(|r| C64::new(r, 0.0)).to_vec();
    AmplitudeMatrix::from_parts_unchecked(3, entries)
}

/// (F_B, D_B1, D_B2) averaged over the optimal bases and their labels.
fn state_level_b_fidelities(params: &ClonerParams) -> (f64, f64, f64) {
    let q = fourier_dual(&family_matrix_unscaled(params)).weights();
    let (mut f, mut d1, mut d2, mut count) = (0.0, 0.0, 0.0, 0.0);
    for basis in optimal_bases() {
        let states = basis.states(QUTRIT).expect("qutrit basis");
        for l in 0..QUTRIT {
            let rho = mixture_density(&q, &states[l]).expect("dimensions match");
            f += fidelity(&rho, &states[l]).expect("dimensions match");
            d1 += fidelity(&rho, &states[(l + 1) % 3]).expect("dimensions match");
            d2 += fidelity(&rho, &states[(l + 2) % 3]).expect("dimensions match");
            count += 1.0;
        }
    }
    (f / count, d1 / count, d2 / count)
}

/// Rotated-basis coefficients
/// `c~_{m,j} = 3y delta_{j0} + (v-y) delta_{m0} + (x-y)(delta_{m1} + delta_{m2})`,
/// checked against the Fourier-sum definition.
pub fn tilde_coefficients(params: &ClonerParams) -> Result<[[f64; 3]; 3]> {
    params.require_symmetric()?;
    let ClonerParams { v, x, y, .. } = *params;
    let mut c = [[0.0; 3]; 3];
    for (m, row) in c.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let dj0 = if j == 0 { 1.0 } else { 0.0 };
            *cell = 3.0 * y * dj0 + if m == 0 { v - y } else { x - y };
        }
    }
    let fourier = tilde_coefficients_from_amplitudes(&family_matrix_unscaled(params))?;
    let deviation = c
        .iter()
        .flatten()
        .zip(fourier.iter().flatten())
        .map(|(a, b)| (C64::new(*a, 0.0) - b).norm())
        .fold(0.0, f64::max);
    if deviation > 1e-12 {
        return Err(QkdError::ConsistencyCheck {
            what: "tilde coefficients",
            deviation,
        });
    }
    Ok(c)
}

/// `c~_{m,j} = sum_n a~_{m,n} exp(2 pi i j n / 3)` with `a~_{n,-m} = a_{m,n}`.
pub fn tilde_coefficients_from_amplitudes(a: &AmplitudeMatrix) -> Result<[[C64; 3]; 3]> {
    if a.dim() != QUTRIT {
        return Err(QkdError::DimensionMismatch {
            expected: QUTRIT,
            found: a.dim(),
        });
    }
    // a~_{m,n} = a_{-n mod 3, m}
    let tilde = |m: usize, n: usize| a.get((3 - n) % 3, m);
    let mut c = [[C64::new(0.0, 0.0); 3]; 3];
    for (m, row) in c.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|n| tilde(m, n) * root_of_unity(j * n, 3)).sum();
        }
    }
    Ok(c)
}

/// Joint outcome probabilities `P(A = alpha, B = beta, C = gamma)` for input
/// `|k>` of a phi-basis, with A and B measured in that basis and C in its
/// conjugate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EveJointTable {
    pub k: usize,
    /// indexed `[alpha][beta][gamma]`
    pub probs: [[[f64; 3]; 3]; 3],
}

impl EveJointTable {
    pub fn get(&self, alpha: usize, beta: usize, gamma: usize) -> f64 {
        self.probs[alpha][beta][gamma]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().flatten().flatten().sum()
    }

    /// Distribution of Bob's outcome.
    pub fn bob_marginal(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (alpha, plane) in self.probs.iter().enumerate() {
            out[alpha] = plane.iter().flatten().sum();
        }
        out
    }

    /// Distribution of `gamma - beta mod 3`, Eve's reading of Bob's error.
    pub fn eve_error_marginal(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for plane in &self.probs {
            for (beta, row) in plane.iter().enumerate() {
                for (gamma, p) in row.iter().enumerate() {
                    out[(gamma + 3 - beta) % 3] += p;
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &[[[f64; 3]; 3]; 3]) -> f64 {
        self.probs
            .iter()
            .flatten()
            .flatten()
            .zip(other.iter().flatten().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `P(alpha, beta, gamma) = |c~_{m', k - beta}|^2 / 3` when
/// `alpha = k + m'` and `gamma = beta + m'` (mod 3), zero otherwise.
/// Cross-checked against the explicit cloner output at phi = 0.
pub fn eve_joint_distribution(params: &ClonerParams, k: usize) -> Result<EveJointTable> {
    params.require_symmetric()?;
    if k >= 3 {
        return Err(QkdError::IndexOutOfRange {
            what: "input label",
            index: k,
            bound: 3,
        });
    }
    let norm = params.norm_sqr();
    if (norm - 1.0).abs() > AMPLITUDE_NORM_TOL {
        return Err(QkdError::AmplitudesNotNormalized(norm));
    }
    let c = tilde_coefficients(params)?;
    let mut probs = [[[0.0; 3]; 3]; 3];
    for m in 0..3 {
        let alpha = (k + m) % 3;
        for beta in 0..3 {
            let gamma = (beta + m) % 3;
            let j = (k + 3 - beta) % 3;
            probs[alpha][beta][gamma] = c[m][j] * c[m][j] / 3.0;
        }
    }
    let table = EveJointTable { k, probs };

    let total = table.total();
    if (total - 1.0).abs() > 1e-12 {
        return Err(QkdError::ConsistencyCheck {
            what: "eve joint table normalization",
            deviation: (total - 1.0).abs(),
        });
    }
    let a = phi_cloner_matrix(params, false)?;
    let explicit = eve_joint_distribution_state_level(&a, 0.0, k)?;
    let deviation = table.max_abs_diff(&explicit);
    if deviation > 1e-12 {
        return Err(QkdError::ConsistencyCheck {
            what: "eve joint table vs explicit cloner output",
            deviation,
        });
    }
    Ok(table)
}

/// Same table from the explicit tripartite state, measured in the
/// (phi, phi, phi*) product basis.
pub fn eve_joint_distribution_state_level(a: &AmplitudeMatrix, phi: f64, k: usize) -> Result<[[[f64; 3]; 3]; 3]> {
    if a.dim() != QUTRIT {
        return Err(QkdError::DimensionMismatch {
            expected: QUTRIT,
            found: a.dim(),
        });
    }
    let basis = BasisSpec::new(phi, false).states(QUTRIT)?;
    let conj = BasisSpec::new(phi, true).states(QUTRIT)?;
    let input = phi_basis_state(phi, k)?;
    let out = clone_state(a, &input)?;
    let p = product_basis_probabilities(&out.joint, &[&basis, &basis, &conj])?;
    let mut probs = [[[0.0; 3]; 3]; 3];
    for (idx, value) in p.into_iter().enumerate() {
        probs[idx / 9][(idx / 3) % 3][idx % 3] = value;
    }
    Ok(probs)
}
