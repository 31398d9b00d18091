//! Protocol presets: which cloner family Eve uses and which bases the
//! protocol measures in.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::entropy::{mutual_information, LogBase};
use super::information::{bob_information, eve_information};
use crate::cloner::{AmplitudeMatrix, ClonerParams};
use crate::error::{QkdError, Result};
use crate::qudit::{
    bell_state, computational_basis, error_operator, optimal_bases, product_basis_amplitudes,
    qubit_optimal_bases, root_of_unity, BasisSpec, StateVector, C64, QUTRIT,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProtocolPreset {
    /// Entangled qutrits measured in the four optimal phi-bases.
    #[serde(rename = "3deb")]
    ThreeDeb,
    /// Twelve-state protocol (four mutually unbiased qutrit bases), universal cloner.
    #[serde(rename = "universal")]
    UniversalQutrit,
    /// Qutrit BB84 with two mutually unbiased bases.
    #[serde(rename = "2mub")]
    TwoMubQutrit,
    /// Ekert91 qubit protocol, phase-covariant qubit cloner.
    #[serde(rename = "qubit")]
    QubitPhaseCovariant,
}

impl ProtocolPreset {
    pub const ALL: [ProtocolPreset; 4] = [
        ProtocolPreset::ThreeDeb,
        ProtocolPreset::UniversalQutrit,
        ProtocolPreset::TwoMubQutrit,
        ProtocolPreset::QubitPhaseCovariant,
    ];

    pub fn cli_name(self) -> &'static str {
        match self {
            ProtocolPreset::ThreeDeb => "3deb",
            ProtocolPreset::UniversalQutrit => "universal",
            ProtocolPreset::TwoMubQutrit => "2mub",
            ProtocolPreset::QubitPhaseCovariant => "qubit",
        }
    }

    /// Name of the protocol the preset attacks, as used in the error-rate table.
    pub fn protocol_label(self) -> &'static str {
        match self {
            ProtocolPreset::ThreeDeb => "3DEB",
            ProtocolPreset::UniversalQutrit => "12-state",
            ProtocolPreset::TwoMubQutrit => "3D-BB84",
            ProtocolPreset::QubitPhaseCovariant => "Ekert91",
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            ProtocolPreset::QubitPhaseCovariant => 2,
            _ => QUTRIT,
        }
    }

    /// Published crossing fidelity used for comparison only.
    pub fn reported_crossing_fidelity(self) -> f64 {
        match self {
            ProtocolPreset::ThreeDeb => 0.7753,
            ProtocolPreset::UniversalQutrit => 0.7733,
            ProtocolPreset::TwoMubQutrit => 0.7887,
            ProtocolPreset::QubitPhaseCovariant => 0.8536,
        }
    }

    /// Published acceptable error rate used for comparison only.
    pub fn reported_error_rate(self) -> f64 {
        match self {
            ProtocolPreset::ThreeDeb => 0.2247,
            ProtocolPreset::UniversalQutrit => 0.2267,
            ProtocolPreset::TwoMubQutrit => 0.2113,
            ProtocolPreset::QubitPhaseCovariant => 0.1464,
        }
    }

    pub fn mask(self) -> ConstraintMask {
        match self {
            ProtocolPreset::ThreeDeb => ConstraintMask::new(3, vec![0, 1, 1, 2, 2, 2, 2, 2, 2], &["v", "x", "y"]),
            ProtocolPreset::UniversalQutrit => {
                ConstraintMask::new(3, vec![0, 1, 1, 1, 1, 1, 1, 1, 1], &["v", "y"])
            }
            ProtocolPreset::TwoMubQutrit => {
                ConstraintMask::new(3, vec![0, 1, 1, 2, 3, 3, 2, 3, 3], &["v", "x", "x_prime", "y"])
            }
            ProtocolPreset::QubitPhaseCovariant => ConstraintMask::new(2, vec![0, 1, 2, 2], &["v", "x", "y"]),
        }
    }

    /// Bases whose states the protocol encodes in.
    pub fn protocol_bases(self) -> Vec<Vec<StateVector>> {
        let from_specs = |specs: &[BasisSpec], dim: usize| -> Vec<Vec<StateVector>> {
            specs.iter().map(|b| b.states(dim).expect("valid basis")).collect()
        };
        match self {
            ProtocolPreset::ThreeDeb => from_specs(&optimal_bases(), QUTRIT),
            ProtocolPreset::UniversalQutrit => mutually_unbiased_qutrit_bases(),
            ProtocolPreset::TwoMubQutrit => vec![
                computational_basis(QUTRIT).expect("valid basis"),
                BasisSpec::new(0.0, false).states(QUTRIT).expect("valid basis"),
            ],
            ProtocolPreset::QubitPhaseCovariant => from_specs(&qubit_optimal_bases(), 2),
        }
    }

    /// Presets whose cloner lies in the (v, x, y, y) family use the
    /// closed-form information formulas.
    pub fn cloner_params(self, p: &[f64]) -> Option<ClonerParams> {
        match self {
            ProtocolPreset::ThreeDeb => Some(ClonerParams::symmetric(p[0], p[1], p[2])),
            ProtocolPreset::UniversalQutrit => Some(ClonerParams::symmetric(p[0], p[1], p[1])),
            _ => None,
        }
    }
}

impl fmt::Display for ProtocolPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for ProtocolPreset {
    type Err = QkdError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "3deb" => Ok(ProtocolPreset::ThreeDeb),
            "universal" | "12-state" => Ok(ProtocolPreset::UniversalQutrit),
            "2mub" | "3d-bb84" => Ok(ProtocolPreset::TwoMubQutrit),
            "qubit" | "ekert91" => Ok(ProtocolPreset::QubitPhaseCovariant),
            _ => Err(QkdError::UnknownPreset(s.to_string())),
        }
    }
}

/// The four mutually unbiased qutrit bases: computational and
/// `(1/sqrt 3) sum_k w^{l k + s k^2} |k>` for s = 0, 1, 2.
pub fn mutually_unbiased_qutrit_bases() -> Vec<Vec<StateVector>> {
    let mut out = vec![computational_basis(QUTRIT).expect("valid basis")];
    let s3 = 3f64.sqrt().recip();
    for s in 0..3 {
        let basis = (0..3)
            .map(|l| {
                let amps = (0..3).map(|k| root_of_unity(l * k + s * k * k, 3) * s3).collect();
                StateVector::normalized(amps, vec![3]).expect("nonzero")
            })
            .collect();
        out.push(basis);
    }
    out
}

/// Assignment of each amplitude slot `a_{m,n}` to a real free parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintMask {
    pub dim: usize,
    /// parameter index of slot (m, n), row-major
    pub slots: Vec<usize>,
    pub param_names: Vec<String>,
}

impl ConstraintMask {
    pub fn new(dim: usize, slots: Vec<usize>, names: &[&str]) -> Self {
        debug_assert_eq!(slots.len(), dim * dim);
        debug_assert!(slots.iter().all(|&s| s < names.len()));
        Self {
            dim,
            slots,
            param_names: names.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn n_params(&self) -> usize {
        self.param_names.len()
    }

    /// Number of slots tied to each parameter; `sum_i count_i p_i^2` is the norm.
    pub fn slot_counts(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.n_params()];
        for &s in &self.slots {
            c[s] += 1.0;
        }
        c
    }

    pub fn amplitudes(&self, p: &[f64]) -> Result<AmplitudeMatrix> {
        if p.len() != self.n_params() {
            return Err(QkdError::DimensionMismatch {
                expected: self.n_params(),
                found: p.len(),
            });
        }
        AmplitudeMatrix::from_real(self.dim, &self.slots.iter().map(|&s| p[s]).collect::<Vec<_>>())
    }
}

/// F_A, I_AB, I_AE at one parameter point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointEval {
    pub f_a: f64,
    pub i_ab: f64,
    pub i_ae: f64,
}

/// Per-basis outcome amplitudes, linear in the free parameters.
#[derive(Clone, Debug)]
struct BasisTable {
    /// `[param][k][outcome]`, outcome = (alpha, beta, gamma) row-major
    coef: Vec<Vec<Vec<C64>>>,
}

/// Precomputed evaluator for one preset.
///
/// Eve measures her clone in the protocol basis and the machine in the
/// conjugate basis; Bob measures his clone in the protocol basis.
#[derive(Clone, Debug)]
pub struct PresetModel {
    preset: ProtocolPreset,
    mask: ConstraintMask,
    fidelity_coeff: Vec<f64>,
    norm_coeff: Vec<f64>,
    tables: Vec<BasisTable>,
}

impl PresetModel {
    pub fn new(preset: ProtocolPreset) -> Result<Self> {
        let mask = preset.mask();
        let dim = mask.dim;
        let n_params = mask.n_params();
        let bases = preset.protocol_bases();
        let mut fidelity_coeff = vec![0.0; n_params];
        let mut tables = Vec::with_capacity(bases.len());
        let mut n_states = 0.0;
        for basis in &bases {
            let conj: Vec<StateVector> = basis.iter().map(|s| s.conj()).collect();
            let outcomes = dim * dim * dim;
            let mut coef = vec![vec![vec![C64::new(0.0, 0.0); outcomes]; dim]; n_params];
            for (k, psi) in basis.iter().enumerate() {
                n_states += 1.0;
                for m in 0..dim {
                    for n in 0..dim {
                        let param = mask.slots[m * dim + n];
                        let shifted = error_operator(m, n, dim)?.apply(psi)?;
                        fidelity_coeff[param] += psi.inner(&shifted).norm_sqr();
                        let branch = shifted.tensor(&bell_state(m, (dim - n) % dim, dim)?);
                        let amps = product_basis_amplitudes(&branch, &[basis, basis, &conj])?;
                        for (acc, a) in coef[param][k].iter_mut().zip(amps) {
                            *acc += a;
                        }
                    }
                }
            }
            tables.push(BasisTable { coef });
        }
        for f in &mut fidelity_coeff {
            *f /= n_states;
        }
        Ok(Self {
            preset,
            norm_coeff: mask.slot_counts(),
            mask,
            fidelity_coeff,
            tables,
        })
    }

    pub fn preset(&self) -> ProtocolPreset {
        self.preset
    }

    pub fn mask(&self) -> &ConstraintMask {
        &self.mask
    }

    pub fn dim(&self) -> usize {
        self.mask.dim
    }

    /// `F_A = sum_i fidelity_coeff_i p_i^2`.
    pub fn fidelity_coeff(&self) -> &[f64] {
        &self.fidelity_coeff
    }

    /// `norm = sum_i norm_coeff_i p_i^2`.
    pub fn norm_coeff(&self) -> &[f64] {
        &self.norm_coeff
    }

    pub fn fidelity(&self, p: &[f64]) -> f64 {
        p.iter().zip(&self.fidelity_coeff).map(|(x, c)| c * x * x).sum()
    }

    pub fn norm_sqr(&self, p: &[f64]) -> f64 {
        p.iter().zip(&self.norm_coeff).map(|(x, c)| c * x * x).sum()
    }

    /// Closed form for the (v, x, y, y) presets, outcome tables otherwise.
    pub fn evaluate(&self, p: &[f64], base: LogBase) -> Result<PointEval> {
        match self.preset.cloner_params(p) {
            Some(params) => {
                let f_a = self.fidelity(p);
                Ok(PointEval {
                    f_a,
                    i_ab: bob_information(f_a, base)?,
                    i_ae: eve_information(&params, base)?,
                })
            }
            None => self.evaluate_tables(p, base),
        }
    }

    /// Explicit route: averages over the protocol bases of `I(K;A)` and
    /// `I(K; B C)` computed from the outcome distribution.
    pub fn evaluate_tables(&self, p: &[f64], base: LogBase) -> Result<PointEval> {
        if p.len() != self.mask.n_params() {
            return Err(QkdError::DimensionMismatch {
                expected: self.mask.n_params(),
                found: p.len(),
            });
        }
        let dim = self.dim();
        let outcomes = dim * dim * dim;
        let eve_outcomes = dim * dim;
        let (mut f_a, mut i_ab, mut i_ae) = (0.0, 0.0, 0.0);
        let mut joint = vec![0.0; dim * outcomes];
        for table in &self.tables {
            for k in 0..dim {
                for o in 0..outcomes {
                    let amp: C64 = p.iter().zip(&table.coef).map(|(x, c)| c[k][o] * *x).sum();
                    joint[k * outcomes + o] = amp.norm_sqr() / dim as f64;
                }
            }
            let mut bob = vec![0.0; dim * dim];
            let mut eve = vec![0.0; dim * eve_outcomes];
            for k in 0..dim {
                for alpha in 0..dim {
                    for e in 0..eve_outcomes {
                        let pr = joint[k * outcomes + alpha * eve_outcomes + e];
                        bob[k * dim + alpha] += pr;
                        eve[k * eve_outcomes + e] += pr;
                    }
                }
                f_a += bob[k * dim + k];
            }
            i_ab += mutual_information(&bob, dim, dim, base)?;
            i_ae += mutual_information(&eve, dim, eve_outcomes, base)?;
        }
        let nb = self.tables.len() as f64;
        Ok(PointEval {
            f_a: f_a / nb,
            i_ab: i_ab / nb,
            i_ae: i_ae / nb,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_deb_coefficients_match_closed_form() {
        let model = PresetModel::new(ProtocolPreset::ThreeDeb).unwrap();
        let expect = [1.0, 0.0, 2.0];
        for (c, e) in model.fidelity_coeff().iter().zip(expect) {
            assert!((c - e).abs() < 1e-12, "{c} vs {e}");
        }
        assert_eq!(model.norm_coeff(), &[1.0, 2.0, 6.0]);
    }

    #[test]
    fn mub_bases_are_unbiased() {
        let bases = mutually_unbiased_qutrit_bases();
        for (i, a) in bases.iter().enumerate() {
            for (j, b) in bases.iter().enumerate() {
                for s in a {
                    for t in b {
                        let o = s.inner(t).norm_sqr();
                        if i != j {
                            assert!((o - 1.0 / 3.0).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn preset_names_parse() {
        for p in ProtocolPreset::ALL {
            assert_eq!(p.cli_name().parse::<ProtocolPreset>().unwrap(), p);
            assert_eq!(p.protocol_label().parse::<ProtocolPreset>().unwrap(), p);
        }
        assert!(matches!("bogus".parse::<ProtocolPreset>(), Err(QkdError::UnknownPreset(_))));
    }

    #[test]
    fn three_deb_mask_is_the_phase_covariant_family() {
        let mask = ProtocolPreset::ThreeDeb.mask();
        let p = ClonerParams::symmetric(0.8, 0.3, 0.1).normalized().unwrap();
        let a = mask.amplitudes(&[p.v, p.x, p.y]).unwrap();
        let b = crate::cloner::phi_cloner_matrix(&p, false).unwrap();
        assert_eq!(a, b);
    }
}
