//! The cloning-machine attack: amplitude matrices, the explicit tripartite
//! output, reduced clone states and closed-form figures of merit.

mod amplitudes;
mod closed_form;
mod machine;

pub use amplitudes::{
    fourier_dual, phi_cloner_matrix, AmplitudeMatrix, ClonerParams, AMPLITUDE_NORM_TOL, PARAM_NORM_TOL,
};
pub use closed_form::{
    closed_form_report, eve_joint_distribution, eve_joint_distribution_state_level, tilde_coefficients,
    tilde_coefficients_from_amplitudes, EveJointTable, FidelityReport,
};
pub use machine::{
    clone_state, covariant_fidelity_reference, fidelity, mixture_density, phase_covariance_check, CloneOutputs,
};
