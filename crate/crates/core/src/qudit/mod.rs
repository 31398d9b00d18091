//! Small-dimension complex linear algebra and the qudit state constructions
//! used throughout the crate.

mod bases;
mod linalg;
mod state;
mod trace;

pub use bases::{
    bell_state, computational_basis, computational_state, conjugate_phi_basis_state, error_operator,
    max_entangled, optimal_bases, phi_basis_state, phi_basis_state_dim, qubit_optimal_bases,
    tilde_bell_state, BasisSpec, QUTRIT,
};
pub(crate) use bases::root_of_unity;
pub use linalg::{CMatrix, C64};
pub(crate) use linalg::cis;
pub use state::{DensityMatrix, Operator, StateVector, EXACT_TOL};
pub use trace::{partial_trace, partial_trace_mixed, product_basis_amplitudes, product_basis_probabilities};
