//! Information-theoretic security analysis: entropies, Bob's and Eve's
//! information, the crossing search and protocol comparisons.

mod crossing;
mod entropy;
mod information;
mod preset;
mod search;
mod thresholds;

pub use crossing::{
    crossing_point, crossing_point_with, eve_optimal_at_fidelity, symmetric_point, symmetric_point_with, CrossingOptions, CrossingResult,
    SymmetricResult,
};
pub use entropy::{
    check_distribution, empirical_mutual_information, mutual_information, shannon_entropy, LogBase,
    DISTRIBUTION_TOL, PROBABILITY_FLOOR,
};
pub use information::{
    bob_information, bob_information_dim, ck_rate_bound, eve_information, eve_information_detail, info_report,
    EveInformation, InfoReport,
};
pub use preset::{mutually_unbiased_qutrit_bases, ConstraintMask, PointEval, PresetModel, ProtocolPreset};
pub use search::{
    hypersphere, maximize_on_surface, pattern_search, FixedFidelitySurface, SearchOptions, SurfaceOptimum,
};
pub use thresholds::{
    bell_visibility_threshold, error_rate_table, fidelity_from_visibility, qubit_threshold, thresholds,
    ErrorRateRow, Thresholds,
};
