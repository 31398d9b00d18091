//! Monte-Carlo simulation of protocol sessions: basis choice, sifting,
//! error-rate estimation and Eve's clone-and-measure data.

mod compare;
mod config;
mod distribution;
mod session;
mod survey;

pub use compare::{
    bootstrap_std_error, empirical_vs_analytic, plug_in_bias, Comparison, BOOTSTRAP_RESAMPLES, MIN_COMPARISON_ROUNDS,
};
pub use config::{Channel, SiftingRule, SimConfig, N_BASES};
pub use distribution::{all_round_tables, round_distribution, RoundTable};
pub use session::{run_session, write_round_records, RawCounts, SimResult};
pub use survey::{basis_correlation_survey, CorrelationSurvey, PERFECT_TOL, TRIT_PERMUTATIONS};
