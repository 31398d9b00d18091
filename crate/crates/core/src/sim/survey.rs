use serde::{Deserialize, Serialize};

use super::config::{Channel, SimConfig, N_BASES};
use super::distribution::round_distribution;
use super::session::run_session;
use crate::error::{QkdError, Result};

/// The six relabelings of a trit.
pub const TRIT_PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Agreement within which a basis pair counts as perfectly correlated.
pub const PERFECT_TOL: f64 = 1e-9;

/// Best relabeled agreement `max_pi P(b = pi(a) | i, j)` for every basis pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSurvey {
    pub exact: [[f64; N_BASES]; N_BASES],
    /// Maximizing relabeling, `b = pi[a]`.
    pub permutations: [[[usize; 3]; N_BASES]; N_BASES],
    pub empirical: [[Option<f64>; N_BASES]; N_BASES],
    /// Pairs whose exact agreement is 1.
    pub perfectly_correlated: Vec<(usize, usize)>,
    pub rounds: u64,
    pub seed: u64,
}

fn best_relabeling(ab: &[[f64; 3]; 3]) -> ([usize; 3], f64) {
    let mut best = (TRIT_PERMUTATIONS[0], f64::NEG_INFINITY);
    for pi in TRIT_PERMUTATIONS {
        let s: f64 = (0..3).map(|a| ab[a][pi[a]]).sum();
        if s > best.1 + 1e-15 {
            best = (pi, s);
        }
    }
    best
}

/// Exact and sampled agreement survey; requires the ideal channel.
pub fn basis_correlation_survey(config: &SimConfig) -> Result<CorrelationSurvey> {
    if config.channel != Channel::Ideal {
        return Err(QkdError::InvalidConfig("the correlation survey needs the ideal channel".into()));
    }
    let result = run_session(config)?;
    let mut exact = [[0.0; N_BASES]; N_BASES];
    let mut permutations = [[[0; 3]; N_BASES]; N_BASES];
    let mut empirical = [[None; N_BASES]; N_BASES];
    let mut perfectly_correlated = Vec::new();
    for i in 0..N_BASES {
        for j in 0..N_BASES {
            let table = round_distribution(&config.channel, i, j)?;
            let (pi, agree) = best_relabeling(&table.alice_bob());
            exact[i][j] = agree;
            permutations[i][j] = pi;
            if agree >= 1.0 - PERFECT_TOL {
                perfectly_correlated.push((i, j));
            }
            let total = result.raw_counts.pair_total(i, j);
            if total > 0 {
                let counts = result.raw_counts.alice_bob(i, j);
                let freq = counts.map(|row| row.map(|c| c as f64 / total as f64));
                empirical[i][j] = Some(best_relabeling(&freq).1);
            }
        }
    }
    Ok(CorrelationSurvey {
        exact,
        permutations,
        empirical,
        perfectly_correlated,
        rounds: config.rounds,
        seed: config.seed,
    })
}
