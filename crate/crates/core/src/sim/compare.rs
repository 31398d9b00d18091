use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{Channel, SimConfig};
use super::session::{run_session, SimResult};
use crate::analysis::{empirical_mutual_information, eve_information, LogBase};
use crate::cloner::closed_form_report;
use crate::error::{QkdError, Result};

/// Smallest session accepted by [`empirical_vs_analytic`].
pub const MIN_COMPARISON_ROUNDS: u64 = 100_000;

pub const BOOTSTRAP_RESAMPLES: usize = 50;

/// Empirical statistics of an attacked session next to their analytic values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub sifted_count: u64,
    pub empirical_qber: f64,
    pub analytic_qber: f64,
    pub qber_std_error: f64,
    #[serde(rename = "empirical_I_AE")]
    pub empirical_i_ae: f64,
    #[serde(rename = "analytic_I_AE")]
    pub analytic_i_ae: f64,
    /// Bootstrap standard error of the empirical I_AE.
    #[serde(rename = "I_AE_std_error")]
    pub i_ae_std_error: f64,
    /// Plug-in bias estimate `(K - 1) / (2 n ln base)`, K = 27 cells.
    #[serde(rename = "I_AE_bias_bound")]
    pub i_ae_bias_bound: f64,
    pub qber_within_3se: bool,
    #[serde(rename = "I_AE_within_3se")]
    pub i_ae_within_3se: bool,
    pub log_base: LogBase,
}

/// Leading-order bias of the plug-in mutual information for `cells`
/// nonempty joint cells and `n` samples.
pub fn plug_in_bias(cells: usize, n: u64, base: LogBase) -> f64 {
    (cells as f64 - 1.0) / (2.0 * n as f64 * base.ln_base())
}

/// Standard deviation of the plug-in estimate over multinomial resamples
/// of the `rows x cols` count table.
pub fn bootstrap_std_error(counts: &[u64], rows: usize, cols: usize, base: LogBase, resamples: usize, seed: u64) -> Result<f64> {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(QkdError::NoSiftedRounds);
    }
    let mut cdf = Vec::with_capacity(counts.len());
    let mut acc = 0;
    for c in counts {
        acc += c;
        cdf.push(acc);
    }
    let mut values = Vec::with_capacity(resamples);
    for b in 0..resamples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let mut sample = vec![0u64; counts.len()];
        for _ in 0..n {
            let u = rng.random_range(0..n);
            sample[cdf.partition_point(|&c| c <= u)] += 1;
        }
        values.push(empirical_mutual_information(&sample, rows, cols, base)?);
    }
    let mean = values.iter().sum::<f64>() / resamples as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (resamples as f64 - 1.0);
    Ok(var.sqrt())
}

/// Runs the session and compares qber and Eve's information with
/// `1 - F_A` and the closed-form `I_AE`.
pub fn empirical_vs_analytic(config: &SimConfig) -> Result<(SimResult, Comparison)> {
    let Channel::CloningAttack { params } = config.channel else {
        return Err(QkdError::InvalidConfig("comparison needs a cloning attack".into()));
    };
    if config.rounds < MIN_COMPARISON_ROUNDS {
        return Err(QkdError::InsufficientRounds {
            got: config.rounds,
            need: MIN_COMPARISON_ROUNDS,
        });
    }
    let result = run_session(config)?;
    let (Some(qber), Some(qber_se), Some(i_ae)) = (result.qber, result.qber_std_error, result.empirical_i_ae) else {
        return Err(QkdError::NoSiftedRounds);
    };
    let analytic_qber = 1.0 - closed_form_report(&params).f_a;
    let analytic_i_ae = eve_information(&params, config.log_base)?;
    let counts = result
        .raw_counts
        .sifted_eve_counts(&config.sifting)
        .expect("attack sessions record Eve's outcomes");
    let i_ae_std_error = bootstrap_std_error(
        &counts,
        3,
        9,
        config.log_base,
        BOOTSTRAP_RESAMPLES,
        config.seed ^ 0xb007_57a9,
    )?;
    let qber_tol = 3.0 * qber_se.max(f64::EPSILON);
    let cmp = Comparison {
        sifted_count: result.sifted_count,
        empirical_qber: qber,
        analytic_qber,
        qber_std_error: qber_se,
        empirical_i_ae: i_ae,
        analytic_i_ae,
        i_ae_std_error,
        i_ae_bias_bound: plug_in_bias(27, result.sifted_count, config.log_base),
        qber_within_3se: (qber - analytic_qber).abs() <= qber_tol,
        i_ae_within_3se: (i_ae - analytic_i_ae).abs() <= 3.0 * i_ae_std_error,
        log_base: config.log_base,
    };
    Ok((result, cmp))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparison_needs_enough_rounds() {
        let c = SimConfig::new(10, 1, "clone:optimal".parse().unwrap());
        assert!(matches!(empirical_vs_analytic(&c), Err(QkdError::InsufficientRounds { .. })));
        let c = SimConfig::new(MIN_COMPARISON_ROUNDS, 1, Channel::Ideal);
        assert!(matches!(empirical_vs_analytic(&c), Err(QkdError::InvalidConfig(_))));
    }

    #[test]
    fn bootstrap_of_a_point_mass_is_zero() {
        let mut counts = vec![0; 9];
        counts[4] = 100;
        let se = bootstrap_std_error(&counts, 3, 3, LogBase::Two, 10, 1).unwrap();
        assert_eq!(se, 0.0);
    }
}
