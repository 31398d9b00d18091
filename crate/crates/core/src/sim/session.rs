use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{SimConfig, SiftingRule, N_BASES};
use super::distribution::{all_round_tables, RoundTable};
use crate::analysis::{empirical_mutual_information, LogBase, PROBABILITY_FLOOR};
use crate::error::Result;

/// Per-pair outcome histograms of a session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawCounts {
    /// Outcomes carry Eve's `(e_B, e_C)` as well as `(a, b)`.
    pub with_eve: bool,
    /// `[alice basis][bob basis][outcome]`, outcome laid out as in the round table.
    pub outcome_counts: Vec<Vec<Vec<u64>>>,
}

impl RawCounts {
    fn outcomes(&self) -> usize {
        if self.with_eve {
            81
        } else {
            9
        }
    }

    fn split(&self, idx: usize) -> (usize, usize) {
        let per_a = self.outcomes() / 3;
        (idx / per_a, (idx % per_a) / (per_a / 3))
    }

    pub fn pair_total(&self, i: usize, j: usize) -> u64 {
        self.outcome_counts[i][j].iter().sum()
    }

    /// `[a][b]` counts for one basis pair.
    pub fn alice_bob(&self, i: usize, j: usize) -> [[u64; 3]; 3] {
        let mut out = [[0; 3]; 3];
        for (idx, c) in self.outcome_counts[i][j].iter().enumerate() {
            let (a, b) = self.split(idx);
            out[a][b] += c;
        }
        out
    }

    /// Sifted `(rounds, errors)` under a rule.
    pub fn sifted_errors(&self, rule: &SiftingRule) -> (u64, u64) {
        let (mut n, mut e) = (0, 0);
        for i in 0..N_BASES {
            for j in 0..N_BASES {
                if !rule.accepts(i, j) {
                    continue;
                }
                let ab = self.alice_bob(i, j);
                for (a, row) in ab.iter().enumerate() {
                    for (b, c) in row.iter().enumerate() {
                        n += c;
                        if a != b {
                            e += c;
                        }
                    }
                }
            }
        }
        (n, e)
    }

    /// Sifted counts of Alice's trit against Eve's (guess, m), laid out
    /// `[a][guess * 3 + m]` with guess = e_B and m = e_C - e_B mod 3.
    pub fn sifted_eve_counts(&self, rule: &SiftingRule) -> Option<Vec<u64>> {
        if !self.with_eve {
            return None;
        }
        let mut out = vec![0; 27];
        for i in 0..N_BASES {
            for j in 0..N_BASES {
                if !rule.accepts(i, j) {
                    continue;
                }
                for (idx, c) in self.outcome_counts[i][j].iter().enumerate() {
                    let a = idx / 27;
                    let (eb, ec) = ((idx / 3) % 3, idx % 3);
                    let m = (ec + 3 - eb) % 3;
                    out[a * 9 + eb * 3 + m] += c;
                }
            }
        }
        Some(out)
    }
}

/// Summary of one simulated session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub rounds: u64,
    pub seed: u64,
    pub sifted_count: u64,
    pub sifted_fraction: f64,
    /// Trit error rate on sifted rounds; `None` when nothing was sifted.
    pub qber: Option<f64>,
    /// Binomial standard error of `qber`.
    pub qber_std_error: Option<f64>,
    /// `P(a = b | i, j)` over all rounds with that basis pair.
    pub basis_correlation_matrix: [[Option<f64>; N_BASES]; N_BASES],
    /// Plug-in `I(a; e_B, m)` on sifted rounds (cloning attack only).
    #[serde(rename = "empirical_I_AE")]
    pub empirical_i_ae: Option<f64>,
    pub log_base: LogBase,
    pub raw_counts: RawCounts,
}

/// Inverse-CDF sampler over one probability table.
#[derive(Clone, Debug)]
struct Cdf(Vec<f64>);

impl Cdf {
    fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        Cdf(probs
            .iter()
            .map(|&p| {
                if p > PROBABILITY_FLOOR {
                    acc += p;
                }
                acc
            })
            .collect())
    }

    fn sample(&self, u: f64) -> usize {
        let total = *self.0.last().expect("nonempty table");
        let idx = self.0.partition_point(|&c| c <= u * total);
        if idx < self.0.len() {
            return idx;
        }
        // u * total rounded up to the total: take the last entry with mass
        self.0.iter().position(|&c| c >= total).unwrap_or(idx - 1)
    }
}

struct Sampler {
    seed: u64,
    alice: Cdf,
    bob: Cdf,
    tables: Vec<Vec<Cdf>>,
}

impl Sampler {
    fn new(config: &SimConfig, tables: &[Vec<RoundTable>]) -> Self {
        Self {
            seed: config.seed,
            alice: Cdf::new(&config.alice_weights),
            bob: Cdf::new(&config.bob_weights),
            tables: tables.iter().map(|row| row.iter().map(|t| Cdf::new(&t.probs)).collect()).collect(),
        }
    }

    /// `(alice basis, bob basis, outcome)` for one round, drawn from the
    /// round's own stream so results do not depend on scheduling.
    fn round(&self, round: u64) -> (usize, usize, usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(round);
        let i = self.alice.sample(rng.random());
        let j = self.bob.sample(rng.random());
        let o = self.tables[i][j].sample(rng.random());
        (i, j, o)
    }
}

fn count_rounds(config: &SimConfig, tables: &[Vec<RoundTable>]) -> Vec<Vec<Vec<u64>>> {
    let sampler = Sampler::new(config, tables);
    let outcomes = tables[0][0].outcomes();
    let empty = || vec![0u64; N_BASES * N_BASES * outcomes];
    let flat = (0..config.rounds)
        .into_par_iter()
        .fold(empty, |mut acc, r| {
            let (i, j, o) = sampler.round(r);
            acc[(i * N_BASES + j) * outcomes + o] += 1;
            acc
        })
        .reduce(empty, |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        });
    flat.chunks(N_BASES * outcomes)
        .map(|row| row.chunks(outcomes).map(|c| c.to_vec()).collect())
        .collect()
}

/// Runs a session. Deterministic in the seed and independent of the
/// number of threads.
pub fn run_session(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let tables = all_round_tables(&config.channel)?;
    let raw_counts = RawCounts {
        with_eve: tables[0][0].with_eve,
        outcome_counts: count_rounds(config, &tables),
    };
    summarize(config, raw_counts)
}

pub(crate) fn summarize(config: &SimConfig, raw_counts: RawCounts) -> Result<SimResult> {
    let (sifted, errors) = raw_counts.sifted_errors(&config.sifting);
    let (qber, qber_std_error) = if sifted > 0 {
        let q = errors as f64 / sifted as f64;
        (Some(q), Some((q * (1.0 - q) / sifted as f64).sqrt()))
    } else {
        (None, None)
    };
    let mut basis_correlation_matrix = [[None; N_BASES]; N_BASES];
    for (i, row) in basis_correlation_matrix.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let total = raw_counts.pair_total(i, j);
            if total > 0 {
                let ab = raw_counts.alice_bob(i, j);
                let agree: u64 = (0..3).map(|k| ab[k][k]).sum();
                *cell = Some(agree as f64 / total as f64);
            }
        }
    }
    let empirical_i_ae = match raw_counts.sifted_eve_counts(&config.sifting) {
        Some(c) if sifted > 0 => Some(empirical_mutual_information(&c, 3, 9, config.log_base)?),
        _ => None,
    };
    Ok(SimResult {
        rounds: config.rounds,
        seed: config.seed,
        sifted_count: sifted,
        sifted_fraction: sifted as f64 / config.rounds as f64,
        qber,
        qber_std_error,
        basis_correlation_matrix,
        empirical_i_ae,
        log_base: config.log_base,
        raw_counts,
    })
}

/// Writes `round,basis_i,basis_j,a,b` for every round, reproducing the
/// draws of [`run_session`].
pub fn write_round_records<W: Write>(config: &SimConfig, out: W) -> Result<()> {
    config.validate()?;
    let tables = all_round_tables(&config.channel)?;
    let sampler = Sampler::new(config, &tables);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["round", "basis_i", "basis_j", "a", "b"])?;
    for r in 0..config.rounds {
        let (i, j, o) = sampler.round(r);
        let (a, b, _) = tables[i][j].decode(o);
        w.serialize((r, i, j, a, b))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Channel;

    #[test]
    fn cdf_never_picks_zero_mass() {
        let c = Cdf::new(&[0.0, 0.5, 0.0, 0.5, 0.0]);
        assert_eq!(c.sample(0.0), 1);
        assert_eq!(c.sample(0.4999), 1);
        assert_eq!(c.sample(0.5), 3);
        assert_eq!(c.sample(0.999_999_999_999), 3);
        assert_eq!(c.sample(1.0), 3);
    }

    #[test]
    fn ideal_session_has_no_errors() {
        let r = run_session(&SimConfig::new(20_000, 3, Channel::Ideal)).unwrap();
        assert_eq!(r.qber, Some(0.0));
        assert!(r.empirical_i_ae.is_none());
    }

    #[test]
    fn qber_matches_histograms() {
        let c = SimConfig::new(5_000, 11, Channel::Depolarizing { visibility: 0.5 });
        let r = run_session(&c).unwrap();
        let (n, e) = r.raw_counts.sifted_errors(&c.sifting);
        assert_eq!(n, r.sifted_count);
        assert_eq!(r.qber.unwrap(), e as f64 / n as f64);
        let total: u64 = (0..N_BASES)
            .flat_map(|i| (0..N_BASES).map(move |j| (i, j)))
            .map(|(i, j)| r.raw_counts.pair_total(i, j))
            .sum();
        assert_eq!(total, 5_000);
    }

    #[test]
    fn records_agree_with_counts() {
        let c = SimConfig::new(300, 5, Channel::Depolarizing { visibility: 0.3 });
        let mut buf = Vec::new();
        write_round_records(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let r = run_session(&c).unwrap();
        let mut ab = vec![[[0u64; 3]; 3]; 16];
        for line in text.lines().skip(1) {
            let f: Vec<usize> = line.split(',').map(|x| x.parse().unwrap()).collect();
            ab[f[1] * 4 + f[2]][f[3]][f[4]] += 1;
        }
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(ab[i * 4 + j], r.raw_counts.alice_bob(i, j));
            }
        }
    }
}
