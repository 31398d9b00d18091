use serde::{Deserialize, Serialize};

use super::config::{Channel, N_BASES};
use crate::cloner::{clone_state, phi_cloner_matrix};
use crate::error::{QkdError, Result};
use crate::qudit::{max_entangled, optimal_bases, product_basis_probabilities, QUTRIT};

const TABLE_TOL: f64 = 1e-12;

/// Outcome probabilities for one basis pair. Without Eve the outcomes are
/// `(a, b)`; under a cloning attack they are `(a, b, e_B, e_C)`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundTable {
    pub with_eve: bool,
    pub probs: Vec<f64>,
}

impl RoundTable {
    pub fn outcomes(&self) -> usize {
        self.probs.len()
    }

    /// Splits a flat outcome index into `(a, b, e_B, e_C)`.
    pub fn decode(&self, idx: usize) -> (usize, usize, Option<(usize, usize)>) {
        if self.with_eve {
            (idx / 27, (idx / 9) % 3, Some(((idx / 3) % 3, idx % 3)))
        } else {
            (idx / 3, idx % 3, None)
        }
    }

    /// `P(a, b)` marginal.
    pub fn alice_bob(&self) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for (idx, p) in self.probs.iter().enumerate() {
            let (a, b, _) = self.decode(idx);
            out[a][b] += p;
        }
        out
    }

    pub fn agreement(&self) -> f64 {
        let ab = self.alice_bob();
        (0..3).map(|k| ab[k][k]).sum()
    }
}

fn check_basis(index: usize) -> Result<()> {
    if index >= N_BASES {
        return Err(QkdError::IndexOutOfRange {
            what: "basis",
            index,
            bound: N_BASES,
        });
    }
    Ok(())
}

fn check_total(probs: &[f64]) -> Result<()> {
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > TABLE_TOL {
        return Err(QkdError::ConsistencyCheck {
            what: "round table normalization",
            deviation: (total - 1.0).abs(),
        });
    }
    Ok(())
}

/// Outcome table when Alice measures in optimal basis `alice` and Bob in the
/// conjugate of optimal basis `bob`.
///
/// Under a cloning attack Bob's qutrit collapses to the conjugate of Alice's
/// state; Eve measures her clone in Bob's basis and the machine in its
/// conjugate.
pub fn round_distribution(channel: &Channel, alice: usize, bob: usize) -> Result<RoundTable> {
    check_basis(alice)?;
    check_basis(bob)?;
    channel.validate()?;
    let bases = optimal_bases();
    let alice_states = bases[alice].states(QUTRIT)?;
    let bob_states = bases[bob].conjugate().states(QUTRIT)?;

    let table = match channel {
        Channel::Ideal | Channel::Depolarizing { .. } => {
            let mut probs =
                product_basis_probabilities(&max_entangled(QUTRIT)?, &[&alice_states, &bob_states])?;
            if let Channel::Depolarizing { visibility } = channel {
                let noise = (1.0 - visibility) / 9.0;
                probs.iter_mut().for_each(|p| *p = visibility * *p + noise);
            }
            RoundTable { with_eve: false, probs }
        }
        Channel::CloningAttack { params } => {
            // validate() bounds the norm error; rescale so the table sums to one
            let a = phi_cloner_matrix(params, true)?;
            let eve_states = bases[bob].states(QUTRIT)?;
            let mut probs = Vec::with_capacity(81);
            for state in &alice_states {
                let out = clone_state(&a, &state.conj())?;
                let p = product_basis_probabilities(&out.joint, &[&bob_states, &bob_states, &eve_states])?;
                probs.extend(p.into_iter().map(|x| x / 3.0));
            }
            RoundTable { with_eve: true, probs }
        }
    };
    check_total(&table.probs)?;
    Ok(table)
}

/// All sixteen basis-pair tables, indexed `[alice][bob]`.
pub fn all_round_tables(channel: &Channel) -> Result<Vec<Vec<RoundTable>>> {
    (0..N_BASES)
        .map(|i| (0..N_BASES).map(|j| round_distribution(channel, i, j)).collect())
        .collect()
}
