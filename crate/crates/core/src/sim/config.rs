use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::LogBase;
use crate::cloner::ClonerParams;
use crate::error::{QkdError, Result};

/// Number of bases each party chooses from.
pub const N_BASES: usize = 4;

const WEIGHT_TOL: f64 = 1e-12;

/// What happens to Bob's half of the entangled pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Channel {
    Ideal,
    /// `V rho + (1 - V) I/9`
    Depolarizing { visibility: f64 },
    /// Eve clones Bob's qutrit and measures after basis disclosure.
    CloningAttack { params: ClonerParams },
}

impl Channel {
    pub fn validate(&self) -> Result<()> {
        match self {
            Channel::Ideal => Ok(()),
            Channel::Depolarizing { visibility } => {
                if !(0.0..=1.0).contains(visibility) {
                    return Err(QkdError::InvalidConfig(format!("visibility {visibility} outside [0, 1]")));
                }
                Ok(())
            }
            Channel::CloningAttack { params } => {
                let n = params.norm_sqr();
                if !n.is_finite() || (n - 1.0).abs() > 1e-9 {
                    return Err(QkdError::AmplitudesNotNormalized(n));
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Channel::Ideal => write!(f, "ideal"),
            Channel::Depolarizing { visibility } => write!(f, "depolarizing:{visibility}"),
            Channel::CloningAttack { params } => {
                write!(f, "clone:{},{},{},{}", params.v, params.x, params.y, params.z)
            }
        }
    }
}

/// `ideal`, `depolarizing:V`, `clone:optimal` or `clone:v,x,y[,z]`.
/// Cloner parameters are rescaled to unit norm.
impl FromStr for Channel {
    type Err = QkdError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |msg: &str| QkdError::InvalidConfig(format!("channel '{s}': {msg}"));
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let channel = match (kind.to_ascii_lowercase().as_str(), arg) {
            ("ideal", None) => Channel::Ideal,
            ("depolarizing", Some(v)) => Channel::Depolarizing {
                visibility: v.trim().parse().map_err(|_| bad("visibility is not a number"))?,
            },
            ("clone", Some(a)) if a.trim().eq_ignore_ascii_case("optimal") => Channel::CloningAttack {
                params: ClonerParams::reported_optimum().normalized()?,
            },
            ("clone", Some(a)) => {
                let vals: Vec<f64> = a
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("parameters must be numbers"))?;
                let params = match vals[..] {
                    [v, x, y] => ClonerParams::symmetric(v, x, y),
                    [v, x, y, z] => ClonerParams::new(v, x, y, z),
                    _ => return Err(bad("expected v,x,y or v,x,y,z")),
                };
                if ![params.v, params.x, params.y, params.z].iter().all(|p| p.is_finite()) {
                    return Err(bad("parameters must be finite"));
                }
                Channel::CloningAttack {
                    params: params.normalized()?,
                }
            }
            _ => return Err(bad("expected ideal, depolarizing:V, clone:optimal or clone:v,x,y[,z]")),
        };
        channel.validate()?;
        Ok(channel)
    }
}

/// Which basis pairs are kept for the key.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "pairs", rename_all = "snake_case")]
pub enum SiftingRule {
    #[default]
    SameIndex,
    /// Accepted (alice, bob) basis index pairs.
    PairedIndices(Vec<(usize, usize)>),
}

impl SiftingRule {
    pub fn accepts(&self, i: usize, j: usize) -> bool {
        match self {
            SiftingRule::SameIndex => i == j,
            SiftingRule::PairedIndices(pairs) => pairs.contains(&(i, j)),
        }
    }
}

fn default_weights() -> [f64; N_BASES] {
    [0.25; N_BASES]
}

/// Session settings. Alice measures in the optimal phi-bases, Bob in their
/// conjugates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub rounds: u64,
    #[serde(default)]
    pub seed: u64,
    pub channel: Channel,
    #[serde(default = "default_weights")]
    pub alice_weights: [f64; N_BASES],
    #[serde(default = "default_weights")]
    pub bob_weights: [f64; N_BASES],
    #[serde(default)]
    pub sifting: SiftingRule,
    #[serde(default)]
    pub log_base: LogBase,
}

impl SimConfig {
    pub fn new(rounds: u64, seed: u64, channel: Channel) -> Self {
        Self {
            rounds,
            seed,
            channel,
            alice_weights: default_weights(),
            bob_weights: default_weights(),
            sifting: SiftingRule::SameIndex,
            log_base: LogBase::Two,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(QkdError::InvalidConfig("rounds must be at least 1".into()));
        }
        for (who, w) in [("alice", &self.alice_weights), ("bob", &self.bob_weights)] {
            if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(QkdError::InvalidConfig(format!("{who} basis weights must be nonnegative")));
            }
            let total: f64 = w.iter().sum();
            if (total - 1.0).abs() > WEIGHT_TOL {
                return Err(QkdError::InvalidConfig(format!("{who} basis weights sum to {total}")));
            }
        }
        if let SiftingRule::PairedIndices(pairs) = &self.sifting {
            if let Some(&(i, j)) = pairs.iter().find(|(i, j)| *i >= N_BASES || *j >= N_BASES) {
                return Err(QkdError::InvalidConfig(format!("sifting pair ({i}, {j}) out of range")));
            }
        }
        self.channel.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_syntax() {
        assert_eq!("ideal".parse::<Channel>().unwrap(), Channel::Ideal);
        assert_eq!(
            "depolarizing:0.5".parse::<Channel>().unwrap(),
            Channel::Depolarizing { visibility: 0.5 }
        );
        let Channel::CloningAttack { params } = "clone:optimal".parse::<Channel>().unwrap() else {
            panic!()
        };
        assert!((params.norm_sqr() - 1.0).abs() < 1e-15);
        let Channel::CloningAttack { params } = "clone:2,0,0".parse::<Channel>().unwrap() else {
            panic!()
        };
        assert_eq!(params, ClonerParams::identity());
        for bad in ["depolarizing:1.5", "clone:1,2", "clone:a,b,c", "noise", "ideal:3", "clone:0,0,0"] {
            assert!(bad.parse::<Channel>().is_err(), "{bad}");
        }
    }

    #[test]
    fn config_json_defaults() {
        let c: SimConfig = serde_json::from_str(r#"{"rounds": 10, "channel": {"kind": "ideal"}}"#).unwrap();
        assert_eq!(c, SimConfig::new(10, 0, Channel::Ideal));
        c.validate().unwrap();
    }

    #[test]
    fn config_validation() {
        let mut c = SimConfig::new(0, 1, Channel::Ideal);
        assert!(c.validate().is_err());
        c.rounds = 5;
        c.alice_weights = [0.5, 0.5, 0.5, -0.5];
        assert!(c.validate().is_err());
        c.alice_weights = [0.3, 0.3, 0.3, 0.3];
        assert!(c.validate().is_err());
        c.alice_weights = [1.0, 0.0, 0.0, 0.0];
        c.sifting = SiftingRule::PairedIndices(vec![(0, 4)]);
        assert!(c.validate().is_err());
    }
}
