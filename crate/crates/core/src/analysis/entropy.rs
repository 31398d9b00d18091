use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QkdError, Result};

/// Entries below this are treated as exactly zero.
pub const PROBABILITY_FLOOR: f64 = 1e-15;

/// Tolerance on `sum p = 1` for entropy inputs.
pub const DISTRIBUTION_TOL: f64 = 1e-9;

/// Logarithm base for information quantities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogBase {
    /// bits
    #[default]
    #[serde(rename = "2")]
    Two,
    /// trits
    #[serde(rename = "3")]
    Three,
    /// nats
    #[serde(rename = "e")]
    E,
}

impl LogBase {
    pub const ALL: [LogBase; 3] = [LogBase::Two, LogBase::Three, LogBase::E];

    pub fn ln_base(self) -> f64 {
        match self {
            LogBase::Two => std::f64::consts::LN_2,
            LogBase::Three => 3f64.ln(),
            LogBase::E => 1.0,
        }
    }

    pub fn log(self, x: f64) -> f64 {
        x.ln() / self.ln_base()
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Two => "2",
            LogBase::Three => "3",
            LogBase::E => "e",
        })
    }
}

impl FromStr for LogBase {
    type Err = QkdError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "2" => Ok(LogBase::Two),
            "3" => Ok(LogBase::Three),
            "e" | "E" => Ok(LogBase::E),
            other => Err(QkdError::InvalidConfig(format!("unknown log base '{other}' (use 2, 3 or e)"))),
        }
    }
}

/// Checks nonnegativity and normalization within [`DISTRIBUTION_TOL`].
pub fn check_distribution(p: &[f64]) -> Result<()> {
    if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < -PROBABILITY_FLOOR) {
        return Err(QkdError::InvalidDistribution(format!("entry {bad} is negative or not finite")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > DISTRIBUTION_TOL {
        return Err(QkdError::InvalidDistribution(format!("entries sum to {total}")));
    }
    Ok(())
}

/// `-sum p_i log p_i`; zero entries contribute nothing.
pub fn shannon_entropy(p: &[f64], base: LogBase) -> Result<f64> {
    check_distribution(p)?;
    Ok(entropy_unchecked(p, base))
}

pub(crate) fn entropy_unchecked(p: &[f64], base: LogBase) -> f64 {
    let nats: f64 = p
        .iter()
        .filter(|&&x| x > PROBABILITY_FLOOR)
        .map(|&x| -x * x.ln())
        .sum();
    nats / base.ln_base()
}

/// Mutual information of a joint table laid out `rows x cols` (row-major),
/// computed as `H(row) + H(col) - H(row, col)`.
pub fn mutual_information(joint: &[f64], rows: usize, cols: usize, base: LogBase) -> Result<f64> {
    if joint.len() != rows * cols {
        return Err(QkdError::DimensionMismatch {
            expected: rows * cols,
            found: joint.len(),
        });
    }
    check_distribution(joint)?;
    let mut pr = vec![0.0; rows];
    let mut pc = vec![0.0; cols];
    for r in 0..rows {
        for c in 0..cols {
            let p = joint[r * cols + c];
            pr[r] += p;
            pc[c] += p;
        }
    }
    let mi = entropy_unchecked(&pr, base) + entropy_unchecked(&pc, base) - entropy_unchecked(joint, base);
    Ok(mi.max(0.0))
}

/// Plug-in mutual information from integer counts.
pub fn empirical_mutual_information(counts: &[u64], rows: usize, cols: usize, base: LogBase) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(QkdError::InvalidDistribution("no samples".into()));
    }
    let p: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    mutual_information(&p, rows, cols, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_trit_is_one_trit() {
        let h = shannon_entropy(&[1.0 / 3.0; 3], LogBase::Three).unwrap();
        assert!((h - 1.0).abs() < 1e-15);
    }

    #[test]
    fn point_mass_has_zero_entropy() {
        assert_eq!(shannon_entropy(&[1.0, 0.0, 0.0], LogBase::Two).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_vectors() {
        assert!(shannon_entropy(&[0.5, 0.6], LogBase::Two).is_err());
        assert!(shannon_entropy(&[1.2, -0.2], LogBase::Two).is_err());
        assert!(shannon_entropy(&[f64::NAN, 1.0], LogBase::Two).is_err());
    }

    #[test]
    fn log_base_parsing() {
        assert_eq!("e".parse::<LogBase>().unwrap(), LogBase::E);
        assert_eq!("3".parse::<LogBase>().unwrap(), LogBase::Three);
        assert!("10".parse::<LogBase>().is_err());
        assert_eq!(serde_json::to_string(&LogBase::Two).unwrap(), "\"2\"");
    }

    #[test]
    fn independent_table_has_zero_information() {
        let p = [0.1, 0.2, 0.7];
        let q = [0.5, 0.5];
        let joint: Vec<f64> = p.iter().flat_map(|a| q.iter().map(move |b| a * b)).collect();
        assert!(mutual_information(&joint, 3, 2, LogBase::Two).unwrap() < 1e-15);
    }
}
