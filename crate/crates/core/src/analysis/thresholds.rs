//! Reference thresholds and the cross-protocol error-rate table.

use serde::{Deserialize, Serialize};

use super::crossing::{crossing_point, CrossingResult};
use super::entropy::LogBase;
use super::preset::ProtocolPreset;
use crate::error::{QkdError, Result};

/// Visibility below which the qutrit CGLMP inequality can no longer be violated.
pub fn bell_visibility_threshold() -> f64 {
    (6.0 * 3f64.sqrt() - 9.0) / 2.0
}

/// Bob's fidelity on a qutrit channel with visibility `v`.
pub fn fidelity_from_visibility(v: f64) -> f64 {
    2.0 * v / 3.0 + 1.0 / 3.0
}

/// Qubit phase-covariant cloner fidelity, `1/2 + 1/sqrt(8)`.
pub fn qubit_threshold() -> f64 {
    0.5 + 8f64.sqrt().recip()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub visibility_threshold: f64,
    pub bell_fidelity_threshold: f64,
    pub qubit_threshold: f64,
    /// Published 3DEB security threshold, for comparison.
    pub reported_security_threshold: f64,
    /// Published optimal-attack visibility for the qutrit Bell test.
    pub reference_visibility: f64,
    pub reference_visibility_fidelity: f64,
}

pub fn thresholds() -> Thresholds {
    let v = bell_visibility_threshold();
    let reference_visibility = 0.6629;
    Thresholds {
        visibility_threshold: v,
        bell_fidelity_threshold: fidelity_from_visibility(v),
        qubit_threshold: qubit_threshold(),
        reported_security_threshold: ProtocolPreset::ThreeDeb.reported_crossing_fidelity(),
        reference_visibility,
        reference_visibility_fidelity: fidelity_from_visibility(reference_visibility),
    }
}

/// One row of the acceptable-error-rate comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateRow {
    pub protocol: String,
    pub preset: ProtocolPreset,
    pub f_a_star: f64,
    pub error_rate: f64,
    pub paper_value: f64,
    pub delta: f64,
    #[serde(skip)]
    pub crossing: Option<CrossingResult>,
}

/// Computes every preset's crossing. The qubit row is checked against the
/// known closed form `1/2 + 1/sqrt(8)`.
pub fn error_rate_table(base: LogBase) -> Result<Vec<ErrorRateRow>> {
    ProtocolPreset::ALL
        .iter()
        .map(|&preset| {
            let c = crossing_point(preset, base)?;
            if preset == ProtocolPreset::QubitPhaseCovariant {
                let deviation = (c.f_a_star - qubit_threshold()).abs();
                if deviation > 1e-6 {
                    return Err(QkdError::ConsistencyCheck {
                        what: "qubit crossing vs closed form",
                        deviation,
                    });
                }
            }
            let error_rate = 1.0 - c.f_a_star;
            let paper_value = preset.reported_error_rate();
            Ok(ErrorRateRow {
                protocol: preset.protocol_label().to_string(),
                preset,
                f_a_star: c.f_a_star,
                error_rate,
                paper_value,
                delta: error_rate - paper_value,
                crossing: Some(c),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visibility_threshold_value() {
        let t = thresholds();
        assert!((t.visibility_threshold - 0.696152422706632).abs() < 1e-12);
        assert!((t.bell_fidelity_threshold - 0.797434948471088).abs() < 1e-12);
        assert!((t.qubit_threshold - 0.853553390593274).abs() < 1e-12);
    }

    #[test]
    fn visibility_map_endpoints() {
        assert!((fidelity_from_visibility(1.0) - 1.0).abs() < 1e-15);
        assert!((fidelity_from_visibility(0.0) - 1.0 / 3.0).abs() < 1e-15);
    }
}
