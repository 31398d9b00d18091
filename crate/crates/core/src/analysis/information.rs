use serde::{Deserialize, Serialize};

use super::entropy::{shannon_entropy, LogBase, PROBABILITY_FLOOR};
use crate::cloner::{closed_form_report, ClonerParams};
use crate::error::{QkdError, Result};

const FIDELITY_TOL: f64 = 1e-12;

/// `log N - H[F, (1-F)/(N-1), ..., (1-F)/(N-1)]` for `F` in `[1/N, 1]`.
pub fn bob_information_dim(f_a: f64, dim: usize, base: LogBase) -> Result<f64> {
    if dim < 2 {
        return Err(QkdError::DimensionTooSmall(dim));
    }
    let lo = 1.0 / dim as f64;
    if !f_a.is_finite() || f_a < lo - FIDELITY_TOL || f_a > 1.0 + FIDELITY_TOL {
        return Err(QkdError::FidelityOutOfRange(f_a));
    }
    let f = f_a.clamp(lo, 1.0);
    let mut p = vec![(1.0 - f) / (dim - 1) as f64; dim];
    p[0] = f;
    Ok(base.log(dim as f64) - shannon_entropy(&p, base)?)
}

/// Bob's information on a qutrit channel with fidelity `f_a`.
pub fn bob_information(f_a: f64, base: LogBase) -> Result<f64> {
    bob_information_dim(f_a, 3, base)
}

/// Eve's information split by whether Bob's trit is correct.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EveInformation {
    pub f_a: f64,
    /// Conditional distribution of Alice's trit given Eve's data when m = 0.
    pub given_no_error: [f64; 3],
    /// Same when m != 0.
    pub given_error: [f64; 3],
    pub info_no_error: f64,
    pub info_error: f64,
    pub total: f64,
}

/// Eve's information `F_A I(A:E|m=0) + (1-F_A) I(A:E|m!=0)` for a y = z cloner.
pub fn eve_information_detail(params: &ClonerParams, base: LogBase) -> Result<EveInformation> {
    params.require_symmetric()?;
    let norm = params.norm_sqr();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(QkdError::AmplitudesNotNormalized(norm));
    }
    let ClonerParams { v, x, y, .. } = *params;
    let f_a = v * v + 2.0 * y * y;
    let log3 = base.log(3.0);

    // normalized by the numerators' sum, 3F (resp. 3(1-F)) for unit-norm input
    let branch = |w: [f64; 3]| -> Result<([f64; 3], f64)> {
        let total: f64 = w.iter().sum();
        if total <= PROBABILITY_FLOOR {
            return Ok(([0.0; 3], 0.0));
        }
        let p = w.map(|x| x / total);
        Ok((p, log3 - shannon_entropy(&p, base)?))
    };
    let (given_no_error, info_no_error) = branch([(v + 2.0 * y).powi(2), (v - y).powi(2), (v - y).powi(2)])?;
    let (given_error, info_error) = branch([(x + 2.0 * y).powi(2), (x - y).powi(2), (x - y).powi(2)])?;
    Ok(EveInformation {
        f_a,
        given_no_error,
        given_error,
        info_no_error,
        info_error,
        total: f_a * info_no_error + (1.0 - f_a) * info_error,
    })
}

pub fn eve_information(params: &ClonerParams, base: LogBase) -> Result<f64> {
    Ok(eve_information_detail(params, base)?.total)
}

/// One-way secret key rate bound `max(I_AB - I_AE, I_AB - I_BE)`.
pub fn ck_rate_bound(i_ab: f64, i_ae: f64, i_be: f64) -> f64 {
    (i_ab - i_ae).max(i_ab - i_be)
}

/// Figures of merit for one cloner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfoReport {
    pub f_a: f64,
    pub f_b: f64,
    pub d_a1: f64,
    pub d_a2: f64,
    pub d_b1: f64,
    pub d_b2: f64,
    pub i_ab: f64,
    pub i_ae: f64,
    pub r_bound: f64,
    pub log_base: LogBase,
}

/// Eve learns Bob's error exactly, so I_BE = I_AE in the rate bound.
pub fn info_report(params: &ClonerParams, base: LogBase) -> Result<InfoReport> {
    let fid = closed_form_report(params);
    let i_ab = bob_information(fid.f_a, base)?;
    let i_ae = eve_information(params, base)?;
    Ok(InfoReport {
        f_a: fid.f_a,
        f_b: fid.f_b,
        d_a1: fid.d_a1,
        d_a2: fid.d_a2,
        d_b1: fid.d_b1,
        d_b2: fid.d_b2,
        i_ab,
        i_ae,
        r_bound: ck_rate_bound(i_ab, i_ae, i_ae),
        log_base: base,
    })
}
