//! Largest Bob fidelity at which an optimal Eve matches Bob's information,
//! and the symmetric-cloner point.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::entropy::LogBase;
use super::preset::{PointEval, PresetModel, ProtocolPreset};
use super::search::{maximize_on_surface, FixedFidelitySurface, SearchOptions, SurfaceOptimum};
use crate::cloner::{closed_form_report, ClonerParams};
use crate::error::{QkdError, Result};

/// Root-finding settings shared by the crossing and symmetric searches.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossingOptions {
    pub search: SearchOptions,
    /// Spacing of the downward scan that brackets the root.
    pub scan_step: f64,
    /// Bisection stops at this bracket width.
    pub fidelity_tol: f64,
    pub max_bisections: usize,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        Self {
            search: SearchOptions::default(),
            scan_step: 0.01,
            fidelity_tol: 1e-13,
            max_bisections: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingResult {
    pub preset: ProtocolPreset,
    #[serde(rename = "F_A_star")]
    pub f_a_star: f64,
    pub params: BTreeMap<String, f64>,
    /// Eve-optimal parameters in mask order.
    #[serde(skip)]
    pub param_vector: Vec<f64>,
    pub error_rate: f64,
    #[serde(rename = "I_AB")]
    pub i_ab: f64,
    #[serde(rename = "I_AE")]
    pub i_ae: f64,
    /// `|I_AE - I_AB|` at the reported point.
    pub residual: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub log_base: LogBase,
}

impl CrossingResult {
    /// The optimal cloner as (v, x, y, y), for presets in that family.
    pub fn cloner_params(&self) -> Option<ClonerParams> {
        self.preset.cloner_params(&self.param_vector)
    }
}

/// Bracketed root of a decreasing-in-F feasibility margin.
struct Root {
    fidelity: f64,
    optimum: SurfaceOptimum,
    iterations: usize,
    evaluations: usize,
}

/// `(lo, hi)` such that every F strictly inside admits a nondegenerate surface.
fn fidelity_range(model: &PresetModel) -> (f64, f64) {
    let mut ratios: Vec<f64> = model
        .fidelity_coeff()
        .iter()
        .zip(model.norm_coeff())
        .map(|(f, n)| f / n)
        .collect();
    ratios.sort_by(f64::total_cmp);
    let hi = *ratios.last().expect("at least one parameter");
    let below = ratios.iter().copied().filter(|r| *r < hi - 1e-12).fold(f64::NEG_INFINITY, f64::max);
    let lo = below.max(1.0 / model.dim() as f64);
    (lo, hi)
}

/// Finds the largest F with `max_{surface(F)} margin >= 0`, assuming the
/// margin is negative just below the top of the range.
fn locate_root<M>(model: &PresetModel, options: &CrossingOptions, margin: M) -> Result<Root>
where
    M: Fn(&[f64]) -> Result<f64> + Sync,
{
    let (lo, hi) = fidelity_range(model);
    let mut evaluations = 0;
    let mut probe = |f: f64| -> Result<SurfaceOptimum> {
        let surface = FixedFidelitySurface::new(model.fidelity_coeff(), model.norm_coeff(), f)?;
        let best = maximize_on_surface(&surface, &margin, &options.search)?;
        evaluations += best.evaluations;
        Ok(best)
    };

    let edge = 1e-9;
    let mut upper = hi - edge;
    if probe(upper)?.value >= 0.0 {
        return Err(QkdError::NoCrossing { lo, hi });
    }
    let mut bracket = None;
    let mut k = 1;
    loop {
        let f = (hi - k as f64 * options.scan_step).max(lo + edge);
        let best = probe(f)?;
        if best.value >= 0.0 {
            bracket = Some((f, best));
            break;
        }
        upper = f;
        if f <= lo + edge {
            break;
        }
        k += 1;
    }
    let (mut lower, mut lower_best) = bracket.ok_or(QkdError::NoCrossing { lo, hi })?;

    let mut iterations = 0;
    while upper - lower > options.fidelity_tol {
        if iterations >= options.max_bisections {
            return Err(QkdError::NonConvergence {
                what: "fidelity bisection",
                iterations,
            });
        }
        iterations += 1;
        let mid = 0.5 * (lower + upper);
        if mid <= lower || mid >= upper {
            break;
        }
        let best = probe(mid)?;
        if best.value >= 0.0 {
            lower = mid;
            lower_best = best;
        } else {
            upper = mid;
        }
    }
    Ok(Root {
        fidelity: lower,
        optimum: lower_best,
        iterations,
        evaluations,
    })
}

/// Fixes the global sign so that `v >= 0`.
fn canonical(p: &[f64]) -> Vec<f64> {
    let s = if p.first().is_some_and(|v| *v < 0.0) { -1.0 } else { 1.0 };
    p.iter().map(|x| s * x).collect()
}

pub fn crossing_point(preset: ProtocolPreset, base: LogBase) -> Result<CrossingResult> {
    crossing_point_with(preset, base, &CrossingOptions::default())
}

pub fn crossing_point_with(preset: ProtocolPreset, base: LogBase, options: &CrossingOptions) -> Result<CrossingResult> {
    let model = PresetModel::new(preset)?;
    let root = locate_root(&model, options, |p: &[f64]| {
        let e = model.evaluate(p, base)?;
        Ok(e.i_ae - e.i_ab)
    })?;
    let params = canonical(&root.optimum.params);
    let PointEval { f_a, i_ab, i_ae } = model.evaluate(&params, base)?;
    debug_assert!((f_a - root.fidelity).abs() < 1e-9);
    Ok(CrossingResult {
        preset,
        f_a_star: f_a,
        params: model.mask().param_names.iter().cloned().zip(params.iter().copied()).collect(),
        param_vector: params,
        error_rate: 1.0 - f_a,
        i_ab,
        i_ae,
        residual: (i_ae - i_ab).abs(),
        iterations: root.iterations,
        evaluations: root.evaluations,
        log_base: base,
    })
}

/// Eve's best parameters (maximal `I_AE`) among cloners with Bob fidelity `f_a`.
pub fn eve_optimal_at_fidelity(preset: ProtocolPreset, f_a: f64, base: LogBase) -> Result<(Vec<f64>, PointEval)> {
    let model = PresetModel::new(preset)?;
    let (lo, hi) = fidelity_range(&model);
    if !(f_a > lo && f_a < hi) {
        return Err(QkdError::FidelityOutOfRange(f_a));
    }
    let surface = FixedFidelitySurface::new(model.fidelity_coeff(), model.norm_coeff(), f_a)?;
    let best = maximize_on_surface(
        &surface,
        &|p: &[f64]| Ok(model.evaluate(p, base)?.i_ae),
        &SearchOptions::default(),
    )?;
    let p = canonical(&best.params);
    let eval = model.evaluate(&p, base)?;
    Ok((p, eval))
}

/// Cloner with `F_A = F_B` and the largest such fidelity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricResult {
    pub preset: ProtocolPreset,
    pub fidelity: f64,
    pub params: ClonerParams,
    #[serde(rename = "F_A")]
    pub f_a: f64,
    #[serde(rename = "F_B")]
    pub f_b: f64,
    pub iterations: usize,
}

pub fn symmetric_point(preset: ProtocolPreset) -> Result<SymmetricResult> {
    symmetric_point_with(preset, &CrossingOptions::default())
}

pub fn symmetric_point_with(preset: ProtocolPreset, options: &CrossingOptions) -> Result<SymmetricResult> {
    if preset != ProtocolPreset::ThreeDeb {
        return Err(QkdError::UnsupportedPreset {
            preset: preset.cli_name().to_string(),
            operation: "symmetric",
        });
    }
    let model = PresetModel::new(preset)?;
    let root = locate_root(&model, options, |p: &[f64]| {
        let c = preset.cloner_params(p).expect("closed-form preset");
        let r = closed_form_report(&c);
        Ok(r.f_b - r.f_a)
    })?;
    let p = canonical(&root.optimum.params);
    let params = preset.cloner_params(&p).expect("closed-form preset");
    let r = closed_form_report(&params);
    Ok(SymmetricResult {
        preset,
        fidelity: 0.5 * (r.f_a + r.f_b),
        params,
        f_a: r.f_a,
        f_b: r.f_b,
        iterations: root.iterations,
    })
}
