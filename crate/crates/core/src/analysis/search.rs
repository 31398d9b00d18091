//! Derivative-free maximization on the set of normalized parameters with a
//! fixed Bob fidelity.
//!
//! With `F_A = sum f_i p_i^2` and `1 = sum n_i p_i^2`, fixing `F_A = F` means
//! `sum (f_i - F n_i) p_i^2 = 0`. Splitting parameters by the sign of
//! `d_i = f_i - F n_i` turns the feasible set into a product of two spheres,
//! which we parametrize by hyperspherical angles and search with a compass
//! (pattern) search from several seeded starting points.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{QkdError, Result};

const ZERO_COEFF: f64 = 1e-12;

/// Settings for the restarted pattern search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    pub restarts: usize,
    pub seed: u64,
    pub initial_step: f64,
    /// Stop once the step falls below this (radians).
    pub step_tol: f64,
    pub max_evaluations: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            seed: 0x5eed_3deb,
            initial_step: 0.5,
            step_tol: 1e-9,
            max_evaluations: 20_000,
        }
    }
}

/// Normalized parameter vectors with `F_A` pinned to a value.
#[derive(Clone, Debug)]
pub struct FixedFidelitySurface {
    n_params: usize,
    pos: Vec<(usize, f64)>,
    neg: Vec<(usize, f64)>,
    norm_coeff: Vec<f64>,
}

impl FixedFidelitySurface {
    pub fn new(fidelity_coeff: &[f64], norm_coeff: &[f64], target: f64) -> Result<Self> {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (i, (f, n)) in fidelity_coeff.iter().zip(norm_coeff).enumerate() {
            let d = f - target * n;
            if d > ZERO_COEFF {
                pos.push((i, d));
            } else if d < -ZERO_COEFF {
                neg.push((i, -d));
            } else {
                return Err(QkdError::InvalidConfig(format!(
                    "fidelity {target} sits on a degenerate level of parameter {i}"
                )));
            }
        }
        if pos.is_empty() || neg.is_empty() {
            return Err(QkdError::FidelityOutOfRange(target));
        }
        Ok(Self {
            n_params: fidelity_coeff.len(),
            pos,
            neg,
            norm_coeff: norm_coeff.to_vec(),
        })
    }

    /// Continuous search dimensions.
    pub fn dims(&self) -> usize {
        (self.pos.len() - 1) + (self.neg.len() - 1)
    }

    /// Sign choices for a one-element negative group. The positive group's
    /// sign is fixed by the global sign symmetry.
    fn sign_choices(&self) -> &'static [f64] {
        if self.neg.len() == 1 {
            &[1.0, -1.0]
        } else {
            &[1.0]
        }
    }

    pub fn point(&self, angles: &[f64], neg_sign: f64) -> Vec<f64> {
        let (a_pos, a_neg) = angles.split_at(self.pos.len() - 1);
        let u = hypersphere(a_pos);
        let w = hypersphere(a_neg);
        let mut p = vec![0.0; self.n_params];
        for ((i, d), ui) in self.pos.iter().zip(&u) {
            p[*i] = ui / d.sqrt();
        }
        for ((i, d), wi) in self.neg.iter().zip(&w) {
            p[*i] = neg_sign * wi / d.sqrt();
        }
        let norm: f64 = p.iter().zip(&self.norm_coeff).map(|(x, c)| c * x * x).sum();
        let s = norm.sqrt().recip();
        p.iter_mut().for_each(|x| *x *= s);
        p
    }
}

/// Unit vector in R^{n+1} from n angles.
pub fn hypersphere(angles: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(angles.len() + 1);
    let mut sin_prod = 1.0;
    for a in angles {
        out.push(sin_prod * a.cos());
        sin_prod *= a.sin();
    }
    out.push(sin_prod);
    out
}

/// Maximum found on a surface.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceOptimum {
    pub params: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Compass search maximizing `f`; returns (point, value, evaluations).
pub fn pattern_search<F>(f: &F, start: Vec<f64>, options: &SearchOptions) -> Result<(Vec<f64>, f64, usize)>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut x = start;
    let mut fx = f(&x)?;
    let mut evals = 1;
    let mut step = options.initial_step;
    while step >= options.step_tol {
        if evals >= options.max_evaluations {
            return Err(QkdError::NonConvergence {
                what: "pattern search",
                iterations: evals,
            });
        }
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut trial = x.clone();
                trial[i] += dir * step;
                let ft = f(&trial)?;
                evals += 1;
                if ft > fx {
                    x = trial;
                    fx = ft;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((x, fx, evals))
}

/// Maximizes `objective` over the surface. Restarts run in parallel; the
/// best value wins with ties going to the lowest restart index.
pub fn maximize_on_surface<F>(surface: &FixedFidelitySurface, objective: &F, options: &SearchOptions) -> Result<SurfaceOptimum>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let dims = surface.dims();
    let signs = surface.sign_choices();
    if dims == 0 {
        let mut best: Option<SurfaceOptimum> = None;
        for &s in signs {
            let p = surface.point(&[], s);
            let value = objective(&p)?;
            if best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(SurfaceOptimum {
                    params: p,
                    value,
                    evaluations: 0,
                });
            }
        }
        let mut best = best.expect("at least one sign");
        best.evaluations = signs.len();
        return Ok(best);
    }

    let jobs: Vec<(usize, f64)> = (0..options.restarts)
        .flat_map(|r| signs.iter().map(move |&s| (r, s)))
        .collect();
    let results: Vec<Result<SurfaceOptimum>> = jobs
        .par_iter()
        .map(|&(restart, sign)| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            rng.set_stream(restart as u64);
            let start: Vec<f64> = (0..dims).map(|_| rng.random::<f64>() * TAU).collect();
            let on_surface = |angles: &[f64]| objective(&surface.point(angles, sign));
            let (angles, value, evaluations) = pattern_search(&on_surface, start, options)?;
            Ok(SurfaceOptimum {
                params: surface.point(&angles, sign),
                value,
                evaluations,
            })
        })
        .collect();

    let mut best: Option<SurfaceOptimum> = None;
    let mut total = 0;
    for r in results {
        let r = r?;
        total += r.evaluations;
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    let mut best = best.ok_or(QkdError::InvalidConfig("search needs at least one restart".into()))?;
    best.evaluations = total;
    Ok(best)
}
