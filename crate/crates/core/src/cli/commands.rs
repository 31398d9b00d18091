use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use super::args::*;
use super::output::{echo, fmt_sig};
use crate::analysis::{
    crossing_point, error_rate_table, eve_information_detail, eve_optimal_at_fidelity, info_report,
    symmetric_point, thresholds, ProtocolPreset,
};
use crate::cloner::{
    clone_state, closed_form_report, fidelity, phi_cloner_matrix, AmplitudeMatrix, ClonerParams,
};
use crate::error::{QkdError, Result};
use crate::qudit::{optimal_bases, qubit_optimal_bases, BasisSpec};
use crate::sim::{
    basis_correlation_survey, empirical_vs_analytic, run_session, write_round_records, Channel, SiftingRule,
    SimConfig, N_BASES,
};

/// What a command produced, before formatting.
pub struct Rendered {
    pub input: Value,
    pub seed: Option<u64>,
    pub result: Value,
    pub csv: Option<String>,
}

impl Rendered {
    fn json<A: Serialize, R: Serialize>(args: &A, result: &R) -> Result<Self> {
        Ok(Self {
            input: echo(args),
            seed: None,
            result: to_value(result)?,
            csv: None,
        })
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| QkdError::Io(e.to_string()))
}

fn csv_string<F>(header: &[&str], fill: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    fill(&mut w)?;
    let bytes = w.into_inner().map_err(|e| QkdError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| QkdError::Io(e.to_string()))
}

/// Parses `v,x,y` or `v,x,y,z`.
pub fn parse_params(s: &str) -> Result<ClonerParams> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| QkdError::InvalidConfig(format!("parameters '{s}' must be numbers")))?;
    let p = match vals[..] {
        [v, x, y] => ClonerParams::symmetric(v, x, y),
        [v, x, y, z] => ClonerParams::new(v, x, y, z),
        _ => return Err(QkdError::InvalidConfig(format!("expected v,x,y or v,x,y,z, got '{s}'"))),
    };
    if ![p.v, p.x, p.y, p.z].iter().all(|x| x.is_finite()) {
        return Err(QkdError::InvalidConfig("parameters must be finite".into()));
    }
    Ok(p)
}

/// Rescales to unit norm, refusing input further than the parameter
/// tolerance from the surface unless `normalize` is set.
fn on_surface(p: ClonerParams, normalize: bool) -> Result<ClonerParams> {
    if !normalize {
        phi_cloner_matrix(&p, false)?;
    }
    p.normalized()
}

pub fn bases(args: &BasesArgs) -> Result<Rendered> {
    if args.dim < 2 {
        return Err(QkdError::DimensionTooSmall(args.dim));
    }
    let specs: Vec<BasisSpec> = match (args.phi, args.dim) {
        (Some(phi), _) => vec![BasisSpec::new(phi, args.conjugate)],
        (None, 3) => optimal_bases().iter().map(|b| maybe_conj(*b, args.conjugate)).collect(),
        (None, 2) => qubit_optimal_bases().iter().map(|b| maybe_conj(*b, args.conjugate)).collect(),
        (None, d) => {
            return Err(QkdError::InvalidConfig(format!(
                "no optimal bases defined for dimension {d}; pass --phi"
            )))
        }
    };
    let mut listed = Vec::new();
    let mut rows = Vec::new();
    for (index, spec) in specs.iter().enumerate() {
        let states = spec.states(args.dim)?;
        for (label, s) in states.iter().enumerate() {
            for (k, a) in s.amps().iter().enumerate() {
                rows.push((index, spec.phi(), spec.conjugated(), label, k, a.re, a.im));
            }
        }
        listed.push(json!({
            "index": index,
            "phi": spec.phi(),
            "conjugated": spec.conjugated(),
            "states": states.iter().map(|s| s.to_json_pairs()).collect::<Vec<_>>(),
        }));
    }
    let csv = csv_string(&["basis", "phi", "conjugated", "label", "k", "re", "im"], |w| {
        for (i, phi, c, l, k, re, im) in rows {
            w.write_record([
                i.to_string(),
                fmt_sig(phi),
                c.to_string(),
                l.to_string(),
                k.to_string(),
                fmt_sig(re),
                fmt_sig(im),
            ])?;
        }
        Ok(())
    })?;
    Ok(Rendered {
        input: echo(args),
        seed: None,
        result: json!({ "dim": args.dim, "bases": listed }),
        csv: Some(csv),
    })
}

fn maybe_conj(b: BasisSpec, conj: bool) -> BasisSpec {
    if conj {
        b.conjugate()
    } else {
        b
    }
}

pub fn cloner_eval(args: &ClonerEvalArgs) -> Result<Rendered> {
    if let Some(path) = &args.amplitudes {
        return amplitude_eval(args, path);
    }
    let raw = parse_params(args.params.as_deref().unwrap_or_default())?;
    let params = on_surface(raw, args.normalize)?;
    let amplitudes = phi_cloner_matrix(&params, false)?;
    let fidelities = closed_form_report(&params);
    let (info, eve) = if params.is_symmetric(1e-10) {
        (
            Some(info_report(&params, args.base)?),
            Some(eve_information_detail(&params, args.base)?),
        )
    } else {
        (None, None)
    };
    Rendered::json(
        args,
        &json!({
            "params": params,
            "amplitudes": amplitudes,
            "fidelities": fidelities,
            "info": info,
            "eve": eve,
        }),
    )
}

/// State-level evaluation of an arbitrary amplitude matrix over the
/// optimal-basis states.
fn amplitude_eval(args: &ClonerEvalArgs, path: &Path) -> Result<Rendered> {
    let text = fs::read_to_string(path)?;
    let a: AmplitudeMatrix =
        serde_json::from_str(&text).map_err(|e| QkdError::InvalidConfig(format!("{}: {e}", path.display())))?;
    let dim = a.dim();
    let specs = if dim == 2 { qubit_optimal_bases() } else { optimal_bases() };
    let (mut f_a, mut f_b, mut n) = (Vec::new(), Vec::new(), 0.0);
    let mut discrepancy: f64 = 0.0;
    for spec in specs {
        for psi in spec.states(dim)? {
            let out = clone_state(&a, &psi)?;
            f_a.push(fidelity(&out.rho_a, &psi)?);
            f_b.push(fidelity(&out.rho_b, &psi)?);
            discrepancy = discrepancy.max(out.mixture_discrepancy);
            n += 1.0;
        }
    }
    let stats = |v: &[f64]| {
        json!({
            "mean": v.iter().sum::<f64>() / n,
            "min": v.iter().copied().fold(f64::INFINITY, f64::min),
            "max": v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    };
    Rendered::json(
        args,
        &json!({
            "amplitudes": a,
            "F_A": stats(&f_a),
            "F_B": stats(&f_b),
            "mixture_discrepancy": discrepancy,
        }),
    )
}

pub fn crossing(args: &CrossingArgs) -> Result<Rendered> {
    Rendered::json(args, &crossing_point(args.preset, args.base)?)
}

pub fn symmetric(args: &SymmetricArgs) -> Result<Rendered> {
    Rendered::json(args, &symmetric_point(args.preset)?)
}

pub fn thresholds_cmd() -> Result<Rendered> {
    Rendered::json(&json!({}), &thresholds())
}

pub fn table(args: &TableArgs) -> Result<Rendered> {
    let rows = error_rate_table(args.base)?;
    let csv = csv_string(&["protocol", "f_a_star", "error_rate", "paper_value", "delta"], |w| {
        for r in &rows {
            w.write_record([
                r.protocol.clone(),
                fmt_sig(r.f_a_star),
                fmt_sig(r.error_rate),
                fmt_sig(r.paper_value),
                fmt_sig(r.delta),
            ])?;
        }
        Ok(())
    })?;
    let mut out = Rendered::json(args, &json!({ "rows": rows }))?;
    out.csv = Some(csv);
    Ok(out)
}

fn parse_weights(s: &str) -> Result<[f64; N_BASES]> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| QkdError::InvalidConfig(format!("weights '{s}' must be numbers")))?;
    vals.try_into()
        .map_err(|_| QkdError::InvalidConfig(format!("expected {N_BASES} weights, got '{s}'")))
}

fn parse_sifting(s: &str) -> Result<SiftingRule> {
    if s.trim().eq_ignore_ascii_case("same") {
        return Ok(SiftingRule::SameIndex);
    }
    let bad = || QkdError::InvalidConfig(format!("sifting '{s}': use 'same' or pairs like 0-0,1-3"));
    let pairs = s
        .split(',')
        .map(|p| {
            let (i, j) = p.trim().split_once('-').ok_or_else(bad)?;
            Ok((i.parse().map_err(|_| bad())?, j.parse().map_err(|_| bad())?))
        })
        .collect::<Result<Vec<(usize, usize)>>>()?;
    Ok(SiftingRule::PairedIndices(pairs))
}

pub fn sim_config(args: &SimulateArgs) -> Result<SimConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| QkdError::InvalidConfig(format!("{}: {e}", path.display())))?
        }
        None => {
            let rounds = args
                .rounds
                .ok_or_else(|| QkdError::InvalidConfig("--rounds is required without --config".into()))?;
            SimConfig::new(rounds, 0, Channel::Ideal)
        }
    };
    if let Some(r) = args.rounds {
        config.rounds = r;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(c) = &args.channel {
        config.channel = c.parse()?;
    }
    if let Some(w) = &args.alice_weights {
        config.alice_weights = parse_weights(w)?;
    }
    if let Some(w) = &args.bob_weights {
        config.bob_weights = parse_weights(w)?;
    }
    if let Some(s) = &args.sifting {
        config.sifting = parse_sifting(s)?;
    }
    if let Some(b) = args.base {
        config.log_base = b;
    }
    config.validate()?;
    Ok(config)
}

pub fn simulate(args: &SimulateArgs) -> Result<Rendered> {
    let config = sim_config(args)?;
    let result = if args.compare {
        let (session, comparison) = empirical_vs_analytic(&config)?;
        json!({ "session": session, "comparison": comparison })
    } else {
        to_value(&run_session(&config)?)?
    };
    if let Some(path) = &args.records {
        write_round_records(&config, fs::File::create(path)?)?;
    }
    let mut input = echo(args);
    input["resolved"] = to_value(&config)?;
    Ok(Rendered {
        input,
        seed: Some(config.seed),
        result,
        csv: None,
    })
}

pub fn survey(args: &SurveyArgs) -> Result<Rendered> {
    let config = SimConfig::new(args.rounds, args.seed, Channel::Ideal);
    let mut out = Rendered::json(args, &basis_correlation_survey(&config)?)?;
    out.seed = Some(args.seed);
    Ok(out)
}

#[derive(Debug, Serialize)]
struct SweepRow {
    point: usize,
    v: f64,
    x: f64,
    y: f64,
    #[serde(rename = "F_A")]
    f_a: f64,
    #[serde(rename = "F_B")]
    f_b: f64,
    #[serde(rename = "I_AB")]
    i_ab: f64,
    #[serde(rename = "I_AE")]
    i_ae: f64,
    #[serde(rename = "R_bound")]
    r_bound: f64,
}

fn sweep_row(point: usize, params: &ClonerParams, args: &SweepArgs) -> Result<SweepRow> {
    let r = info_report(params, args.base)?;
    Ok(SweepRow {
        point,
        v: params.v,
        x: params.x,
        y: params.y,
        f_a: r.f_a,
        f_b: r.f_b,
        i_ab: r.i_ab,
        i_ae: r.i_ae,
        r_bound: r.r_bound,
    })
}

pub fn sweep(args: &SweepArgs) -> Result<Rendered> {
    let mut rows = Vec::new();
    if !args.point.is_empty() {
        for (i, p) in args.point.iter().enumerate() {
            let params = on_surface(parse_params(p)?, args.normalize)?;
            rows.push(sweep_row(i, &params, args)?);
        }
    } else {
        let (Some(from), Some(to), Some(points)) = (args.from, args.to, args.points) else {
            return Err(QkdError::InvalidConfig("give --from, --to and --points, or --point".into()));
        };
        if points == 0 {
            return Err(QkdError::InvalidConfig("empty grid".into()));
        }
        if !(from <= to) {
            return Err(QkdError::InvalidConfig(format!("--from {from} exceeds --to {to}")));
        }
        for i in 0..points {
            let f = if points == 1 {
                from
            } else {
                from + (to - from) * i as f64 / (points - 1) as f64
            };
            let (p, _) = eve_optimal_at_fidelity(ProtocolPreset::ThreeDeb, f, args.base)?;
            rows.push(sweep_row(i, &ClonerParams::symmetric(p[0], p[1], p[2]), args)?);
        }
    }
    let csv = csv_string(&["point", "v", "x", "y", "F_A", "F_B", "I_AB", "I_AE", "R_bound"], |w| {
        for r in &rows {
            let mut rec = vec![r.point.to_string()];
            rec.extend([r.v, r.x, r.y, r.f_a, r.f_b, r.i_ab, r.i_ae, r.r_bound].map(fmt_sig));
            w.write_record(rec)?;
        }
        Ok(())
    })?;
    let mut out = Rendered::json(args, &json!({ "rows": rows }))?;
    out.csv = Some(csv);
    Ok(out)
}
