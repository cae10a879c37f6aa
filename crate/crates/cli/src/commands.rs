//! The evolve / steady / sweep commands, each producing a [`Table`].

use dotprobe_core::{
    accumulated_charge, build_double_dot, build_double_dot_detector, build_reduced_double_dot,
    build_single_dot_detector, current, evolve, steady_state, time_grid, CurrentSpec,
    DensityVector, Liouvillian, Method,
};
use rayon::prelude::*;

use crate::config::{validate_params, ConfigError, ModelParams, ParamValue, Result, RunConfig, RunMode};
use crate::table::{Cell, Table};

impl ModelParams {
    pub fn build(&self) -> Result<Liouvillian> {
        let l = match self {
            ModelParams::SingleDotDetector(p) => build_single_dot_detector(p)?,
            ModelParams::DoubleDot(p) => build_double_dot(p)?,
            ModelParams::DoubleDotDetector(p) => build_double_dot_detector(p)?,
            ModelParams::Reduced { dot, gamma_l } => build_reduced_double_dot(dot, *gamma_l)?,
        };
        Ok(l)
    }

    pub fn system_spec(&self) -> CurrentSpec {
        match self {
            ModelParams::SingleDotDetector(p) => CurrentSpec::system_single_dot(p),
            ModelParams::DoubleDot(p) => CurrentSpec::system_double_dot(p),
            ModelParams::DoubleDotDetector(p) => CurrentSpec::system_double_dot_detector(p),
            ModelParams::Reduced { dot, .. } => CurrentSpec::system_reduced(dot),
        }
    }

    pub fn detector_spec(&self) -> Option<CurrentSpec> {
        match self {
            ModelParams::SingleDotDetector(p) => Some(CurrentSpec::detector_single_dot(p)),
            ModelParams::DoubleDotDetector(p) => Some(CurrentSpec::detector_double_dot_detector(p)),
            _ => None,
        }
    }

    /// The coherence tracked in sweep output, when the space has one.
    pub fn coherence_pair(&self) -> Option<(&'static str, &'static str)> {
        match self {
            ModelParams::SingleDotDetector(_) => None,
            _ => Some(("b", "c")),
        }
    }

    pub fn regime_label(&self) -> Option<&'static str> {
        match self {
            ModelParams::DoubleDotDetector(p) => Some(p.regime.label()),
            _ => None,
        }
    }
}

/// Dispatch a parsed configuration. Scenario configs are routed by the
/// binary instead, which owns the output conventions.
pub fn run_command(config: &RunConfig) -> Result<Table> {
    match &config.run {
        RunMode::Steady => steady_table(&config.params),
        RunMode::Evolve { tmax, npoints, tol, method } => {
            evolve_table(&config.params, *tmax, *npoints, *tol, *method)
        }
        RunMode::Sweep { parameter, start, stop, count, log } => {
            sweep_table(config, parameter, *start, *stop, *count, *log)
        }
        RunMode::Scenario { name } => {
            crate::scenario::run_scenario(*name, &config.raw_params, &config.run_settings)
                .map(|out| out.table)
        }
    }
}

/// Integrate from the all-empty state and tabulate the state components,
/// the collector currents and the accumulated system charge.
pub fn evolve_table(
    params: &ModelParams,
    tmax: f64,
    npoints: usize,
    tol: f64,
    method: Method,
) -> Result<Table> {
    let l = params.build()?;
    let sigma0 = DensityVector::all_empty(l.space());
    let grid = time_grid(tmax, npoints);
    let traj = evolve(&l, &sigma0, &grid, method, tol)?;

    let sys_spec = params.system_spec();
    let det_spec = params.detector_spec();
    let charge = accumulated_charge(&traj, &sys_spec)?;

    let mut headers = vec!["t [1/Gamma0]".to_string()];
    headers.extend((0..l.dim()).map(|slot| l.space().slot_name(slot)));
    headers.push("I_S [e*Gamma0]".into());
    if det_spec.is_some() {
        headers.push("I_D [e*Gamma0]".into());
    }
    headers.push("Q_S [e]".into());

    let mut table = Table::new(headers);
    for (k, (t, state)) in traj.iter().enumerate() {
        let mut row = vec![Cell::Num(t)];
        row.extend(state.values().iter().map(|&v| Cell::Num(v)));
        row.push(Cell::Num(current(state, &sys_spec)?));
        if let Some(spec) = &det_spec {
            row.push(Cell::Num(current(state, spec)?));
        }
        row.push(Cell::Num(charge[k]));
        table.push_row(row);
    }
    Ok(table)
}

/// One-row table with the stationary state and its currents.
pub fn steady_table(params: &ModelParams) -> Result<Table> {
    let l = params.build()?;
    let steady = steady_state(&l)?;
    let sys_spec = params.system_spec();
    let det_spec = params.detector_spec();

    let mut headers: Vec<String> = (0..l.dim()).map(|slot| l.space().slot_name(slot)).collect();
    headers.push("I_S [e*Gamma0]".into());
    if det_spec.is_some() {
        headers.push("I_D [e*Gamma0]".into());
    }

    let mut row: Vec<Cell> = steady.values().iter().map(|&v| Cell::Num(v)).collect();
    row.push(Cell::Num(current(&steady, &sys_spec)?));
    if let Some(spec) = &det_spec {
        row.push(Cell::Num(current(&steady, spec)?));
    }

    let mut table = Table::new(headers);
    table.push_row(row);
    Ok(table)
}

pub fn sweep_grid(start: f64, stop: f64, count: usize, log: bool) -> Vec<f64> {
    (0..count)
        .map(|k| {
            let f = k as f64 / (count - 1) as f64;
            if log {
                (start.ln() + f * (stop.ln() - start.ln())).exp()
            } else {
                start + f * (stop - start)
            }
        })
        .collect()
}

/// Rebuild the model per grid point with `parameter` set to each value and
/// tabulate the stationary currents. Points run in parallel; rows stay in
/// sweep order.
pub fn sweep_table(
    config: &RunConfig,
    parameter: &str,
    start: f64,
    stop: f64,
    count: usize,
    log: bool,
) -> Result<Table> {
    let values = sweep_grid(start, stop, count, log);

    let mut headers = vec![format!("{parameter} [Gamma0]")];
    headers.push("I_S [e*Gamma0]".into());
    let has_detector = config.params.detector_spec().is_some();
    if has_detector {
        headers.push("I_D [e*Gamma0]".into());
    }
    let coherence = config.params.coherence_pair();
    if coherence.is_some() {
        headers.push("abs_sigma_bc".into());
    }
    let has_regime = config.params.regime_label().is_some();
    if has_regime {
        headers.push("regime".into());
    }

    let rows: Vec<Result<Vec<Cell>>> = values
        .par_iter()
        .map(|&value| {
            let mut raw = config.raw_params.clone();
            raw.insert(parameter.to_string(), ParamValue::Number(value));
            let params = validate_params(config.model_name, &raw).map_err(|e| match e {
                ConfigError::BadValue { reason, .. } => ConfigError::BadValue {
                    key: parameter.to_string(),
                    reason: format!("at sweep value {value}: {reason}"),
                },
                other => other,
            })?;
            let l = params.build()?;
            let steady = steady_state(&l)?;

            let mut row = vec![Cell::Num(value), Cell::Num(current(&steady, &params.system_spec())?)];
            if let Some(spec) = params.detector_spec() {
                row.push(Cell::Num(current(&steady, &spec)?));
            }
            if let Some(pair) = params.coherence_pair() {
                let (re, im) = steady.coherence(pair)?;
                row.push(Cell::Num(re.hypot(im)));
            }
            if let Some(label) = params.regime_label() {
                row.push(Cell::text(label));
            }
            Ok(row)
        })
        .collect();

    let mut table = Table::new(headers);
    for row in rows {
        table.push_row(row?);
    }
    Ok(table)
}
