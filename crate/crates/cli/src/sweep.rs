//! Parameter sweeps: one scenario run per value, rows merged in input order.

use serde_json::Value;

use crate::config::ScenarioConfig;
use crate::report::{csv_string, sci17, sha256_hex};
use crate::scenario::{run_built, RunBundle};
use crate::{CliError, Result};

/// One sweep row: the swept value plus either the finished run or the error
/// that stopped it.  Failed rows never abort the sweep.
#[derive(Debug)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: std::result::Result<Box<RunBundle>, RowError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowError {
    pub code: String,
    pub message: String,
}

#[derive(Debug)]
pub struct SweepResult {
    pub parameter: String,
    pub rows: Vec<SweepRow>,
}

/// Run the sweep described by a raw config document.
///
/// Each row clones the document, substitutes one value at the swept path,
/// and revalidates from scratch, so a row failure is always attributable to
/// its own value.  Rows run concurrently; results keep input order.
pub fn run_sweep(raw: &Value, threads: Option<usize>) -> Result<SweepResult> {
    let config = ScenarioConfig::from_json_value(raw.clone())?;
    let sweep = config
        .sweep
        .clone()
        .ok_or_else(|| CliError::Validation("sweep: config has no sweep table".into()))?;
    config.build()?;

    // Probe the path once so a typo fails the whole sweep upfront.
    let mut probe = raw.clone();
    set_path(&mut probe, &sweep.parameter, sweep.values[0])?;
    probe.as_object_mut().expect("config is an object").remove("sweep");
    ScenarioConfig::from_json_value(probe)?;

    let run_row = |&value: &f64| -> SweepRow {
        let mut row_raw = raw.clone();
        if let Err(e) = set_path(&mut row_raw, &sweep.parameter, value) {
            return SweepRow { value, outcome: Err(row_error(e)) };
        }
        row_raw.as_object_mut().expect("config is an object").remove("sweep");
        let json = serde_json::to_string(&row_raw).expect("row serializes");
        let outcome = ScenarioConfig::from_json_str(&json)
            .and_then(|cfg| {
                let built = cfg.build()?;
                run_built(cfg, built, &sha256_hex(json.as_bytes()))
            })
            .map(Box::new)
            .map_err(row_error);
        SweepRow { value, outcome }
    };

    let rows: Vec<SweepRow> = match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Validation(format!("threads: {e}")))?;
            pool.install(|| {
                use rayon::prelude::*;
                sweep.values.par_iter().map(run_row).collect()
            })
        }
        None => {
            use rayon::prelude::*;
            sweep.values.par_iter().map(run_row).collect()
        }
    };
    Ok(SweepResult { parameter: sweep.parameter, rows })
}

fn row_error(e: CliError) -> RowError {
    match e {
        CliError::Validation(message) => RowError { code: "E_VALIDATION".into(), message },
        CliError::Numeric { code, message } => RowError { code: code.into(), message },
        CliError::Io { path, source } => {
            RowError { code: "E_IO".into(), message: format!("{}: {source}", path.display()) }
        }
    }
}

/// Replace the value at a dotted path of JSON object keys.  Intermediate
/// keys must address tables; the leaf key may be new, in which case the
/// strict row re-parse decides whether the schema accepts it.
fn set_path(raw: &mut Value, path: &str, value: f64) -> Result<()> {
    let mut cursor = raw;
    let segments: Vec<&str> = path.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(CliError::Validation(format!(
            "sweep.parameter: malformed path {path:?}"
        )));
    }
    for segment in &segments[..segments.len() - 1] {
        cursor = cursor
            .as_object_mut()
            .and_then(|m| m.get_mut(*segment))
            .ok_or_else(|| {
                CliError::Validation(format!(
                    "sweep.parameter: {path:?} does not address a config table at {segment:?}"
                ))
            })?;
    }
    let leaf = segments.last().expect("nonempty path");
    let table = cursor.as_object_mut().ok_or_else(|| {
        CliError::Validation(format!("sweep.parameter: {path:?} does not end inside a table"))
    })?;
    // Integer-valued floats go in as JSON integers so integer fields accept
    // them.
    let number = if value.fract() == 0.0 && value.abs() < 9.0e15 {
        serde_json::Number::from(value as i64)
    } else {
        serde_json::Number::from_f64(value)
            .ok_or_else(|| CliError::Validation(format!("sweep.values: {value} is not finite")))?
    };
    table.insert((*leaf).to_string(), Value::Number(number));
    Ok(())
}

/// Flat CSV of a sweep: one row per value, key report scalars as columns,
/// failed rows carrying their error and empty data cells.
pub fn sweep_csv(result: &SweepResult) -> String {
    let header = [
        result.parameter.as_str(),
        "dynamical-angle",
        "geometric-angle-numeric",
        "geometric-angle-analytic",
        "phase-residual",
        "norm-drift",
        "adiabaticity-max",
        "ln-z",
        "energy-fd",
        "energy-leibniz-negated",
        "energy-leibniz-consistent",
        "delta-s",
        "omega",
        "trace-residual",
        "lambda",
        "error",
    ];
    let rows: Vec<Vec<String>> = result
        .rows
        .iter()
        .map(|row| match &row.outcome {
            Ok(bundle) => {
                let r = &bundle.report;
                vec![
                    sci17(row.value),
                    r.phase.dynamical_angle.cell(),
                    r.phase.geometric_angle_numeric.cell(),
                    r.phase.geometric_angle_analytic.cell(),
                    r.phase.residual.cell(),
                    r.trajectory.norm_drift.cell(),
                    r.trajectory.adiabaticity_max.cell(),
                    r.thermo.ln_z.cell(),
                    r.thermo.energy_fd.cell(),
                    r.thermo.energy_leibniz_negated.cell(),
                    r.thermo.energy_leibniz_consistent.cell(),
                    r.thermo.delta_s.cell(),
                    r.gravity.omega.cell(),
                    r.gravity.trace_residual.cell(),
                    r.gravity.lambda.cell(),
                    String::new(),
                ]
            }
            Err(err) => {
                let mut row_cells = vec![sci17(row.value)];
                row_cells.extend(std::iter::repeat_n(String::new(), header.len() - 2));
                row_cells.push(format!("{}: {}", err.code, err.message));
                row_cells
            }
        })
        .collect();
    csv_string(&header, &rows)
}
