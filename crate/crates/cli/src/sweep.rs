//! One-parameter sweeps over a base configuration.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde_json::Value;

use dqsim_core::{Error, Result};

use crate::config::RunConfig;
use crate::row::ResultRow;
use crate::run::{run_config, RunOptions};

/// Parses a command-line value as an integer, a float, or a bare string.
pub fn parse_value(text: &str) -> Value {
    let text = text.trim();
    if let Ok(i) = text.parse::<u64>() {
        return Value::from(i);
    }
    if let Ok(x) = text.parse::<f64>() {
        return Value::from(x);
    }
    Value::from(text)
}

/// The base config with `param` replaced by `value`.
pub fn with_param(base: &RunConfig, param: &str, value: &Value) -> Result<RunConfig> {
    let mut v = base.to_value();
    let map = v.as_object_mut().expect("config is an object");
    match map.get_mut(param) {
        Some(slot) => *slot = value.clone(),
        None => return Err(Error::Config(format!("unknown sweep parameter {param:?}"))),
    }
    serde_json::from_value(v).map_err(|e| Error::Config(format!("{param} = {value}: {e}")))
}

/// Runs every value on its own worker. Rows come back in input order; a
/// failing value yields a row carrying the error.
pub fn sweep(base: &RunConfig, param: &str, values: &[Value], opts: RunOptions, threads: usize) -> Result<Vec<ResultRow>> {
    // Reject an unknown parameter up front even when there are no values.
    if !base.to_value().as_object().is_some_and(|m| m.contains_key(param)) {
        return Err(Error::Config(format!("unknown sweep parameter {param:?}")));
    }
    let slots: Vec<Mutex<Option<ResultRow>>> = values.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = threads.clamp(1, values.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(value) = values.get(i) else { break };
                let row = with_param(base, param, value)
                    .and_then(|cfg| run_config(&cfg, opts))
                    .unwrap_or_else(|e| {
                        log::warn!("sweep {param} = {value}: {e}");
                        ResultRow::failed(base.protocol.as_str(), base.seed, &e)
                    });
                *slots[i].lock().expect("slot lock") = Some(row);
            });
        }
    });
    Ok(slots
        .into_iter()
        .map(|m| m.into_inner().expect("slot lock").expect("every value ran"))
        .collect())
}

/// Numeric column of a row, by CSV name.
pub fn column(row: &ResultRow, name: &str) -> Result<Option<f64>> {
    Ok(match name {
        "gamma" => row.gamma.map(|v| v as f64),
        "n" => row.n.map(|v| v as f64),
        "edges" => row.edges.map(|v| v as f64),
        "t" => row.t,
        "epsilon" => row.epsilon,
        "steps_or_queries" => row.steps_or_queries.map(|v| v as f64),
        "qcomm_qubits" => row.qcomm_qubits.map(|v| v as f64),
        "ccomm_bits" => row.ccomm_bits.map(|v| v as f64),
        "rounds" => row.rounds.map(|v| v as f64),
        "predicted_cost" => row.predicted_cost,
        "error_vs_exact" => row.error_vs_exact,
        "wall_ms" => Some(row.wall_ms as f64),
        _ => return Err(Error::Config(format!("no numeric column {name:?}"))),
    })
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len() as f64;
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Log-log slope of `column` against the swept values, over the successful
/// rows with positive entries.
pub fn loglog_slope(values: &[Value], rows: &[ResultRow], column_name: &str) -> Result<Option<f64>> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (v, row) in values.iter().zip(rows) {
        let (Some(x), Some(y)) = (v.as_f64(), column(row, column_name)?) else {
            continue;
        };
        if row.is_ok() && x > 0.0 && y > 0.0 {
            xs.push(x.ln());
            ys.push(y.ln());
        }
    }
    Ok(linear_fit(&xs, &ys).map(|(m, _)| m))
}

/// Summary row carrying a fitted slope in its status column.
pub fn slope_row(param: &str, column_name: &str, slope: Option<f64>, seed: u64) -> ResultRow {
    let status = match slope {
        Some(m) => format!("fit log {column_name} ~ log {param}: slope {m}"),
        None => format!("fit log {column_name} ~ log {param}: too few points"),
    };
    ResultRow {
        protocol: "fit".into(),
        seed,
        status,
        ..ResultRow::default()
    }
}
