//! CSV tables and the JSON run ledger. Numbers are decimal strings at the
//! working precision; wall times appear only in the ledger.

use oppq_core::mpnum::{to_decimal, BigReal};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

use crate::config::{RunConfig, SystemConfig};
use crate::run::{RunOutput, ScanOutput};
use crate::CliError;

pub const MINIMA_HEADER: [&str; 11] = [
    "order", "E_min", "S_min", "E_L", "E_U", "eps0", "precision", "derivative", "bracket_width", "steps", "monotone",
];

struct Writer {
    digits: usize,
    dir: PathBuf,
}

impl Writer {
    fn new(config: &RunConfig, dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
        Ok(Writer {
            digits: config.precision as usize,
            dir: dir.to_path_buf(),
        })
    }

    fn num(&self, x: &BigReal) -> String {
        to_decimal(x, self.digits)
    }

    fn csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        let io = |e: csv::Error| CliError::Csv(path.display().to_string(), e);
        let mut w = csv::Writer::from_path(&path).map_err(io)?;
        w.write_record(header).map_err(io)?;
        for row in rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Io(path.display().to_string(), e))?;
        Ok(path)
    }
}

fn eps0(config: &RunConfig) -> String {
    match &config.system {
        SystemConfig::Qzm { eps0, .. } => eps0.clone(),
        _ => String::new(),
    }
}

pub fn write_scans(config: &RunConfig, dir: &Path, scans: &[ScanOutput]) -> Result<Vec<PathBuf>, CliError> {
    let w = Writer::new(config, dir)?;
    let name = config.system_name();
    let mut paths = Vec::new();
    for s in scans {
        let rows: Vec<Vec<String>> = s
            .points
            .iter()
            .map(|pt| vec![w.num(&pt.energy), w.num(&pt.value), to_decimal(&pt.log10, 20)])
            .collect();
        paths.push(w.csv(&format!("scan_{name}_{}.csv", s.order), &["E", "value", "log10_value"], &rows)?);
    }
    Ok(paths)
}

fn result_rows(config: &RunConfig, w: &Writer, out: &RunOutput, with_bounds: bool) -> Vec<Vec<String>> {
    let flags = out.report.monotone_flags();
    out.records
        .iter()
        .zip(&flags)
        .zip(&out.b_u)
        .map(|((t, flag), b_u)| {
            let r = &t.record;
            let (lo, hi) = match (&r.bounds, with_bounds) {
                (Some((lo, hi)), true) => (w.num(lo), w.num(hi)),
                _ => (String::new(), String::new()),
            };
            let mut row = vec![
                r.order.to_string(),
                w.num(&r.e_min),
                w.num(&r.s_min),
                lo,
                hi,
                eps0(config),
                config.precision.to_string(),
                to_decimal(&r.derivative, 6),
                to_decimal(&r.width, 6),
                r.steps.to_string(),
                flag.to_string(),
            ];
            if with_bounds {
                row.push(b_u.as_ref().map(|b| w.num(b)).unwrap_or_default());
                row.push(r.bound_note.clone().unwrap_or_default());
            }
            row
        })
        .collect()
}

pub fn write_minima(config: &RunConfig, dir: &Path, out: &RunOutput) -> Result<PathBuf, CliError> {
    let w = Writer::new(config, dir)?;
    let rows = result_rows(config, &w, out, false);
    w.csv(&format!("minima_{}.csv", config.system_name()), &MINIMA_HEADER, &rows)
}

pub fn write_bounds(config: &RunConfig, dir: &Path, out: &RunOutput) -> Result<PathBuf, CliError> {
    let w = Writer::new(config, dir)?;
    let rows = result_rows(config, &w, out, true);
    let mut header = MINIMA_HEADER.to_vec();
    header.extend(["B_U", "note"]);
    w.csv(&format!("bounds_{}.csv", config.system_name()), &header, &rows)
}

fn system_json(config: &RunConfig) -> Value {
    let name = config.system_name();
    match &config.system {
        SystemConfig::Harmonic => json!({"name": name, "kind": "harmonic"}),
        SystemConfig::Qzm { b, z, eps0 } => json!({"name": name, "kind": "qzm", "b": b, "z": z, "eps0": eps0}),
        SystemConfig::Custom1d { label, missing_order, .. } => {
            json!({"name": name, "kind": "custom-1d", "label": label, "missing_order": missing_order})
        }
    }
}

/// Ledger keys: `config, system, precision, sequence, b_u, rows, versions`.
pub fn ledger(config: &RunConfig, command: &str, out: &RunOutput) -> Value {
    let w = Writer {
        digits: config.precision as usize,
        dir: PathBuf::new(),
    };
    let flags = out.report.monotone_flags();
    let rows: Vec<Value> = out
        .records
        .iter()
        .zip(&flags)
        .zip(&out.b_u)
        .map(|((t, flag), b_u)| {
            let r = &t.record;
            let (lo, hi) = match &r.bounds {
                Some((lo, hi)) => (Value::from(w.num(lo)), Value::from(w.num(hi))),
                None => (Value::Null, Value::Null),
            };
            json!({
                "order": r.order,
                "e_min": w.num(&r.e_min),
                "s_min": w.num(&r.s_min),
                "e_l": lo,
                "e_u": hi,
                "eps0": eps0(config),
                "b_u": b_u.as_ref().map(|b| w.num(b)),
                "precision": config.precision,
                "wall_time_s": t.seconds,
                "residuals": {
                    "derivative": to_decimal(&r.derivative, 6),
                    "bracket_width": to_decimal(&r.width, 6),
                    "bisection_steps": r.steps,
                    "monotone": flag,
                    "note": r.bound_note,
                },
            })
        })
        .collect();
    let b_u = match &out.report.b_u {
        Some(b) => json!({
            "value": w.num(b),
            "source": if out.b_u_estimated { "estimated" } else { "manual" },
        }),
        None => Value::Null,
    };
    json!({
        "config": config,
        "system": system_json(config),
        "command": command,
        "precision": config.precision,
        "sequence": out.report.sequence().iter().map(|s| w.num(s)).collect::<Vec<_>>(),
        "b_u": b_u,
        "rows": rows,
        "versions": {
            "oppq-cli": env!("CARGO_PKG_VERSION"),
            "oppq-core": oppq_core::VERSION,
        },
    })
}

pub fn write_ledger(config: &RunConfig, dir: &Path, command: &str, out: &RunOutput) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
    let path = dir.join(format!("ledger_{}_{command}.json", config.system_name()));
    let text = serde_json::to_string_pretty(&ledger(config, command, out)).expect("ledger serializes");
    std::fs::write(&path, text + "\n").map_err(|e| CliError::Io(path.display().to_string(), e))?;
    Ok(path)
}
