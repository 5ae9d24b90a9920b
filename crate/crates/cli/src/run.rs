//! Command orchestration: scan, minimize, bound.

use oppq_core::mpnum::{to_decimal, BigReal, Precision};
use oppq_core::oppq::{
    estimate_bu, minimize_in_window, order_record, scan, uniform_grid, BoundReport, EnergyFunction, OrderRecord,
    Problem, ScanPoint,
};
use oppq_core::Error;
use std::time::Instant;

use crate::config::RunConfig;
use crate::CliError;

pub struct ScanOutput {
    pub order: usize,
    pub points: Vec<ScanPoint>,
}

/// One order's outcome plus its wall time, which only reaches the ledger.
pub struct TimedRecord {
    pub record: OrderRecord,
    pub seconds: f64,
}

pub struct RunOutput {
    pub records: Vec<TimedRecord>,
    pub report: BoundReport,
    /// `B_U` per order when bounds were requested.
    pub b_u: Vec<Option<BigReal>>,
    /// Whether `B_U` came from the sequence rather than the config.
    pub b_u_estimated: bool,
}

/// Lower end lifted onto the evaluator's domain floor.
fn clamp_low<F: EnergyFunction + ?Sized>(f: &F, lo: &BigReal) -> BigReal {
    match f.domain_floor() {
        Some(floor) if floor > *lo => floor,
        _ => lo.clone(),
    }
}

pub fn cmd_scan(config: &RunConfig) -> Result<Vec<ScanOutput>, CliError> {
    let problem = config.problem()?;
    let (lo, hi) = config.window()?;
    let p = problem.precision();
    let mut out = Vec::with_capacity(config.orders.len());
    for &order in &config.orders {
        let f = problem.order(order)?;
        let grid = uniform_grid(&clamp_low(&f, &lo), &hi, config.scan_points, p);
        log::info!("scan order {order}: {} points", grid.len());
        out.push(ScanOutput {
            order,
            points: scan(&f, &grid, problem.exec())?,
        });
    }
    Ok(out)
}

fn minimize_all(config: &RunConfig, problem: &Problem) -> Result<Vec<TimedRecord>, CliError> {
    let (lo, hi) = config.window()?;
    let (blo, bhi) = config.bounds_window()?;
    let tol = config.tol()?;
    let mut records = Vec::with_capacity(config.orders.len());
    for &order in &config.orders {
        let start = Instant::now();
        let f = problem.order(order)?;
        let m = minimize_in_window(&f, &clamp_low(&f, &lo), &hi, config.scan_points, &tol, problem.exec())
            .map_err(|e| match e {
                Error::NoSignChange { .. } | Error::NotConverged(_) => CliError::Order {
                    order,
                    message: format!("{e}; widen `window` or raise `scan_points`"),
                },
                other => other.into(),
            })?;
        let record = order_record(&f, order, &m, None, (&clamp_low(&f, &blo), &bhi), &tol)?;
        log::info!("order {order}: E_min {} S_min {}", to_decimal(&record.e_min, 25), to_decimal(&record.s_min, 25));
        records.push(TimedRecord {
            record,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(records)
}

pub fn cmd_minimize(config: &RunConfig) -> Result<RunOutput, CliError> {
    let problem = config.problem()?;
    let records = minimize_all(config, &problem)?;
    let report = BoundReport::new(records.iter().map(|r| r.record.clone()).collect());
    Ok(RunOutput {
        b_u: vec![None; records.len()],
        records,
        report,
        b_u_estimated: false,
    })
}

pub fn cmd_bound(config: &RunConfig) -> Result<RunOutput, CliError> {
    let problem = config.problem()?;
    let p: Precision = problem.precision();
    let mut records = minimize_all(config, &problem)?;
    let sequence: Vec<BigReal> = records.iter().map(|r| r.record.s_min.clone()).collect();
    let estimated = if config.has_manual_bu() {
        None
    } else {
        Some(estimate_bu(&sequence, &config.policy()).map_err(|e| CliError::BuNotConverged {
            message: e.to_string(),
            sequence: sequence.iter().map(|s| to_decimal(s, p.digits() as usize / 2)).collect(),
        })?)
    };
    let (blo, bhi) = config.bounds_window()?;
    let tol = config.tol()?;
    let mut used = Vec::with_capacity(records.len());
    for timed in &mut records {
        let start = Instant::now();
        let order = timed.record.order;
        let b_u = match &estimated {
            Some(b) => b.clone(),
            None => config.b_u_at(order)?.ok_or_else(|| CliError::Order {
                order,
                message: "no B_U stage covers this order; add `b_u` or an earlier stage".into(),
            })?,
        };
        let f = problem.order(order)?;
        let m = oppq_core::oppq::Minimum {
            energy: timed.record.e_min.clone(),
            value: timed.record.s_min.clone(),
            width: timed.record.width.clone(),
            steps: timed.record.steps,
        };
        timed.record = order_record(&f, order, &m, Some(&b_u), (&clamp_low(&f, &blo), &bhi), &tol)?;
        timed.seconds += start.elapsed().as_secs_f64();
        used.push(Some(b_u));
    }
    let mut report = BoundReport::new(records.iter().map(|r| r.record.clone()).collect());
    report.b_u = used.last().cloned().flatten();
    let violations = report.containment_violations();
    if !violations.is_empty() {
        return Err(CliError::Order {
            order: violations[0],
            message: "interval does not contain its minimum".into(),
        });
    }
    Ok(RunOutput {
        records,
        report,
        b_u: used,
        b_u_estimated: estimated.is_some(),
    })
}
