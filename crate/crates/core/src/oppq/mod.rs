//! Orthogonal polynomial projection quantization with bounds.
//!
//! The pipeline per order: transfer table at energy `E`, projection rows
//! `Λ = Ξ M`, dyad sum `D = Σ Λ Λᵀ`, then either the smallest eigenvalue of `D`
//! (1-D) or the constrained minimum with `μ_0 = 1`. Minima of that function
//! over `E` increase with order; any bound `B_U` above their limit turns the
//! level set `{E : S(E) ≤ B_U}` into rigorous eigenenergy bounds.

mod basis;
mod energy;
mod lambda;
mod report;
mod search;

pub use basis::{build_basis, OrthonormalBasis};
pub use energy::{
    EnergyFunction, Evaluator, NormalizationMode, Problem, QuadraticFormBundle, Sample, MomentSystem,
};
pub use lambda::{lambda_table, LambdaTable};
pub use report::{BoundReport, OrderRecord};
pub use search::{
    bisect_root, bracket_minima, crossing, estimate_bu, extract_bounds, find_minimum, scan,
    uniform_grid, Bounds, BuPolicy, Minimum, ScanPoint,
};

use crate::error::{Error, Result};
use crate::mpnum::{to_decimal, BigReal};
use crate::par::Exec;
use rug::Float;

/// Locates the minimum of `f` inside `[lo, hi]`: a coarse derivative scan
/// with `points` samples brackets every well, the lowest well is refined by
/// bisection to `tol`.
pub fn minimize_in_window<F: EnergyFunction + ?Sized>(
    f: &F,
    lo: &BigReal,
    hi: &BigReal,
    points: usize,
    tol: &BigReal,
    exec: Exec,
) -> Result<Minimum> {
    let prec = f.precision();
    let grid = uniform_grid(lo, hi, points.max(2), prec);
    let wells = bracket_minima(f, &grid, exec)?;
    if wells.len() > 1 {
        log::info!("{} wells in the window; refining the lowest", wells.len());
    }
    let (a, b, _) = wells
        .into_iter()
        .min_by(|x, y| x.2.partial_cmp(&y.2).unwrap_or(std::cmp::Ordering::Equal))
        .ok_or_else(|| Error::NoSignChange {
            lo: to_decimal(lo, 20),
            hi: to_decimal(hi, 20),
        })?;
    find_minimum(f, &a, &b, tol)
}

/// Record for one order: minimum, plus bounds when `b_u` is given.
pub fn order_record<F: EnergyFunction + ?Sized>(
    f: &F,
    order: usize,
    minimum: &Minimum,
    b_u: Option<&BigReal>,
    window: (&BigReal, &BigReal),
    tol: &BigReal,
) -> Result<OrderRecord> {
    let d = f.derivative(&minimum.energy)?;
    let mut record = OrderRecord {
        order,
        e_min: minimum.energy.clone(),
        s_min: minimum.value.clone(),
        width: minimum.width.clone(),
        steps: minimum.steps,
        derivative: Float::with_val(d.prec(), d.abs_ref()),
        bounds: None,
        bound_note: None,
    };
    if let Some(b_u) = b_u {
        match extract_bounds(f, &minimum.energy, b_u, window, tol) {
            Ok(b) => record.bounds = Some((b.lower, b.upper)),
            Err(e @ Error::NoUpperCrossing(_)) => {
                log::warn!("order {order}: {e}");
                record.bound_note = Some(e.to_string());
            }
            Err(e) => return Err(e),
        }
    }
    Ok(record)
}
