use super::energy::EnergyFunction;
use crate::error::{Error, Result, Side};
use crate::mpnum::{to_decimal, BigReal, Precision};
use crate::par::{self, Exec};
use rug::ops::Pow;
use rug::Float;

/// Located minimum of an energy function.
#[derive(Debug, Clone)]
pub struct Minimum {
    pub energy: BigReal,
    pub value: BigReal,
    /// Final bracket width (zero when a probe hit a vanishing derivative).
    pub width: BigReal,
    pub steps: usize,
}

/// Derivative magnitudes below this are treated as exact zeros.
fn zero_floor(prec: Precision, value: &BigReal) -> BigReal {
    let scale = Float::with_val(prec.bits(), value.abs_ref()).max(&prec.one());
    prec.ulp_scaled(8) * scale
}

fn no_sign_change(lo: &BigReal, hi: &BigReal) -> Error {
    Error::NoSignChange {
        lo: to_decimal(lo, 25),
        hi: to_decimal(hi, 25),
    }
}

/// Bisection on the sign of the closed-form derivative over `[lo, hi]`, which
/// must satisfy `∂f(lo) < 0 < ∂f(hi)`. Stops when the bracket is narrower
/// than `tol`.
pub fn find_minimum<F: EnergyFunction + ?Sized>(
    f: &F,
    lo: &BigReal,
    hi: &BigReal,
    tol: &BigReal,
) -> Result<Minimum> {
    let prec = f.precision();
    let bits = prec.bits();
    let mut lo = Float::with_val(bits, lo);
    let mut hi = Float::with_val(bits, hi);
    if lo >= hi {
        return Err(Error::Invalid("minimum bracket must satisfy lo < hi".into()));
    }
    let dlo = f.derivative(&lo)?;
    let dhi = f.derivative(&hi)?;
    if dlo >= 0 || dhi <= 0 {
        return Err(no_sign_change(&lo, &hi));
    }
    let mut steps = 0;
    while Float::with_val(bits, &hi - &lo) >= *tol {
        let mid = Float::with_val(bits, &lo + &hi) / 2u32;
        let s = f.evaluate(&mid, true)?;
        steps += 1;
        let d = s.derivative.expect("derivative requested");
        if d.clone().abs() <= zero_floor(prec, &s.value) {
            return Ok(Minimum {
                energy: mid,
                value: s.value,
                width: Float::new(bits),
                steps,
            });
        }
        if d < 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let energy = Float::with_val(bits, &lo + &hi) / 2u32;
    let value = f.value(&energy)?;
    Ok(Minimum {
        energy,
        value,
        width: hi - lo,
        steps,
    })
}

/// Root of `g` on `[lo, hi]` by bisection, given a sign change.
pub fn bisect_root<G>(g: G, lo: &BigReal, hi: &BigReal, tol: &BigReal) -> Result<BigReal>
where
    G: Fn(&BigReal) -> Result<BigReal>,
{
    let bits = lo.prec().max(hi.prec());
    let mut lo = Float::with_val(bits, lo);
    let mut hi = Float::with_val(bits, hi);
    let glo = g(&lo)?;
    let ghi = g(&hi)?;
    if glo.is_zero() {
        return Ok(lo);
    }
    if ghi.is_zero() {
        return Ok(hi);
    }
    let lo_negative = glo.is_sign_negative();
    if lo_negative == ghi.is_sign_negative() {
        return Err(no_sign_change(&lo, &hi));
    }
    while Float::with_val(bits, &hi - &lo) >= *tol {
        let mid = Float::with_val(bits, &lo + &hi) / 2u32;
        let gm = g(&mid)?;
        if gm.is_zero() {
            return Ok(mid);
        }
        if gm.is_sign_negative() == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Float::with_val(bits, &lo + &hi) / 2u32)
}

/// Policy for the empirical upper bound on the limit of the minimum sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuPolicy {
    /// Relative successive difference below which the sequence counts as converged.
    pub theta: f64,
    /// Safety multiplier on the last difference.
    pub kappa: u32,
    /// Floor on the margin, relative to the last value: `10^-floor_digits`.
    pub floor_digits: i32,
}

impl Default for BuPolicy {
    fn default() -> Self {
        BuPolicy {
            theta: 1e-8,
            kappa: 10,
            floor_digits: 15,
        }
    }
}

/// `B_U = s_last + κ · max(s_last − s_prev, 10^-d · s_last)` once the relative
/// last step is below `θ`.
pub fn estimate_bu(sequence: &[BigReal], policy: &BuPolicy) -> Result<BigReal> {
    let listing = || {
        sequence
            .iter()
            .map(|s| to_decimal(s, 25))
            .collect::<Vec<_>>()
            .join(", ")
    };
    if sequence.len() < 3 {
        return Err(Error::NotConverged(format!(
            "need at least 3 minima, have {}: [{}]",
            sequence.len(),
            listing()
        )));
    }
    if sequence.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Invalid(format!("minimum sequence decreases: [{}]", listing())));
    }
    let bits = sequence.iter().map(|s| s.prec()).max().unwrap_or(64);
    let last = &sequence[sequence.len() - 1];
    let prev = &sequence[sequence.len() - 2];
    let diff = Float::with_val(bits, last - prev);
    let rel = Float::with_val(bits, &diff / last);
    if rel >= policy.theta {
        return Err(Error::NotConverged(format!(
            "relative step {} exceeds {}: [{}]",
            to_decimal(&rel, 6),
            policy.theta,
            listing()
        )));
    }
    let floor = Float::with_val(bits, 10).pow(-policy.floor_digits) * last;
    let margin = diff.max(&floor) * policy.kappa;
    Ok(Float::with_val(bits, last + margin))
}

/// Bounds `E_L < E_min < E_U` where the energy function crosses `B_U`.
#[derive(Debug, Clone)]
pub struct Bounds {
    pub lower: BigReal,
    pub upper: BigReal,
}

/// Level-set crossing `f = b_u` on one side of `e_min`. Steps outward
/// geometrically (never more than `max_step` at a time) until `f > b_u`,
/// then bisects. The search stays inside `window` and the domain floor.
pub fn crossing<F: EnergyFunction + ?Sized>(
    f: &F,
    e_min: &BigReal,
    b_u: &BigReal,
    side: Side,
    window: (&BigReal, &BigReal),
    tol: &BigReal,
    max_step: &BigReal,
) -> Result<BigReal> {
    let bits = f.precision().bits();
    let mut edge = match side {
        Side::Lower => Float::with_val(bits, window.0),
        Side::Upper => Float::with_val(bits, window.1),
    };
    if side == Side::Lower {
        if let Some(floor) = f.domain_floor() {
            if edge < floor {
                edge = floor;
            }
        }
    }
    if f.value(e_min)? >= *b_u {
        return Err(Error::NoUpperCrossing(side));
    }
    let toward = |x: &BigReal, h: &BigReal| -> BigReal {
        let y = match side {
            Side::Lower => Float::with_val(bits, x - h),
            Side::Upper => Float::with_val(bits, x + h),
        };
        let past = match side {
            Side::Lower => y < edge,
            Side::Upper => y > edge,
        };
        if past {
            edge.clone()
        } else {
            y
        }
    };
    let mut inside = Float::with_val(bits, e_min);
    let mut step = Float::with_val(bits, tol * 16u32);
    loop {
        let probe = toward(&inside, &step);
        if f.value(&probe)? > *b_u {
            let (lo, hi) = match side {
                Side::Lower => (probe, inside),
                Side::Upper => (inside, probe),
            };
            return bisect_root(
                |e| Ok(f.value(e)? - Float::with_val(bits, b_u)),
                &lo,
                &hi,
                tol,
            );
        }
        if probe == edge {
            return Err(Error::NoUpperCrossing(side));
        }
        inside = probe;
        step *= 4u32;
        if step > *max_step {
            step = Float::with_val(bits, max_step);
        }
    }
}

/// Both crossings. Each side fails independently with `NoUpperCrossing`.
pub fn extract_bounds<F: EnergyFunction + ?Sized>(
    f: &F,
    e_min: &BigReal,
    b_u: &BigReal,
    window: (&BigReal, &BigReal),
    tol: &BigReal,
) -> Result<Bounds> {
    let bits = f.precision().bits();
    let max_step = Float::with_val(bits, window.1 - window.0) / 200u32;
    let lower = crossing(f, e_min, b_u, Side::Lower, window, tol, &max_step)?;
    let upper = crossing(f, e_min, b_u, Side::Upper, window, tol, &max_step)?;
    Ok(Bounds { lower, upper })
}

/// One sampled point of a scan.
#[derive(Debug, Clone)]
pub struct ScanPoint {
    pub energy: BigReal,
    pub value: BigReal,
    pub log10: BigReal,
}

/// `points` equally spaced energies on `[lo, hi]` (a single point when `points == 1`).
pub fn uniform_grid(lo: &BigReal, hi: &BigReal, points: usize, prec: Precision) -> Vec<BigReal> {
    let bits = prec.bits();
    match points {
        0 => Vec::new(),
        1 => vec![Float::with_val(bits, lo)],
        _ => {
            let step = Float::with_val(bits, hi - lo) / (points - 1) as u32;
            (0..points)
                .map(|k| Float::with_val(bits, &step * k as u32) + lo)
                .collect()
        }
    }
}

fn check_grid<F: EnergyFunction + ?Sized>(f: &F, grid: &[BigReal]) -> Result<()> {
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("scan grid must be strictly increasing".into()));
    }
    if let (Some(floor), Some(first)) = (f.domain_floor(), grid.first()) {
        if *first < floor {
            return Err(Error::Domain(format!(
                "scan starts at {} below the floor {}",
                to_decimal(first, 20),
                to_decimal(&floor, 20)
            )));
        }
    }
    Ok(())
}

/// Values (and log₁₀) on a grid. Points are independent and may run in parallel.
pub fn scan<F: EnergyFunction + ?Sized>(f: &F, grid: &[BigReal], exec: Exec) -> Result<Vec<ScanPoint>> {
    check_grid(f, grid)?;
    par::map_slice(exec, grid, |e| {
        let value = f.value(e)?;
        let log10 = Float::with_val(value.prec(), value.log10_ref());
        Ok(ScanPoint {
            energy: e.clone(),
            value,
            log10,
        })
    })
    .into_iter()
    .collect()
}

/// Brackets `[e_k, e_{k+1}]` where the derivative turns from negative to
/// positive, each paired with the smaller endpoint value.
pub fn bracket_minima<F: EnergyFunction + ?Sized>(
    f: &F,
    grid: &[BigReal],
    exec: Exec,
) -> Result<Vec<(BigReal, BigReal, BigReal)>> {
    check_grid(f, grid)?;
    let samples: Vec<_> = par::map_slice(exec, grid, |e| f.evaluate(e, true))
        .into_iter()
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for w in samples.windows(2) {
        let d0 = w[0].derivative.as_ref().expect("derivative requested");
        let d1 = w[1].derivative.as_ref().expect("derivative requested");
        if *d0 < 0 && *d1 > 0 {
            let v = w[0].value.clone().min(&w[1].value);
            out.push((w[0].energy.clone(), w[1].energy.clone(), v));
        }
    }
    Ok(out)
}
