use crate::error::{Error, Result};
use crate::mpnum::{BigReal, Precision};
use rug::Float;

const SERIES_LIMIT: f64 = 4.0;
const MAX_ITER: usize = 1_000_000;

/// `Γ(0, 1, g) = ∫_0^∞ e^{−t}/(1 + g t) dt = x e^x E₁(x)` with `x = 1/g`.
///
/// Power series for `x ≤ 4`, modified Lentz continued fraction otherwise.
/// The result lies in `(0, 1)`.
pub fn gamma_seed(g: &BigReal, prec: Precision) -> Result<BigReal> {
    if !g.is_finite() || *g <= 0 {
        return Err(Error::Domain(format!("gamma seed needs g > 0, got {g}")));
    }
    let bits = prec.bits();
    let x = Float::with_val(bits, g.recip_ref());
    let value = if x <= SERIES_LIMIT {
        series_seed(&x, prec)?
    } else {
        lentz_seed(&x, prec)?
    };
    if value <= 0 || value >= 1 {
        return Err(Error::PrecisionExhausted(format!(
            "gamma seed {value} outside (0, 1) for g = {g}"
        )));
    }
    Ok(value)
}

fn series_seed(x: &BigReal, prec: Precision) -> Result<BigReal> {
    // Terms grow to about e^x before decaying; carry the lost digits as guard.
    let wide = prec.plus(10);
    let bits = wide.bits();
    let x = Float::with_val(bits, x);
    let stop = wide.ulp_scaled(-4);
    // E₁(x) = −γ − ln x − Σ_{k≥1} (−x)^k / (k · k!)
    let mut sum = Float::new(bits);
    let mut power = Float::with_val(bits, 1); // (−x)^k / k!
    for k in 1..MAX_ITER {
        power *= &x;
        power = -power;
        power /= k as u32;
        let term = Float::with_val(bits, &power / k as u32);
        sum += &term;
        if k > 2 && Float::with_val(bits, term.abs_ref()) < stop {
            let e1 = -wide.euler() - Float::with_val(bits, x.ln_ref()) - sum;
            let out = e1 * Float::with_val(bits, x.exp_ref()) * &x;
            return Ok(prec.round(&out));
        }
    }
    Err(Error::PrecisionExhausted("exponential integral series did not converge".into()))
}

fn lentz_seed(x: &BigReal, prec: Precision) -> Result<BigReal> {
    // e^x E₁(x) = 1/(x+1 − 1²/(x+3 − 2²/(x+5 − …)))
    let wide = prec.plus(10);
    let bits = wide.bits();
    let x = Float::with_val(bits, x);
    let tiny = wide.ulp_scaled(-200);
    let eps = wide.ulp_scaled(-2);
    let guard = |v: Float| if v.is_zero() { tiny.clone() } else { v };
    let mut f = guard(Float::with_val(bits, &x + 1u32));
    let mut c = f.clone();
    let mut d = Float::new(bits);
    for j in 1..MAX_ITER {
        let a = Float::with_val(bits, -((j * j) as f64));
        let b = Float::with_val(bits, &x + (2 * j + 1) as u32);
        d = guard(Float::with_val(bits, &a * &d) + &b).recip();
        c = guard(Float::with_val(bits, &a / &c) + &b);
        let delta = Float::with_val(bits, &c * &d);
        f *= &delta;
        if Float::with_val(bits, &delta - 1u32).abs() < eps {
            return Ok(prec.round(&(x / f)));
        }
    }
    Err(Error::PrecisionExhausted(
        "exponential integral continued fraction did not converge".into(),
    ))
}

/// `Γ(m, n+1, g) = ∫_0^∞ t^m e^{−t} (1 + g t)^{−(n+1)} dt` on `m + n ≤ max_sum`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaGrid {
    g: BigReal,
    max_sum: usize,
    // rows[n][m]
    rows: Vec<Vec<BigReal>>,
}

impl GammaGrid {
    pub fn g(&self) -> &BigReal {
        &self.g
    }

    pub fn max_sum(&self) -> usize {
        self.max_sum
    }

    /// `Γ(m, n+1, g)`; `None` when `m + n > max_sum`.
    pub fn get(&self, m: usize, n: usize) -> Option<&BigReal> {
        self.rows.get(n)?.get(m)
    }
}

/// Fills the grid from `seed = Γ(0, 1, g)`.
///
/// The `m = 0` row uses `Γ(0, n+1) = (1 − Γ(0, n)) / (n g)`, the one-step form
/// of the alternating sum; each column then follows
/// `Γ(m+1, n+1) = δ_{m0}/g + (m/g) Γ(m−1, n+1) + (m − n − 1/g) Γ(m, n+1)`.
/// Both lose digits when `g` is small, so the caller's `work` precision must
/// carry the cancellation; values are returned at `work` precision.
pub fn gamma_grid(g: &BigReal, max_sum: usize, seed: &BigReal, work: Precision) -> Result<GammaGrid> {
    if *g <= 0 {
        return Err(Error::Domain(format!("gamma grid needs g > 0, got {g}")));
    }
    let bits = work.bits();
    let x = Float::with_val(bits, g.recip_ref());
    let mut rows: Vec<Vec<BigReal>> = Vec::with_capacity(max_sum + 1);
    let mut head = Float::with_val(bits, seed);
    for n in 0..=max_sum {
        if n > 0 {
            let next = Float::with_val(bits, 1u32 - &head) * &x / n as u32;
            if next <= 0 || next >= head {
                return Err(Error::PrecisionExhausted(format!(
                    "Γ(0, {}, g) = {} left (0, Γ(0, {n}, g)); raise the precision",
                    n + 1,
                    crate::mpnum::to_decimal(&next, 12)
                )));
            }
            head = next;
        }
        let len = max_sum - n + 1;
        let mut row: Vec<BigReal> = Vec::with_capacity(len);
        row.push(head.clone());
        let mut factorial = Float::with_val(bits, 1);
        for m in 0..len - 1 {
            let mut v = Float::with_val(bits, m as f64 - n as f64) - &x;
            v *= &row[m];
            if m == 0 {
                v += &x;
            } else {
                v += Float::with_val(bits, &x * m as u32) * &row[m - 1];
            }
            factorial *= (m + 1) as u32;
            // 0 < Γ(m, n+1, g) ≤ m!
            if v <= 0 || v > factorial {
                return Err(Error::PrecisionExhausted(format!(
                    "Γ({}, {}, g) = {} failed its bounds; raise the precision",
                    m + 1,
                    n + 1,
                    crate::mpnum::to_decimal(&v, 12)
                )));
            }
            row.push(v);
        }
        rows.push(row);
    }
    Ok(GammaGrid {
        g: Float::with_val(bits, g),
        max_sum,
        rows,
    })
}
