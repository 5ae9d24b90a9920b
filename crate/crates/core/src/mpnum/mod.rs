//! Arbitrary-precision scalars and the dense symmetric positive definite kernel.
//!
//! Scalars are MPFR floats. A run uses one working [`Precision`]; every value
//! created through it carries the same mantissa length, so mixed-precision
//! arithmetic never happens on the hot paths.

mod linalg;
mod matrix;

pub use linalg::{
    cholesky, inertia, invert_lower, smallest_eigenvalue, solve_lower, solve_lower_transpose, spd_solve,
    EigenPair,
};
pub use matrix::{LowerTriangular, SymMatrix};

use crate::error::{Error, Result};
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Float};

pub type BigReal = Float;

/// Guard bits added on top of the decimal request.
const GUARD_BITS: u32 = 16;

/// Working precision in decimal digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Precision(u32);

impl Precision {
    pub const MIN_DIGITS: u32 = 30;

    pub fn new(digits: u32) -> Result<Self> {
        if digits < Self::MIN_DIGITS {
            return Err(Error::Invalid(format!(
                "precision must be at least {} decimal digits, got {digits}",
                Self::MIN_DIGITS
            )));
        }
        Ok(Precision(digits))
    }

    pub fn digits(self) -> u32 {
        self.0
    }

    pub fn bits(self) -> u32 {
        (f64::from(self.0) * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
    }

    /// Same run, `factor` times as many digits. Used for cancellation-prone sums.
    pub fn scaled(self, factor: u32) -> Self {
        Precision(self.0 * factor)
    }

    pub fn plus(self, digits: u32) -> Self {
        Precision(self.0 + digits)
    }

    pub fn zero(self) -> BigReal {
        Float::new(self.bits())
    }

    pub fn one(self) -> BigReal {
        Float::with_val(self.bits(), 1)
    }

    pub fn int(self, v: i64) -> BigReal {
        Float::with_val(self.bits(), v)
    }

    pub fn from_f64(self, v: f64) -> BigReal {
        Float::with_val(self.bits(), v)
    }

    pub fn pi(self) -> BigReal {
        Float::with_val(self.bits(), Constant::Pi)
    }

    pub fn euler(self) -> BigReal {
        Float::with_val(self.bits(), Constant::Euler)
    }

    /// `10^k` at this precision.
    pub fn pow10(self, k: i32) -> BigReal {
        let ten = Float::with_val(self.bits(), 10);
        ten.pow(k)
    }

    /// Relative unit `10^(offset - digits)`, the scale used by residual bounds.
    pub fn ulp_scaled(self, offset: i32) -> BigReal {
        self.pow10(offset - self.0 as i32)
    }

    /// Round `x` to this precision.
    pub fn round(self, x: &BigReal) -> BigReal {
        Float::with_val(self.bits(), x)
    }

    /// Parse a decimal string exactly as written (up to this precision).
    pub fn parse(self, s: &str) -> Result<BigReal> {
        let parsed = Float::parse(s.trim())
            .map_err(|e| Error::Invalid(format!("not a decimal number {s:?}: {e}")))?;
        Ok(Float::with_val(self.bits(), parsed))
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} digits", self.0)
    }
}

/// Decimal string with `digits` significant digits, plain notation where the
/// exponent is modest and scientific otherwise.
pub fn to_decimal(x: &BigReal, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let s = x.to_string_radix(10, Some(digits.max(1)));
    match s.find('e') {
        None => s,
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().unwrap_or(0);
            if !(-8..=24).contains(&exp) {
                return s;
            }
            let mantissa = &s[..pos];
            let (neg, mantissa) = match mantissa.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, mantissa),
            };
            let digits_only: String = mantissa.chars().filter(|c| *c != '.').collect();
            let point = mantissa.find('.').unwrap_or(mantissa.len()) as i64 + exp;
            let mut out = String::new();
            if neg {
                out.push('-');
            }
            if point <= 0 {
                out.push_str("0.");
                out.extend(std::iter::repeat('0').take((-point) as usize));
                out.push_str(&digits_only);
            } else if point as usize >= digits_only.len() {
                out.push_str(&digits_only);
                out.extend(std::iter::repeat('0').take(point as usize - digits_only.len()));
            } else {
                out.push_str(&digits_only[..point as usize]);
                out.push('.');
                out.push_str(&digits_only[point as usize..]);
            }
            out
        }
    }
}

/// `‖v‖∞`
pub fn max_abs(v: &[BigReal]) -> BigReal {
    let prec = v.first().map(|x| x.prec()).unwrap_or(64);
    let mut m = Float::new(prec);
    for x in v {
        if *x.as_abs() > m {
            m.assign(&*x.as_abs());
        }
    }
    m
}

/// Dot product accumulated with fused multiply-adds.
pub fn dot(a: &[BigReal], b: &[BigReal]) -> BigReal {
    let prec = a.first().map(|x| x.prec()).unwrap_or(64);
    let mut acc = Float::new(prec);
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Number of agreeing significant decimal digits between `a` and `b`,
/// capped at `cap`.
pub fn matching_digits(a: &BigReal, b: &BigReal, cap: u32) -> u32 {
    if a == b {
        return cap;
    }
    let prec = a.prec().max(b.prec());
    let diff = Float::with_val(prec, a - b).abs();
    let scale = Float::with_val(prec, &*a.as_abs()).max(&b.as_abs());
    if scale.is_zero() {
        return cap;
    }
    let rel = diff / scale;
    let d = -rel.log10().to_f64();
    if d.is_nan() || d < 0.0 {
        0
    } else {
        (d.floor() as u32).min(cap)
    }
}
