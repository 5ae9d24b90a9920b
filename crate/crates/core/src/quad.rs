//! Double-exponential quadrature on `[0, ∞)`.
//!
//! Independent of every recursion in the crate; used to audit weight moments.

use crate::error::{Error, Result};
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

/// `∫_0^∞ f(t) dt` by the exp-sinh rule `t = exp(π/2 · sinh u)`, halving
/// the step until two levels agree to `10^-digits` relative.
///
/// `f` must be analytic on `(0, ∞)` and decay at least exponentially.
pub fn exp_sinh<F>(bits: u32, digits: u32, f: F) -> Result<Float>
where
    F: Fn(&Float) -> Float,
{
    let half_pi = Float::with_val(bits, Constant::Pi) / 2u32;
    let tiny = Float::with_val(bits, 10).pow(-(digits as i32) - 10);
    let tol = Float::with_val(bits, 10).pow(-(digits as i32));
    let node = |u: &Float| -> Float {
        let s = Float::with_val(bits, u.sinh_ref());
        let t = Float::with_val(bits, &half_pi * &s).exp();
        let w = Float::with_val(bits, u.cosh_ref()) * &half_pi * &t;
        let v = f(&t);
        if v.is_finite() {
            v * w
        } else {
            Float::new(bits)
        }
    };
    // Sum of samples at u = k·h over one direction until they stay negligible.
    let side = |h: &Float, sign: i32, offset: bool| -> Float {
        let mut acc = Float::new(bits);
        let mut quiet = 0;
        let mut k: i64 = 1;
        loop {
            let kk = if offset { 2 * k - 1 } else { k };
            let u = Float::with_val(bits, h * kk) * sign;
            let term = node(&u);
            acc += &term;
            let small = term.is_zero() || Float::with_val(bits, term.abs_ref()) <= tiny.clone() * acc.clone().abs();
            quiet = if small { quiet + 1 } else { 0 };
            if quiet >= 4 || kk > 4000 {
                break;
            }
            k += 1;
        }
        acc
    };
    let mut h = Float::with_val(bits, 0.5);
    let mut sum = node(&Float::new(bits)) + side(&h, 1, false) + side(&h, -1, false);
    let mut estimate = Float::with_val(bits, &sum * &h);
    for _ in 0..14 {
        // Halving h adds the odd multiples of the finer step.
        h /= 2u32;
        sum += side(&h, 1, true) + side(&h, -1, true);
        let next = Float::with_val(bits, &sum * &h);
        let diff = Float::with_val(bits, &next - &estimate).abs();
        let scale = Float::with_val(bits, next.abs_ref());
        estimate = next;
        if diff <= Float::with_val(bits, &tol * &scale) {
            return Ok(estimate);
        }
    }
    Err(Error::NotConverged(format!(
        "exp-sinh quadrature did not reach {digits} digits"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_gamma_function() {
        let bits = 200;
        // ∫ t^3 e^{-t} = 6
        let v = exp_sinh(bits, 40, |t| Float::with_val(bits, t * t) * t * Float::with_val(bits, -t).exp()).unwrap();
        let err = (v - 6u32).abs();
        assert!(err < 1e-38, "{err}");
    }

    #[test]
    fn integrates_endpoint_singularity() {
        let bits = 200;
        // ∫ t^{-1/2} e^{-t} = √π
        let v = exp_sinh(bits, 40, |t| Float::with_val(bits, t.recip_sqrt_ref()) * Float::with_val(bits, -t).exp()).unwrap();
        let root_pi = Float::with_val(bits, Constant::Pi).sqrt();
        assert!((v - root_pi).abs() < 1e-38);
    }
}
