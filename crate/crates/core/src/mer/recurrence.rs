use crate::error::{Error, Result};
use crate::mpnum::{BigReal, Precision};
use rug::ops::Pow;
use rug::Float;

/// One monomial `c · p^i · E^j` of a step coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyTerm {
    pub coeff: BigReal,
    pub p_pow: u32,
    pub e_pow: u32,
}

/// Polynomial in the recurrence index `p` and the energy `E`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepPoly {
    pub terms: Vec<PolyTerm>,
}

impl StepPoly {
    pub fn new(terms: Vec<PolyTerm>) -> Self {
        StepPoly { terms }
    }

    pub fn constant(c: BigReal) -> Self {
        StepPoly::new(vec![PolyTerm {
            coeff: c,
            p_pow: 0,
            e_pow: 0,
        }])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.is_zero())
    }

    /// Value and `∂/∂E` at `(p, E)`.
    pub fn eval(&self, p: usize, energy: &BigReal) -> (BigReal, BigReal) {
        let bits = energy.prec();
        let mut value = Float::new(bits);
        let mut deriv = Float::new(bits);
        let pf = Float::with_val(bits, p);
        for t in &self.terms {
            let pp = Float::with_val(bits, pf.clone().pow(t.p_pow));
            let base = Float::with_val(bits, &t.coeff * &pp);
            value += Float::with_val(bits, &base * Float::with_val(bits, energy.pow(t.e_pow)));
            if t.e_pow > 0 {
                let e_lower = Float::with_val(bits, energy.pow(t.e_pow - 1));
                deriv += base * e_lower * t.e_pow;
            }
        }
        (value, deriv)
    }
}

/// Linear moment recurrence
/// `divisor(p, E) · μ(p+1) = Σ_k a_k(p, E) · μ(p − k)`, applied for `p ≥ m_s`,
/// with the first `m_s + 1` moments free (the missing moments).
#[derive(Debug, Clone, PartialEq)]
pub struct Recurrence1D {
    missing_order: usize,
    coeffs: Vec<StepPoly>,
    divisor: Option<StepPoly>,
    label: String,
}

impl Recurrence1D {
    pub fn new(
        missing_order: usize,
        coeffs: Vec<StepPoly>,
        divisor: Option<StepPoly>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("recurrence needs at least one step coefficient".into()));
        }
        if divisor.as_ref().is_some_and(StepPoly::is_zero) {
            return Err(Error::Invalid("recurrence divisor is identically zero".into()));
        }
        Ok(Recurrence1D {
            missing_order,
            coeffs,
            divisor,
            label: label.into(),
        })
    }

    /// Even-parity harmonic oscillator `−ψ'' + x²ψ = Eψ` in Stieltjes moments
    /// of `ξ = x²`: `u(p+1) = E u(p) + 2p(2p−1) u(p−1)`.
    pub fn harmonic_even(prec: Precision) -> Self {
        let term = |c: i64, p_pow, e_pow| PolyTerm {
            coeff: prec.int(c),
            p_pow,
            e_pow,
        };
        Recurrence1D {
            missing_order: 0,
            coeffs: vec![
                StepPoly::new(vec![term(1, 0, 1)]),
                StepPoly::new(vec![term(4, 2, 0), term(-2, 1, 0)]),
            ],
            divisor: None,
            label: "harmonic oscillator, even parity".into(),
        }
    }

    /// Full-line harmonic oscillator moments `μ(p) = ∫ x^p ψ`, both parities:
    /// `μ(p+1) = E μ(p−1) + (p−1)(p−2) μ(p−3)`, two missing moments.
    pub fn harmonic_full_line(prec: Precision) -> Self {
        let term = |c: i64, p_pow, e_pow| PolyTerm {
            coeff: prec.int(c),
            p_pow,
            e_pow,
        };
        Recurrence1D {
            missing_order: 1,
            coeffs: vec![
                StepPoly::default(),
                StepPoly::new(vec![term(1, 0, 1)]),
                StepPoly::default(),
                StepPoly::new(vec![term(1, 2, 0), term(-3, 1, 0), term(2, 0, 0)]),
            ],
            divisor: None,
            label: "harmonic oscillator, full line".into(),
        }
    }

    pub fn missing_order(&self) -> usize {
        self.missing_order
    }

    pub fn depth(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[StepPoly] {
        &self.coeffs
    }

    pub fn divisor(&self) -> Option<&StepPoly> {
        self.divisor.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Step coefficients at `(p, E)` as `(a_k, ∂_E a_k)`, already divided by
    /// the divisor. Terms reaching below index 0 must vanish.
    pub(crate) fn step(&self, p: usize, energy: &BigReal) -> Result<Vec<(BigReal, BigReal)>> {
        let (div, d_div) = match &self.divisor {
            Some(d) => d.eval(p, energy),
            None => (Float::with_val(energy.prec(), 1), Float::new(energy.prec())),
        };
        if div.is_zero() {
            return Err(Error::Invalid(format!(
                "recurrence divisor vanishes at p = {p}"
            )));
        }
        let bits = energy.prec();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (k, poly) in self.coeffs.iter().enumerate() {
            let (a, da) = poly.eval(p, energy);
            if k > p && !a.is_zero() {
                return Err(Error::Invalid(format!(
                    "step coefficient a_{k} is nonzero at p = {p} but reaches below index 0"
                )));
            }
            // (a / d)' = (a' d − a d') / d²
            let q = Float::with_val(bits, &a / &div);
            let dq = (Float::with_val(bits, &da * &div) - Float::with_val(bits, &a * &d_div))
                / Float::with_val(bits, div.clone().square());
            out.push((q, dq));
        }
        Ok(out)
    }
}
