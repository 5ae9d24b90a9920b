//! Reference weights and their exact power moments.

mod gamma;
mod qzm;

pub use gamma::{gamma_grid, gamma_seed, GammaGrid};
pub use qzm::{qzm_weight_moments, QzmWeightMoments};

use crate::error::{Error, Result};
use crate::mpnum::{BigReal, Precision, SymMatrix};
use rug::ops::Pow;
use rug::Float;

/// Power moments `w(p) = ∫ x^p R(x) dx`, `p = 0..=p_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMoments1D {
    w: Vec<BigReal>,
    description: String,
}

impl WeightMoments1D {
    pub fn new(w: Vec<BigReal>, description: impl Into<String>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::Invalid("weight needs at least one moment".into()));
        }
        Ok(WeightMoments1D {
            w,
            description: description.into(),
        })
    }

    pub fn moments(&self) -> &[BigReal] {
        &self.w
    }

    pub fn get(&self, p: usize) -> &BigReal {
        &self.w[p]
    }

    pub fn p_max(&self) -> usize {
        self.w.len() - 1
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Hankel matrix `W_ij = w(i + j)` of dimension `dim`.
    pub fn hankel(&self, dim: usize) -> Result<SymMatrix> {
        if dim == 0 || 2 * (dim - 1) > self.p_max() {
            return Err(Error::DimensionMismatch {
                expected: 2 * dim.max(1) - 1,
                found: self.w.len(),
            });
        }
        Ok(SymMatrix::from_fn(dim, |i, j| self.w[i + j].clone()))
    }
}

/// Reference weight families on the line or half-line.
#[derive(Debug, Clone, PartialEq)]
pub enum Weight1D {
    /// `e^{-ξ/2}/√ξ` on `ξ > 0`: the Gaussian `e^{-x²/2}` seen through `ξ = x²`.
    HarmonicHalfLine,
    /// `ξ^power e^{-rate·ξ}` on `ξ > 0`, `power > -1`, `rate > 0`.
    HalfLineGamma { power: BigReal, rate: BigReal },
    /// `e^{-x²/(2·variance)}` on the whole line.
    Gaussian { variance: BigReal },
}

impl Weight1D {
    pub fn moments(&self, p_max: usize, prec: Precision) -> Result<WeightMoments1D> {
        match self {
            Weight1D::HarmonicHalfLine => Ok(harmonic_weight_moments(p_max, prec)),
            Weight1D::HalfLineGamma { power, rate } => {
                if *power <= -1 || *rate <= 0 {
                    return Err(Error::Invalid(format!(
                        "gamma weight needs power > -1 and rate > 0, got {power}, {rate}"
                    )));
                }
                let bits = prec.bits();
                let w = (0..=p_max)
                    .map(|p| {
                        // Γ(p + a + 1) / r^(p + a + 1)
                        let s = Float::with_val(bits, power + p as u32) + 1u32;
                        let num = Float::with_val(bits, s.gamma_ref());
                        let den = Float::with_val(bits, Pow::pow(rate, &s));
                        num / den
                    })
                    .collect();
                WeightMoments1D::new(w, format!("xi^{power} exp(-{rate} xi) on xi > 0"))
            }
            Weight1D::Gaussian { variance } => {
                if *variance <= 0 {
                    return Err(Error::Invalid(format!(
                        "Gaussian weight needs variance > 0, got {variance}"
                    )));
                }
                let bits = prec.bits();
                let mut w = Vec::with_capacity(p_max + 1);
                let mut even = (prec.pi() * 2u32 * variance).sqrt();
                for p in 0..=p_max {
                    if p % 2 == 1 {
                        w.push(Float::new(bits));
                    } else {
                        if p > 0 {
                            // w(2k) = (2k − 1) · variance · w(2k − 2)
                            even = even * variance * (p as u32 - 1);
                        }
                        w.push(even.clone());
                    }
                }
                WeightMoments1D::new(w, format!("exp(-x^2 / (2 * {variance})) on the line"))
            }
        }
    }
}

/// `w(p) = ∫_0^∞ ξ^{p−1/2} e^{−ξ/2} dξ = 2^{p+1/2} Γ(p + 1/2)`, by the exact
/// half-integer recursion from `Γ(1/2) = √π`.
pub fn harmonic_weight_moments(p_max: usize, prec: Precision) -> WeightMoments1D {
    let mut w = Vec::with_capacity(p_max + 1);
    // w(0) = √2 · √π; w(p) = 2 (p − 1/2) w(p−1) = (2p − 1) w(p−1)
    let mut cur = (prec.pi() * 2u32).sqrt();
    w.push(cur.clone());
    for p in 1..=p_max {
        cur *= 2 * p as u32 - 1;
        w.push(cur.clone());
    }
    WeightMoments1D {
        w,
        description: "exp(-xi/2)/sqrt(xi) on xi > 0".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpnum::cholesky;
    use crate::quad::exp_sinh;

    fn prec() -> Precision {
        Precision::new(50).unwrap()
    }

    #[test]
    fn harmonic_moments_by_recursion() {
        let p = prec();
        let w = harmonic_weight_moments(4, p);
        let root = (p.pi() * 2u32).sqrt();
        assert_eq!(*w.get(0), root);
        assert_eq!(*w.get(1), root);
        assert_eq!(Float::with_val(p.bits(), w.get(2) / w.get(1)), 3);
        assert!((w.get(0).to_f64() - 2.50663).abs() < 1e-5);
        assert!((1.0 / w.get(0).to_f64() - 0.398942).abs() < 1e-6);
    }

    #[test]
    fn harmonic_moments_against_gamma_function() {
        let p = prec();
        let w = harmonic_weight_moments(12, p);
        for k in 0..=12u32 {
            let s = Float::with_val(p.bits(), k) + 0.5f64;
            let exact = Float::with_val(p.bits(), s.gamma_ref()) * Float::with_val(p.bits(), 2u32).pow(&s);
            assert!(crate::mpnum::matching_digits(w.get(k as usize), &exact, 60) >= 48);
        }
    }

    #[test]
    fn harmonic_hankel_factorizes() {
        let p = prec();
        let w = harmonic_weight_moments(10, p);
        let c = cholesky(&w.hankel(6).unwrap()).unwrap();
        assert!((0..6).all(|i| *c.get(i, i) > 0));
        assert!(w.hankel(7).is_err());
    }

    #[test]
    fn gamma_weight_matches_quadrature() {
        let p = prec();
        let weight = Weight1D::HalfLineGamma {
            power: p.from_f64(0.25),
            rate: p.from_f64(1.5),
        };
        let w = weight.moments(3, p).unwrap();
        let bits = p.bits();
        for k in 0..=3u32 {
            let q = exp_sinh(bits, 40, |t| {
                Float::with_val(bits, Pow::pow(t, &(Float::with_val(bits, k) + 0.25f64)))
                    * Float::with_val(bits, t * -1.5f64).exp()
            })
            .unwrap();
            assert!(crate::mpnum::matching_digits(w.get(k as usize), &q, 60) >= 35);
        }
    }

    #[test]
    fn gaussian_moments() {
        let p = prec();
        let w = Weight1D::Gaussian { variance: p.int(1) }.moments(6, p).unwrap();
        let root = (p.pi() * 2u32).sqrt();
        assert_eq!(*w.get(0), root);
        assert!(w.get(1).is_zero() && w.get(5).is_zero());
        assert_eq!(Float::with_val(p.bits(), w.get(4) / &root), 3);
        assert_eq!(Float::with_val(p.bits(), w.get(6) / &root), 15);
    }

    #[test]
    fn rejects_bad_weight_parameters() {
        let p = prec();
        assert!(Weight1D::Gaussian { variance: p.zero() }.moments(2, p).is_err());
        let bad = Weight1D::HalfLineGamma { power: p.int(-1), rate: p.one() };
        assert!(bad.moments(2, p).is_err());
    }
}
