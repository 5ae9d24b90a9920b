use crate::error::{Error, Result};
use crate::mpnum::{BigReal, Precision};
use rug::Float;

/// Even-parity, zero azimuthal momentum hydrogen in a magnetic field `B`,
/// in parabolic Stieltjes moments. `eps0` is the binding energy frozen into
/// the reference weight.
#[derive(Debug, Clone, PartialEq)]
pub struct QzmSystem {
    b: BigReal,
    z: BigReal,
    eps0: BigReal,
}

impl QzmSystem {
    pub fn new(b: BigReal, z: BigReal, eps0: BigReal) -> Result<Self> {
        for (name, v) in [("B", &b), ("Z", &z), ("eps0", &eps0)] {
            if !v.is_finite() || v.is_sign_negative() || v.is_zero() {
                return Err(Error::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(QzmSystem { b, z, eps0 })
    }

    /// Parses decimal strings at the given precision (`Z = 1` for hydrogen).
    pub fn parse(prec: Precision, b: &str, z: &str, eps0: &str) -> Result<Self> {
        Self::new(prec.parse(b)?, prec.parse(z)?, prec.parse(eps0)?)
    }

    pub fn b(&self) -> &BigReal {
        &self.b
    }

    pub fn z(&self) -> &BigReal {
        &self.z
    }

    pub fn eps0(&self) -> &BigReal {
        &self.eps0
    }

    /// Binding energy `ε = B/2 − E`.
    pub fn binding_from_energy(&self, energy: &BigReal) -> BigReal {
        Float::with_val(energy.prec(), &self.b / 2u32) - energy
    }
}

/// Number of lattice points with `m + n ≤ 2 m_s + 1`, i.e. `I_{m_s} + 1`.
pub fn covered_len(m_s: usize) -> usize {
    (m_s + 1) * (2 * m_s + 3)
}

/// Position of `(m, n)` in antidiagonal order (sum ascending, `m` descending).
#[inline]
pub fn antidiagonal_index(m: usize, n: usize) -> usize {
    let d = m + n;
    d * (d + 1) / 2 + n
}

/// Lattice points with `m + n ≤ 2 m_s + 1` in antidiagonal order:
/// `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), …`
pub fn antidiagonal_order(m_s: usize) -> Vec<(usize, usize)> {
    let max_d = 2 * m_s + 1;
    let mut out = Vec::with_capacity(covered_len(m_s));
    for d in 0..=max_d {
        for n in 0..=d {
            out.push((d - n, n));
        }
    }
    out
}

type Row = Vec<BigReal>;

fn axpy(acc: &mut Row, c: &BigReal, x: &Row) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += c * b;
    }
}

/// Fills `M_ε(m, n, ℓ)` (and optionally `∂_ε M`) on the covered lattice.
/// Rows are indexed by antidiagonal position, columns by `ℓ = 0..=m_s`.
pub(crate) fn sweep(
    sys: &QzmSystem,
    eps: &BigReal,
    m_s: usize,
    with_derivative: bool,
) -> Result<(Vec<Row>, Option<Vec<Row>>)> {
    let bits = eps.prec();
    let cols = m_s + 1;
    let len = covered_len(m_s);
    let zero_row = || vec![Float::new(bits); cols];
    let mut val: Vec<Row> = vec![zero_row(); len];
    let mut der: Vec<Row> = if with_derivative { vec![zero_row(); len] } else { Vec::new() };
    let b = Float::with_val(bits, sys.b());
    let z = Float::with_val(bits, sys.z());

    // ½(B k + ε)
    let half_coef = |k: usize| -> BigReal {
        let mut c = Float::with_val(bits, &b * k as u32);
        c += eps;
        c / 2u32
    };

    let mirror = |rows: &mut Vec<Row>, m: usize, n: usize| {
        if m != n {
            let v = rows[antidiagonal_index(m, n)].clone();
            rows[antidiagonal_index(n, m)] = v;
        }
    };

    val[0][0] = Float::with_val(bits, 1);
    let max_d = 2 * m_s + 1;
    for d in 0..max_d {
        let k = d / 2;
        let start_m;
        if d % 2 == 0 {
            // Diagonal stencil at (k, k): both unknowns merge by symmetry.
            //   M(k+1,k) = [2k² M(k,k−1) + Z M(k,k)] / (B k + ε)
            let divisor = Float::with_val(bits, half_coef(k) * 2u32);
            if divisor.is_zero() {
                return Err(Error::RecurrenceBreakdown { m: k, n: k });
            }
            let mut num = zero_row();
            axpy(&mut num, &z, &val[antidiagonal_index(k, k)]);
            if k >= 1 {
                let c = Float::with_val(bits, 2 * k * k);
                axpy(&mut num, &c, &val[antidiagonal_index(k, k - 1)]);
            }
            let target: Row = num.iter().map(|x| Float::with_val(bits, x / &divisor)).collect();
            if with_derivative {
                let mut dnum = zero_row();
                axpy(&mut dnum, &z, &der[antidiagonal_index(k, k)]);
                if k >= 1 {
                    let c = Float::with_val(bits, 2 * k * k);
                    axpy(&mut dnum, &c, &der[antidiagonal_index(k, k - 1)]);
                }
                let dtarget: Row = dnum
                    .iter()
                    .zip(&target)
                    .map(|(dn, t)| Float::with_val(bits, dn - t) / &divisor)
                    .collect();
                der[antidiagonal_index(k + 1, k)] = dtarget;
                mirror(&mut der, k + 1, k);
            }
            val[antidiagonal_index(k + 1, k)] = target;
            mirror(&mut val, k + 1, k);
            start_m = k + 1;
        } else {
            // Seed the missing moment on the next antidiagonal.
            let l = k + 1;
            val[antidiagonal_index(l, l)][l] = Float::with_val(bits, 1);
            start_m = k + 1;
        }
        // March outward: stencil at (m, n), m > n, solves for M(m+1, n).
        //   ½(Bn+ε) M(m+1,n) = m² M(m−1,n) + n² M(m,n−1) − ½(Bm+ε) M(m,n+1) + Z M(m,n)
        for m in start_m..=d {
            let n = d - m;
            if m <= n {
                continue;
            }
            let divisor = half_coef(n);
            if divisor.is_zero() {
                return Err(Error::RecurrenceBreakdown { m, n });
            }
            let side = half_coef(m);
            let neg_side = Float::with_val(bits, -&side);
            let m2 = Float::with_val(bits, m * m);
            let n2 = Float::with_val(bits, n * n);
            let mut num = zero_row();
            axpy(&mut num, &m2, &val[antidiagonal_index(m - 1, n)]);
            if n >= 1 {
                axpy(&mut num, &n2, &val[antidiagonal_index(m, n - 1)]);
            }
            axpy(&mut num, &neg_side, &val[antidiagonal_index(m, n + 1)]);
            axpy(&mut num, &z, &val[antidiagonal_index(m, n)]);
            let target: Row = num.iter().map(|x| Float::with_val(bits, x / &divisor)).collect();
            if with_derivative {
                // ∂: the ε-dependence of both ½(·+ε) coefficients contributes −½ terms.
                let mut dnum = zero_row();
                axpy(&mut dnum, &m2, &der[antidiagonal_index(m - 1, n)]);
                if n >= 1 {
                    axpy(&mut dnum, &n2, &der[antidiagonal_index(m, n - 1)]);
                }
                axpy(&mut dnum, &neg_side, &der[antidiagonal_index(m, n + 1)]);
                axpy(&mut dnum, &z, &der[antidiagonal_index(m, n)]);
                let minus_half = Float::with_val(bits, -0.5f64);
                axpy(&mut dnum, &minus_half, &val[antidiagonal_index(m, n + 1)]);
                axpy(&mut dnum, &minus_half, &target);
                let dtarget: Row = dnum
                    .into_iter()
                    .map(|x| Float::with_val(bits, x / &divisor))
                    .collect();
                der[antidiagonal_index(m + 1, n)] = dtarget;
                mirror(&mut der, m + 1, n);
            }
            val[antidiagonal_index(m + 1, n)] = target;
            mirror(&mut val, m + 1, n);
        }
    }
    Ok((val, if with_derivative { Some(der) } else { None }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_matches_listed_sequence() {
        let order = antidiagonal_order(3);
        assert_eq!(&order[..6], &[(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
        for (i, &(m, n)) in order.iter().enumerate() {
            assert_eq!(antidiagonal_index(m, n), i);
        }
    }

    #[test]
    fn ordering_lengths() {
        assert_eq!(antidiagonal_order(0), vec![(0, 0), (1, 0), (0, 1)]);
        assert_eq!(antidiagonal_order(0).len() - 1, 2);
        assert_eq!(antidiagonal_order(2).len(), 21);
        for m_s in 0..8 {
            assert_eq!(antidiagonal_order(m_s).len(), covered_len(m_s));
            assert!(antidiagonal_order(m_s).iter().all(|&(m, n)| m + n <= 2 * m_s + 1));
        }
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        let p = Precision::new(40).unwrap();
        assert!(QzmSystem::parse(p, "0", "1", "1").is_err());
        assert!(QzmSystem::parse(p, "2", "-1", "1").is_err());
        assert!(QzmSystem::parse(p, "2", "1", "0").is_err());
        assert!(QzmSystem::parse(p, "2", "1", "1").is_ok());
    }
}
