use crate::error::{Error, Result};
use crate::mpnum::{cholesky, invert_lower, max_abs, BigReal, LowerTriangular, Precision, SymMatrix};
use rug::Float;

/// Coefficients `Ξ(i, j)` of the weight-orthonormal polynomials
/// `P_i = Σ_{j≤i} Ξ(i, j) · monomial_j`, with `Ξ = C⁻¹` for `W = C Cᵀ`.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    xi: LowerTriangular,
    weight: SymMatrix,
}

/// Orthonormal basis for the moment matrix `w` (already in monomial order).
///
/// `Ξ` is stored with guard digits: a `D`-digit `Ξ` carries an error of order
/// `√cond(W) · 10^-D`, so the factorization is widened until the Gram
/// residual against `w` drops below `10^(6−D)`.
pub fn build_basis(w: &SymMatrix, prec: Precision) -> Result<OrthonormalBasis> {
    let target = prec.ulp_scaled(6);
    let mut guard = 10;
    let mut estimated = false;
    loop {
        let work = prec.plus(guard);
        let wide = SymMatrix::from_fn(w.dim(), |i, j| Float::with_val(work.bits(), w.get(i, j)));
        let c = cholesky(&wide)?;
        let xi = invert_lower(&c);
        if !estimated {
            estimated = true;
            // The Gram residual grows like √(‖Ξ‖·‖C‖)·10^-(D+guard); jump there before paying for a check.
            let lost = (lower_max_abs(&xi) * lower_max_abs(&c)).log10().to_f64() / 2.0;
            let wanted = lost.ceil() as u32 + 4;
            if wanted > guard {
                guard = wanted;
                continue;
            }
        }
        let basis = OrthonormalBasis {
            xi,
            weight: w.clone(),
        };
        let residual = basis.gram_residual();
        if residual < target {
            return Ok(basis);
        }
        if guard >= 4 * prec.digits() {
            return Err(Error::PrecisionExhausted(format!(
                "Gram residual {} exceeds {} with {guard} guard digits",
                residual.to_f64(),
                target.to_f64()
            )));
        }
        guard *= 2;
    }
}

fn lower_max_abs(l: &LowerTriangular) -> BigReal {
    let mut m = Float::new(l.prec());
    for i in 0..l.dim() {
        m.max_mut(&max_abs(l.row(i)));
    }
    m
}

impl OrthonormalBasis {
    /// Number of polynomials, `I_max + 1`.
    pub fn dim(&self) -> usize {
        self.xi.dim()
    }

    pub fn xi(&self) -> &LowerTriangular {
        &self.xi
    }

    pub fn weight(&self) -> &SymMatrix {
        &self.weight
    }

    /// `Ξ(i, j)`, zero above the diagonal.
    pub fn coeff(&self, i: usize, j: usize) -> BigReal {
        if j > i {
            Float::new(self.xi.prec())
        } else {
            self.xi.get(i, j).clone()
        }
    }

    pub fn row(&self, i: usize) -> &[BigReal] {
        self.xi.row(i)
    }

    /// Basis of the leading `dim` monomials. Cholesky factors nest, so this is
    /// exactly the basis a smaller moment matrix would give.
    pub fn leading(&self, dim: usize) -> Result<OrthonormalBasis> {
        if dim == 0 || dim > self.dim() {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            });
        }
        let idx: Vec<usize> = (0..dim).collect();
        Ok(OrthonormalBasis {
            xi: self.xi.leading(dim),
            weight: self.weight.submatrix(&idx),
        })
    }

    /// `max |Ξ W Ξᵀ − I|` over every entry.
    pub fn gram_residual(&self) -> BigReal {
        let g = self.xi.congruence(&self.weight);
        let bits = self.xi.prec();
        let mut worst = Float::new(bits);
        for i in 0..self.dim() {
            for j in 0..=i {
                let mut e = g.get(i, j).clone();
                if i == j {
                    e -= 1u32;
                }
                let e = e.abs();
                if e > worst {
                    worst = e;
                }
            }
        }
        worst
    }
}
