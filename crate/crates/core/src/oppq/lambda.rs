use super::basis::OrthonormalBasis;
use crate::error::{Error, Result};
use crate::mer::TransferTable;
use crate::mpnum::{BigReal, SymMatrix};
use crate::par::{self, Exec};
use rug::Float;

/// `Λ(i, ℓ) = Σ_{j≤i} Ξ(i, j) M(j, ℓ)`: projection coefficients as linear forms
/// in the missing moments, `c_i = Σ_ℓ Λ(i, ℓ) μ_ℓ`.
#[derive(Debug, Clone)]
pub struct LambdaTable {
    rows: Vec<Vec<BigReal>>,
    d_rows: Option<Vec<Vec<BigReal>>>,
}

impl LambdaTable {
    /// Rows `i = 0..len()`.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of missing moments (`m_s + 1`).
    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn row(&self, i: usize) -> &[BigReal] {
        &self.rows[i]
    }

    pub fn d_row(&self, i: usize) -> Option<&[BigReal]> {
        self.d_rows.as_ref().map(|d| d[i].as_slice())
    }

    pub fn get(&self, i: usize, l: usize) -> &BigReal {
        &self.rows[i][l]
    }

    /// `c_i = Σ_ℓ Λ(i, ℓ) μ_ℓ` for every row.
    pub fn coefficients(&self, mu: &[BigReal]) -> Result<Vec<BigReal>> {
        if mu.len() != self.width() {
            return Err(Error::DimensionMismatch {
                expected: self.width(),
                found: mu.len(),
            });
        }
        Ok(self.rows.iter().map(|r| crate::mpnum::dot(r, mu)).collect())
    }

    /// `D = Σ_i Λ_i Λ_iᵀ` and, when available, `∂D = Σ_i (∂Λ_i Λ_iᵀ + Λ_i ∂Λ_iᵀ)`.
    pub fn dyad_sum(&self, exec: Exec) -> (SymMatrix, Option<SymMatrix>) {
        let k = self.width();
        let bits = self.rows[0][0].prec();
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (0..=a).map(move |b| (a, b))).collect();
        let entries = par::map_slice(exec, &pairs, |&(a, b)| {
            let mut v = Float::new(bits);
            let mut dv = Float::new(bits);
            for (i, r) in self.rows.iter().enumerate() {
                v += &r[a] * &r[b];
                if let Some(d) = &self.d_rows {
                    dv += &d[i][a] * &r[b];
                    dv += &r[a] * &d[i][b];
                }
            }
            (v, dv)
        });
        let mut it = entries.iter();
        let mut d = SymMatrix::zeros(k, bits);
        let mut dd = SymMatrix::zeros(k, bits);
        for &(a, b) in &pairs {
            let (v, dv) = it.next().expect("one entry per pair");
            d.set(a, b, v.clone());
            dd.set(a, b, dv.clone());
        }
        (d, self.d_rows.as_ref().map(|_| dd))
    }
}

/// Λ rows `0..dim` from the basis and a transfer table whose row `j` holds
/// the moment of monomial `j`.
pub fn lambda_table(
    basis: &OrthonormalBasis,
    table: &TransferTable,
    dim: usize,
    exec: Exec,
) -> Result<LambdaTable> {
    if dim > basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: basis.dim(),
        });
    }
    if dim > table.len() {
        return Err(Error::CoverageMismatch(table.len()));
    }
    let width = table.order() + 1;
    let bits = table.energy().prec();
    let combine = |i: usize, derivative: bool| -> Vec<BigReal> {
        let mut out = vec![Float::new(bits); width];
        for (j, xi) in basis.row(i).iter().enumerate() {
            let m = if derivative {
                table.d_row(j).expect("derivative requested")
            } else {
                table.row(j)
            };
            for (o, mj) in out.iter_mut().zip(m) {
                if !mj.is_zero() {
                    *o += xi * mj;
                }
            }
        }
        out
    };
    let rows = par::map_range(exec, 0..dim, |i| combine(i, false));
    let d_rows = table
        .has_derivative()
        .then(|| par::map_range(exec, 0..dim, |i| combine(i, true)));
    Ok(LambdaTable { rows, d_rows })
}
