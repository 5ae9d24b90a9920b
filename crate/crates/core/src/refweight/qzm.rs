use super::gamma::{gamma_grid, gamma_seed, GammaGrid};
use crate::error::Result;
use crate::mer::{antidiagonal_order, QzmSystem};
use crate::mpnum::{BigReal, Precision, SymMatrix};
use rug::ops::Pow;
use rug::Float;

/// Moments `w(m, n) = ∫∫ ξ^m η^n e^{−α(ξ+η) − βξη} dξ dη` of the frozen
/// Zeeman weight on `m + n ≤ max_sum`.
#[derive(Debug, Clone, PartialEq)]
pub struct QzmWeightMoments {
    alpha: BigReal,
    beta: BigReal,
    g: BigReal,
    grid: GammaGrid,
    // w[n][m]
    w: Vec<Vec<BigReal>>,
    work: Precision,
}

impl QzmWeightMoments {
    pub fn alpha(&self) -> &BigReal {
        &self.alpha
    }

    pub fn beta(&self) -> &BigReal {
        &self.beta
    }

    pub fn g(&self) -> &BigReal {
        &self.g
    }

    pub fn gamma_grid(&self) -> &GammaGrid {
        &self.grid
    }

    /// Precision the Γ grid was generated at.
    pub fn work_precision(&self) -> Precision {
        self.work
    }

    pub fn max_sum(&self) -> usize {
        self.grid.max_sum()
    }

    /// `w(m, n)`; `None` outside the grid.
    pub fn get(&self, m: usize, n: usize) -> Option<&BigReal> {
        self.w.get(n)?.get(m)
    }

    /// Moment matrix `𝒲_ij = w(m_i + m_j, n_i + n_j)` over the antidiagonal
    /// ordering of order `m_s`.
    pub fn moment_matrix(&self, m_s: usize) -> Result<SymMatrix> {
        let order = antidiagonal_order(m_s);
        let need = 2 * (2 * m_s + 1);
        if need > self.max_sum() {
            return Err(crate::Error::CoverageMismatch(need));
        }
        Ok(SymMatrix::from_fn(order.len(), |i, j| {
            let (mi, ni) = order[i];
            let (mj, nj) = order[j];
            self.w[ni + nj][mi + mj].clone()
        }))
    }
}

/// Working digits for the Γ grid: twice the run precision, widened further
/// when the one-step recursions are expected to cancel more than that.
fn grid_precision(prec: Precision, g: &BigReal, max_sum: usize) -> Precision {
    let x = g.to_f64().recip();
    let loss = if x > 1.0 { (max_sum as f64 * x.log10()).ceil() as u32 } else { 0 };
    let wide = prec.digits() + loss + 20;
    prec.scaled(2).max(Precision::new(wide).unwrap_or(prec))
}

/// Weight moments for basis construction at order `m_s`
/// (`m + n ≤ 2(2 m_s + 1)`), returned at the run precision.
pub fn qzm_weight_moments(sys: &QzmSystem, m_s: usize, prec: Precision) -> Result<QzmWeightMoments> {
    let bits = prec.bits();
    let max_sum = 2 * (2 * m_s + 1);
    let eps0 = sys.eps0();
    let g_run = Float::with_val(bits, sys.b() / eps0);
    let work = grid_precision(prec, &g_run, max_sum);
    let wb = work.bits();
    let g = Float::with_val(wb, sys.b()) / Float::with_val(wb, eps0);
    let seed = gamma_seed(&g, work)?;
    let grid = gamma_grid(&g, max_sum, &seed, work)?;
    let alpha = (Float::with_val(wb, eps0) / 2u32).sqrt();
    let inv_alpha = Float::with_val(wb, alpha.recip_ref());
    let mut w = Vec::with_capacity(max_sum + 1);
    let mut n_fact = Float::with_val(wb, 1);
    for n in 0..=max_sum {
        if n > 0 {
            n_fact *= n as u32;
        }
        // n! Γ(m, n+1, g) / α^{m+n+2}
        let mut scale = Float::with_val(wb, Pow::pow(&inv_alpha, (n + 2) as u32)) * &n_fact;
        let mut row = Vec::with_capacity(max_sum - n + 1);
        for m in 0..=max_sum - n {
            row.push(prec.round(&Float::with_val(wb, grid.get(m, n).expect("grid covers m + n") * &scale)));
            scale *= &inv_alpha;
        }
        w.push(row);
    }
    Ok(QzmWeightMoments {
        alpha: prec.round(&alpha),
        beta: Float::with_val(bits, sys.b() / 2u32),
        g: g_run,
        grid,
        w,
        work,
    })
}
