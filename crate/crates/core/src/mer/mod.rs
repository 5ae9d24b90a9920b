//! Moment equation representations.
//!
//! A transfer table expresses every power moment reachable at a given order
//! as a linear combination of the missing moments,
//! `μ(index) = Σ_ℓ M(index, ℓ) μ_ℓ`, at one value of the energy parameter.
//! For the Zeeman system the energy parameter is the binding energy `ε`.

mod qzm;
mod recurrence;

pub use qzm::{antidiagonal_index, antidiagonal_order, covered_len, QzmSystem};
pub use recurrence::{PolyTerm, Recurrence1D, StepPoly};

use crate::error::{Error, Result};
use crate::mpnum::BigReal;
use rug::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferKind {
    OneD,
    TwoD,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TransferSource {
    OneD { rec: Recurrence1D, p_max: usize },
    Qzm(QzmSystem),
}

#[derive(Debug, Clone)]
pub struct TransferTable {
    source: TransferSource,
    m_s: usize,
    energy: BigReal,
    entries: Vec<Vec<BigReal>>,
    d_entries: Option<Vec<Vec<BigReal>>>,
}

impl TransferTable {
    pub fn kind(&self) -> TransferKind {
        match self.source {
            TransferSource::OneD { .. } => TransferKind::OneD,
            TransferSource::Qzm(_) => TransferKind::TwoD,
        }
    }

    pub fn source(&self) -> &TransferSource {
        &self.source
    }

    /// Missing-moment order `m_s`; there are `m_s + 1` columns.
    pub fn order(&self) -> usize {
        self.m_s
    }

    pub fn energy(&self) -> &BigReal {
        &self.energy
    }

    /// Number of covered moment indices (rows).
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Row for moment index `idx` (`p` in 1-D, antidiagonal position in 2-D).
    pub fn row(&self, idx: usize) -> &[BigReal] {
        &self.entries[idx]
    }

    pub fn d_row(&self, idx: usize) -> Option<&[BigReal]> {
        self.d_entries.as_ref().map(|d| d[idx].as_slice())
    }

    pub fn has_derivative(&self) -> bool {
        self.d_entries.is_some()
    }

    /// `M(p, ℓ)` of a 1-D table.
    pub fn get(&self, p: usize, l: usize) -> Option<&BigReal> {
        self.entries.get(p).and_then(|r| r.get(l))
    }

    /// `M(m, n, ℓ)` of a 2-D table, `None` outside the covered set.
    pub fn get_2d(&self, m: usize, n: usize, l: usize) -> Option<&BigReal> {
        if self.kind() != TransferKind::TwoD || m + n > 2 * self.m_s + 1 {
            return None;
        }
        self.entries[antidiagonal_index(m, n)].get(l)
    }

    pub fn d_get(&self, p: usize, l: usize) -> Option<&BigReal> {
        self.d_entries.as_ref()?.get(p)?.get(l)
    }

    pub fn d_get_2d(&self, m: usize, n: usize, l: usize) -> Option<&BigReal> {
        if self.kind() != TransferKind::TwoD || m + n > 2 * self.m_s + 1 {
            return None;
        }
        self.d_entries.as_ref()?[antidiagonal_index(m, n)].get(l)
    }

    /// Moment index of missing moment `ℓ`.
    pub fn missing_index(&self, l: usize) -> usize {
        match self.kind() {
            TransferKind::OneD => l,
            TransferKind::TwoD => antidiagonal_index(l, l),
        }
    }

    /// Largest `|stencil residual| / |largest stencil term|` over every
    /// interior lattice point and column (2-D tables only).
    pub fn stencil_residual(&self) -> Option<BigReal> {
        let TransferSource::Qzm(sys) = &self.source else {
            return None;
        };
        let bits = self.energy.prec();
        let eps = &self.energy;
        let mut worst = Float::new(bits);
        for d in 0..=2 * self.m_s {
            for m in 0..=d {
                let n = d - m;
                for l in 0..=self.m_s {
                    let at = |mm: usize, nn: usize| self.entries[antidiagonal_index(mm, nn)][l].clone();
                    let mut terms: Vec<BigReal> = Vec::with_capacity(5);
                    if m >= 1 {
                        terms.push(at(m - 1, n) * (m * m) as u32);
                    }
                    if n >= 1 {
                        terms.push(at(m, n - 1) * (n * n) as u32);
                    }
                    let side_m = (Float::with_val(bits, sys.b() * m as u32) + eps) / 2u32;
                    let side_n = (Float::with_val(bits, sys.b() * n as u32) + eps) / 2u32;
                    terms.push(-(side_m * at(m, n + 1)));
                    terms.push(-(side_n * at(m + 1, n)));
                    terms.push(Float::with_val(bits, sys.z() * &at(m, n)));
                    let mut sum = Float::new(bits);
                    let mut scale = Float::new(bits);
                    for t in &terms {
                        sum += t;
                        if *t.as_abs() > scale {
                            scale = Float::with_val(bits, &*t.as_abs());
                        }
                    }
                    if scale.is_zero() {
                        continue;
                    }
                    let rel = sum.abs() / scale;
                    if rel > worst {
                        worst = rel;
                    }
                }
            }
        }
        Some(worst)
    }
}

/// Transfer table of a 1-D recurrence for `p = 0..=p_max` at energy `E`.
pub fn build_1d(rec: &Recurrence1D, energy: &BigReal, p_max: usize) -> Result<TransferTable> {
    build_1d_inner(rec, energy, p_max, false)
}

fn build_1d_inner(
    rec: &Recurrence1D,
    energy: &BigReal,
    p_max: usize,
    with_derivative: bool,
) -> Result<TransferTable> {
    let m_s = rec.missing_order();
    if p_max < m_s {
        return Err(Error::Invalid(format!(
            "p_max = {p_max} must be at least the missing order {m_s}"
        )));
    }
    let bits = energy.prec();
    let cols = m_s + 1;
    let mut val: Vec<Vec<BigReal>> = Vec::with_capacity(p_max + 1);
    let mut der: Vec<Vec<BigReal>> = Vec::new();
    for p in 0..=m_s {
        let mut row = vec![Float::new(bits); cols];
        row[p] = Float::with_val(bits, 1);
        val.push(row);
        if with_derivative {
            der.push(vec![Float::new(bits); cols]);
        }
    }
    for p in m_s..p_max {
        let step = rec.step(p, energy)?;
        let mut row = vec![Float::new(bits); cols];
        let mut drow = vec![Float::new(bits); cols];
        for (k, (a, da)) in step.iter().enumerate() {
            if k > p || a.is_zero() && da.is_zero() {
                continue;
            }
            let src = &val[p - k];
            for l in 0..cols {
                row[l] += a * &src[l];
                if with_derivative {
                    drow[l] += da * &src[l];
                    drow[l] += a * &der[p - k][l];
                }
            }
        }
        val.push(row);
        if with_derivative {
            der.push(drow);
        }
    }
    Ok(TransferTable {
        source: TransferSource::OneD {
            rec: rec.clone(),
            p_max,
        },
        m_s,
        energy: energy.clone(),
        entries: val,
        d_entries: with_derivative.then_some(der),
    })
}

/// Transfer table `M_ε(m, n, ℓ)` on `{m + n ≤ 2 m_s + 1}` at binding energy `ε`.
pub fn build_qzm(sys: &QzmSystem, eps: &BigReal, m_s: usize) -> Result<TransferTable> {
    build_qzm_inner(sys, eps, m_s, false)
}

fn build_qzm_inner(
    sys: &QzmSystem,
    eps: &BigReal,
    m_s: usize,
    with_derivative: bool,
) -> Result<TransferTable> {
    if eps.is_sign_negative() || eps.is_zero() {
        return Err(Error::Domain(format!("binding energy must be positive, got {eps}")));
    }
    let (val, der) = qzm::sweep(sys, eps, m_s, with_derivative)?;
    Ok(TransferTable {
        source: TransferSource::Qzm(sys.clone()),
        m_s,
        energy: eps.clone(),
        entries: val,
        d_entries: der,
    })
}

/// Fills the energy-derivative companion by differentiating the recurrence
/// step by step. Missing-moment rows have zero derivative.
pub fn build_derivative(table: TransferTable) -> Result<TransferTable> {
    if table.has_derivative() {
        return Ok(table);
    }
    match &table.source {
        TransferSource::OneD { rec, p_max } => build_1d_inner(rec, &table.energy, *p_max, true),
        TransferSource::Qzm(sys) => build_qzm_inner(sys, &table.energy, table.m_s, true),
    }
}

/// Table and derivative in one pass.
pub fn build_1d_with_derivative(
    rec: &Recurrence1D,
    energy: &BigReal,
    p_max: usize,
) -> Result<TransferTable> {
    build_1d_inner(rec, energy, p_max, true)
}

pub fn build_qzm_with_derivative(
    sys: &QzmSystem,
    eps: &BigReal,
    m_s: usize,
) -> Result<TransferTable> {
    build_qzm_inner(sys, eps, m_s, true)
}
