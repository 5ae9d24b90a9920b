use super::basis::{build_basis, OrthonormalBasis};
use super::lambda::{lambda_table, LambdaTable};
use crate::error::{Error, Result};
use crate::mer::{
    build_1d, build_1d_with_derivative, build_qzm, build_qzm_with_derivative, covered_len,
    QzmSystem, Recurrence1D, TransferTable,
};
use crate::mpnum::{dot, smallest_eigenvalue, spd_solve, BigReal, Precision, SymMatrix};
use crate::par::Exec;
use crate::refweight::{qzm_weight_moments, Weight1D};
use rug::Float;

/// How the missing-moment vector is normalized before minimizing `⟨μ|D|μ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizationMode {
    /// `Σ μ_ℓ² = 1`: the minimum is the smallest eigenvalue of `D`.
    UnitMissingMomentVector,
    /// `μ_0 = 1`: the minimum is the Schur complement `C − Bᵀ A⁻¹ B`.
    FirstMomentOne,
}

/// Energy function value at one energy.
#[derive(Debug, Clone)]
pub struct Sample {
    pub energy: BigReal,
    pub value: BigReal,
    pub derivative: Option<BigReal>,
    /// Minimizing missing-moment vector (unit eigenvector or `μ_0 = 1` form).
    pub minimizer: Vec<BigReal>,
    /// Smallest eigenvalue was (near) degenerate; derivative came from
    /// finite differences.
    pub degenerate: bool,
}

/// A positive function of the energy parameter with a closed-form derivative.
pub trait EnergyFunction: Sync {
    fn precision(&self) -> Precision;

    fn evaluate(&self, energy: &BigReal, with_derivative: bool) -> Result<Sample>;

    fn value(&self, energy: &BigReal) -> Result<BigReal> {
        Ok(self.evaluate(energy, false)?.value)
    }

    fn derivative(&self, energy: &BigReal) -> Result<BigReal> {
        let s = self.evaluate(energy, true)?;
        Ok(s.derivative.expect("derivative requested"))
    }

    /// Smallest admissible energy, if any.
    fn domain_floor(&self) -> Option<BigReal> {
        None
    }
}

/// Moment system the problem is built from.
#[derive(Debug, Clone)]
pub enum MomentSystem {
    OneD(Recurrence1D),
    Qzm(QzmSystem),
}

/// `C`, `B`, `A` blocks of `D = [[C, Bᵀ], [B, A]]` and their energy derivatives.
#[derive(Debug, Clone)]
pub struct QuadraticFormBundle {
    pub c: BigReal,
    pub b: Vec<BigReal>,
    pub a: SymMatrix,
    pub dc: BigReal,
    pub db: Vec<BigReal>,
    pub da: SymMatrix,
}

impl QuadraticFormBundle {
    fn split(d: &SymMatrix, dd: &SymMatrix) -> Self {
        let k = d.dim();
        let idx: Vec<usize> = (1..k).collect();
        QuadraticFormBundle {
            c: d.get(0, 0).clone(),
            b: (1..k).map(|i| d.get(i, 0).clone()).collect(),
            a: d.submatrix(&idx),
            dc: dd.get(0, 0).clone(),
            db: (1..k).map(|i| dd.get(i, 0).clone()).collect(),
            da: dd.submatrix(&idx),
        }
    }

    /// The full `D` matrix rebuilt from its blocks.
    pub fn reassemble(&self) -> SymMatrix {
        SymMatrix::from_fn(self.b.len() + 1, |i, j| match (i, j) {
            (0, 0) => self.c.clone(),
            (i, 0) => self.b[i - 1].clone(),
            (i, j) => self.a.get(i - 1, j - 1).clone(),
        })
    }
}

/// A moment system paired with its orthonormal basis, built once at the
/// largest order and shared by every evaluation.
#[derive(Debug, Clone)]
pub struct Problem {
    system: MomentSystem,
    basis: OrthonormalBasis,
    mode: NormalizationMode,
    prec: Precision,
    exec: Exec,
    max_order: usize,
}

impl Problem {
    /// 1-D problem with up to `max_terms + 1` basis polynomials (`λ_I`, `I ≤ max_terms`).
    pub fn one_d(
        rec: Recurrence1D,
        weight: &Weight1D,
        max_terms: usize,
        mode: NormalizationMode,
        prec: Precision,
    ) -> Result<Self> {
        if max_terms < rec.missing_order() {
            return Err(Error::Invalid(format!(
                "order {max_terms} is below the missing order {}",
                rec.missing_order()
            )));
        }
        let moments = weight.moments(2 * max_terms, prec)?;
        let basis = build_basis(&moments.hankel(max_terms + 1)?, prec)?;
        Ok(Problem {
            system: MomentSystem::OneD(rec),
            basis,
            mode,
            prec,
            exec: Exec::default(),
            max_order: max_terms,
        })
    }

    /// Even-parity harmonic oscillator in `ξ = x²` with weight `e^{-ξ/2}/√ξ`.
    pub fn harmonic(max_terms: usize, prec: Precision) -> Result<Self> {
        Self::one_d(
            Recurrence1D::harmonic_even(prec),
            &Weight1D::HarmonicHalfLine,
            max_terms,
            NormalizationMode::UnitMissingMomentVector,
            prec,
        )
    }

    /// Zeeman problem supporting missing-moment orders `0..=max_m_s`.
    pub fn qzm(sys: QzmSystem, max_m_s: usize, prec: Precision) -> Result<Self> {
        let weights = qzm_weight_moments(&sys, max_m_s, prec)?;
        let basis = build_basis(&weights.moment_matrix(max_m_s)?, prec)?;
        Ok(Problem {
            system: MomentSystem::Qzm(sys),
            basis,
            mode: NormalizationMode::FirstMomentOne,
            prec,
            exec: Exec::default(),
            max_order: max_m_s,
        })
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    /// Multi-dimensional systems only admit `μ_0 = 1`.
    pub fn with_mode(mut self, mode: NormalizationMode) -> Result<Self> {
        if matches!(self.system, MomentSystem::Qzm(_)) && mode == NormalizationMode::UnitMissingMomentVector {
            return Err(Error::Invalid(
                "multi-dimensional systems require the first-moment normalization".into(),
            ));
        }
        self.mode = mode;
        Ok(self)
    }

    pub fn system(&self) -> &MomentSystem {
        &self.system
    }

    pub fn basis(&self) -> &OrthonormalBasis {
        &self.basis
    }

    pub fn mode(&self) -> NormalizationMode {
        self.mode
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    /// Largest order: `I` for 1-D problems, `m_s` for the Zeeman problem.
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Energy function at `order` (`I` in 1-D, `m_s` for Zeeman, using all
    /// `I_{m_s} + 1` basis polynomials).
    pub fn order(&self, order: usize) -> Result<Evaluator<'_>> {
        match &self.system {
            MomentSystem::OneD(rec) => self.evaluator(rec.missing_order(), order),
            MomentSystem::Qzm(_) => self.evaluator(order, covered_len(order) - 1),
        }
    }

    /// Energy function with `terms + 1` basis polynomials and `m_s + 1`
    /// missing moments.
    pub fn evaluator(&self, m_s: usize, terms: usize) -> Result<Evaluator<'_>> {
        if terms >= self.basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: terms + 1,
                found: self.basis.dim(),
            });
        }
        match &self.system {
            MomentSystem::OneD(rec) => {
                if m_s != rec.missing_order() || terms < m_s {
                    return Err(Error::Invalid(format!(
                        "1-D order {terms} needs at least {} terms with m_s = {}",
                        rec.missing_order(),
                        rec.missing_order()
                    )));
                }
            }
            MomentSystem::Qzm(_) => {
                if terms > covered_len(m_s) - 1 {
                    return Err(Error::CoverageMismatch(terms));
                }
            }
        }
        Ok(Evaluator {
            problem: self,
            m_s,
            terms,
        })
    }
}

/// `λ_I(E)` (1-D) or `L_I(ε)` (constrained minimum) at a fixed order.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator<'a> {
    problem: &'a Problem,
    m_s: usize,
    terms: usize,
}

impl<'a> Evaluator<'a> {
    pub fn problem(&self) -> &'a Problem {
        self.problem
    }

    pub fn missing_order(&self) -> usize {
        self.m_s
    }

    /// Highest basis index `I` in the partial sum.
    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn transfer(&self, energy: &BigReal, with_derivative: bool) -> Result<TransferTable> {
        self.check_domain(energy)?;
        match (&self.problem.system, with_derivative) {
            (MomentSystem::OneD(rec), false) => build_1d(rec, energy, self.terms),
            (MomentSystem::OneD(rec), true) => build_1d_with_derivative(rec, energy, self.terms),
            (MomentSystem::Qzm(sys), false) => build_qzm(sys, energy, self.m_s),
            (MomentSystem::Qzm(sys), true) => build_qzm_with_derivative(sys, energy, self.m_s),
        }
    }

    pub fn lambda(&self, energy: &BigReal, with_derivative: bool) -> Result<LambdaTable> {
        let t = self.transfer(energy, with_derivative)?;
        lambda_table(&self.problem.basis, &t, self.terms + 1, self.problem.exec)
    }

    /// `D(E)` and `∂D(E)`.
    pub fn quadratic_form(&self, energy: &BigReal, with_derivative: bool) -> Result<(SymMatrix, Option<SymMatrix>)> {
        Ok(self.lambda(energy, with_derivative)?.dyad_sum(self.problem.exec))
    }

    pub fn bundle(&self, energy: &BigReal) -> Result<QuadraticFormBundle> {
        let (d, dd) = self.quadratic_form(energy, true)?;
        Ok(QuadraticFormBundle::split(&d, &dd.expect("derivative requested")))
    }

    /// Projection coefficients `c_i(E)`, `i = 0..=terms`, for given missing moments.
    pub fn projection_coefficients(&self, energy: &BigReal, mu: &[BigReal]) -> Result<Vec<BigReal>> {
        self.lambda(energy, false)?.coefficients(mu)
    }

    fn check_domain(&self, energy: &BigReal) -> Result<()> {
        if let Some(floor) = self.domain_floor() {
            if *energy < floor {
                return Err(Error::Domain(format!(
                    "binding energy {} is below the weight floor {}",
                    crate::mpnum::to_decimal(energy, 20),
                    crate::mpnum::to_decimal(&floor, 20)
                )));
            }
        }
        Ok(())
    }

    fn eigen_sample(&self, energy: &BigReal, with_derivative: bool) -> Result<Sample> {
        let (d, dd) = self.quadratic_form(energy, with_derivative)?;
        let eig = smallest_eigenvalue(&d)?;
        let mut derivative = None;
        if let Some(dd) = dd {
            if eig.degenerate {
                log::warn!(
                    "near-degenerate smallest eigenvalue at E = {}; derivative by finite differences",
                    crate::mpnum::to_decimal(energy, 20)
                );
                derivative = Some(self.central_difference(energy)?);
            } else {
                derivative = Some(dd.quadratic_form(&eig.vector));
            }
        }
        Ok(Sample {
            energy: energy.clone(),
            value: eig.value,
            derivative,
            minimizer: eig.vector,
            degenerate: eig.degenerate,
        })
    }

    fn central_difference(&self, energy: &BigReal) -> Result<BigReal> {
        let prec = self.problem.prec;
        let scale = Float::with_val(prec.bits(), energy.abs_ref()).max(&prec.one());
        let h = prec.pow10(-(prec.digits() as i32) / 3) * scale;
        let hi = self.value(&Float::with_val(prec.bits(), energy + &h))?;
        let lo = self.value(&Float::with_val(prec.bits(), energy - &h))?;
        Ok((hi - lo) / (h * 2u32))
    }

    fn schur_sample(&self, energy: &BigReal, with_derivative: bool) -> Result<Sample> {
        let (d, dd) = self.quadratic_form(energy, with_derivative)?;
        let k = d.dim();
        let bits = d.prec();
        let c = d.get(0, 0).clone();
        if k == 1 {
            return Ok(Sample {
                energy: energy.clone(),
                value: c,
                derivative: dd.map(|dd| dd.get(0, 0).clone()),
                minimizer: vec![Float::with_val(bits, 1)],
                degenerate: false,
            });
        }
        let idx: Vec<usize> = (1..k).collect();
        let a = d.submatrix(&idx);
        let b: Vec<BigReal> = (1..k).map(|i| d.get(i, 0).clone()).collect();
        // u = −A⁻¹ B, L = C + B·u
        let u: Vec<BigReal> = spd_solve(&a, &b)?.into_iter().map(|x| -x).collect();
        let value = c + dot(&b, &u);
        // Envelope theorem: dL = dC + 2 dB·u + uᵀ dA u.
        let derivative = dd.map(|dd| {
            let db: Vec<BigReal> = (1..k).map(|i| dd.get(i, 0).clone()).collect();
            let da = dd.submatrix(&idx);
            dd.get(0, 0).clone() + dot(&db, &u) * 2u32 + da.quadratic_form(&u)
        });
        let mut minimizer = Vec::with_capacity(k);
        minimizer.push(Float::with_val(bits, 1));
        minimizer.extend(u);
        Ok(Sample {
            energy: energy.clone(),
            value,
            derivative,
            minimizer,
            degenerate: false,
        })
    }
}

impl EnergyFunction for Evaluator<'_> {
    fn precision(&self) -> Precision {
        self.problem.prec
    }

    fn evaluate(&self, energy: &BigReal, with_derivative: bool) -> Result<Sample> {
        let s = match self.problem.mode {
            NormalizationMode::UnitMissingMomentVector => self.eigen_sample(energy, with_derivative)?,
            NormalizationMode::FirstMomentOne => self.schur_sample(energy, with_derivative)?,
        };
        if s.value <= 0 {
            return Err(Error::PrecisionExhausted(format!(
                "non-positive quadratic form minimum {} at {}",
                crate::mpnum::to_decimal(&s.value, 12),
                crate::mpnum::to_decimal(energy, 20)
            )));
        }
        Ok(s)
    }

    fn domain_floor(&self) -> Option<BigReal> {
        match &self.problem.system {
            MomentSystem::OneD(_) => None,
            MomentSystem::Qzm(sys) => {
                let bits = self.problem.prec.bits();
                let bump = Float::with_val(bits, 1) + self.problem.prec.pow10(-6);
                Some(Float::with_val(bits, sys.eps0() * bump))
            }
        }
    }
}
